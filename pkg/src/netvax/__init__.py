"""netvax: vaccination-set selection to limit diffusion on contact networks.

Selects k nodes to vaccinate so that the expected number of infections under
linear threshold or independent cascade diffusion is minimized, working over
sampled live-edge topologies.  Provides an exact binary LP, a relaxed LP with
two rounding schemes, greedy and local-search heuristics, brute-force
oracles, spatial graph generators, and a benchmarking CLI.
"""

from .bench import (
    ALGORITHMS,
    ExperimentConfig,
    ResultRow,
    SampleDispersion,
    emit_csv,
    emit_plot_data,
    read_csv,
    run_experiment,
    sweep_budget,
    sweep_samples,
)
from .errors import (
    CapacityError,
    ContractViolationError,
    FormatError,
    ModelMismatchError,
    ParameterError,
)
from .generators import (
    CityModel,
    CityRecord,
    WaxmanParams,
    assign_ic_probs,
    assign_lt_weights,
    generate_city,
    generate_er,
    generate_gaussian_waxman,
    load_city_dataset,
    waxman_edge_prob,
)
from .graph import (
    IC,
    LT,
    Graph,
    ValidationReport,
    Violation,
    in_neighbors,
    read_graph,
    validate,
    write_graph,
)
from .heuristics import SolverResult, greedy, hill_climb, local_search
from .lp import (
    LpModel,
    LpSolution,
    build_model,
    round_irp,
    round_tkr,
    solve,
    solve_blp,
    verify_solution,
    write_lp_file,
)
from .spread import (
    ProblemInstance,
    SpreadResult,
    VaccinationSet,
    Witness,
    WitnessSearchResult,
    avg_saved,
    exhaustive_optimal,
    find_modularity_witness,
    infected_on,
    marginal_gain,
    saved_on,
)
from .topology import (
    Topology,
    TopologySet,
    enumerate_all,
    read_topology_set,
    sample_ic,
    sample_lt,
    write_topology_set,
)

__version__ = "0.1.0"
