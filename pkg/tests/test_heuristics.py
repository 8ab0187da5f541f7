import numpy as np
import pytest

from conftest import random_instance, single_topology_instance

from netvax import (
    IC,
    Graph,
    ProblemInstance,
    Topology,
    TopologySet,
    VaccinationSet,
    avg_saved,
    exhaustive_optimal,
    greedy,
    hill_climb,
    local_search,
    sample_ic,
)
from netvax.errors import ContractViolationError
from netvax.heuristics import greedy_trajectory


def hub_instance(k=1):
    # seed 0 infects hub 1, which fans out to 2..5
    edges = [(0, 1)] + [(1, j) for j in range(2, 6)]
    return single_topology_instance(6, edges, infected={0}, k=k)


# --- greedy -----------------------------------------------------------------


def test_greedy_zero_budget():
    res = greedy(hub_instance(k=0))
    assert res.vaccination.nodes == frozenset()
    assert res.iterations == 0


def test_greedy_picks_hub():
    res = greedy(hub_instance())
    assert res.vaccination.nodes == {1}
    assert res.per_topology_saved == (5,)
    # cross-check: enumerate all five candidates
    gains = {v: avg_saved(hub_instance(), {v}).avg_saved for v in range(1, 6)}
    assert max(gains.values()) == gains[1] == 5.0


def test_greedy_never_beats_oracle():
    for seed in range(10):
        inst = random_instance(seed, n=9, s=3, n_infected=2, k=2)
        res = greedy(inst)
        _, best = exhaustive_optimal(inst)
        assert res.avg_saved <= best + 1e-9


def test_greedy_uses_full_budget_even_with_zero_gains():
    # no edges at all: every gain is zero, lowest-index candidates fill the set
    g = Graph(5, [], IC)
    ts = TopologySet([Topology(5, [])], "", 0)
    inst = ProblemInstance(g, frozenset({2}), 2, ts)
    res = greedy(inst)
    assert res.vaccination.nodes == {0, 1}


def test_greedy_deterministic_and_mode_invariant():
    for seed in range(6):
        inst = random_instance(seed, n=12, s=4, n_infected=2, k=3)
        a = greedy(inst, evaluation="bfs")
        b = greedy(inst, evaluation="structural")
        assert a.vaccination == b.vaccination
        assert a.avg_saved == b.avg_saved
        assert greedy(inst).vaccination == a.vaccination


def test_greedy_result_consistency():
    inst = random_instance(4, n=10, s=3, k=2)
    res = greedy(inst)
    recomputed = avg_saved(inst, res.vaccination)
    assert res.avg_saved == recomputed.avg_saved
    assert res.per_topology_saved == recomputed.per_topology_saved
    assert res.iterations == len(res.vaccination.nodes) == min(
        inst.k, inst.n - len(inst.infected)
    )


def test_greedy_trajectory_matches_individual_runs():
    for seed in range(4):
        inst = random_instance(seed, n=12, s=4, n_infected=1, k=5)
        traj = greedy_trajectory(inst, [0, 2, 5], evaluation="structural")
        for k in (0, 2, 5):
            sub = ProblemInstance(inst.graph, inst.infected, k, inst.topologies)
            assert traj[k].vaccination == greedy(sub).vaccination
            assert traj[k].avg_saved == greedy(sub).avg_saved


def test_greedy_trajectory_budget_range_checked():
    inst = random_instance(1, n=8, k=2)
    with pytest.raises(ContractViolationError):
        greedy_trajectory(inst, [5])


# --- local search ------------------------------------------------------------


def test_local_search_fixpoint():
    inst = hub_instance()
    res = local_search(inst, {1})
    assert res.vaccination.nodes == {1}
    assert res.iterations == 1


def test_local_search_chain_swap():
    # chain 0 -> 1 -> 2 -> 3 with seed 0: {v2} saves 2, its neighbor v1 saves 3
    inst = single_topology_instance(4, [(0, 1), (1, 2), (2, 3)], infected={0}, k=1)
    res = local_search(inst, {2})
    assert res.vaccination.nodes == {1}
    assert res.avg_saved == 3.0


def test_local_search_only_improves():
    for seed in range(8):
        inst = random_instance(seed, n=12, s=4, n_infected=2, k=3)
        g = greedy(inst)
        res = local_search(inst, g.vaccination)
        assert res.avg_saved >= g.avg_saved
        assert len(res.vaccination.nodes) == len(g.vaccination.nodes)
        assert not (res.vaccination.nodes & inst.infected)


def test_local_search_rejects_bad_start():
    inst = hub_instance()
    with pytest.raises(ContractViolationError):
        local_search(inst, {0})  # vaccinating the seed
    with pytest.raises(ContractViolationError):
        local_search(inst, {1, 2})  # over budget


def test_local_search_empty_start_converges():
    inst = hub_instance(k=0)
    res = local_search(inst, set())
    assert res.vaccination.nodes == frozenset()
    assert res.iterations == 1


# --- hill climbing ------------------------------------------------------------


def test_hill_climb_fixpoint():
    res = hill_climb(hub_instance(), {1})
    assert res.vaccination.nodes == {1}


def test_hill_climb_reaches_beyond_graph_neighbors():
    # start far from the infection: local search is stuck (its only swap
    # neighbor is useless) while hill climbing jumps to the cut node
    edges = [(0, 1), (1, 2), (3, 4)]
    inst = single_topology_instance(5, edges, infected={0}, k=1)
    ls = local_search(inst, {3})
    hc = hill_climb(inst, {3})
    assert ls.vaccination.nodes == {3}  # stuck
    assert hc.vaccination.nodes == {1}
    _, best = exhaustive_optimal(inst)
    assert hc.avg_saved == best == 4.0


def test_hill_climb_never_below_greedy():
    for seed in range(8):
        inst = random_instance(seed, n=12, s=4, n_infected=2, k=3)
        g = greedy(inst)
        res = hill_climb(inst, g.vaccination)
        assert res.avg_saved >= g.avg_saved
        assert len(res.vaccination.nodes) == len(g.vaccination.nodes)


def test_hill_climb_deterministic():
    inst = random_instance(9, n=12, s=4, n_infected=1, k=3)
    S0 = greedy(inst).vaccination
    assert hill_climb(inst, S0).vaccination == hill_climb(inst, S0).vaccination


def test_heuristics_accept_vaccination_set_or_iterable():
    inst = hub_instance()
    a = local_search(inst, VaccinationSet(frozenset({2})))
    b = local_search(inst, [2])
    assert a.vaccination == b.vaccination


def test_improvement_chain_on_random_instances():
    # saved(ls(greedy)) >= saved(greedy) and saved(hc(greedy)) >= saved(greedy)
    for seed in range(6):
        inst = random_instance(seed, n=14, s=5, n_infected=2, k=3)
        g = greedy(inst)
        assert local_search(inst, g.vaccination).avg_saved >= g.avg_saved
        assert hill_climb(inst, g.vaccination).avg_saved >= g.avg_saved
