"""Live-edge topology sampling for LT and IC, plus exact enumeration.

A topology is one deterministic realization of the diffusion process: an
unweighted directed graph over the same nodes, containing only the edges
that were sampled live.  LT realizations keep at most one incoming edge per
node; IC realizations keep each edge independently with its probability.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, FormatError, ModelMismatchError, ParameterError
from .graph import IC, LT, Graph, validate
from .util import fmt_float

# Enumeration guards: IC is exponential in the edge count, LT in the product
# of per-node (indegree + 1) choices.
IC_ENUM_MAX_EDGES = 20
LT_ENUM_MAX_CHOICES = 2**20


class Topology:
    """Unweighted directed realization; optionally carries its probability mu."""

    __slots__ = ("n", "live_edges", "mu", "_out")

    def __init__(self, n: int, live_edges: Iterable[tuple[int, int]], mu: float | None = None):
        self.n = int(n)
        self.live_edges = tuple((int(s), int(d)) for s, d in live_edges)
        for s, d in self.live_edges:
            if not (0 <= s < n and 0 <= d < n):
                raise IndexError(f"live edge ({s},{d}) outside 0..{n - 1}")
        if mu is not None and not (0.0 < mu <= 1.0):
            raise ParameterError("mu must lie in (0, 1]")
        self.mu = mu
        out: list[list[int]] = [[] for _ in range(self.n)]
        for s, d in self.live_edges:
            out[s].append(d)
        self._out = tuple(tuple(a) for a in out)

    @property
    def out(self) -> tuple[tuple[int, ...], ...]:
        return self._out

    def in_parents(self) -> list[list[int]]:
        """Incoming live sources per node (unsorted)."""
        parents: list[list[int]] = [[] for _ in range(self.n)]
        for s, d in self.live_edges:
            parents[d].append(s)
        return parents

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return self.n == other.n and self.live_edges == other.live_edges and self.mu == other.mu

    def __hash__(self):
        return hash((self.n, self.live_edges, self.mu))

    def __repr__(self):
        return f"Topology(n={self.n}, live={len(self.live_edges)}, mu={self.mu})"


class TopologySet:
    """A list of topologies sharing one source graph, plus sampling metadata."""

    __slots__ = ("topologies", "source_graph_hash", "seed")

    def __init__(self, topologies: Sequence[Topology], source_graph_hash: str, seed: int):
        tops = tuple(topologies)
        if tops:
            n0 = tops[0].n
            if any(t.n != n0 for t in tops):
                raise ParameterError("all topologies in a set must share n")
        self.topologies = tops
        self.source_graph_hash = source_graph_hash
        self.seed = int(seed)

    def __len__(self) -> int:
        return len(self.topologies)

    def __iter__(self):
        return iter(self.topologies)

    def __getitem__(self, i) -> Topology:
        return self.topologies[i]

    @property
    def n(self) -> int:
        return self.topologies[0].n if self.topologies else 0

    def weights(self) -> np.ndarray:
        """Per-topology weights: exact mu when enumerated, else uniform 1/s."""
        s = len(self.topologies)
        if s == 0:
            return np.zeros(0)
        mus = [t.mu for t in self.topologies]
        if all(m is not None for m in mus):
            return np.array(mus, dtype=float)
        return np.full(s, 1.0 / s)

    def serialize(self) -> str:
        lines = [f"toposet {self.n} {len(self.topologies)} {self.seed}"]
        for idx, topo in enumerate(self.topologies):
            if topo.mu is None:
                lines.append(f"topo {idx}")
            else:
                lines.append(f"topo {idx} {fmt_float(topo.mu)}")
            for s, d in topo.live_edges:
                lines.append(f"e {s} {d}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, TopologySet):
            return NotImplemented
        return (
            self.topologies == other.topologies
            and self.source_graph_hash == other.source_graph_hash
            and self.seed == other.seed
        )

    def __hash__(self):
        return hash((self.topologies, self.source_graph_hash, self.seed))


def _check_sampling_pre(graph: Graph, model: str, s: int) -> None:
    if graph.model != model:
        raise ModelMismatchError(f"expected a {model} graph, got {graph.model}")
    if s < 0:
        raise ParameterError("sample count must be non-negative")
    report = validate(graph)
    if not report.ok:
        raise ParameterError(f"graph fails validation: {report.violations[0]}")


def _topology_rng(seed: int, index: int) -> np.random.Generator:
    # One substream per topology index: topology i is identical for any s > i,
    # which lets solvers built at different sample counts share prefixes.
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_lt(graph: Graph, s: int, seed: int) -> TopologySet:
    """Sample s LT live-edge realizations: per node, at most one incoming edge.

    For each node j the incoming edge (i -> j) is selected with probability
    w_ij, and no edge with the leftover 1 - sum of incoming weights, via a
    single uniform draw walked over incoming edges in ascending source order.
    """
    _check_sampling_pre(graph, LT, s)
    in_lists = [graph.in_neighbors(j) for j in range(graph.n)]
    topologies = []
    for t in range(s):
        rng = _topology_rng(seed, t)
        live = []
        for j in range(graph.n):
            incoming = in_lists[j]
            if not incoming:
                continue
            u = rng.random()
            acc = 0.0
            for src, w in incoming:
                acc += w
                if u < acc:
                    live.append((src, j))
                    break
        topologies.append(Topology(graph.n, live))
    return TopologySet(topologies, graph.digest(), seed)


def sample_ic(graph: Graph, s: int, seed: int) -> TopologySet:
    """Sample s IC realizations: every edge independently live with its p."""
    _check_sampling_pre(graph, IC, s)
    probs = np.array([v for _, _, v in graph.edges])
    topologies = []
    for t in range(s):
        rng = _topology_rng(seed, t)
        if graph.m:
            live_mask = rng.random(graph.m) < probs
            live = [(src, dst) for (src, dst, _), keep in zip(graph.edges, live_mask) if keep]
        else:
            live = []
        topologies.append(Topology(graph.n, live))
    return TopologySet(topologies, graph.digest(), seed)


def enumerate_all(graph: Graph) -> TopologySet:
    """Every achievable topology with its exact probability; sum of mu is 1.

    Zero-probability realizations (an edge with p = 0 live, or p = 1 dead)
    are omitted, so every returned mu is positive.
    """
    report = validate(graph)
    if not report.ok:
        raise ParameterError(f"graph fails validation: {report.violations[0]}")
    if graph.model == IC:
        return _enumerate_ic(graph)
    return _enumerate_lt(graph)


def _enumerate_ic(graph: Graph) -> TopologySet:
    if graph.m > IC_ENUM_MAX_EDGES:
        raise CapacityError(
            f"IC enumeration needs 2^{graph.m} topologies; guard is 2^{IC_ENUM_MAX_EDGES}"
        )
    # Per-edge options: (live?, factor); drop impossible branches up front.
    options = []
    for src, dst, p in graph.edges:
        opts = []
        if p > 0.0:
            opts.append((True, p))
        if p < 1.0:
            opts.append((False, 1.0 - p))
        options.append(opts)
    topologies = []
    for combo in itertools.product(*options):
        mu = 1.0
        live = []
        for (is_live, factor), (src, dst, _) in zip(combo, graph.edges):
            mu *= factor
            if is_live:
                live.append((src, dst))
        topologies.append(Topology(graph.n, live, mu=mu))
    if not topologies:
        topologies.append(Topology(graph.n, [], mu=1.0))
    return TopologySet(topologies, graph.digest(), seed=0)


def _enumerate_lt(graph: Graph) -> TopologySet:
    total_choices = 1
    for j in range(graph.n):
        total_choices *= len(graph.in_neighbors(j)) + 1
        if total_choices > LT_ENUM_MAX_CHOICES:
            raise CapacityError(
                f"LT enumeration exceeds {LT_ENUM_MAX_CHOICES} per-node choice combinations"
            )
    # Per-node options: each incoming edge with its weight, or none with the
    # leftover probability.  Nodes without incoming edges contribute factor 1.
    options = []
    for j in range(graph.n):
        incoming = graph.in_neighbors(j)
        if not incoming:
            continue
        opts: list[tuple[tuple[int, int] | None, float]] = []
        total = 0.0
        for src, w in incoming:
            total += w
            if w > 0.0:
                opts.append(((src, j), w))
        if 1.0 - total > 0.0:
            opts.append((None, 1.0 - total))
        options.append(opts)
    topologies = []
    for combo in itertools.product(*options):
        mu = 1.0
        live = []
        for choice, factor in combo:
            mu *= factor
            if choice is not None:
                live.append(choice)
        live.sort()
        topologies.append(Topology(graph.n, live, mu=mu))
    return TopologySet(topologies, graph.digest(), seed=0)


def write_topology_set(ts: TopologySet, path) -> None:
    with open(path, "w") as fh:
        fh.write(ts.serialize())


def read_topology_set(path, source_graph_hash: str = "") -> TopologySet:
    """Parse the text format written by write_topology_set."""
    n = None
    expected = None
    seed = 0
    topologies: list[Topology] = []
    edges: list[tuple[int, int]] = []
    mu: float | None = None
    started = False

    def flush():
        topologies.append(Topology(n, edges, mu=mu))

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "toposet":
                    n = int(parts[1])
                    expected = int(parts[2])
                    seed = int(parts[3])
                elif parts[0] == "topo":
                    if n is None:
                        raise FormatError(f"line {lineno}: 'topo' before header")
                    if started:
                        flush()
                    started = True
                    edges = []
                    mu = float(parts[2]) if len(parts) > 2 else None
                elif parts[0] == "e":
                    edges.append((int(parts[1]), int(parts[2])))
                else:
                    raise FormatError(f"line {lineno}: unknown record {parts[0]!r}")
            except (IndexError, ValueError) as exc:
                if isinstance(exc, FormatError):
                    raise
                raise FormatError(f"line {lineno}: cannot parse {line!r}") from exc
    if n is None:
        raise FormatError("missing 'toposet <n> <s> <seed>' header line")
    if started:
        flush()
    if expected is not None and expected != len(topologies):
        raise FormatError(f"header promises {expected} topologies, found {len(topologies)}")
    return TopologySet(topologies, source_graph_hash, seed)
