"""Classical sampling of cluster circuits with cylinder inputs.

Each CZ is replaced by its stochastic separable update, so the state stays
a product of cylinder extrema throughout; measurements are then sampled
from single-qubit Born values.  This is efficient whenever every vertex v
satisfies r_v <= growth^(-D_v) with D_v the vertex degree, since radii grow
by the factor `growth` per incident gate and must end inside the unit
cylinder (the dual of the allowed measurements).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .circuits import ClusterCircuit, resolve_alpha
from .czdec import (
    LAMBDA,
    StochasticRep,
    apply_branch,
    apply_stochastic,
    build_decomposition,
)
from .geometry import Measurement, measure_prob, to_bloch

#: relative headroom between the sampler's growth factor and the critical one
DEFAULT_GROWTH_MARGIN = 1e-3

#: angle grid used for the cached decomposition; 128 leaves provable
#: feasibility slack at f = 1/(LAMBDA*(1+margin)) where 64 does not
REP_GRID_SIZE = 128

RADIUS_TOL = 1e-9


@dataclass(frozen=True)
class VertexBound:
    vertex: int
    degree: int
    radius: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class SimulabilityReport:
    growth: float
    vertices: tuple[VertexBound, ...]

    @property
    def simulable(self) -> bool:
        return all(v.ok for v in self.vertices)


def check_simulable(c: ClusterCircuit, growth: float) -> SimulabilityReport:
    """Per-vertex radius bounds growth^(-D_v) and whether the inputs meet them."""
    if growth <= 1.0:
        raise ValueError("growth must exceed 1")
    rows = []
    for v in range(c.n_qubits):
        d = c.degree(v)
        bound = growth ** (-d)
        r = c.inputs[v].r
        rows.append(VertexBound(v, d, r, bound, r <= bound + 1e-12))
    return SimulabilityReport(growth=growth, vertices=tuple(rows))


def default_rep(growth_margin: float = DEFAULT_GROWTH_MARGIN) -> StochasticRep:
    """Cached stochastic CZ representation at growth LAMBDA*(1+margin)."""
    key = round(growth_margin, 15)
    rep = _REP_CACHE.get(key)
    if rep is None:
        g = LAMBDA * (1.0 + growth_margin)
        rep = build_decomposition(1.0 / g, grid_size=REP_GRID_SIZE, tol=1e-6)
        _REP_CACHE[key] = rep
    return rep


_REP_CACHE: dict[float, StochasticRep] = {}


def run_shot(c: ClusterCircuit, rep: StochasticRep, rng: np.random.Generator) -> str:
    """One sampled outcome bitstring (position v holds vertex v's bit)."""
    u = rng.random(len(c.edges) + c.n_qubits)
    state = list(c.inputs)
    for i, (a, b) in enumerate(c.edges):
        state[a], state[b] = apply_stochastic(state[a], state[b], rep, u[i])
    for v, e in enumerate(state):
        if e.r > 1.0 + RADIUS_TOL:
            raise RuntimeError(
                f"vertex {v} left the unit cylinder (radius {e.r}); "
                "circuit does not satisfy the simulability bounds"
            )
    outcomes: dict[int, int] = {}
    base = len(c.edges)
    for k, v in enumerate(c.order):
        rule = c.plan[v]
        m = Measurement(rule.kind, resolve_alpha(rule, outcomes))
        p0 = measure_prob(to_bloch(state[v]), m, 0)
        p0 = min(1.0, max(0.0, p0))
        outcomes[v] = 0 if u[base + k] < p0 else 1
    return "".join(str(outcomes[v]) for v in range(c.n_qubits))


def sample(
    c: ClusterCircuit,
    shots: int,
    seed: int,
    rep: StochasticRep | None = None,
    growth_margin: float = DEFAULT_GROWTH_MARGIN,
) -> dict[str, int]:
    """Aggregate independent shots into a bitstring -> count table.

    Each shot draws from its own counter-based stream keyed by (seed, shot),
    so the table is reproducible under any parallel schedule.
    """
    if shots < 0:
        raise ValueError("shots must be nonnegative")
    if rep is None:
        rep = default_rep(growth_margin)
    report = check_simulable(c, rep.growth)
    if not report.simulable:
        bad = [v for v in report.vertices if not v.ok]
        raise ValueError(
            "circuit not simulable at growth "
            f"{rep.growth:.6f}: vertices {[v.vertex for v in bad]} exceed their bounds"
        )
    counts: dict[str, int] = {}
    for shot in range(shots):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, shot], dtype=np.uint64)))
        s = run_shot(c, rep, rng)
        counts[s] = counts.get(s, 0) + 1
    return counts


def exact_branch_distribution(
    c: ClusterCircuit, rep: StochasticRep, max_edges: int = 3
) -> dict[str, float]:
    """Exact output distribution of the stochastic sampler (no Monte Carlo).

    Enumerates every combination of decomposition branches across edges and
    every outcome history; exponential in the edge count, so capped small.
    Used to check edge-order invariance and to validate the sampler itself.
    """
    if len(c.edges) > max_edges:
        raise ValueError(f"exact enumeration capped at {max_edges} edges")
    dist: dict[str, float] = {}
    for combo in itertools.product(rep.branches, repeat=len(c.edges)):
        w = math.prod(b[0] for b in combo)
        state = list(c.inputs)
        for (a, b), (_, da, db) in zip(c.edges, combo):
            state[a], state[b] = apply_branch(state[a], state[b], rep.growth, da, db)
        _accumulate_outcomes(c, state, w, dist)
    return dist


def _accumulate_outcomes(
    c: ClusterCircuit,
    state: list,
    weight: float,
    dist: dict[str, float],
) -> None:
    stack = [(0, weight, {})]
    while stack:
        k, w, outcomes = stack.pop()
        if k == c.n_qubits:
            s = "".join(str(outcomes[v]) for v in range(c.n_qubits))
            dist[s] = dist.get(s, 0.0) + w
            continue
        v = c.order[k]
        rule = c.plan[v]
        m = Measurement(rule.kind, resolve_alpha(rule, outcomes))
        p0 = measure_prob(to_bloch(state[v]), m, 0)
        for outcome, pv in ((0, p0), (1, 1.0 - p0)):
            if abs(pv) < 1e-15:
                continue
            nxt = dict(outcomes)
            nxt[v] = outcome
            stack.append((k + 1, w * pv, nxt))


def _sample_range(args: tuple[str, str, int, int, int]) -> dict[str, int]:
    """Worker for parallel sampling: shots [start, stop) of a serialized job."""
    circuit_json, rep_json, start, stop, seed = args
    c = ClusterCircuit.from_json(circuit_json)
    rep = StochasticRep.from_json(rep_json)
    counts: dict[str, int] = {}
    for shot in range(start, stop):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, shot], dtype=np.uint64))
        )
        s = run_shot(c, rep, rng)
        counts[s] = counts.get(s, 0) + 1
    return counts


def sample_parallel(
    c: ClusterCircuit,
    shots: int,
    seed: int,
    rep: StochasticRep,
    threads: int,
) -> dict[str, int]:
    """Same table as sample(); shots split across worker processes.

    Per-shot counter-based streams make the result identical to the serial
    run regardless of how the ranges are scheduled.
    """
    if threads <= 1 or shots < 2 * threads:
        report = check_simulable(c, rep.growth)
        if not report.simulable:
            raise ValueError("circuit not simulable at the given growth")
        return _sample_range((c.to_json(), rep.to_json(), 0, shots, seed))
    report = check_simulable(c, rep.growth)
    if not report.simulable:
        raise ValueError("circuit not simulable at the given growth")
    from concurrent.futures import ProcessPoolExecutor

    bounds = [shots * i // threads for i in range(threads + 1)]
    jobs = [
        (c.to_json(), rep.to_json(), bounds[i], bounds[i + 1], seed)
        for i in range(threads)
    ]
    counts: dict[str, int] = {}
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_sample_range, jobs):
            for k, v in part.items():
                counts[k] = counts.get(k, 0) + v
    return counts
