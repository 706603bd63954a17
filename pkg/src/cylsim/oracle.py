"""Exact dense reference for small circuits.

Builds the full 2^n x 2^n operator (inputs may be non-positive
quasi-states), applies CZ gates by elementwise sign masks, and enumerates
the adaptive measurement tree exactly.  Deliberately method-independent of
the sampler: no separable decompositions, no stabilizer shortcuts.
"""

from __future__ import annotations

import math

import numpy as np

from .circuits import ClusterCircuit, resolve_alpha
from .geometry import XY_PLANE, CylinderExtremum, to_bloch

DENSE_CAP = 14

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def extremum_matrix(e: CylinderExtremum) -> np.ndarray:
    """2x2 operator (I + x X + y Y + z Z)/2 of a cylinder extremum."""
    op = to_bloch(e)
    return 0.5 * (PAULI[0] + op.x * PAULI[1] + op.y * PAULI[2] + op.z * PAULI[3])


def _cz_signs(n: int, edges) -> np.ndarray:
    """(-1)^(sum over edges of s_u s_v) for every basis state, shape (2,)*n."""
    signs = np.ones((2,) * n)
    for u, v in edges:
        bits_u = np.arange(2).reshape([2 if q == u else 1 for q in range(n)])
        bits_v = np.arange(2).reshape([2 if q == v else 1 for q in range(n)])
        signs = signs * np.where(bits_u * bits_v == 1, -1.0, 1.0)
    return signs


def dense_output(c: ClusterCircuit, edges=None) -> np.ndarray:
    """Tensor product of the inputs conjugated by every CZ in the circuit.

    CZ is real diagonal, so conjugation multiplies entry (s, t) by the
    product of the basis-state signs of s and t.
    """
    n = c.n_qubits
    if n > DENSE_CAP:
        raise ValueError(f"dense backend capped at {DENSE_CAP} qubits, got {n}")
    if edges is None:
        edges = c.edges
    rho = extremum_matrix(c.inputs[0])
    for v in range(1, n):
        rho = np.kron(rho, extremum_matrix(c.inputs[v]))
    s = _cz_signs(n, edges).ravel()
    return rho * np.outer(s, s)


def _outcome_vector(kind: str, alpha: float, outcome: int) -> np.ndarray:
    if kind == XY_PLANE:
        sign = 1.0 if outcome == 0 else -1.0
        return np.array([1.0, sign * np.exp(1j * alpha)]) / math.sqrt(2.0)
    return np.array([1.0, 0.0]) if outcome == 0 else np.array([0.0, 1.0])


def exact_distribution(c: ClusterCircuit, prune: float = 1e-14) -> dict[str, float]:
    """Signed measure over outcome bitstrings, exact for any dense-cap circuit.

    Adaptive angles are resolved along each branch of the outcome tree.
    Values may be negative when inputs leave the unit cylinder; they always
    sum to 1 (trace preservation).
    """
    n = c.n_qubits
    rho = dense_output(c).reshape((2,) * (2 * n))
    dist: dict[str, float] = {}
    # entries: (depth k, remaining-qubit list, tensor, outcome history)
    stack = [(0, list(range(n)), rho, {})]
    while stack:
        k, remaining, t, outcomes = stack.pop()
        if k == n:
            s = "".join(str(outcomes[v]) for v in range(n))
            dist[s] = dist.get(s, 0.0) + float(np.real(t))
            continue
        v = c.order[k]
        rule = c.plan[v]
        alpha = resolve_alpha(rule, outcomes)
        i = remaining.index(v)
        m = len(remaining)
        for outcome in (0, 1):
            vec = _outcome_vector(rule.kind, alpha, outcome)
            a = np.tensordot(t, vec.conj(), axes=([i], [0]))
            b = np.tensordot(a, vec, axes=([m - 1 + i], [0]))
            # branch weight = trace over the remaining qubits
            wval = _full_trace(b, m - 1)
            if abs(wval) < prune:
                continue
            nxt = dict(outcomes)
            nxt[v] = outcome
            rem = remaining[:i] + remaining[i + 1 :]
            stack.append((k + 1, rem, b, nxt))
    return dist


def _full_trace(t: np.ndarray, m: int) -> float:
    """Trace of a (2,)*2m row/column tensor."""
    if m == 0:
        return float(np.real(t))
    mat = t.reshape(2**m, 2**m)
    return float(np.real(np.trace(mat)))


def tv_distance(p: dict[str, float], q: dict[str, float]) -> float:
    """Half the L1 distance over the union support."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def normalize_counts(counts: dict[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {k: v / total for k, v in counts.items()}


def partial_trace_keep(rho: np.ndarray, n: int, keep: list[int]) -> np.ndarray:
    """Marginal operator on the qubits in `keep` (sorted order)."""
    t = rho.reshape((2,) * (2 * n))
    remaining = list(range(n))
    for q in sorted(set(range(n)) - set(keep), reverse=True):
        i = remaining.index(q)
        m = len(remaining)
        t = np.trace(t, axis1=i, axis2=m + i)
        t = t.reshape((2,) * (2 * (m - 1)))
        remaining.pop(i)
    k = len(keep)
    return t.reshape(2**k, 2**k)


def marginal_invariance_check(c: ClusterCircuit, region: set[int]) -> float:
    """Max-norm change of each side's marginal when cross-region CZs are added.

    For circuits whose inputs are all rim extrema with pole +1, the marginal
    of either region is unaffected by CZs crossing the cut; the returned
    deviation should vanish to numerical precision.
    """
    n = c.n_qubits
    region = set(region)
    other = sorted(set(range(n)) - region)
    inside = tuple(
        e for e in c.edges if not ((e[0] in region) ^ (e[1] in region))
    )
    rho_full = dense_output(c)
    rho_cut = dense_output(c, edges=inside)
    dev = 0.0
    for keep in (sorted(region), other):
        if not keep:
            continue
        d = partial_trace_keep(rho_full, n, keep) - partial_trace_keep(rho_cut, n, keep)
        dev = max(dev, float(np.max(np.abs(d))))
    return dev


def pauli_coefficients(rho: np.ndarray, n: int) -> np.ndarray:
    """Real coefficient tensor c with rho = (1/2^n) sum c[i...] sigma_i x ...

    Shape (4,)*n; for a unit-trace operator c[0,...,0] = 1.
    """
    out = np.empty((4,) * n)
    for idx in np.ndindex(*(4,) * n):
        op = PAULI[idx[0]]
        for i in idx[1:]:
            op = np.kron(op, PAULI[i])
        val = np.trace(rho @ op)
        out[idx] = float(np.real(val))
    return out
