"""Qudit systems with a privileged basis: Z-basis plus equatorial measurements.

The unit state space is the normalized dual of those measurements.  Two
identities express any off-diagonal element of a unit-trace operator in
terms of equatorial outcome values, proving duals are Hermitian and
bounded.  For gates diagonal in the privileged basis, a Z8 phase-averaging
trick decomposes the (dephased) gate output into products of local dual
operators; the amount of dephasing the trick tolerates gives a lower bound
on the disentangling constant of the gate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_D_ENUM = 12
MAX_N_DECOMP = 6

OMEGA8 = np.exp(2j * np.pi / 8.0)


def _sign_vectors(d: int) -> np.ndarray:
    """All (|0> + |1> +- |2> +- ... +- |d-1>)/sqrt(d), shape (2^(d-2), d)."""
    out = []
    for signs in itertools.product((1.0, -1.0), repeat=max(d - 2, 0)):
        v = np.ones(d)
        v[2:] = signs
        out.append(v / math.sqrt(d))
    return np.array(out)


def offdiag_identity_check(rho: np.ndarray) -> tuple[float, float]:
    """Gaps of the two off-diagonal reconstruction identities (expected 0).

    First: <0|rho|1> + <1|rho|0> = -1 + d/2^(d-2) * sum_v <v|rho|v> over all
    sign vectors v.  Second: with <0|rho|1> = t exp(i w), the same sum with
    |0> rotated by exp(i w) recovers 2t.  Requires unit trace; the second
    identity additionally uses Hermiticity of the (0,1) pair.
    """
    d = rho.shape[0]
    if rho.shape != (d, d) or d < 2:
        raise ValueError("rho must be a d x d matrix with d >= 2")
    if d > MAX_D_ENUM:
        raise ValueError(f"sign-vector enumeration capped at d = {MAX_D_ENUM}")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValueError("rho must have unit trace")
    scale = d / 2.0 ** (d - 2)

    vs = _sign_vectors(d)
    total = float(np.real(np.einsum("vi,ij,vj->", vs, rho, vs)))
    lhs1 = rho[0, 1] + rho[1, 0]
    gap1 = abs(lhs1 - (-1.0 + scale * total))

    t = abs(rho[0, 1])
    w = np.angle(rho[0, 1]) if t > 0 else 0.0
    vst = vs.astype(complex).copy()
    vst[:, 0] = vst[:, 0] * np.exp(1j * w)
    total2 = float(np.real(np.einsum("vi,ij,vj->", np.conj(vst), rho, vst)))
    gap2 = abs(2.0 * t - (-1.0 + scale * total2))
    return gap1, gap2


def equatorial_vectors(d: int, grid: int) -> np.ndarray:
    """Product phase grid of unbiased vectors (1, e^{i p1}, ...)/sqrt(d)."""
    phases = 2.0 * np.pi * np.arange(grid) / grid
    out = []
    for combo in itertools.product(range(grid), repeat=d - 1):
        v = np.ones(d, dtype=complex)
        for k, g in enumerate(combo):
            v[k + 1] = np.exp(1j * phases[g])
        out.append(v / math.sqrt(d))
    return np.array(out)


def dual_membership(rho: np.ndarray, grid: int = 16) -> float:
    """Minimum measurement value over basis projectors and an equatorial grid.

    A nonnegative result certifies membership at the grid resolution; the
    input need not have unit trace (cone membership test).
    """
    d = rho.shape[0]
    best = min(float(np.real(rho[j, j])) for j in range(d))
    vs = equatorial_vectors(d, grid)
    vals = np.real(np.einsum("vi,ij,vj->v", np.conj(vs), rho, vs)) / 1.0
    return min(best, float(np.min(vals)))


@dataclass(frozen=True)
class PhaseDecomposition:
    """Uniform mixture over Z8 tuples whose cross terms phase-cancel."""

    d: int
    a: tuple[int, ...]
    x: tuple[int, ...]
    y: tuple[int, ...]
    site_coeff: complex  # per-site E_j coefficient, = (eta c)^{1/N}
    W: float
    terms: tuple[tuple[float, tuple[int, ...]], ...]  # (weight, v tuple)

    def site_factor(self, j: int, v_j: int) -> np.ndarray:
        d = self.d
        F = np.zeros((d, d), dtype=complex)
        F[self.a[j], self.a[j]] = 1.0
        wj = self.W ** (1.0 / len(self.a)) * self.site_coeff
        F[self.x[j], self.y[j]] += wj * OMEGA8**v_j
        F[self.y[j], self.x[j]] += np.conj(wj * OMEGA8**v_j)
        return F

    def reconstruct(self) -> np.ndarray:
        n = len(self.a)
        total = np.zeros((self.d**n, self.d**n), dtype=complex)
        for weight, vtuple in self.terms:
            prod = np.array([[1.0]], dtype=complex)
            for j in range(n):
                prod = np.kron(prod, self.site_factor(j, vtuple[j]))
            total += weight * prod
        return total

    def target(self) -> np.ndarray:
        n = len(self.a)
        t = np.zeros((self.d**n, self.d**n), dtype=complex)

        def basis_index(labels):
            idx = 0
            for l in labels:
                idx = idx * self.d + l
            return idx

        t[basis_index(self.a), basis_index(self.a)] = 1.0
        e = self.W * self.site_coeff ** len(self.a)
        t[basis_index(self.x), basis_index(self.y)] += e
        t[basis_index(self.y), basis_index(self.x)] += np.conj(e)
        return t


def phase_decompose(
    d: int,
    a,
    x,
    y,
    coeff: complex,
    W: float,
) -> PhaseDecomposition:
    """Z8 separable decomposition of |a><a| + W c (x><y| term) + h.c.

    coeff is the full N-site coefficient c; each site factor carries its
    principal N-th root.  Enumerates all 8^(N-1) tuples with the last entry
    fixed to minus the sum of the others, each with weight 1/8^(N-1).
    """
    a, x, y = tuple(a), tuple(x), tuple(y)
    n = len(a)
    if not (len(x) == len(y) == n):
        raise ValueError("a, x, y must have equal length")
    if x == y:
        raise ValueError("x and y must differ as strings")
    if n > MAX_N_DECOMP:
        raise ValueError(f"enumeration capped at N = {MAX_N_DECOMP}")
    site_coeff = complex(coeff) ** (1.0 / n)
    weight = 1.0 / 8 ** (n - 1)
    terms = []
    for head in itertools.product(range(8), repeat=n - 1):
        v_n = (-sum(head)) % 8
        terms.append((weight, head + (v_n,)))
    return PhaseDecomposition(
        d=d, a=a, x=x, y=y, site_coeff=site_coeff, W=float(W), terms=tuple(terms)
    )


def max_dual_offdiag(d: int, grid: int = 64, tol: float = 1e-9) -> float:
    """Largest t with |0><0| + t(|0><1| + |1><0|) in the dual, by bisection."""
    base = np.zeros((d, d), dtype=complex)
    base[0, 0] = 1.0
    off = np.zeros((d, d), dtype=complex)
    off[0, 1] = off[1, 0] = 1.0
    lo, hi = 0.0, 1.0
    while dual_membership(base + hi * off, grid) >= -tol:
        lo = hi
        hi *= 2.0
        if hi > 16.0:
            return lo
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if dual_membership(base + mid * off, grid) >= -tol:
            lo = mid
        else:
            hi = mid
    return lo


def _diag_is_product(phases: np.ndarray, d: int, n: int) -> bool:
    """Whether the gate's diagonal factors into per-site diagonals."""
    t = phases.reshape((d,) * n)
    for axis in range(1, n):
        mat = np.moveaxis(t, axis, 0).reshape(d, -1)
        # all columns proportional to the first nonzero one
        ref = mat[:, 0]
        if np.max(np.abs(mat - np.outer(ref, mat[0, :] / ref[0]))) > 1e-10:
            return False
    return True


def estimate_c(
    diag: np.ndarray,
    d: int,
    n: int,
    eta_grid: int = 200,
    meas_grid: int = 32,
    tol: float = 1e-9,
) -> float:
    """Construction lower bound on the disentangling constant of a diagonal gate.

    Feeds worst-case extremal inputs |0><0| + t_max (|0><1| + h.c.) per site
    through the gate, dephases off-diagonals by eta, splits into one term
    per unordered off-diagonal pair, and accepts eta when every local factor
    of the Z8 decomposition sits in the dual (grid-checked).  Returns the
    largest accepted eta on the grid; this bounds c from below only for this
    particular decomposition, not in general.
    """
    if n > 3 or d > 4:
        raise ValueError("estimate_c capped at N <= 3, d <= 4")
    phases = np.asarray(diag, dtype=complex)
    if phases.shape != (d**n,):
        raise ValueError("diag must list d^n phases")
    if np.max(np.abs(np.abs(phases) - 1.0)) > 1e-9:
        raise ValueError("gate must be unitary (unimodular diagonal)")
    if _diag_is_product(phases, d, n):
        # the gate is a product of local diagonals: outputs of product
        # inputs stay product, no dephasing is needed
        return 1.0

    t_max = max_dual_offdiag(d, grid=meas_grid)
    site = np.zeros((d, d), dtype=complex)
    site[0, 0] = 1.0
    site[0, 1] = site[1, 0] = t_max
    rho = np.array([[1.0]], dtype=complex)
    for _ in range(n):
        rho = np.kron(rho, site)
    rho = rho * np.outer(phases, np.conj(phases))

    labels = list(itertools.product(range(d), repeat=n))
    idx = {lab: i for i, lab in enumerate(labels)}
    pairs = []
    for i, mx in enumerate(labels):
        for j, my in enumerate(labels):
            if i < j and abs(rho[i, j]) > 1e-14:
                pairs.append((mx, my, rho[i, j]))
    W = len(pairs)
    if W == 0:
        return 1.0
    a = (0,) * n

    def factor_ok(eta: float) -> bool:
        for mx, my, c in pairs:
            w = W ** (1.0 / n) * abs(eta * c) ** (1.0 / n)
            for j in range(n):
                if mx[j] == my[j]:
                    # both legs land on |a_j><a_j|; worst phase subtracts
                    if 1.0 - 2.0 * w < -tol:
                        return False
                    continue
                F = np.zeros((d, d), dtype=complex)
                F[a[j], a[j]] = 1.0
                F[mx[j], my[j]] += w
                F[my[j], mx[j]] += w
                if dual_membership(F, meas_grid) < -tol:
                    return False
        return True

    for k in range(eta_grid, 0, -1):
        eta = k / eta_grid
        if factor_ok(eta):
            return eta
    return 0.0
