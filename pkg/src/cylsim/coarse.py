"""Coarse-graining thresholds for rectangular blocks of the square lattice.

A block is an H x W patch whose qubits get rim-extremum inputs with pole +1
and angle theta_i, internal nearest-neighbor CZs, and the fixed product
projection onto (I - X)/2 per qubit.  The quantity of interest is

    s(B)        max r such that the block value stays nonnegative for every
                choice of input angles (plain mode, radius r everywhere)
    s_lambda(B) same, but boundary radii are grown by LAMBDA per external
                edge of the lattice embedding: radius_i = r * LAMBDA^e_i

The block value is multilinear in the per-qubit transverse components
a_i = (rho_i / 2) exp(-i theta_i); a coefficient tensor over {1, a, conj(a)}
per site evaluates it in 3^n operations for any assignment.  Multilinearity
also yields certified lower bounds: each disc |a_i| <= rho_i/2 sits inside
the convex hull of G polygon vertices at radius rho_i / (2 cos(pi/G)), and a
multilinear function on a product of polytopes attains its minimum at a
vertex product, so an exact minimum over the inflated angle grid bounds the
continuous minimum from below.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .czdec import LAMBDA
from .geometry import TWO_PI

PLAIN = "plain"
LAMBDA_GROWN = "lambda"

#: entry budget for exact grid minimization (chunked tensor contraction)
_GRID_BUDGET = 1 << 22


@dataclass(frozen=True)
class BlockSpec:
    """Rectangular block with external-edge counts from the lattice embedding."""

    height: int
    width: int
    mode: str = PLAIN

    def __post_init__(self):
        if self.height < 1 or self.width < 1 or self.height * self.width < 2:
            raise ValueError("block must contain at least 2 qubits")
        if self.mode not in (PLAIN, LAMBDA_GROWN):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def n(self) -> int:
        return self.height * self.width

    def index(self, row: int, col: int) -> int:
        return row * self.width + col

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.height):
            for j in range(self.width):
                if j + 1 < self.width:
                    out.append((self.index(i, j), self.index(i, j + 1)))
                if i + 1 < self.height:
                    out.append((self.index(i, j), self.index(i + 1, j)))
        return out

    def ext_counts(self) -> np.ndarray:
        """External CZ count per qubit: 4 minus the internal degree."""
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges():
            deg[u] += 1
            deg[v] += 1
        return 4 - deg

    def radii(self, r: float) -> np.ndarray:
        if r < 0.0:
            raise ValueError("r must be nonnegative")
        if self.mode == PLAIN:
            return np.full(self.n, float(r))
        return r * LAMBDA ** self.ext_counts().astype(float)


@dataclass(frozen=True)
class BlockAssignment:
    """Input angles per qubit (pole +1, projector (I-X)/2 fixed by reduction)."""

    thetas: tuple[float, ...]


def two_block_formula(rp: float, thetaA: float, thetaB: float) -> float:
    """Closed form for the 1x2 block, up to the positive factor 1/4."""
    return (
        1.0
        - rp * math.cos(thetaA)
        - rp * math.cos(thetaB)
        + rp * rp * math.sin(thetaA) * math.sin(thetaB)
    )


def _coeff_tensor(b: BlockSpec) -> np.ndarray:
    """Real tensor C of shape (3,)*n with block value = Re sum C_v prod x_i(v_i).

    Per-site code: 0 -> factor 1, 1 -> a_i, 2 -> conj(a_i).  The sign of a
    term is (-1)^(number of nonzero codes) times the CZ parity of the row
    and column bitstrings (s_i = 1 iff code 2, t_i = 1 iff code 1).
    """
    n = b.n
    edges = b.edges()
    C = np.zeros((3,) * n)
    for v in itertools.product((0, 1, 2), repeat=n):
        s = [1 if c == 2 else 0 for c in v]
        t = [1 if c == 1 else 0 for c in v]
        parity = sum(1 for c in v if c != 0)
        parity += sum(s[u] * s[w] + t[u] * t[w] for u, w in edges)
        C[v] = (-1.0) ** parity
    return C / 2.0**n


_COEFF_CACHE: dict[tuple[int, int], np.ndarray] = {}


def coeff_tensor(b: BlockSpec) -> np.ndarray:
    key = (b.height, b.width)
    if key not in _COEFF_CACHE:
        _COEFF_CACHE[key] = _coeff_tensor(b)
    return _COEFF_CACHE[key]


def _site_vectors(radii: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    a = (radii / 2.0) * np.exp(-1j * np.asarray(thetas))
    return np.stack([np.ones_like(a), a, np.conj(a)])  # (3, n)


def block_value(b: BlockSpec, radii: np.ndarray, thetas) -> float:
    """Exact block value for one assignment via the coefficient tensor."""
    x = _site_vectors(np.asarray(radii, dtype=float), thetas)
    t = coeff_tensor(b).astype(complex)
    for i in range(b.n):
        t = np.tensordot(t, x[:, i], axes=([0], [0]))
    return float(np.real(t))


def block_min_prob_dense(b: BlockSpec, r: float, a: BlockAssignment) -> float:
    """Dense-matrix evaluation of the block value (independent backend).

    Builds the 2^n x 2^n product operator, applies the CZ signs, and
    projects every qubit onto (I - X)/2.
    """
    n = b.n
    if n > 14:
        raise ValueError("dense backend capped at 14 qubits")
    radii = b.radii(r)
    rho = np.array([[1.0]], dtype=complex)
    for i in range(n):
        amp = (radii[i] / 2.0) * np.exp(-1j * a.thetas[i])
        site = np.array([[1.0, amp], [np.conj(amp), 0.0]])
        rho = np.kron(rho, site)
    bits = np.array(
        [[(k >> (n - 1 - q)) & 1 for q in range(n)] for k in range(2**n)]
    )
    signs = np.ones(2**n)
    for u, v in b.edges():
        signs *= np.where(bits[:, u] * bits[:, v] == 1, -1.0, 1.0)
    rho = rho * np.outer(signs, signs)
    minus = np.array([1.0])
    for _ in range(n):
        minus = np.kron(minus, np.array([1.0, -1.0]) / math.sqrt(2.0))
    return float(np.real(minus @ rho @ minus))


_K4 = np.array(
    [
        [(-1.0) ** ((a >> 1) * (c >> 1) + (a & 1) * (c & 1)) for c in range(4)]
        for a in range(4)
    ]
)


def block_prob_contraction(b: BlockSpec, r: float, a: BlockAssignment) -> float:
    """Exact block value by frontier contraction, linear in the block area.

    Sites carry a 4-state index encoding the (row, column) bits of the
    operator entry; edges contribute parity signs, sites contribute their
    matrix entry times a sign.  The frontier spans the short side of the
    rectangle (capped at 8), so memory is at most 4^8 complex numbers.
    """
    H, W = b.height, b.width
    thetas = np.asarray(a.thetas, dtype=float)
    radii = b.radii(r)
    if H > W:
        # transpose the raster so the frontier is the short side
        perm = [b.index(i, j) for j in range(W) for i in range(H)]
        thetas = thetas[perm]
        radii = radii[perm]
        H, W = W, H
    if H > 8:
        raise ValueError("frontier contraction capped at short side 8")
    amp = (radii / 2.0) * np.exp(-1j * thetas)
    # mu[site, state]: state = 2s + t; entry (-1)^(s+t) M[s,t] / 2
    mu = np.stack(
        [np.ones_like(amp), -amp, -np.conj(amp), np.zeros_like(amp)], axis=1
    ) / 2.0
    F = np.ones((1,) * H, dtype=complex)
    for col in range(W):
        for row in range(H):
            site = row * W + col
            left = _K4 if col > 0 else np.ones((1, 4))
            t = np.tensordot(F, left, axes=([row], [0]))  # new axis last
            t = t * mu[site]
            if row > 0:
                shape = [1] * t.ndim
                shape[row - 1] = 4
                shape[-1] = 4
                t = t * _K4.reshape(shape)
            F = np.moveaxis(t, -1, row)
    return float(np.real(F.sum()))


def _grid_min(
    b: BlockSpec, radii: np.ndarray, grid: int
) -> tuple[float, tuple[float, ...]]:
    """Exact minimum of the block value over a uniform per-qubit angle grid."""
    n = b.n
    angles = np.arange(grid) * (TWO_PI / grid)
    phases = np.exp(-1j * angles)
    best = math.inf
    best_thetas: tuple[float, ...] = (0.0,) * n
    # loop over enough leading axes that the contracted tail fits the budget
    k = 0
    while grid ** (n - k) > _GRID_BUDGET:
        k += 1
    C = coeff_tensor(b).astype(complex)
    tail_x = [
        np.stack(
            [np.ones(grid), (radii[i] / 2.0) * phases, np.conj((radii[i] / 2.0) * phases)]
        )
        for i in range(k, n)
    ]
    for head in itertools.product(range(grid), repeat=k):
        t = C
        for i, gi in enumerate(head):
            av = (radii[i] / 2.0) * phases[gi]
            t = np.tensordot(t, np.array([1.0, av, np.conj(av)]), axes=([0], [0]))
        for x in tail_x:
            t = np.tensordot(t, x, axes=([0], [0]))
        vals = np.real(t)
        idx = np.unravel_index(np.argmin(vals), vals.shape)
        v = float(vals[idx])
        if v < best:
            best = v
            best_thetas = tuple(angles[g] for g in head) + tuple(
                angles[i] for i in idx
            )
    return best, best_thetas


def _coordinate_descent(
    b: BlockSpec, radii: np.ndarray, thetas0, max_sweeps: int = 60
) -> tuple[float, tuple[float, ...]]:
    """Exact per-coordinate minimization: the value is affine in each a_i,
    so the optimal angle given the others is available in closed form."""
    n = b.n
    thetas = np.array(thetas0, dtype=float)
    C = coeff_tensor(b).astype(complex)
    val = block_value(b, radii, thetas)
    for _ in range(max_sweeps):
        improved = False
        for i in range(n):
            x = _site_vectors(radii, thetas)
            t = C
            for j in range(n):
                if j == i:
                    continue
                # axis 0 until site i's axis is in front, then axis 1
                t = np.tensordot(t, x[:, j], axes=([0 if j < i else 1], [0]))
            # length-3 kernel: value = Re(k0 + k1 a_i + conj(k1) conj(a_i))
            k0, k1 = complex(t[0]), complex(t[1])
            if abs(k1) < 1e-18:
                continue
            cand = k0.real - radii[i] * abs(k1)
            if cand < val - 1e-15:
                thetas[i] = math.atan2(k1.imag, k1.real) - math.pi
                val = cand
                improved = True
        if not improved:
            break
    return float(val), tuple(float(t % TWO_PI) for t in thetas)


@dataclass(frozen=True)
class SEstimate:
    """Bracket [lower, upper] for a block threshold.

    lower is certified: the exact grid minimum at polygon-inflated radii was
    nonnegative, which bounds the continuous minimum from below.  upper is
    witnessed: a concrete assignment with a negative value exists just above
    it (or the search cap was reached).
    """

    lower: float
    upper: float
    theta_grid: int
    cert_grid: int
    witness: tuple[float, ...] | None
    capped: bool = False


def _refined_min(b: BlockSpec, radii: np.ndarray, grid: int) -> tuple[float, tuple[float, ...]]:
    """Grid seed plus exact coordinate descent; value is exact at the result."""
    g_seed = grid
    while g_seed > 4 and g_seed**b.n > _GRID_BUDGET:
        g_seed //= 2
    v0, th0 = _grid_min(b, radii, g_seed)
    v1, th1 = _coordinate_descent(b, radii, th0)
    v2, th2 = _coordinate_descent(b, radii, (0.0,) * b.n)
    return (v1, th1) if v1 <= v2 else (v2, th2)


def _cert_grid_size(n: int, theta_grid: int) -> int:
    g = theta_grid
    while g > 4 and g**n > (1 << 24):
        g //= 2
    return g


R_SEARCH_CAP = 4.0


def s_estimate(
    b: BlockSpec, theta_grid: int = 32, bisect_tol: float = 5e-5
) -> SEstimate:
    """Bracket the threshold radius of a block by bisection.

    The upper bound bisects on the refined (grid + descent) minimum at the
    exact radii: any negative value certifies that r exceeds the threshold.
    The lower bound bisects on the exact grid minimum at radii inflated by
    1/cos(pi/G): nonnegativity there certifies the continuous minimum.
    """
    inflate = 1.0 / math.cos(math.pi / _cert_grid_size(b.n, theta_grid))
    cert_grid = _cert_grid_size(b.n, theta_grid)

    def refined(r: float) -> tuple[float, tuple[float, ...]]:
        return _refined_min(b, b.radii(r), theta_grid)

    def certified(r: float) -> float:
        v, _ = _grid_min(b, b.radii(r) * inflate, cert_grid)
        return v

    # upper: smallest r with a concrete negative witness
    hi = 0.05
    witness = None
    capped = False
    while hi <= R_SEARCH_CAP:
        v, th = refined(hi)
        if v < 0.0:
            witness = th
            break
        hi *= 1.5
    if hi > R_SEARCH_CAP:
        upper = R_SEARCH_CAP
        capped = True
        lo_u = upper
    else:
        lo_u = hi / 1.5
        while hi - lo_u > bisect_tol:
            mid = 0.5 * (lo_u + hi)
            v, th = refined(mid)
            if v < 0.0:
                hi, witness = mid, th
            else:
                lo_u = mid
        upper = hi

    # lower: largest r whose inflated-grid minimum is certified nonnegative
    lo = 0.0
    hi_c = upper if not capped else R_SEARCH_CAP
    if certified(hi_c) >= 0.0:
        lower = hi_c
    else:
        while hi_c - lo > bisect_tol:
            mid = 0.5 * (lo + hi_c)
            if certified(mid) >= 0.0:
                lo = mid
            else:
                hi_c = mid
        lower = lo
    lower = min(lower, upper)
    return SEstimate(
        lower=lower,
        upper=upper,
        theta_grid=theta_grid,
        cert_grid=cert_grid,
        witness=witness,
        capped=capped,
    )


def lemma4_checks(
    K: BlockSpec,
    L: BlockSpec,
    KL: BlockSpec,
    theta_grid: int = 16,
    bisect_tol: float = 1e-3,
) -> dict:
    """Monotonicity of the thresholds under joining two blocks.

    Checks, on computed brackets (A <= B accepted when lower_A <= upper_B):
      plain thresholds shrink:   s(KL) <= min(s(K), s(L))
      grown thresholds grow:     s_lambda(KL) >= min(s_lambda(K), s_lambda(L))
      plain dominates grown:     s(F) >= s_lambda(F) for each block F
    """
    def both(spec: BlockSpec) -> tuple[SEstimate, SEstimate]:
        p = s_estimate(BlockSpec(spec.height, spec.width, PLAIN), theta_grid, bisect_tol)
        g = s_estimate(BlockSpec(spec.height, spec.width, LAMBDA_GROWN), theta_grid, bisect_tol)
        return p, g

    (Kp, Kg), (Lp, Lg), (KLp, KLg) = both(K), both(L), both(KL)
    report = {
        "s_plain": {"K": Kp, "L": Lp, "KL": KLp},
        "s_lambda": {"K": Kg, "L": Lg, "KL": KLg},
        "join_shrinks_plain": KLp.lower <= min(Kp.upper, Lp.upper),
        "join_grows_lambda": KLg.upper >= min(Kg.lower, Lg.lower),
        "plain_dominates_lambda": all(
            p.upper >= g.lower for p, g in ((Kp, Kg), (Lp, Lg), (KLp, KLg))
        ),
    }
    report["all_ok"] = bool(
        report["join_shrinks_plain"]
        and report["join_grows_lambda"]
        and report["plain_dominates_lambda"]
    )
    return report


def conjecture_fast_path(
    b: BlockSpec, r: float, restarts: int = 8, seed: int = 0
) -> tuple[float, tuple[float, ...]]:
    """Heuristic minimum over inputs with no Y component (angles 0 or pi).

    Greedy single-site sign flips from the all-zero pattern and from random
    patterns; exact values via the frontier contraction.  The restriction to
    real transverse components is a conjecture about where the optimum sits,
    so results are upper-bound material only.
    """
    n = b.n
    rng = np.random.default_rng(seed)

    def value(pattern: np.ndarray) -> float:
        thetas = tuple(0.0 if s > 0 else math.pi for s in pattern)
        return block_prob_contraction(b, r, BlockAssignment(thetas))

    def descend(pattern: np.ndarray) -> tuple[float, np.ndarray]:
        best = value(pattern)
        improved = True
        while improved:
            improved = False
            for i in range(n):
                pattern[i] *= -1
                v = value(pattern)
                if v < best - 1e-15:
                    best = v
                    improved = True
                else:
                    pattern[i] *= -1
        return best, pattern

    best_v, best_p = descend(np.ones(n, dtype=int))
    for _ in range(restarts):
        v, p = descend(rng.choice([-1, 1], size=n))
        if v < best_v:
            best_v, best_p = v, p
    thetas = tuple(0.0 if s > 0 else math.pi for s in best_p)
    return float(best_v), thetas


def find_negativity_witness(
    b: BlockSpec, r_values, restarts: int = 4, seed: int = 0
) -> tuple[float, tuple[float, ...]] | None:
    """Smallest r in r_values whose fast-path minimum goes negative."""
    for r in r_values:
        v, thetas = conjecture_fast_path(b, r, restarts=restarts, seed=seed)
        if v < 0.0:
            return float(r), thetas
    return None
