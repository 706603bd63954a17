"""Separability of the CZ gate acting on products of cylinder extrema.

The CZ output on a pair of rim extrema admits a convex decomposition into
products of larger-radius rim extrema exactly when a quadratic inequality
in the radius ratios holds.  The symmetric critical growth is

    LAMBDA = sqrt(1 / (sqrt(5) - 2)) ~= 2.05817

This module evaluates the criterion, produces the explicit 4x4 Pauli
coefficient matrix of the CZ output, and constructs an explicit
decomposition by linear programming over discretized rim angles.  The
resulting StochasticRep drives the sampler: one CZ application becomes a
radius growth plus a sampled pair of Z-rotation offsets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .geometry import TWO_PI, CylinderExtremum, canonical_angle

#: symmetric critical growth rate, root of 1 - 4/g^2 - 1/g^4 = 0
LAMBDA = math.sqrt(1.0 / (math.sqrt(5.0) - 2.0))


def symmetric_growth() -> float:
    """The minimal symmetric growth factor for which the CZ output separates."""
    return LAMBDA


def separability_condition(
    rA: float, rB: float, RA: float, RB: float, tol: float = 1e-12
) -> bool:
    """Whether CZ(Cyl(rA) x Cyl(rB)) is Cyl(RA), Cyl(RB)-separable.

    True iff 1 >= (rA/RA + rB/RB)^2 + (rA/RA)^2 (rB/RB)^2, with tol of
    slack so the saturated critical point (1, 1, lambda, lambda) counts as
    separable despite rounding.  A zero output radius with a nonzero input
    radius is degenerate and yields False.
    """
    if min(rA, rB, RA, RB) < 0.0:
        raise ValueError("radii must be nonnegative")
    if RA == 0.0:
        if rA > 0.0:
            return False
        fA = 0.0
    else:
        fA = rA / RA
    if RB == 0.0:
        if rB > 0.0:
            return False
        fB = 0.0
    else:
        fB = rB / RB
    return (fA + fB) ** 2 + (fA * fB) ** 2 <= 1.0 + tol


def cz_pauli_output(rA: float, rB: float) -> np.ndarray:
    """Pauli coefficient matrix of CZ applied to the extrema [1,rA,0,1] x [1,rB,0,1].

    Entry (i, j) is the coefficient of sigma_i x sigma_j with ordering
    (I, X, Y, Z); normalization fixes c[0,0] = 1.
    """
    return np.array(
        [
            [1.0, rB, 0.0, 1.0],
            [rA, 0.0, 0.0, rA],
            [0.0, 0.0, rA * rB, 0.0],
            [1.0, rB, 0.0, 1.0],
        ]
    )


def ppt_determinants(fA: float, fB: float) -> tuple[float, float]:
    """Inner and outer block determinants of the partially transposed output.

    For fA, fB >= 0 the output (at unit target radii, ratios fA, fB) is
    separable iff the outer determinant is nonnegative.
    """
    inner = 1.0 - (fA - fB) ** 2 - (fA * fB) ** 2
    outer = 1.0 - (fA + fB) ** 2 - (fA * fB) ** 2
    return inner, outer


class DecompositionError(RuntimeError):
    """LP could not meet the requested residual; carries the achieved one."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def _product_columns(grid_size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All 16-coefficient vectors of rim-extrema products on a uniform angle grid."""
    angles = np.arange(grid_size) * (TWO_PI / grid_size)
    # coefficient vector of a unit-radius, pole +1 extremum at each angle
    vecs = np.stack(
        [np.ones(grid_size), np.cos(angles), np.sin(angles), np.ones(grid_size)]
    )  # (4, G)
    # products over all angle pairs: (4, 4, G, G) -> (16, G*G)
    prods = np.einsum("ij,kl->ikjl", vecs, vecs).reshape(16, -1)
    return prods, angles, vecs


def lp_feasibility(
    fA: float, fB: float, grid_size: int = 64, tol: float = 1e-6
) -> tuple[bool, float, list[tuple[float, float, float]]]:
    """Best L-infinity residual mixture reproducing the CZ output at ratios fA, fB.

    Minimizes the max-norm deviation between a convex combination of
    rim-extrema products (angles on a uniform grid, poles +1) and the target
    Pauli matrix.  Returns (residual <= tol, residual, branches).
    """
    if grid_size < 8:
        raise ValueError("grid_size must be >= 8")
    target = np.array(
        [
            [1.0, fB, 0.0, 1.0],
            [fA, 0.0, 0.0, fA],
            [0.0, 0.0, fA * fB, 0.0],
            [1.0, fB, 0.0, 1.0],
        ]
    ).ravel()
    prods, angles, _ = _product_columns(grid_size)
    n = prods.shape[1]
    # variables: p_0 .. p_{n-1}, t; minimize t
    c = np.zeros(n + 1)
    c[-1] = 1.0
    # |A p - target| <= t componentwise
    a_ub = np.block([[prods, -np.ones((16, 1))], [-prods, -np.ones((16, 1))]])
    b_ub = np.concatenate([target, -target])
    a_eq = np.zeros((1, n + 1))
    a_eq[0, :n] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], method="highs")
    if not res.success:
        return False, math.inf, []
    residual = float(res.x[-1])
    p = res.x[:n]
    branches = []
    for idx in np.nonzero(p > 1e-12)[0]:
        j, k = divmod(int(idx), grid_size)
        branches.append((float(p[idx]), float(angles[j]), float(angles[k])))
    total = sum(b[0] for b in branches)
    branches = [(w / total, a, b) for w, a, b in branches]
    return residual <= tol, residual, branches


@dataclass(frozen=True)
class StochasticRep:
    """CZ on rim extrema as radius growth plus a sampled Z-rotation pair.

    branches: list of (probability, dthetaA, dthetaB); the offsets are the
    output angles relative to each input's own angle (for pole +1 inputs).
    """

    growth: float
    branches: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if self.growth <= 1.0:
            raise ValueError("growth must exceed 1")
        total = sum(b[0] for b in self.branches)
        if abs(total - 1.0) > 1e-9 or any(b[0] < 0.0 for b in self.branches):
            raise ValueError("branch weights must be a probability vector")

    def to_json(self) -> str:
        return json.dumps(
            {"growth": self.growth, "branches": [list(b) for b in self.branches]}
        )

    @classmethod
    def from_json(cls, text: str) -> "StochasticRep":
        data = json.loads(text)
        return cls(
            growth=data["growth"],
            branches=tuple(tuple(b) for b in data["branches"]),
        )


def build_decomposition(
    f: float, grid_size: int = 64, tol: float = 1e-6
) -> StochasticRep:
    """Construct a StochasticRep for inputs at radius ratio f = r/R per qubit.

    The decomposition depends only on f; growth is 1/f.  Requires f strictly
    inside the separable region so the finite angle grid has room; an
    infeasible LP raises DecompositionError with the achieved residual.
    """
    if not 0.0 <= f < 1.0:
        raise ValueError(f"f must lie in [0, 1), got {f!r}")
    if f == 0.0:
        # diagonal inputs: CZ acts trivially on the Pauli coefficients
        return StochasticRep(growth=math.inf, branches=((1.0, 0.0, 0.0),))
    ok, residual, branches = lp_feasibility(f, f, grid_size=grid_size, tol=tol)
    if not ok:
        raise DecompositionError(
            f"no decomposition at f={f} on grid {grid_size}: residual {residual:.3e} > {tol:.1e}",
            residual,
        )
    return StochasticRep(growth=1.0 / f, branches=tuple(branches))


def _sample_branch(rep: StochasticRep, rnd: float) -> tuple[float, float]:
    acc = 0.0
    for p, da, db in rep.branches:
        acc += p
        if rnd < acc:
            return da, db
    return rep.branches[-1][1], rep.branches[-1][2]


def apply_branch(
    eA: CylinderExtremum,
    eB: CylinderExtremum,
    growth: float,
    da: float,
    db: float,
) -> tuple[CylinderExtremum, CylinderExtremum]:
    """Deterministic single-branch CZ update (rotation offsets da, db given).

    Pole -1 inputs are rewritten as X-conjugated pole +1 inputs; the X is
    pushed through the CZ as an X on that qubit's own output and a Z on the
    partner's output.  In Bloch terms: Z adds pi to the angle, X negates the
    angle and flips the pole.  Output radii grow by the growth factor.
    """
    flipA = eA.pole < 0
    flipB = eB.pole < 0

    tA = (-eA.theta if flipA else eA.theta) + da
    tB = (-eB.theta if flipB else eB.theta) + db
    if flipB:
        tA += math.pi
    if flipA:
        tB += math.pi
    if flipA:
        tA = -tA
    if flipB:
        tB = -tB

    rA = 0.0 if eA.r == 0.0 else eA.r * growth
    rB = 0.0 if eB.r == 0.0 else eB.r * growth
    outA = CylinderExtremum(rA, canonical_angle(tA), -1 if flipA else +1)
    outB = CylinderExtremum(rB, canonical_angle(tB), -1 if flipB else +1)
    return outA, outB


def apply_stochastic(
    eA: CylinderExtremum, eB: CylinderExtremum, rep: StochasticRep, rnd: float
) -> tuple[CylinderExtremum, CylinderExtremum]:
    """Sample a branch of rep by rnd and apply it; see apply_branch."""
    if not 0.0 <= rnd < 1.0:
        raise ValueError("rnd must lie in [0, 1)")
    da, db = _sample_branch(rep, rnd)
    return apply_branch(eA, eB, rep.growth, da, db)


def extremum_coeffs(e: CylinderExtremum) -> np.ndarray:
    """Pauli coefficient vector [1, r cos(theta), r sin(theta), pole]."""
    return np.array(
        [1.0, e.r * math.cos(e.theta), e.r * math.sin(e.theta), float(e.pole)]
    )


def reconstructed_output(
    eA: CylinderExtremum, eB: CylinderExtremum, rep: StochasticRep
) -> np.ndarray:
    """Branch-weighted Pauli coefficient matrix of the stochastic CZ output."""
    out = np.zeros((4, 4))
    acc = 0.0
    for p, _, _ in rep.branches[:-1]:
        # probe each branch through apply_stochastic at a point inside its cell
        oA, oB = apply_stochastic(eA, eB, rep, acc)
        out += p * np.outer(extremum_coeffs(oA), extremum_coeffs(oB))
        acc += p
    p_last = rep.branches[-1][0]
    oA, oB = apply_stochastic(eA, eB, rep, min(acc, math.nextafter(1.0, 0.0)))
    out += p_last * np.outer(extremum_coeffs(oA), extremum_coeffs(oB))
    return out
