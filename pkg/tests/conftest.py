import math

import pytest

from cylsim.circuits import ClusterCircuit, MeasurementRule
from cylsim.geometry import XY_PLANE, Z_BASIS, CylinderExtremum
from cylsim.sampler import default_rep

GRID_2X3_EDGES = (
    (0, 1), (1, 2),
    (3, 4), (4, 5),
    (0, 3), (1, 4), (2, 5),
)

FIXTURE_GRAPHS = {
    "chain2": (2, ((0, 1),)),
    "cycle4": (4, ((0, 1), (1, 2), (2, 3), (3, 0))),
    "grid2x3": (6, GRID_2X3_EDGES),
}


@pytest.fixture(scope="session")
def rep():
    return default_rep()


def degree(n, edges, v):
    return sum(1 for e in edges if v in e)


def build_fixture(name: str, growth: float, adaptive: bool) -> ClusterCircuit:
    """Standard test circuit: per-vertex radii at 90% of the simulability
    bound, varied angles and poles, mixed Z/XY measurements."""
    n, edges = FIXTURE_GRAPHS[name]
    inputs = tuple(
        CylinderExtremum(
            0.9 * growth ** (-degree(n, edges, v)),
            0.4 + 0.9 * v,
            1 if v % 3 else -1,
        )
        for v in range(n)
    )
    plan = []
    for v in range(n):
        if v == n - 1:
            plan.append(MeasurementRule(Z_BASIS))
        elif adaptive and v > 0:
            plan.append(
                MeasurementRule(
                    XY_PLANE,
                    base_alpha=0.3 + 0.5 * v,
                    sign_deps=frozenset({v - 1}),
                    shift_deps=frozenset({0}) if v > 1 else frozenset(),
                )
            )
        else:
            plan.append(MeasurementRule(XY_PLANE, base_alpha=0.3 + 0.5 * v))
    return ClusterCircuit(n, edges, inputs, tuple(plan), tuple(range(n)))
