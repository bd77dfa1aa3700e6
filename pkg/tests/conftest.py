"""Shared fixtures: the bundled apoptosis model, its frozen expected values,
and random-instance generators used by the property tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from pbn_minobs import LogicalMatrix, PbnModel, parse_model_file
from pbn_minobs.model import BinOp, BoolExpr, Const, Not, Var

MODEL_PATH = Path(__file__).resolve().parent.parent / "models" / "apoptosis.pbn"

# Frozen expectations for the bundled model.  Matrices and probability
# columns were cross-checked by direct truth-table enumeration and by the
# independent reachability oracle before freezing.
APOPTOSIS_L = (
    (7, 7, 4, 4, 7, 5, 4, 2),
    (5, 5, 4, 4, 5, 5, 4, 4),
    (3, 3, 4, 4, 7, 5, 8, 6),
    (1, 1, 4, 4, 5, 5, 8, 8),
)
APOPTOSIS_H = (2, 1, 1, 2, 2, 1, 2, 1)
APOPTOSIS_P = (0.27, 0.03, 0.63, 0.07)

S0_EXPECTED = (1, 10, 19, 28, 37, 46, 55, 64)
S1_EXPECTED = (4, 5, 7, 11, 14, 16, 22, 24, 29, 31, 39, 48)
S2_EXPECTED = (2, 3, 6, 8, 12, 13, 15, 20, 21, 23, 30, 32, 38, 40, 47, 56)

# Expected expectation-matrix columns for the indistinguishable pairs.
Q_COLUMNS_EXPECTED = {
    4: {4: 0.07, 20: 0.63, 36: 0.03, 52: 0.27},
    5: {5: 0.07, 23: 0.63, 37: 0.03, 55: 0.27},
    7: {8: 0.07, 24: 0.63, 36: 0.03, 52: 0.27},
    11: {4: 0.07, 20: 0.63, 36: 0.03, 52: 0.27},
    14: {5: 0.07, 21: 0.63, 37: 0.03, 53: 0.27},
    16: {8: 0.07, 22: 0.63, 36: 0.03, 50: 0.27},
    22: {29: 1.0},
    24: {26: 0.27, 28: 0.03, 30: 0.63, 32: 0.07},
    29: {29: 0.1, 31: 0.9},
    31: {28: 0.3, 32: 0.7},
    48: {34: 0.27, 36: 0.03, 38: 0.63, 40: 0.07},
}

N1_EXPECTED = (5, 14, 24, 31)
P_EXPECTED = (4, 5, 29)
CORE_EXPECTED = (4, 5, 14, 24, 29, 31)

PHI_EXPECTED = (
    (0, 1, 1, 1, 1, 1),
    (1, 0, 0, 0, 1, 0),
    (1, 0, 0, 1, 1, 1),
)
COVERS_EXPECTED = ((1, 2), (1, 3))


@pytest.fixture(scope="session")
def apoptosis() -> PbnModel:
    return parse_model_file(MODEL_PATH)


def random_model(
    rng: np.random.Generator,
    n: int | None = None,
    m: int | None = None,
    q: int | None = None,
    allow_zero_probs: bool = True,
) -> PbnModel:
    """A random network; some subnetworks may get probability exactly zero."""
    n = int(n if n is not None else rng.integers(2, 5))
    m = int(m if m is not None else rng.integers(1, 4))
    q = int(q if q is not None else rng.integers(1, 3))
    size = 1 << n
    transitions = tuple(
        LogicalMatrix(size, rng.integers(1, size + 1, size)) for _ in range(m)
    )
    output = LogicalMatrix(1 << q, rng.integers(1, (1 << q) + 1, size))
    weights = rng.random(m)
    if allow_zero_probs and m > 1 and rng.random() < 0.4:
        dead = rng.choice(m, size=int(rng.integers(1, m)), replace=False)
        weights[dead] = 0.0
    if weights.sum() == 0.0:
        weights[0] = 1.0
    probs = tuple(float(x) for x in weights / weights.sum())
    return PbnModel(n=n, q=q, transitions=transitions, output=output, probs=probs)


def random_expr(rng: np.random.Generator, n: int, depth: int = 3) -> BoolExpr:
    """A random rule over x1..xn."""
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.12:
            return Const(bool(rng.integers(0, 2)))
        return Var(int(rng.integers(1, n + 1)))
    if rng.random() < 0.25:
        return Not(random_expr(rng, n, depth - 1))
    op = ("&", "|", "^", "->", "<->")[int(rng.integers(0, 5))]
    return BinOp(op, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1))
