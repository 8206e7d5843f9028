"""Reference operators used by the shipped spec files and the test suite."""

from __future__ import annotations

import numpy as np

from . import operator as op
from .laws import EventuallyPeriodic, Periodic, SeededRandom, constant


def _m(x) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(1, 1)


def block_pair_example(mu: float, exponent=2) -> op.BandOperator:
    """diag(..., B, B, 1, B, B, ...) with B = [[mu, 1], [1, mu]], scalar lattice.

    The single 1 sits at position (0, 0); B blocks couple the pairs
    (1, 2), (3, 4), ... to the right and (-2, -1), (-4, -3), ... to the left.
    """
    one = _m(1.0)
    zero = _m(0.0)
    mu_m = _m(mu)
    # main diagonal: mu everywhere except the defect 1 at position 0
    d0 = EventuallyPeriodic((mu_m, mu_m, one, mu_m, mu_m), 2,
                            constant(mu_m), constant(mu_m))
    # sub-diagonal entry(i, i - 1) = 1 on pair couplings: i even >= 2, i odd <= -1
    d1 = EventuallyPeriodic((zero, one, zero, zero, one), 2,
                            Periodic((zero, one), anchor=0),   # 1 at odd i
                            Periodic((one, zero), anchor=0))   # 1 at even i
    # super-diagonal entry(i, i + 1) = 1 mirrored: i odd >= 1, i even <= -2
    dm1 = EventuallyPeriodic((one, zero, zero, one, zero), 2,
                             Periodic((one, zero), anchor=0),  # 1 at even i
                             Periodic((zero, one), anchor=0))  # 1 at odd i
    return op.band_operator({0: d0, 1: d1, -1: dm1}, 1, exponent)


def bilateral_shift(exponent=2) -> op.BandOperator:
    return op.shift_operator(1, 1, exponent)


def asymmetric_laurent(exponent=2) -> op.BandOperator:
    """Laurent operator with symbol e^{i t} + 0.5 e^{-i t}."""
    return op.band_operator({1: constant(_m(1.0)), -1: constant(_m(0.5))},
                            1, exponent)


def decaying_multiplication(radius: int = 64, exponent=2) -> op.BandOperator:
    """Multiplication by 1/(1+|k|) on [-radius, radius], zero tails.

    A compact-like operator: essential norm 0 and operator spectrum {0}.
    """
    core = tuple(_m(1.0 / (1.0 + abs(k))) for k in range(-radius, radius + 1))
    law = EventuallyPeriodic(core, radius, constant(_m(0.0)), constant(_m(0.0)))
    return op.band_operator({0: law}, 1, exponent)


def two_sided_mixed(exponent=2) -> op.BandOperator:
    """Different tails at the two infinities plus a small core defect."""
    left = constant(_m(0.3))
    right = Periodic((_m(1.0), _m(0.5)))
    d0 = EventuallyPeriodic((_m(2.0),), 0, left, right)
    d1 = EventuallyPeriodic((_m(0.0),), 0, constant(_m(0.0)), constant(_m(0.25)))
    return op.band_operator({0: d0, 1: d1}, 1, exponent)


def periodic_block(exponent=2) -> op.BandOperator:
    """Purely periodic d=2 operator with a genuinely varying symbol."""
    a = np.array([[0.8, 0.2], [0.0, 0.6]])
    b = np.array([[0.0, 0.5], [0.1, 0.0]])
    return op.band_operator({0: constant(a), 1: constant(b)}, 2, exponent)


def seeded_band(seed: int, width: int = 2, dim: int = 1, bound: float = 1.0,
                exponent=2) -> op.BandOperator:
    """Random band operator with deterministic seeded diagonals."""
    diags = {}
    for off in range(-width, width + 1):
        diags[off] = SeededRandom(bound, seed * 101 + off, dim)
    return op.band_operator(diags, dim, exponent)


def eventually_periodic_corpus() -> dict:
    """The ten-operator corpus the acceptance identities run on."""
    ops = {f"blockpair_mu{int(100 * m):02d}": block_pair_example(m)
           for m in (0.1, 0.25, 0.5, 0.75, 0.9)}
    ops["shift"] = bilateral_shift()
    ops["laurent_asym"] = asymmetric_laurent()
    ops["decaying_mult"] = decaying_multiplication()
    ops["two_sided_mixed"] = two_sided_mixed()
    ops["identity"] = op.identity_operator(1)
    return ops
