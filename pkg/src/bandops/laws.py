"""Sequence laws for matrix diagonals of band operators.

A law assigns a d x d complex block to every position k in Z.  Four law
classes exist: constant, periodic, eventually periodic (an explicit core
on [-radius, radius] with periodic two-sided tails), and seeded-random.

Algebra on laws (sums, pointwise products, shifts, adjoint transforms)
is done by sampling into a normalized eventually-periodic law; this keeps
the class exactly closed, which is what makes limit operators and tail
shortcuts exact rather than approximate.

The seeded-random generator is a splitmix64 hash of (seed, position mod
64, row, col) mapped affinely to [-bound, bound]; the period of 64 is part
of the documented contract (it makes window enumeration finite) and no
limit operators are claimed for this class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4B07C5

#: documented position period of the seeded-random law
SEEDED_PERIOD = 64


def _splitmix64(z: int) -> int:
    z = (z + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def _seeded_entry(seed: int, pos: int, i: int, j: int, bound: float) -> float:
    h = _splitmix64((seed & _MASK) ^ 0x5851F42D4C957F2D)
    h = _splitmix64(h ^ (pos & _MASK))
    h = _splitmix64(h ^ ((i << 32) | j))
    u = (h >> 11) * (1.0 / (1 << 53))  # u in [0, 1)
    return bound * (2.0 * u - 1.0)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=complex))
    a.setflags(write=False)
    return a


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True, eq=False)
class Periodic:
    """values[(k - anchor) % q] at position k."""

    values: tuple
    anchor: int = 0
    tainted: bool = False

    def __post_init__(self):
        vals = tuple(_freeze(v) for v in self.values)
        if not vals:
            raise ValueError("periodic law needs at least one value")
        d = vals[0].shape[0]
        for v in vals:
            if v.shape != (d, d):
                raise ValueError("periodic law values must be d x d with a common d")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "anchor", self.anchor % len(vals))

    @property
    def dim(self) -> int:
        return self.values[0].shape[0]

    @property
    def period(self) -> int:
        return len(self.values)

    core_radius = 0

    @property
    def left_period(self) -> int:
        return len(self.values)

    right_period = left_period

    def left_tail(self) -> "Periodic":
        return self

    right_tail = left_tail

    def at(self, k: int) -> np.ndarray:
        return self.values[(k - self.anchor) % len(self.values)]

    def sample(self, lo: int, hi: int) -> np.ndarray:
        idx = (np.arange(lo, hi) - self.anchor) % len(self.values)
        return np.stack([self.values[i] for i in idx]) if hi > lo else \
            np.zeros((0, self.dim, self.dim), dtype=complex)

    def shifted(self, s: int) -> "Periodic":
        return Periodic(self.values, self.anchor - s, self.tainted)

    def mapped(self, f) -> "Periodic":
        return Periodic(tuple(f(v) for v in self.values), self.anchor, self.tainted)

    def is_zero(self) -> bool:
        return all(not v.any() for v in self.values)


def constant(value) -> Periodic:
    """Constant law: the same block at every position."""
    return Periodic((value,))


@dataclass(frozen=True, eq=False)
class EventuallyPeriodic:
    """Explicit blocks on [-radius, radius], periodic tails outside."""

    core: tuple  # blocks at positions -radius .. radius
    radius: int
    left: Periodic
    right: Periodic
    tainted: bool = False

    def __post_init__(self):
        core = tuple(_freeze(v) for v in self.core)
        if len(core) != 2 * self.radius + 1:
            raise ValueError("core must hold exactly 2*radius+1 blocks")
        d = self.left.dim
        if self.right.dim != d or any(v.shape != (d, d) for v in core):
            raise ValueError("inconsistent block dimensions in eventually-periodic law")
        object.__setattr__(self, "core", core)

    @property
    def dim(self) -> int:
        return self.left.dim

    @property
    def core_radius(self) -> int:
        return self.radius

    @property
    def left_period(self) -> int:
        return self.left.period

    @property
    def right_period(self) -> int:
        return self.right.period

    def left_tail(self) -> Periodic:
        return self.left

    def right_tail(self) -> Periodic:
        return self.right

    def at(self, k: int) -> np.ndarray:
        if k < -self.radius:
            return self.left.at(k)
        if k > self.radius:
            return self.right.at(k)
        return self.core[k + self.radius]

    def sample(self, lo: int, hi: int) -> np.ndarray:
        if hi <= lo:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return np.stack([self.at(k) for k in range(lo, hi)])

    def shifted(self, s: int) -> "EventuallyPeriodic":
        r = self.radius + abs(s)
        core = tuple(self.at(k + s) for k in range(-r, r + 1))
        return EventuallyPeriodic(core, r, self.left.shifted(s),
                                  self.right.shifted(s), self.tainted)

    def mapped(self, f) -> "EventuallyPeriodic":
        return EventuallyPeriodic(tuple(f(v) for v in self.core), self.radius,
                                  self.left.mapped(f), self.right.mapped(f),
                                  self.tainted)

    def is_zero(self) -> bool:
        return (all(not v.any() for v in self.core)
                and self.left.is_zero() and self.right.is_zero())


@dataclass(frozen=True, eq=False)
class SeededRandom:
    """Deterministic pseudo-random real entries in [-bound, bound].

    Position-periodic with period SEEDED_PERIOD by construction.
    """

    bound: float
    seed: int
    dim_: int = 1
    tainted: bool = field(default=True, init=False)

    @property
    def dim(self) -> int:
        return self.dim_

    core_radius = 0

    @property
    def left_period(self) -> int:
        return SEEDED_PERIOD

    right_period = left_period

    @property
    def period(self) -> int:
        return SEEDED_PERIOD

    def _block(self, pos: int) -> np.ndarray:
        d = self.dim_
        m = np.empty((d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                m[i, j] = _seeded_entry(self.seed, pos, i, j, self.bound)
        return _freeze(m)

    def at(self, k: int) -> np.ndarray:
        return self._block(k % SEEDED_PERIOD)

    def sample(self, lo: int, hi: int) -> np.ndarray:
        if hi <= lo:
            return np.zeros((0, self.dim_, self.dim_), dtype=complex)
        return np.stack([self.at(k) for k in range(lo, hi)])

    def left_tail(self) -> Periodic:
        return self._as_periodic()

    def right_tail(self) -> Periodic:
        return self._as_periodic()

    def _as_periodic(self) -> Periodic:
        return Periodic(tuple(self._block(p) for p in range(SEEDED_PERIOD)),
                        anchor=0, tainted=True)

    def shifted(self, s: int) -> Periodic:
        return self._as_periodic().shifted(s)

    def mapped(self, f) -> Periodic:
        return self._as_periodic().mapped(f)

    def is_zero(self) -> bool:
        return self.bound == 0.0


Law = Periodic | EventuallyPeriodic | SeededRandom


def normalized(law: Law) -> Law:
    """Collapse an eventually-periodic law to a plain periodic one if possible."""
    if not isinstance(law, EventuallyPeriodic):
        return law
    lt, rt = law.left, law.right
    if lt.period != rt.period:
        return law
    q = lt.period
    probe = Periodic(tuple(rt.at(k) for k in range(q)), anchor=0, tainted=law.tainted)
    span = law.radius + q + 1
    for k in range(-span, span + 1):
        if not np.array_equal(law.at(k), probe.at(k)):
            return law
    return probe


def combine(f, *laws: Law) -> Law:
    """Pointwise combination f(block_1, ..., block_n) of several laws.

    Exact closure: the result is eventually periodic with core radius
    max of the input radii and tail periods lcm of the input periods.
    """
    radius = max(l.core_radius for l in laws)
    ql = 1
    qr = 1
    for l in laws:
        ql = _lcm(ql, l.left_period)
        qr = _lcm(qr, l.right_period)
    tainted = any(l.tainted for l in laws)
    core = tuple(f(*(l.at(k) for l in laws)) for k in range(-radius, radius + 1))
    left = Periodic(tuple(f(*(l.at(k) for l in laws))
                          for k in range(-radius - ql, -radius)),
                    anchor=-radius - ql, tainted=tainted)
    right = Periodic(tuple(f(*(l.at(k) for l in laws))
                           for k in range(radius + 1, radius + 1 + qr)),
                     anchor=radius + 1, tainted=tainted)
    return normalized(EventuallyPeriodic(core, radius, left, right, tainted))


def laws_equal(a: Law, b: Law) -> bool:
    """Exact entrywise equality of two laws over all of Z."""
    if a.dim != b.dim:
        return False
    radius = max(a.core_radius, b.core_radius)
    q = 1
    for l in (a, b):
        q = _lcm(q, _lcm(l.left_period, l.right_period))
    span = radius + q
    return all(np.array_equal(a.at(k), b.at(k)) for k in range(-span, span + 1))


def zero_law(d: int) -> Periodic:
    return constant(np.zeros((d, d), dtype=complex))
