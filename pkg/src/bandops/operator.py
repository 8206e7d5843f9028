"""Band operators on l^p(Z, C^d) and their finite compressions.

A band operator is a finite set of matrix diagonals with distinct
offsets; the diagonal at offset a holds the blocks a_a(i) multiplying
x_{i-a}, so entry(i, j) = a_{i-j}(i).  Everything is exact at the symbol
level: sums, products, adjoints, shifts and truncations stay inside the
eventually-periodic class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse

from . import laws as _laws
from .errors import UnsupportedExponentError
from .laws import EventuallyPeriodic, Law, Periodic, SeededRandom

_EXPONENTS = (1, 2, math.inf)


def _conj_t(m: np.ndarray) -> np.ndarray:
    return m.conj().T


@dataclass(frozen=True, eq=False)
class BandOperator:
    """Finite family of diagonals over a fixed block size and exponent."""

    block_dim: int
    exponent: float
    diagonals: tuple  # sorted tuple of (offset, Law)

    def __post_init__(self):
        if self.block_dim < 1:
            raise ValueError("block_dim must be >= 1")
        if self.exponent not in _EXPONENTS:
            raise UnsupportedExponentError(f"exponent must be 1, 2 or inf, got {self.exponent!r}")
        seen = set()
        diags = []
        for off, law in sorted(self.diagonals, key=lambda t: t[0]):
            if off in seen:
                raise ValueError(f"duplicate diagonal offset {off}")
            if law.dim != self.block_dim:
                raise ValueError(f"law at offset {off} has block size {law.dim}, "
                                 f"expected {self.block_dim}")
            seen.add(off)
            diags.append((off, law))
        object.__setattr__(self, "diagonals", tuple(diags))

    # -- structure ----------------------------------------------------------

    @property
    def band_width(self) -> int:
        return max((abs(o) for o, _ in self.diagonals), default=0)

    @property
    def offsets(self) -> tuple:
        return tuple(o for o, _ in self.diagonals)

    def law(self, offset: int) -> Law | None:
        for o, l in self.diagonals:
            if o == offset:
                return l
        return None

    @property
    def core_radius(self) -> int:
        return max((l.core_radius for _, l in self.diagonals), default=0)

    @property
    def left_period(self) -> int:
        q = 1
        for _, l in self.diagonals:
            q = q * l.left_period // math.gcd(q, l.left_period)
        return q

    @property
    def right_period(self) -> int:
        q = 1
        for _, l in self.diagonals:
            q = q * l.right_period // math.gcd(q, l.right_period)
        return q

    @property
    def tainted(self) -> bool:
        return any(l.tainted for _, l in self.diagonals)

    @property
    def enumerable(self) -> bool:
        """True when limit operators can be enumerated exactly."""
        return not (self.tainted or any(isinstance(l, SeededRandom)
                                        for _, l in self.diagonals))

    def is_zero(self) -> bool:
        return all(l.is_zero() for _, l in self.diagonals)

    # -- entries ------------------------------------------------------------

    def entry(self, i: int, j: int) -> np.ndarray:
        """The (i, j) block; zero outside the band."""
        law = self.law(i - j)
        if law is None:
            return np.zeros((self.block_dim, self.block_dim), dtype=complex)
        return np.asarray(law.at(i))


def band_operator(diagonals, block_dim=None, exponent=2) -> BandOperator:
    """Build a BandOperator from {offset: law} or [(offset, law), ...]."""
    if isinstance(diagonals, dict):
        items = tuple(diagonals.items())
    else:
        items = tuple(diagonals)
    if block_dim is None:
        if not items:
            raise ValueError("block_dim required for an empty operator")
        block_dim = items[0][1].dim
    return BandOperator(block_dim, exponent, items)


def identity_operator(d: int = 1, exponent=2) -> BandOperator:
    return band_operator({0: _laws.constant(np.eye(d))}, d, exponent)


def zero_operator(d: int = 1, exponent=2) -> BandOperator:
    return band_operator({}, d, exponent)


def shift_operator(k: int, d: int = 1, exponent=2) -> BandOperator:
    """V_k, mapping (x_i) to (y_i) with y_{i+k} = x_i."""
    if k == 0:
        return identity_operator(d, exponent)
    return band_operator({k: _laws.constant(np.eye(d))}, d, exponent)


# -- vectors ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WindowVector:
    """Finitely supported vector: blocks for positions start, start+1, ..."""

    start: int
    blocks: np.ndarray  # shape (n, d)

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        object.__setattr__(self, "blocks", b)

    @property
    def stop(self) -> int:
        return self.start + self.blocks.shape[0]

    def block(self, i: int) -> np.ndarray:
        if self.start <= i < self.stop:
            return self.blocks[i - self.start]
        return np.zeros(self.blocks.shape[1], dtype=complex)

    def norm(self, p=2) -> float:
        flat = self.blocks.ravel()
        if p == 2:
            return float(np.linalg.norm(flat))
        if p == 1:
            return float(np.abs(flat).sum())
        if p == math.inf:
            return float(np.abs(flat).max()) if flat.size else 0.0
        raise UnsupportedExponentError(f"norm undefined for p={p!r}")


def basis_vector(i: int, d: int = 1, component: int = 0) -> WindowVector:
    b = np.zeros((1, d), dtype=complex)
    b[0, component] = 1.0
    return WindowVector(i, b)


def inner(x: WindowVector, y: WindowVector) -> complex:
    """<x, y> = sum_i y_i^H x_i (linear in the first argument)."""
    lo = min(x.start, y.start)
    hi = max(x.stop, y.stop)
    total = 0.0 + 0.0j
    for i in range(lo, hi):
        total += np.vdot(y.block(i), x.block(i))
    return complex(total)


def apply(a: BandOperator, x: WindowVector) -> WindowVector:
    """Exact matrix-vector product; output window = input expanded by w."""
    w = a.band_width
    lo, hi = x.start - w, x.stop + w
    out = np.zeros((hi - lo, a.block_dim), dtype=complex)
    for off, law in a.diagonals:
        # y_i += a_off(i) @ x_{i-off} for i-off inside the support
        i0, i1 = x.start + off, x.stop + off
        blocks = law.sample(i0, i1)
        out[i0 - lo:i1 - lo] += np.einsum("kab,kb->ka", blocks, x.blocks)
    return WindowVector(lo, out)


# -- algebra ----------------------------------------------------------------


def _check_compat(a: BandOperator, b: BandOperator, need_dim=True):
    if need_dim and a.block_dim != b.block_dim:
        raise ValueError(f"block size mismatch: {a.block_dim} vs {b.block_dim}")
    if a.exponent != b.exponent:
        raise UnsupportedExponentError(
            f"exponent mismatch: {a.exponent!r} vs {b.exponent!r}")


def add(a: BandOperator, b: BandOperator) -> BandOperator:
    _check_compat(a, b)
    z = _laws.zero_law(a.block_dim)
    diags = {}
    for off in sorted(set(a.offsets) | set(b.offsets)):
        la = a.law(off) or z
        lb = b.law(off) or z
        law = _laws.combine(lambda u, v: u + v, la, lb)
        if not law.is_zero():
            diags[off] = law
    return band_operator(diags, a.block_dim, a.exponent)


def scale(a: BandOperator, c: complex) -> BandOperator:
    if c == 0:
        return zero_operator(a.block_dim, a.exponent)
    diags = {off: law.mapped(lambda m: c * m) for off, law in a.diagonals}
    return band_operator(diags, a.block_dim, a.exponent)


def compose(a: BandOperator, b: BandOperator) -> BandOperator:
    """Operator product a @ b, band-width w_a + w_b."""
    _check_compat(a, b)
    terms: dict[int, list] = {}
    for oa, la in a.diagonals:
        for ob, lb in b.diagonals:
            # c_{oa+ob}(i) = a_{oa}(i) @ b_{ob}(i - oa)
            terms.setdefault(oa + ob, []).append(
                _laws.combine(lambda u, v: u @ v, la, lb.shifted(-oa)))
    diags = {}
    for off, parts in terms.items():
        law = parts[0] if len(parts) == 1 else _laws.combine(
            lambda *ms: sum(ms[1:], start=ms[0]), *parts)
        if not law.is_zero():
            diags[off] = law
    return band_operator(diags, a.block_dim, a.exponent)


def adjoint(a: BandOperator) -> BandOperator:
    """entry*(i, j) = entry(j, i)^H; eventually-periodic structure preserved."""
    diags = {}
    for off, law in a.diagonals:
        diags[-off] = law.shifted(off).mapped(_conj_t)
    return band_operator(diags, a.block_dim, a.exponent)


def shift_conjugate(a: BandOperator, k: int) -> BandOperator:
    """V_{-k} A V_k: entry'(i, j) = entry(i+k, j+k)."""
    diags = {off: law.shifted(k) for off, law in a.diagonals}
    return band_operator(diags, a.block_dim, a.exponent)


def direct_sum(a: BandOperator, b: BandOperator) -> BandOperator:
    """(x, f) -> (Ax, Bf) realized block-diagonally per position."""
    _check_compat(a, b, need_dim=False)
    za = _laws.zero_law(a.block_dim)
    zb = _laws.zero_law(b.block_dim)

    def blockdiag(u, v):
        out = np.zeros((u.shape[0] + v.shape[0],) * 2, dtype=complex)
        out[:u.shape[0], :u.shape[0]] = u
        out[u.shape[0]:, u.shape[0]:] = v
        return out

    diags = {}
    for off in sorted(set(a.offsets) | set(b.offsets)):
        la = a.law(off) or za
        lb = b.law(off) or zb
        law = _laws.combine(blockdiag, la, lb)
        if not law.is_zero():
            diags[off] = law
    return band_operator(diags, a.block_dim + b.block_dim, a.exponent)


def subtract_lambda(a: BandOperator, lam: complex) -> BandOperator:
    """A - lambda*I."""
    if lam == 0:
        return a
    return add(a, scale(identity_operator(a.block_dim, a.exponent), -lam))


# -- truncations and compressions -------------------------------------------


def column_truncate(a: BandOperator, m: int) -> BandOperator:
    """A Q_m: zero out all columns j with |j| <= m; class preserved."""
    w = a.band_width
    diags = {}
    for off, law in a.diagonals:
        radius = max(law.core_radius, m + w)
        core = tuple(law.at(k) if abs(k - off) > m
                     else np.zeros((a.block_dim,) * 2, dtype=complex)
                     for k in range(-radius, radius + 1))
        new = EventuallyPeriodic(core, radius, law.left_tail(), law.right_tail(),
                                 law.tainted)
        if not new.is_zero():
            diags[off] = _laws.normalized(new)
    return band_operator(diags, a.block_dim, a.exponent)


def row_truncate(a: BandOperator, m: int) -> BandOperator:
    """Q_m A: zero out all rows i with |i| <= m."""
    w = a.band_width
    diags = {}
    for off, law in a.diagonals:
        radius = max(law.core_radius, m + w)
        core = tuple(law.at(k) if abs(k) > m
                     else np.zeros((a.block_dim,) * 2, dtype=complex)
                     for k in range(-radius, radius + 1))
        new = EventuallyPeriodic(core, radius, law.left_tail(), law.right_tail(),
                                 law.tainted)
        if not new.is_zero():
            diags[off] = _laws.normalized(new)
    return band_operator(diags, a.block_dim, a.exponent)


def _as_range(interval) -> range:
    if isinstance(interval, range):
        if interval.step != 1:
            raise ValueError("windows must be contiguous")
        return interval
    lo, hi = interval
    return range(lo, hi)


def dense_window(a: BandOperator, rows: range, cols: range) -> np.ndarray:
    """Dense matrix of A's entries on rows x cols."""
    d = a.block_dim
    out = np.zeros((len(rows) * d, len(cols) * d), dtype=complex)
    r0, c0 = rows.start, cols.start
    for off, law in a.diagonals:
        i0 = max(rows.start, cols.start + off)
        i1 = min(rows.stop, cols.stop + off)
        if i1 <= i0:
            continue
        blocks = law.sample(i0, i1)
        for t in range(i1 - i0):
            i = i0 + t
            j = i - off
            out[(i - r0) * d:(i - r0 + 1) * d, (j - c0) * d:(j - c0 + 1) * d] = blocks[t]
    return out


def sparse_window(a: BandOperator, rows: range, cols: range) -> scipy.sparse.csr_matrix:
    """Sparse (csr) version of dense_window for large compressions."""
    d = a.block_dim
    rr, cc, vv = [], [], []
    r0, c0 = rows.start, cols.start
    cell = np.arange(d)
    for off, law in a.diagonals:
        i0 = max(rows.start, cols.start + off)
        i1 = min(rows.stop, cols.stop + off)
        if i1 <= i0:
            continue
        blocks = law.sample(i0, i1)
        n = i1 - i0
        base_r = (np.arange(i0, i1) - r0) * d
        base_c = (np.arange(i0, i1) - off - c0) * d
        rr.append((base_r[:, None, None] + cell[None, :, None]
                   + np.zeros((1, 1, d), dtype=int)).ravel())
        cc.append((base_c[:, None, None] + np.zeros((1, d, 1), dtype=int)
                   + cell[None, None, :]).ravel())
        vv.append(blocks.reshape(n * d * d))
    if not rr:
        return scipy.sparse.csr_matrix((len(rows) * d, len(cols) * d), dtype=complex)
    return scipy.sparse.coo_matrix(
        (np.concatenate(vv), (np.concatenate(rr), np.concatenate(cc))),
        shape=(len(rows) * d, len(cols) * d)).tocsr()


@dataclass(frozen=True, eq=False)
class WindowCompression:
    """Rectangular compression: A restricted to cols, observed on rows."""

    row_window: range
    col_window: range
    matrix: np.ndarray


def window_compression(a: BandOperator, cols, rows=None) -> WindowCompression:
    """Compression with columns supported on ``cols``.

    Rows default to the columns expanded by the band width, which captures
    A(chi_cols x) exactly: the band property kills all other rows.
    """
    cols = _as_range(cols)
    if rows is None:
        w = a.band_width
        rows = range(cols.start - w, cols.stop + w)
    else:
        rows = _as_range(rows)
    return WindowCompression(rows, cols, dense_window(a, rows, cols))


def truncate(a: BandOperator, n: int) -> np.ndarray:
    """Finite section P_n A P_n as a dense (2n+1)d x (2n+1)d matrix."""
    if n < 0:
        raise ValueError("n must be >= 0")
    win = range(-n, n + 1)
    return dense_window(a, win, win)


def operators_equal(a: BandOperator, b: BandOperator) -> bool:
    """Exact entrywise equality over all of Z."""
    if a.block_dim != b.block_dim or a.exponent != b.exponent:
        return False
    offs = set(a.offsets) | set(b.offsets)
    z = _laws.zero_law(a.block_dim)
    return all(_laws.laws_equal(a.law(o) or z, b.law(o) or z) for o in offs)
