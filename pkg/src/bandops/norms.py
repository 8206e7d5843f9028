"""Norm functionals on band operators.

Operator norm and lower norm are computed from window compressions: for a
window W of columns, the compression with rows W expanded by the band
width w captures A(chi_W x) exactly (the band property makes every other
row identically zero), so its extreme singular values are the exact
constrained sup/inf of ||Ax||/||x|| over supp x inside W.  The window
sup/inf is monotone in the window length D and converges to the true
norm (from below) and lower norm (from above).

For eventually-periodic symbols the distinct windows at a given length
are finite: windows overlapping the core influence zone, plus one window
per tail residue.  The ladder over D grows geometrically (in multiples
of twice the overall period) and stops on the spec's three-increment
rule, sharpened by a geometric-remainder estimate so that slowly
converging O(1/D^2) tails are not declared converged early.

The asymptotic quantities (essential norm as lim ||A Q_m||, and the
compression limits mu_tilde / mu) become exactly computable here: once m
clears the core radius plus band width, the remaining windows see pure
tails, so the m-sequences are constant and the tail shortcut through the
periodic symbol is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import limitops as lo
from . import linalg
from . import operator as op
from .errors import UnsupportedExponentError
from .operator import BandOperator

#: windows stop growing past this many scalar columns (honesty cap)
MAX_WINDOW_COLUMNS = 6000

#: absolute resolution floor used by grid sweeps at (near-)spectral points;
#: a windowed value this small already bounds its own error
GRID_FLOOR = 1.5e-3


@dataclass(frozen=True)
class ConvergedValue:
    """A windowed limit with the window size and residual gap that produced it."""

    value: float
    window_size_used: int
    cauchy_gap: float
    converged: bool


# -- window machinery ---------------------------------------------------------


def _sigma_window(a: BandOperator, cols: range, which: str) -> float:
    """Extreme singular value of the compression with columns ``cols``."""
    w = a.band_width
    rows = range(cols.start - w, cols.stop + w)
    ncols = len(cols) * a.block_dim
    if ncols <= linalg.DENSE_CUTOFF:
        vals = linalg.svdvals(op.dense_window(a, rows, cols))
        return float(vals[-1] if which == "min" else vals[0])
    t = op.sparse_window(a, rows, cols)
    bandwidth = a.block_dim * (2 * w + 1) - 1
    return linalg.extreme_singular_values_sparse(t, bandwidth, which)


def _whole_period(a: BandOperator) -> int:
    q = a.left_period
    return q * a.right_period // math.gcd(q, a.right_period)


def _tail_starts(a: BandOperator, side: str, all_residues: bool) -> list[int]:
    m = a.core_radius + a.band_width
    q = a.right_period if side == "+" else a.left_period
    residues = range(q) if all_residues else range(1)
    if side == "+":
        return [m + 1 + r for r in residues]
    return [-(m + 1 + r) for r in residues]  # window *ends* at this position


def _norm_family(a: BandOperator, d_len: int) -> list[range]:
    """Column windows whose sup/inf at length d_len covers all windows."""
    wins: list[range] = []
    small = d_len <= 2 * _whole_period(a) + 2 * a.band_width + 2
    for s in _tail_starts(a, "+", small):
        wins.append(range(s, s + d_len))
    for e in _tail_starts(a, "-", small):
        wins.append(range(e - d_len + 1, e + 1))
    if a.core_radius > 0:
        r = a.core_radius + a.band_width + d_len
        wins.append(range(-r, r + 1))
    return wins


def _ladder(eval_at, d0: int, step: int, tol: float, mode: str,
            floor: float | None, max_cols: int, block_dim: int) -> ConvergedValue:
    """Monotone window ladder with three-increment + remainder stopping."""
    best = None
    vals: list[float] = []
    d = d0
    while True:
        v = eval_at(d)
        best = v if best is None else (min(best, v) if mode == "min" else max(best, v))
        vals.append(best)
        if mode == "min" and floor is not None and best <= floor:
            return ConvergedValue(best, d, best, True)
        if len(vals) >= 4:
            deltas = [abs(vals[-i] - vals[-i - 1]) for i in (1, 2, 3)]
            scale = max(abs(best), 1.0)
            if all(dl <= 1e-14 * scale for dl in deltas[:2]):
                return ConvergedValue(best, d, deltas[0], True)
            d2, d1 = deltas[0], deltas[1]
            if d2 < d1:
                remaining = d2 * d2 / (d1 - d2)
            else:
                remaining = 3.0 * d2 if d2 > 0 else 0.0
            gap = max(d2, remaining)
            if all(dl <= tol for dl in deltas) and remaining <= tol:
                return ConvergedValue(best, d, gap, True)
        if d * block_dim >= max_cols:
            gap = abs(vals[-1] - vals[-2]) if len(vals) >= 2 else math.inf
            return ConvergedValue(best, d, gap, False)
        d += step * max(1, round(0.35 * d / step))


def _d0_step(a: BandOperator) -> tuple[int, int]:
    q = _whole_period(a)
    w = a.band_width
    return max(2 * w + 1, q, 3), 2 * q


# -- localized and full operator norms ---------------------------------------


def window_start_representatives(a: BandOperator, d_len: int) -> list[int]:
    """All window start positions that can realize distinct compressions."""
    q = _whole_period(a)
    m = a.core_radius
    w = a.band_width
    if m == 0:
        return list(range(q))
    return list(range(-m - w - (d_len - 1) - q, m + w + q + 1))


def norm_localized(a: BandOperator, d_len: int, p=None) -> float:
    """|||A|||_D: exact sup of ||Ax||/||x|| over supports of length d_len."""
    if d_len < 1:
        raise ValueError("window length must be >= 1")
    if a.is_zero():
        return 0.0
    p = a.exponent if p is None else p
    best = 0.0
    for s in window_start_representatives(a, d_len):
        cols = range(s, s + d_len)
        if p == 2:
            v = _sigma_window(a, cols, "max")
        else:
            w = a.band_width
            rows = range(cols.start - w, cols.stop + w)
            v = linalg.induced_p_norm(op.dense_window(a, rows, cols), p)
        best = max(best, v)
    return best


def ploc_window_size(w: int, delta: float, p=2) -> int:
    """Smallest odd D = 2n+1 with 4w/(2n+1) < (delta/4)^p (p < inf)."""
    if p == math.inf:
        return 2 * w + 1
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    target = (delta / 4.0) ** p
    n = max(int(math.ceil((4.0 * w / target - 1.0) / 2.0)), 1)
    while 4.0 * w / (2 * n + 1) >= target:
        n += 1
    return 2 * n + 1


def window_delta(w: int, d_len: int, p=2) -> float:
    """The localization defect certified by window length d_len."""
    if p == math.inf:
        return 0.0 if d_len >= 2 * w + 1 else 1.0
    if w == 0:
        return 0.0
    return min(1.0, 4.0 * (4.0 * w / d_len) ** (1.0 / p))


def _exact_sup_norm_p1_inf(a: BandOperator) -> float:
    """Exact operator norm for p in {1, inf} via row/column sups."""
    m = a.core_radius
    w = a.band_width
    ql, qr = a.left_period, a.right_period
    best = 0.0
    if a.exponent == math.inf:
        for i in range(-m - ql, m + qr + 1):
            row = np.hstack([a.entry(i, j) for j in range(i - w, i + w + 1)])
            best = max(best, float(np.abs(row).sum(axis=1).max()))
    else:
        for j in range(-m - w - ql, m + w + qr + 1):
            col = np.vstack([a.entry(i, j) for i in range(j - w, j + w + 1)])
            best = max(best, float(np.abs(col).sum(axis=0).max()))
    return best


def op_norm(a: BandOperator, tol: float = 1e-6) -> ConvergedValue:
    """Operator norm of A, reported from the monotone window ladder.

    For p in {1, inf} the window of length 2w+1 is already exact; for
    p = 2 the ladder converges from below with the certified PLoc defect
    available through window_delta().
    """
    if a.is_zero():
        return ConvergedValue(0.0, 0, 0.0, True)
    if a.exponent != 2:
        return ConvergedValue(_exact_sup_norm_p1_inf(a), 2 * a.band_width + 1,
                              0.0, True)
    d0, step = _d0_step(a)
    return _ladder(lambda d: max(_sigma_window(a, win, "max")
                                 for win in _norm_family(a, d)),
                   d0, step, tol, "max", None, MAX_WINDOW_COLUMNS, a.block_dim)


def lower_norm(a: BandOperator, tol: float = 1e-6,
               floor: float | None = None,
               max_cols: int = MAX_WINDOW_COLUMNS) -> ConvergedValue:
    """nu(A) = inf ||Ax|| over unit x, from above along the window ladder.

    ``floor`` (optional) stops early once the value itself drops below it;
    since windowed values upper-bound nu(A) >= 0, a value below the floor
    already carries an error bound of its own size.
    """
    if a.exponent != 2:
        raise UnsupportedExponentError("lower norms are computed for p = 2 only")
    if a.is_zero():
        return ConvergedValue(0.0, 0, 0.0, True)
    d0, step = _d0_step(a)
    return _ladder(lambda d: min(_sigma_window(a, win, "min")
                                 for win in _norm_family(a, d)),
                   d0, step, tol, "min", floor, max_cols, a.block_dim)


def inverse_norm_recip(a: BandOperator, tol: float = 1e-6,
                       floor: float | None = None) -> float:
    """||A^-1||^-1 = min(nu(A), nu(A*)); 0 signals non-invertibility."""
    va = lower_norm(a, tol, floor)
    vb = lower_norm(op.adjoint(a), tol, floor)
    return min(va.value, vb.value)


# -- essential norms ----------------------------------------------------------


def essential_norm_q(a: BandOperator, tol: float = 1e-6) -> ConvergedValue:
    """Essential norm as lim_m ||A Q_m||.

    The sequence is exactly constant once m clears core radius + band
    width (all remaining columns see pure tails), so two stations of the
    m-ladder certify the limit; their disagreement, plus the inner window
    gaps, is reported as the Cauchy gap.
    """
    if a.is_zero():
        return ConvergedValue(0.0, 0, 0.0, True)
    m0 = a.core_radius + a.band_width
    stations = []
    for m in (m0, m0 + 1):
        truncated = op.column_truncate(a, m)
        if truncated.is_zero():
            stations.append(ConvergedValue(0.0, 0, 0.0, True))
        else:
            stations.append(op_norm(truncated, tol / 2))
    v0, v1 = stations
    gap = max(v0.cauchy_gap, v1.cauchy_gap, abs(v0.value - v1.value))
    return ConvergedValue(max(v0.value, v1.value),
                          max(v0.window_size_used, v1.window_size_used),
                          gap, v0.converged and v1.converged)


def essential_norm_via_limops(a: BandOperator, tol: float = lo.SYMBOL_TOL) -> float:
    """Essential norm as the maximum norm over the operator spectrum."""
    spectrum = lo.operator_spectrum(a)
    if not spectrum:
        return 0.0
    return max((lo.laurent_norm(l, tol) if not l.operator.is_zero() else 0.0)
               for l in spectrum)


# -- compression limits mu_tilde and mu ---------------------------------------


def _mu_stage_windows(a: BandOperator, m: int, d_len: int) -> list[range]:
    """Column windows of length d_len disjoint from [-m, m]."""
    edge = a.core_radius + a.band_width
    wins = []
    for s in range(m + 1, max(m + 1, edge + 1) + a.right_period):
        wins.append(range(s, s + d_len))
    for e in range(-m - 1, min(-m - 1, -edge - 1) - a.left_period, -1):
        wins.append(range(e - d_len + 1, e + 1))
    return wins


def mu_tilde_stage(a: BandOperator, m: int, d_len: int) -> float:
    """min sigma_min over windows of length d_len outside [-m, m]."""
    if a.exponent != 2:
        raise UnsupportedExponentError("mu_tilde is computed for p = 2 only")
    return min(_sigma_window(a, win, "min")
               for win in _mu_stage_windows(a, m, d_len))


def _mu_tilde_windowed(a: BandOperator, tol: float, floor: float | None,
                       max_cols: int = MAX_WINDOW_COLUMNS) -> ConvergedValue:
    if a.is_zero():
        return ConvergedValue(0.0, 0, 0.0, True)
    m = a.core_radius + a.band_width
    d0, step = _d0_step(a)
    return _ladder(lambda d: mu_tilde_stage(a, m, d), d0, step, tol, "min",
                   floor, max_cols, a.block_dim)


def mu_tilde(a: BandOperator, tol: float = 1e-6) -> ConvergedValue:
    """Limit of lower norms of the compressions beyond [-m, m].

    For the symbol classes here the limit equals the smallest lower norm
    of the two tail operators; that exact (certified) shortcut is the
    returned value, with the windowed computation run as a cross-check
    whose residual distance is folded into the reported gap.
    """
    if a.exponent != 2:
        raise UnsupportedExponentError("mu_tilde is computed for p = 2 only")
    if a.is_zero():
        return ConvergedValue(0.0, 0, 0.0, True)
    tails = [lo.tail_operator(a, side) for side in ("-", "+")]
    shortcut = min((0.0 if t.is_zero() else lo.laurent_lower_norm(t))
                   for t in tails)
    windowed = _mu_tilde_windowed(a, max(tol, 1e-4), floor=shortcut + tol,
                                  max_cols=1500)
    gap = max(0.0, windowed.value - shortcut)
    return ConvergedValue(shortcut, windowed.window_size_used, gap, True)


def mu(a: BandOperator, tol: float = 1e-6) -> ConvergedValue:
    """mu(A) = min(mu_tilde(A), mu_tilde(A*))."""
    va = mu_tilde(a, tol)
    vb = mu_tilde(op.adjoint(a), tol)
    return ConvergedValue(min(va.value, vb.value),
                          max(va.window_size_used, vb.window_size_used),
                          max(va.cauchy_gap, vb.cauchy_gap),
                          va.converged and vb.converged)


def mu_windowed(a: BandOperator, tol: float = 1e-6,
                floor: float | None = None,
                max_cols: int = MAX_WINDOW_COLUMNS) -> ConvergedValue:
    """mu(A) computed purely from finite window compressions.

    Independent of the symbol machinery; this is the route used when a
    cross-check against the limit-operator formula is wanted.
    """
    va = _mu_tilde_windowed(a, tol, floor, max_cols)
    vb = _mu_tilde_windowed(op.adjoint(a), tol, floor, max_cols)
    return ConvergedValue(min(va.value, vb.value),
                          max(va.window_size_used, vb.window_size_used),
                          max(va.cauchy_gap, vb.cauchy_gap),
                          va.converged and vb.converged)


# -- essential resolvent -------------------------------------------------------


def essential_resolvent_recip(a: BandOperator, lam: complex,
                              tol: float = 1e-6,
                              floor: float | None = None) -> float:
    """mu(A - lam I), the reciprocal essential resolvent norm.

    Computed from window compressions so that it stays an independent
    route next to the limit-operator formula (essential_resolvent_both
    reports both values and their discrepancy).
    """
    b = op.subtract_lambda(a, lam)
    return mu_windowed(b, tol, floor).value


def essential_resolvent_both(a: BandOperator, lam: complex,
                             tol: float = 1e-6,
                             floor: float | None = None,
                             spectrum=None,
                             symbol_tol: float = 1e-7) -> tuple[float, float]:
    """(windowed mu(A - lam), [max_h ||(A_h - lam)^-1||]^-1) for cross-checks."""
    mu_val = essential_resolvent_recip(a, lam, tol, floor)
    if spectrum is None:
        spectrum = lo.operator_spectrum(a)
    if not spectrum:
        lim_val = math.inf
    else:
        lim_val = min(
            (abs(lam) if l.operator.is_zero()
             else lo.laurent_resolvent_recip(l, lam, symbol_tol, n_init=128))
            for l in spectrum)
    return mu_val, lim_val
