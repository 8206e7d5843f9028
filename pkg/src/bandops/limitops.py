"""Limit operators of eventually-periodic band operators, exactly.

Every diagonal law here has periodic tails, so translates toward +inf or
-inf converge entrywise to purely periodic operators: the shifted copies
of the two tail operators.  Enumerating shift residues 0..q-1 for each
direction and deduplicating entrywise therefore yields the complete
operator spectrum.  (The paper defines the spectrum through arbitrary
sequences h tending to infinity; for periodic tails every such sequence
has a subsequence with constant residue mod q, which gives exactly the
operators listed here.  This folklore reduction is what makes the
enumeration finite and exact.)

Periodic operators are evaluated through their folded matrix symbol: for
period q and block size d, positions are folded as i = q*t + s, giving a
block Laurent operator with (dq) x (dq) Fourier coefficients.  On l^2 the
operator is unitarily equivalent to multiplication by a(theta), so norm,
lower norm and resolvent reciprocals are extrema of singular values of
a(theta) over [0, 2pi).  Those extrema are certified: singular values are
1-Lipschitz in the matrix, which bounds their theta-derivative both via
Lip(a) <= sum |k| ||a_k|| and via the squared symbol a*a (the latter is
what certifies flat stretches, e.g. unitary shifts, at zero cost).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import operator as op
from .errors import UnsupportedExponentError, UnsupportedSymbolClassError
from .laws import Periodic

TWO_PI = 2.0 * math.pi

#: default theta sample count before refinement (public laurent_* entry points)
THETA_GRID = 1024

#: default certification tolerance for symbol extrema
SYMBOL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LimitOperator:
    """A purely periodic band operator tagged with how it arises.

    ``tags`` collects (direction, residue) pairs; directions with
    identical tails collapse into one listed operator.
    """

    operator: op.BandOperator
    tags: tuple  # of (direction str '+'/'-', residue int)

    @property
    def directions(self) -> tuple:
        return tuple(sorted({d for d, _ in self.tags}))

    @property
    def period(self) -> int:
        return self.operator.right_period


def tail_operator(a: op.BandOperator, side: str) -> op.BandOperator:
    """The purely periodic operator matching A's entries toward one infinity."""
    diags = {}
    for off, law in a.diagonals:
        tail = law.left_tail() if side == "-" else law.right_tail()
        if not tail.is_zero():
            diags[off] = tail
    return op.band_operator(diags, a.block_dim, a.exponent)


def operator_spectrum(a: op.BandOperator) -> list[LimitOperator]:
    """All limit operators of an eventually-periodic band operator."""
    if not a.enumerable:
        raise UnsupportedSymbolClassError(
            "operator spectrum is only enumerable for constant, periodic and "
            "eventually-periodic diagonals (seeded-random has uncountably many "
            "limit operators)")
    candidates = []
    for side in ("+", "-"):
        tail = tail_operator(a, side)
        q = a.right_period if side == "+" else a.left_period
        for r in range(q):
            candidates.append((op.shift_conjugate(tail, r), (side, r)))
    listed: list[tuple[op.BandOperator, list]] = []
    for cand, tag in candidates:
        for seen, tags in listed:
            if op.operators_equal(seen, cand):
                tags.append(tag)
                break
        else:
            listed.append((cand, [tag]))
    return [LimitOperator(o, tuple(tags)) for o, tags in listed]


# -- folded symbols ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Symbol:
    """Matrix symbol a(theta) = sum_k blocks[k] exp(i k theta)."""

    block_dim: int
    blocks: tuple  # of (k, ndarray)

    def eval(self, theta: float) -> np.ndarray:
        out = np.zeros((self.block_dim, self.block_dim), dtype=complex)
        for k, b in self.blocks:
            out += b * np.exp(1j * k * theta)
        return out

    def eval_many(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        out = np.zeros((thetas.size, self.block_dim, self.block_dim), dtype=complex)
        for k, b in self.blocks:
            out += np.exp(1j * k * thetas)[:, None, None] * b
        return out

    def lipschitz(self) -> float:
        """Bound on ||a'(theta)||: sum_k |k| ||a_k||."""
        return float(sum(abs(k) * np.linalg.norm(b, 2) for k, b in self.blocks))

    def shifted_by(self, lam: complex) -> "Symbol":
        """Symbol of the operator minus lam * identity."""
        if lam == 0:
            return self
        blocks = dict(self.blocks)
        b0 = blocks.get(0, np.zeros((self.block_dim,) * 2, dtype=complex))
        blocks[0] = b0 - lam * np.eye(self.block_dim)
        return Symbol(self.block_dim, tuple(sorted(blocks.items())))

    def squared_lipschitz(self) -> float:
        """Bound on |d/dtheta sigma(a)^2| via the coefficients of a* a."""
        blocks = dict(self.blocks)
        ks = sorted(blocks)
        total = 0.0
        lo, hi = ks[0] - ks[-1], ks[-1] - ks[0]
        for m in range(lo, hi + 1):
            if m == 0:
                continue
            c = np.zeros((self.block_dim,) * 2, dtype=complex)
            got = False
            for k in ks:
                if k + m in blocks:
                    c += blocks[k].conj().T @ blocks[k + m]
                    got = True
            if got:
                total += abs(m) * np.linalg.norm(c, 2)
        return float(total)

    def invariant_lipschitz_2x2(self) -> tuple:
        """Lipschitz bounds for tr(a*a)/2 and |det a|^2 (2x2 symbols).

        Both are exact trigonometric polynomials in theta; their
        coefficient sums bound the derivatives.  These certify symbols
        whose singular values are constant while the singular vectors
        rotate (block-diagonal tails folded across the period).
        """
        if self.block_dim != 2:
            raise ValueError("only defined for 2x2 symbols")
        blocks = dict(self.blocks)
        ks = sorted(blocks)
        lo, hi = ks[0] - ks[-1], ks[-1] - ks[0]
        lt = 0.0
        for m in range(lo, hi + 1):
            if m == 0:
                continue
            c = np.zeros((2, 2), dtype=complex)
            for k in ks:
                if k + m in blocks:
                    c += blocks[k].conj().T @ blocks[k + m]
            lt += abs(m) * abs(np.trace(c)) / 2.0
        # coefficients of det(a)(theta), then of |det a|^2
        det_coeffs: dict[int, complex] = {}
        for k1 in ks:
            for k2 in ks:
                m = k1 + k2
                det_coeffs[m] = det_coeffs.get(m, 0.0) + (
                    blocks[k1][0, 0] * blocks[k2][1, 1]
                    - blocks[k1][0, 1] * blocks[k2][1, 0])
        ldet = 0.0
        ms = sorted(det_coeffs)
        for m1 in ms:
            for m2 in ms:
                diff = m2 - m1
                if diff != 0:
                    ldet += abs(diff) * abs(np.conj(det_coeffs[m1])
                                            * det_coeffs[m2])
        return float(lt), float(ldet)


def fold_symbol(target) -> Symbol:
    """Fold a purely periodic operator (or LimitOperator) into its symbol.

    Positions fold as i = q*t + s with s in [0, q); the (t, u) block of the
    folded Laurent operator depends only on k = t - u, giving finitely many
    (dq) x (dq) Fourier blocks hat(a)_k[s, s'] = entry(q k + s, s').
    """
    a = target.operator if isinstance(target, LimitOperator) else target
    if a.core_radius != 0 or a.left_period != a.right_period:
        raise ValueError("fold_symbol needs a purely periodic operator")
    q = a.right_period
    d = a.block_dim
    w = a.band_width
    kmax = (w + q - 1) // q + 1
    blocks = {}
    for k in range(-kmax, kmax + 1):
        b = np.zeros((d * q, d * q), dtype=complex)
        nonzero = False
        for s in range(q):
            for s2 in range(q):
                e = a.entry(q * k + s, s2)
                if e.any():
                    b[s * d:(s + 1) * d, s2 * d:(s2 + 1) * d] = e
                    nonzero = True
        if nonzero:
            blocks[k] = b
    if not blocks:
        blocks[0] = np.zeros((d * q, d * q), dtype=complex)
    return Symbol(d * q, tuple(sorted(blocks.items())))


# -- certified extrema of singular values ------------------------------------


def _sigma_batch(mats: np.ndarray, which: str) -> np.ndarray:
    """Extreme singular values of a stack of small matrices.

    Closed-form (and cancellation-free) for sizes 1 and 2; batched
    Hermitian eigensolve on the normal matrix above that, which carries
    an absolute fuzz of ~sqrt(eps)*sigma_max near sigma = 0 (see the
    certification floor in certified_extremum).
    """
    n = mats.shape[-1]
    if n == 1:
        return np.abs(mats[:, 0, 0])
    if n == 2:
        p = (np.abs(mats) ** 2).sum(axis=(1, 2))
        det = np.abs(mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0])
        disc = np.sqrt(np.maximum(p * p - 4.0 * det * det, 0.0))
        smax = np.sqrt((p + disc) / 2.0)
        if which == "max":
            return smax
        with np.errstate(invalid="ignore", divide="ignore"):
            smin = np.where(smax > 0, det / np.where(smax > 0, smax, 1.0), 0.0)
        return smin
    normal = np.einsum("kji,kjl->kil", mats.conj(), mats)
    w = np.linalg.eigvalsh(normal)
    return np.sqrt(np.maximum(w[:, -1] if which == "max" else w[:, 0], 0.0))


def certified_extremum(symbol: Symbol, which: str, tol: float = SYMBOL_TOL,
                       n_init: int = THETA_GRID, max_evals: int = 2_000_000) -> float:
    """min or max over theta of the extreme singular value of a(theta).

    Uniform sampling followed by bisection of the cells that could still
    carry the extremum, pruned with two first-order Lipschitz bounds (on
    sigma and on sigma^2; the squared bound is exact-rate for flat
    stretches such as unitary shifts).  The returned value differs from
    the true extremum by at most ``tol``.
    """
    sign = 1.0 if which == "max" else -1.0
    lf = symbol.lipschitz()
    lg = symbol.squared_lipschitz()
    two = symbol.block_dim == 2
    lt = ldet = 0.0
    if two:
        lt, ldet = symbol.invariant_lipschitz_2x2()
    if symbol.block_dim > 2 and which == "min":
        # normal-matrix evaluation fuzz caps attainable certification
        scale = sum(np.linalg.norm(b, 2) for _, b in symbol.blocks)
        tol = max(tol, 1e-7 * max(scale, 1.0))

    def evaluate(thetas):
        mats = symbol.eval_many(thetas)
        if not two:
            f = _sigma_batch(mats, which)
            return f, None, None
        p = (np.abs(mats) ** 2).sum(axis=(1, 2))
        det2 = np.abs(mats[:, 0, 0] * mats[:, 1, 1]
                      - mats[:, 0, 1] * mats[:, 1, 0]) ** 2
        disc = np.sqrt(np.maximum(p * p - 4.0 * det2, 0.0))
        lam = (p + disc) / 2.0 if which == "max" else \
            2.0 * det2 / np.maximum(p + disc, 1e-300)
        return np.sqrt(np.maximum(lam, 0.0)), p, det2

    def cell_bounds(fa, fb, h, pa, pb, da, db):
        # best possible f inside each cell, in the direction of the extremum;
        # each bound is valid, so combine toward the tightest one
        tighten = np.minimum if sign > 0 else np.maximum
        b1 = (fa + fb) / 2.0 + sign * lf * h / 2.0
        g = (fa * fa + fb * fb) / 2.0 + sign * lg * h / 2.0
        out = tighten(b1, np.sqrt(np.maximum(g, 0.0)))
        if two:
            # sigma^2 are roots of x^2 - 2 t x + det; t and det enclose
            # monotonically, which certifies rotating-eigenvector flats
            t_hi = (pa + pb) / 4.0 + lt * h / 2.0
            det_lo = np.maximum((da + db) / 2.0 - ldet * h / 2.0, 0.0)
            disc = np.sqrt(np.maximum(t_hi * t_hi - det_lo, 0.0))
            lam = t_hi + disc if sign > 0 else \
                det_lo / np.maximum(t_hi + disc, 1e-300)
            out = tighten(out, np.sqrt(np.maximum(lam, 0.0)))
        return out if sign > 0 else np.maximum(out, 0.0)

    thetas = np.linspace(0.0, TWO_PI, n_init, endpoint=False)
    fvals, pvals, dvals = evaluate(thetas)
    best = float(fvals.max() if which == "max" else fvals.min())
    evals = n_init

    def roll(x):
        return None if x is None else np.roll(x, -1)

    # level-synchronous subdivision: all surviving cells share one width,
    # so every round is a single vectorized sweep
    h = TWO_PI / n_init
    starts, fa, fb = thetas, fvals, roll(fvals)
    pa, pb, da, db = pvals, roll(pvals), dvals, roll(dvals)
    zero = np.zeros(0)
    while starts.size and evals < max_evals:
        args = (pa, pb, da, db) if two else (zero,) * 4
        bounds = cell_bounds(fa, fb, h, *args)
        keep = sign * (bounds - best) > tol
        if not keep.any():
            break
        starts, fa, fb = starts[keep], fa[keep], fb[keep]
        if two:
            pa, pb, da, db = pa[keep], pb[keep], da[keep], db[keep]
        fm, pm, dm = evaluate(starts + h / 2.0)
        evals += starts.size
        best = max(best, float(fm.max())) if sign > 0 else min(best, float(fm.min()))
        h /= 2.0
        starts = np.concatenate([starts, starts + h])
        fa, fb = np.concatenate([fa, fm]), np.concatenate([fm, fb])
        if two:
            pa, pb = np.concatenate([pa, pm]), np.concatenate([pm, pb])
            da, db = np.concatenate([da, dm]), np.concatenate([dm, db])
    return best


def _as_symbol(target) -> Symbol:
    if isinstance(target, Symbol):
        return target
    a = target.operator if isinstance(target, LimitOperator) else target
    if a.exponent != 2:
        raise UnsupportedExponentError("symbol evaluation needs p = 2")
    return fold_symbol(target)


def laurent_norm(target, tol: float = SYMBOL_TOL) -> float:
    """Operator norm of a periodic operator: max_theta sigma_max(a(theta))."""
    return certified_extremum(_as_symbol(target), "max", tol)


def laurent_lower_norm(target, tol: float = SYMBOL_TOL) -> float:
    """Lower norm of a periodic operator: min_theta sigma_min(a(theta))."""
    return certified_extremum(_as_symbol(target), "min", tol)


def laurent_resolvent_recip(target, lam: complex, tol: float = SYMBOL_TOL,
                            n_init: int = THETA_GRID) -> float:
    """1 / ||(L - lam)^-1|| = min_theta sigma_min(a(theta) - lam I)."""
    return certified_extremum(_as_symbol(target).shifted_by(lam), "min", tol,
                              n_init=n_init)
