"""Pseudospectra and essential pseudospectra on rectangular grids.

Grids store the reciprocal resolvent norm (or its essential variant) at
every node, so a single grid serves every epsilon through strict-
inequality level sets.  Values are zero exactly on the (essential)
spectrum; on a finite grid the closure/strict-inequality distinction of
the Hausdorff statement sits below one cell and is reported as such.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import limitops as lo
from . import norms
from . import operator as op
from .errors import PreconditionError
from .operator import BandOperator, WindowVector

_MERGE = {"mu", "limitops", "both"}


@dataclass(frozen=True, eq=False)
class PseudospectrumGrid:
    """Reciprocal resolvent norms on an nx x ny rectangular lambda-grid."""

    re_range: tuple
    im_range: tuple
    nx: int
    ny: int
    values: np.ndarray          # shape (nx, ny)
    kind: str                   # 'plain' or 'essential'
    tol: float
    values_alt: np.ndarray | None = None  # second method, when computed

    def node(self, ix: int, iy: int) -> complex:
        re = self.re_range[0] if self.nx == 1 else (
            self.re_range[0] + ix * (self.re_range[1] - self.re_range[0]) / (self.nx - 1))
        im = self.im_range[0] if self.ny == 1 else (
            self.im_range[0] + iy * (self.im_range[1] - self.im_range[0]) / (self.ny - 1))
        return complex(re, im)

    def nodes(self) -> np.ndarray:
        res = np.linspace(*self.re_range, self.nx)
        ims = np.linspace(*self.im_range, self.ny)
        return res[:, None] + 1j * ims[None, :]

    def max_discrepancy(self) -> float:
        if self.values_alt is None:
            raise ValueError("grid was computed with a single method")
        return float(np.abs(self.values - self.values_alt).max())


def _lambda_list(box, nx, ny) -> list[complex]:
    re0, re1, im0, im1 = box
    res = np.linspace(re0, re1, nx)
    ims = np.linspace(im0, im1, ny)
    return [complex(r, i) for r in res for i in ims]


def _evaluate(fn, lams, jobs) -> list[float]:
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, lams))
    return [fn(lam) for lam in lams]


def pseudospectrum_grid(a: BandOperator, box, nx: int, ny: int,
                        tol: float = 1e-6, jobs: int = 1) -> PseudospectrumGrid:
    """Grid of ||(A - lambda)^-1||^-1 = min(nu, nu*) at each node.

    Near-spectral nodes are resolved down to the windowed-value floor
    (max(tol, GRID_FLOOR)); a value below the floor bounds its own error.
    """
    floor = max(tol, norms.GRID_FLOOR)

    def value(lam: complex) -> float:
        return norms.inverse_norm_recip(op.subtract_lambda(a, lam), tol, floor)

    vals = _evaluate(value, _lambda_list(box, nx, ny), jobs)
    grid = np.array(vals).reshape(nx, ny)
    return PseudospectrumGrid((box[0], box[1]), (box[2], box[3]), nx, ny,
                              grid, "plain", tol)


def essential_pseudospectrum_grid(a: BandOperator, box, nx: int, ny: int,
                                  tol: float = 1e-6, method: str = "mu",
                                  jobs: int = 1) -> PseudospectrumGrid:
    """Essential variant; ``method`` picks the computational route.

    'mu' uses window compressions of A - lambda (no symbols involved),
    'limitops' evaluates max resolvent norms over the operator spectrum
    through certified symbol extrema, 'both' computes the two and stores
    the limit-operator values as the alternate sheet.
    """
    if method not in _MERGE:
        raise ValueError(f"method must be one of {sorted(_MERGE)}")
    lams = _lambda_list(box, nx, ny)
    floor = max(tol, norms.GRID_FLOOR)
    vals = alt = None
    if method in ("mu", "both"):
        def value_mu(lam: complex) -> float:
            return norms.essential_resolvent_recip(a, lam, tol, floor)
        vals = np.array(_evaluate(value_mu, lams, jobs)).reshape(nx, ny)
    if method in ("limitops", "both"):
        spectrum = lo.operator_spectrum(a)
        symbols = [None if l.operator.is_zero() else lo.fold_symbol(l)
                   for l in spectrum]

        def value_lim(lam: complex) -> float:
            best = math.inf
            for sym in symbols:
                v = abs(lam) if sym is None else lo.certified_extremum(
                    sym.shifted_by(lam), "min", max(tol, 1e-7), n_init=128)
                best = min(best, v)
            return best
        alt = np.array(_evaluate(value_lim, lams, jobs)).reshape(nx, ny)
    if method == "limitops":
        vals, alt = alt, None
    return PseudospectrumGrid((box[0], box[1]), (box[2], box[3]), nx, ny,
                              vals, "essential", tol, alt)


def level_set(grid: PseudospectrumGrid, eps: float) -> set:
    """Grid nodes with value < eps (the strict-inequality convention)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    ix, iy = np.nonzero(grid.values < eps)
    return set(zip(ix.tolist(), iy.tolist()))


def _coords(grid: PseudospectrumGrid, nodes) -> np.ndarray:
    pts = np.array([[grid.node(ix, iy).real, grid.node(ix, iy).imag]
                    for ix, iy in sorted(nodes)])
    return pts.reshape(-1, 2)


def hausdorff_gap(grid: PseudospectrumGrid, eps_list) -> list:
    """Hausdorff distances (grid metric) from level sets to the zero set.

    The zero set is {value <= grid.tol}.  Distances are reliable up to
    one cell diagonal; an empty set yields NaN (undefined flag).
    """
    eps_list = list(eps_list)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    zero_nodes = {(int(i), int(j))
                  for i, j in zip(*np.nonzero(grid.values <= grid.tol))}
    if not zero_nodes:
        return [math.nan] * len(eps_list)
    zero_tree = cKDTree(_coords(grid, zero_nodes))
    out = []
    for eps in eps_list:
        nodes = level_set(grid, eps)
        if not nodes:
            out.append(math.nan)
            continue
        pts = _coords(grid, nodes)
        tree = cKDTree(pts)
        d_one = zero_tree.query(pts)[0].max()
        d_two = tree.query(zero_tree.data)[0].max()
        out.append(float(max(d_one, d_two)))
    return out


# -- rank-one perturbation witnesses ------------------------------------------


@dataclass(frozen=True, eq=False)
class PerturbationWitness:
    """Rank-1 K with ||K|| < eps making A - lambda + K singular.

    ``u`` is the finitely supported unit vector the construction rests
    on; K acts as K v = -<v, u> * image (primal side) or couples through
    the adjoint (side == 'adjoint').  ``functional_index`` is the lattice
    position carrying u's largest coordinate, the coordinate whose dual
    functional realizes the construction.
    """

    lam: complex
    epsilon: float
    u: WindowVector
    image: WindowVector
    side: str
    functional_index: int
    k_norm: float

    @property
    def rank(self) -> int:
        return 1


def _min_vector_window(b: BandOperator, eps: float, max_cols: int = 3000):
    """Search windows until some sigma_min drops below eps; return (value, x)."""
    d0, step = norms._d0_step(b)
    d_len = d0
    best = (math.inf, None)
    while True:
        for win in norms._norm_family(b, d_len):
            if len(win) * b.block_dim > max_cols:
                continue
            w = b.band_width
            rows = range(win.start - w, win.stop + w)
            mat = op.dense_window(b, rows, win)
            res = np.linalg.svd(mat, compute_uv=False)
            if res[-1] < best[0]:
                _, _, vh = np.linalg.svd(mat)
                x = vh[-1].conj().reshape(len(win), b.block_dim)
                best = (float(res[-1]), WindowVector(win.start, x))
        if best[0] < eps:
            return best
        if d_len * b.block_dim >= max_cols:
            return best
        d_len += step * max(1, round(0.35 * d_len / step))


def witness_perturbation(a: BandOperator, lam: complex, eps: float,
                         tol: float = 1e-8) -> PerturbationWitness:
    """Constructive witness for lambda in the eps-pseudospectrum of A.

    Needs min(nu, nu*) of A - lambda below eps; raises PreconditionError
    (carrying the best value found) otherwise.
    """
    b = op.subtract_lambda(a, lam)
    val_p, x_p = _min_vector_window(b, eps)
    if val_p < eps:
        u, k_norm, side = x_p, val_p, "primal"
        image = op.apply(b, u)
    else:
        b_adj = op.adjoint(b)
        val_a, x_a = _min_vector_window(b_adj, eps)
        if val_a >= eps:
            raise PreconditionError(
                f"lambda={lam} is not in the eps-pseudospectrum within the "
                f"window budget (best value {min(val_p, val_a):.3e} >= {eps})",
                value=min(val_p, val_a))
        u, k_norm, side = x_a, val_a, "adjoint"
        image = op.apply(b_adj, u)
    flat = np.abs(u.blocks).ravel()
    functional_index = u.start + int(flat.argmax()) // u.blocks.shape[1]
    return PerturbationWitness(lam, eps, u, image, side, functional_index,
                               float(k_norm))


def witness_matrix(a: BandOperator, witness: PerturbationWitness,
                   margin: int | None = None) -> np.ndarray:
    """Dense truncation of (A - lambda + K) centered on the witness support.

    For adjoint-side witnesses the assembled matrix is the truncation of
    (A - lambda + K)^H, whose sigma_min coincides with the one required.
    """
    b = op.subtract_lambda(a, witness.lam)
    if witness.side == "adjoint":
        b = op.adjoint(b)
    w = max(b.band_width, 1)
    margin = 3 * w if margin is None else margin
    lo_i = witness.u.start - margin
    hi_i = witness.u.stop + margin
    win = range(lo_i, hi_i)
    mat = op.dense_window(b, win, win)
    d = b.block_dim
    # K v = -<v, u> * image on the same window
    uvec = np.zeros((len(win), d), dtype=complex)
    uvec[witness.u.start - lo_i:witness.u.stop - lo_i] = witness.u.blocks
    ivec = np.zeros((len(win), d), dtype=complex)
    s = max(witness.image.start, lo_i)
    e = min(witness.image.stop, hi_i)
    ivec[s - lo_i:e - lo_i] = witness.image.blocks[s - witness.image.start:
                                                   e - witness.image.start]
    mat -= np.outer(ivec.ravel(), uvec.ravel().conj())
    return mat


def verify_witness(a: BandOperator, witness: PerturbationWitness,
                   tol: float = 1e-8) -> bool:
    """Check k_norm < eps and singularity of the truncated A - lambda + K."""
    if witness.k_norm >= witness.epsilon:
        return False
    from .linalg import svdvals
    vals = svdvals(witness_matrix(a, witness))
    return bool(vals[-1] <= tol)
