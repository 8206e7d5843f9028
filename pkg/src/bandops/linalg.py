"""Dense complex linear-algebra kernel.

Everything downstream (operator norms, lower norms, resolvent grids,
finite sections) reduces to singular values of finite complex matrices.
Small matrices go through LAPACK's dense SVD; large banded compressions
go through Hermitian banded eigensolvers on the normal matrix, which is
orders of magnitude cheaper and accurate to machine precision for the
extreme singular values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import KernelError, SingularMatrixError, UnsupportedExponentError

#: sigma_min below this multiple of sigma_max counts as singular in solve().
SINGULARITY_FACTOR = 1e-12

#: column count above which compressions switch to the banded eigensolver.
DENSE_CUTOFF = 384


def as_matrix(entries, rows=None, cols=None) -> np.ndarray:
    """Coerce to a 2-d complex ndarray and check the entries are finite."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if rows is not None and m.shape != (rows, cols):
        raise ValueError(f"expected shape {(rows, cols)}, got {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return m


@dataclass(frozen=True)
class SvdResult:
    """Full SVD: M = U @ diag(s) @ Vh, singular values non-increasing."""

    singular_values: np.ndarray
    left_vectors: np.ndarray   # U, shape (m, k)
    right_vectors: np.ndarray  # V, shape (n, k); Vh = right_vectors.conj().T


def svd(m) -> SvdResult:
    """Full SVD of a dense complex matrix.

    Raises KernelError when LAPACK does not converge (rare; carries the
    reconstruction residual of the best effort, None if unavailable).
    """
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise KernelError(f"SVD did not converge for shape {a.shape}: {exc}") from exc
    return SvdResult(s, u, vh.conj().T)


def svdvals(m) -> np.ndarray:
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise KernelError(f"SVD did not converge for shape {a.shape}: {exc}") from exc


def sigma_min(m) -> float:
    """Smallest singular value; for a tall matrix this is min ||Mx||/||x||."""
    s = svdvals(m)
    if s.size == 0:
        raise ValueError("sigma_min of an empty matrix")
    return float(s[-1])


def sigma_max(m) -> float:
    s = svdvals(m)
    if s.size == 0:
        raise ValueError("sigma_max of an empty matrix")
    return float(s[0])


def solve(m, b) -> np.ndarray:
    """Solve Mx = b for square M, refusing numerically singular systems."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"solve needs a square matrix, got {a.shape}")
    rhs = np.asarray(b, dtype=complex)
    s = svdvals(a)
    smin, smax = float(s[-1]), float(s[0])
    if smin < SINGULARITY_FACTOR * smax or smax == 0.0:
        raise SingularMatrixError(
            f"matrix is singular to working precision (sigma_min={smin:.3e})",
            sigma_min=smin,
        )
    return np.linalg.solve(a, rhs)


def induced_p_norm(m, p) -> float:
    """Induced p-norm of a dense matrix for p in {1, 2, inf}.

    p=1 max column sum, p=inf max row sum (exact), p=2 sigma_max.
    """
    a = as_matrix(m)
    if a.size == 0:
        return 0.0
    if p == 1:
        return float(np.abs(a).sum(axis=0).max())
    if p == 2:
        return sigma_max(a)
    if p == math.inf:
        return float(np.abs(a).sum(axis=1).max())
    raise UnsupportedExponentError(f"induced norm undefined for p={p!r}")


def _normal_band(t: scipy.sparse.spmatrix, bandwidth: int) -> np.ndarray:
    """Upper band storage of T^H T for scipy.linalg.eig_banded."""
    h = (t.conj().T @ t).tocsc()
    n = h.shape[0]
    ab = np.zeros((bandwidth + 1, n), dtype=complex)
    for k in range(bandwidth + 1):
        d = h.diagonal(k)
        ab[bandwidth - k, k:] = d
    return ab


def extreme_singular_values_sparse(t: scipy.sparse.spmatrix, bandwidth: int,
                                   which: str) -> float:
    """sigma_min or sigma_max of a banded sparse matrix.

    ``bandwidth`` is the scalar bandwidth of T^H T.  Deterministic
    (bisection-based LAPACK path); accurate to ~sqrt(eps)*||T|| near zero.
    """
    n = t.shape[1]
    if n == 0:
        raise ValueError("empty compression")
    if n <= DENSE_CUTOFF:
        vals = svdvals(t.toarray())
        return float(vals[-1] if which == "min" else vals[0])
    ab = _normal_band(t, min(bandwidth, n - 1))
    idx = 0 if which == "min" else n - 1
    try:
        w = scipy.linalg.eig_banded(ab, lower=False, eigvals_only=True,
                                    select="i", select_range=(idx, idx))
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise KernelError(f"banded eigensolver failed at size {n}: {exc}") from exc
    return float(math.sqrt(max(w[0], 0.0)))


def brute_force_singular_values(m, iterations=8000, tol=1e-14) -> np.ndarray:
    """Singular values by power iteration on M^H M with deflation.

    Independent oracle for the SVD kernel; intended for matrices up to
    ~6x6.  Deterministic start vectors.
    """
    a = as_matrix(m)
    h = a.conj().T @ a
    n = h.shape[0]
    values = []
    for k in range(n):
        v = np.cos(np.arange(n) + 1.0) + 1j * np.sin(0.5 * np.arange(n) + k)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iterations):
            w = h @ v
            nw = np.linalg.norm(w)
            if nw < 1e-300:
                lam = 0.0
                break
            v_new = w / nw
            lam_new = float(np.real(np.vdot(v_new, h @ v_new)))
            if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
                lam, v = lam_new, v_new
                break
            lam, v = lam_new, v_new
        values.append(max(lam, 0.0))
        h = h - lam * np.outer(v, v.conj())
    return np.sqrt(np.sort(np.array(values))[::-1])
