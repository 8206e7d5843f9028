"""Finite-section analysis: stability, inverse-norm and condition asymptotics.

The sections A_n = P_n A P_n are dense (2n+1)d x (2n+1)d matrices; their
inverse norms are reciprocals of smallest singular values (p = 2).  The
limsup of ||A_n^-1|| is governed by the stability spectrum: the operator
itself plus the half-line truncations of its limit operators, padded with
c times the identity on the cut-off side.  For eventually-periodic input
the section sequence is eventually periodic in n, so the tail maximum of
the report is exact once n_max clears the core radius plus two periods.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import limitops as lo
from . import norms
from . import operator as op
from .errors import NotStableError
from .laws import EventuallyPeriodic, Periodic, constant, normalized
from .linalg import SINGULARITY_FACTOR, sigma_max, svdvals
from .operator import BandOperator

#: tail inverse norms above this value mean "not stable" in the verdict
STABILITY_BOUND = 1e6

DEFAULT_N_MAX = 40


@dataclass(frozen=True, eq=False)
class FinSecReport:
    """Per-n section data plus the tail-window limsup estimates."""

    n_list: tuple
    sigma_min_list: tuple
    inv_norm_list: tuple          # 1/sigma_min, inf for singular sections
    cond_list: tuple              # sigma_max/sigma_min
    norm_list: tuple              # sigma_max (converges to ||A||)
    stable: bool
    limsup_inv_norm: float
    limsup_cond: float
    n_stable_from: int


@dataclass(frozen=True, eq=False)
class StabilityMember:
    tag: str                      # 'A' or 'half_line_truncation'
    description: str
    operator: BandOperator
    inverse_norm: float           # inf when not invertible within tolerance


@dataclass(frozen=True, eq=False)
class StabilitySpectrum:
    members: tuple
    c: float

    def max_inverse_norm(self) -> float:
        return max(m.inverse_norm for m in self.members)


def finite_sections(a: BandOperator, n_max: int = DEFAULT_N_MAX,
                    c: float | None = None) -> FinSecReport:
    """Dense section sweep A_1 .. A_{n_max} with stability verdict.

    ``c`` only matters for the (checked) padding convention c >= ||A||,
    under which ||A_{n,c}^-1|| = ||A_n^-1||; a smaller c draws a warning.
    """
    if c is not None:
        an = norms.op_norm(a, 1e-4)
        if c < an.value - an.cauchy_gap - 1e-9:
            warnings.warn(f"padding c={c} is below ||A||~{an.value:.6g}; "
                          "the padded inverse norms would differ",
                          stacklevel=2)
    ns, smins, invs, conds, normvals = [], [], [], [], []
    for n in range(1, n_max + 1):
        vals = svdvals(op.truncate(a, n))
        smin, smax = float(vals[-1]), float(vals[0])
        singular = smin < SINGULARITY_FACTOR * max(smax, 1e-300)
        ns.append(n)
        smins.append(smin)
        normvals.append(smax)
        invs.append(math.inf if singular else 1.0 / smin)
        conds.append(math.inf if singular else smax / smin)
    n0 = min(a.core_radius + a.band_width + 1, n_max)
    tail_from = max(n0, n_max - max(1, n_max // 2) + 1)
    tail = [i for i, n in enumerate(ns) if n >= tail_from]
    limsup_inv = max(invs[i] for i in tail)
    limsup_cond = max(conds[i] for i in tail)
    stable = all(math.isfinite(invs[i]) and invs[i] <= STABILITY_BOUND
                 for i, n in enumerate(ns) if n >= n0)
    return FinSecReport(tuple(ns), tuple(smins), tuple(invs), tuple(conds),
                        tuple(normvals), stable, limsup_inv, limsup_cond, n0)


# -- stability spectrum -------------------------------------------------------


def _half_line_member(limit: lo.LimitOperator, side: str, cut: int, c: float,
                      exponent) -> BandOperator:
    """chi L chi + c*I on the complementary half line.

    side '+' truncates a limit operator living at +inf to (-inf, cut]
    (the pattern at the right edge of the sections); side '-' truncates
    one at -inf to [cut, inf).
    """
    l_op = limit.operator
    d = l_op.block_dim
    w = l_op.band_width
    q = max(l_op.right_period, 1)
    diags = {}
    offsets = set(l_op.offsets) | {0}
    for off in sorted(offsets):
        law = l_op.law(off)
        radius = abs(cut) + w + q
        core = []
        for i in range(-radius, radius + 1):
            j = i - off
            if side == "+":
                keep = i <= cut and j <= cut
            else:
                keep = i >= cut and j >= cut
            block = np.asarray(law.at(i)) if (law is not None and keep) else \
                np.zeros((d, d), dtype=complex)
            if off == 0 and not keep and i == j:
                block = c * np.eye(d)
            core.append(block)
        pad = constant(c * np.eye(d)) if off == 0 else None
        tail_kept = law.left_tail() if (law is not None and side == "+") else \
            law.right_tail() if law is not None else None
        if side == "+":
            left = tail_kept if tail_kept is not None else _zero_periodic(d)
            right = pad if pad is not None else _zero_periodic(d)
        else:
            left = pad if pad is not None else _zero_periodic(d)
            right = tail_kept if tail_kept is not None else _zero_periodic(d)
        new = normalized(EventuallyPeriodic(tuple(core), radius, left, right))
        if not new.is_zero():
            diags[off] = new
    return op.band_operator(diags, d, exponent)


def _zero_periodic(d: int) -> Periodic:
    return constant(np.zeros((d, d), dtype=complex))


def stability_spectrum(a: BandOperator, c: float, tol: float = 1e-8) -> StabilitySpectrum:
    """The operator itself plus half-line truncated limit operators.

    Limit operators at +inf are cut on the right at residues 0..q-1 and
    padded by c to the right; mirrored for -inf.  Members are
    deduplicated entrywise; inverse norms come from the lower-norm
    window ladder (inf marks a member that is singular within tolerance).
    """
    members: list[tuple[str, str, BandOperator]] = [
        ("A", "the operator itself", a)]
    for limit in lo.operator_spectrum(a):
        q = max(limit.operator.right_period, 1)
        for direction in limit.directions:
            for cut in range(q):
                if direction == "+":
                    cand = _half_line_member(limit, "+", cut, c, a.exponent)
                    desc = f"limit op at +inf cut to (-inf, {cut}], padded {c}"
                else:
                    cand = _half_line_member(limit, "-", cut, c, a.exponent)
                    desc = f"limit op at -inf cut to [{cut}, inf), padded {c}"
                members.append(("half_line_truncation", desc, cand))
    # deduplicate modulo shifts, which do not change inverse norms; the
    # cut-residue enumeration produces translated copies otherwise
    q_all = max((l.operator.right_period for l in lo.operator_spectrum(a)),
                default=1)
    span = 2 * (q_all + a.band_width) + 2

    def same_up_to_shift(x: BandOperator, y: BandOperator) -> bool:
        return any(op.operators_equal(op.shift_conjugate(x, s), y)
                   for s in range(-span, span + 1))

    unique: list[tuple[str, str, BandOperator]] = []
    for tag, desc, cand in members:
        if not any(same_up_to_shift(cand, seen) for _, _, seen in unique):
            unique.append((tag, desc, cand))
    out = []
    for tag, desc, member in unique:
        val = norms.inverse_norm_recip(member, tol)
        inv = math.inf if val <= max(tol, 1e-9) else 1.0 / val
        out.append(StabilityMember(tag, desc, member, inv))
    return StabilitySpectrum(tuple(out), c)


def q1_check(a: BandOperator, c: float, n_max: int = DEFAULT_N_MAX,
             tol: float = 1e-8) -> dict:
    """limsup ||A_n^-1|| against the stability-spectrum maximum."""
    report = finite_sections(a, n_max, c)
    if not report.stable:
        raise NotStableError("the finite sections of A are not stable")
    spectrum = stability_spectrum(a, c, tol)
    lhs = report.limsup_inv_norm
    rhs = spectrum.max_inverse_norm()
    return {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs),
            "report": report, "spectrum": spectrum}


def q3_check(a: BandOperator, c: float, n_max: int = DEFAULT_N_MAX,
             tol: float = 1e-8) -> dict:
    """limsup kappa(A_n) against ||A|| * max inverse norm; also lim ||A_n||."""
    q1 = q1_check(a, c, n_max, tol)
    a_norm = norms.op_norm(a, min(tol, 1e-6))
    identity_value = a_norm.value * q1["rhs"]
    report = q1["report"]
    return {"limsup_cond": report.limsup_cond,
            "identity_value": identity_value,
            "gap": abs(report.limsup_cond - identity_value),
            "norm_gap": abs(report.norm_list[-1] - a_norm.value),
            "op_norm": a_norm.value,
            "report": report,
            "spectrum": q1["spectrum"]}


def stacked_norm(sections) -> float:
    """sup_n ||A_n|| for a finite stack of dense sections."""
    mats = list(sections)
    if not mats:
        raise ValueError("stacked_norm needs at least one matrix")
    return max(sigma_max(m) for m in mats)


def padded_section_inverse_norm(a: BandOperator, n: int, c: float,
                                extra: int = 2) -> float:
    """||A_{n,c}^-1|| realized densely on the window [-n-extra, n+extra]."""
    win = range(-n - extra, n + extra + 1)
    d = a.block_dim
    mat = np.zeros((len(win) * d,) * 2, dtype=complex)
    inner = range(-n, n + 1)
    s0 = (inner.start - win.start) * d
    mat[s0:s0 + len(inner) * d, s0:s0 + len(inner) * d] = \
        op.dense_window(a, inner, inner)
    for i in win:
        if abs(i) > n:
            s = (i - win.start) * d
            mat[s:s + d, s:s + d] = c * np.eye(d)
    vals = svdvals(mat)
    smin = float(vals[-1])
    if smin < SINGULARITY_FACTOR * float(vals[0]):
        return math.inf
    return 1.0 / smin
