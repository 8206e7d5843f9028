"""Command-line front end.

Subcommands: norm, essnorm, lowernorm, mu, limitops, pseudospec, finsec,
verify.  All spec-consuming commands validate the operator file first and
can echo its canonical form (--echo-spec).  CSV output is UTF-8, comma
separated, '.' decimal point, header row, LF line endings, and is byte
identical across runs for identical inputs.

Exit codes: 0 success, 1 verification failure (or --method both
disagreement), 2 spec parse/validation error, 3 unsupported symbol class
or exponent, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import corpus, finsec, limitops, norms, operator, pseudospec, specio
from .errors import (BandopsError, NonConvergenceError, NotStableError,
                     SpecFormatError, UnsupportedExponentError,
                     UnsupportedSymbolClassError)

EXIT_VERIFY = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_NONCONVERGED = 4

JOBS_ENV = "BANDOPS_JOBS"


def _fmt(x: float) -> str:
    if x != x:
        return "nan"
    if x == math.inf:
        return "inf"
    return f"{x:.12g}"


def _csv_text(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load(args) -> operator.BandOperator:
    a = specio.load_operator(args.spec)
    if getattr(args, "echo_spec", False):
        sys.stdout.write(specio.canonical_json(a))
    return a


# -- scalar-value commands ----------------------------------------------------


def _scalar_command(args, compute) -> int:
    a = _load(args)
    result = compute(a, args.tol)
    text = _csv_text([[_fmt(result.value), result.window_size_used,
                       _fmt(result.cauchy_gap)]],
                     ["value", "window_size", "cauchy_gap"])
    _emit(text, args.output)
    return 0 if result.converged else EXIT_NONCONVERGED


def cmd_norm(args) -> int:
    return _scalar_command(args, norms.op_norm)


def cmd_essnorm(args) -> int:
    return _scalar_command(args, norms.essential_norm_q)


def cmd_lowernorm(args) -> int:
    return _scalar_command(args, norms.lower_norm)


def cmd_mu(args) -> int:
    return _scalar_command(args, norms.mu)


def cmd_limitops(args) -> int:
    a = _load(args)
    spectrum = limitops.operator_spectrum(a)
    docs = [{"tags": [{"direction": d, "residue": r} for d, r in l.tags],
             "operator": specio.canonical_dict(l.operator)}
            for l in spectrum]
    rows = []
    for l in spectrum:
        zero = l.operator.is_zero()
        norm = 0.0 if zero else limitops.laurent_norm(l)
        low = 0.0 if zero else limitops.laurent_lower_norm(l)
        direction = ";".join(f"{d}inf" for d, _ in l.tags)
        residue = ";".join(str(r) for _, r in l.tags)
        rows.append([direction, residue, _fmt(norm), _fmt(low)])
    text = (json.dumps(docs, indent=2, sort_keys=True) + "\n\n"
            + _csv_text(rows, ["direction", "residue", "norm", "lower_norm"]))
    _emit(text, args.output)
    return 0


def cmd_pseudospec(args) -> int:
    a = _load(args)
    try:
        box = tuple(float(v) for v in args.box.split(","))
        if len(box) != 4:
            raise ValueError
    except ValueError:
        raise SpecFormatError("--box must be re0,re1,im0,im1") from None
    jobs = args.jobs or _default_jobs()
    if args.essential:
        grid = pseudospec.essential_pseudospectrum_grid(
            a, box, args.nx, args.ny, args.tol, args.method, jobs)
    else:
        grid = pseudospec.pseudospectrum_grid(a, box, args.nx, args.ny,
                                              args.tol, jobs)
    header = ["re", "im", "value"]
    if grid.values_alt is not None:
        header.append("value_alt")
    rows = []
    for ix in range(grid.nx):
        for iy in range(grid.ny):
            lam = grid.node(ix, iy)
            row = [_fmt(lam.real), _fmt(lam.imag), _fmt(grid.values[ix, iy])]
            if grid.values_alt is not None:
                row.append(_fmt(grid.values_alt[ix, iy]))
            rows.append(row)
    _emit(_csv_text(rows, header), args.output)
    if grid.values_alt is not None:
        gap = grid.max_discrepancy()
        sys.stderr.write(f"method discrepancy: {_fmt(gap)}\n")
        if gap > args.agree_tol:
            return EXIT_VERIFY
    return 0


def cmd_finsec(args) -> int:
    a = _load(args)
    if args.c is None:
        c = norms.op_norm(a, 1e-6).value
    else:
        c = args.c
    report = finsec.finite_sections(a, args.nmax, c)
    rows = [[n, _fmt(s), _fmt(i), _fmt(k)]
            for n, s, i, k in zip(report.n_list, report.sigma_min_list,
                                  report.inv_norm_list, report.cond_list)]
    _emit(_csv_text(rows, ["n", "sigma_min", "inv_norm", "cond"]), args.output)
    lines = [f"stable: {report.stable}",
             f"limsup_inv_norm: {_fmt(report.limsup_inv_norm)}",
             f"limsup_cond: {_fmt(report.limsup_cond)}"]
    if report.stable:
        q3 = finsec.q3_check(a, c, args.nmax, args.tol)
        q1_gap = q3["report"].limsup_inv_norm
        spectrum = q3["spectrum"]
        lines.append(f"c: {_fmt(c)}")
        lines.append("stability_spectrum:")
        for m in spectrum.members:
            lines.append(f"  {m.tag}: inverse_norm={_fmt(m.inverse_norm)}"
                         f"  ({m.description})")
        lines.append(f"q1_lhs: {_fmt(q1_gap)}")
        lines.append(f"q1_rhs: {_fmt(spectrum.max_inverse_norm())}")
        lines.append(f"q1_gap: {_fmt(abs(q1_gap - spectrum.max_inverse_norm()))}")
        lines.append(f"q3_limsup_cond: {_fmt(q3['limsup_cond'])}")
        lines.append(f"q3_identity_value: {_fmt(q3['identity_value'])}")
        lines.append(f"q3_gap: {_fmt(q3['gap'])}")
    else:
        lines.append("q1/q3: skipped (sections not stable)")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


# -- verify -------------------------------------------------------------------


def _check(name, ok, detail="") -> bool:
    status = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    sys.stdout.write(f"{status}  {name}{suffix}\n")
    return ok


def cmd_verify(args) -> int:
    from . import linalg
    rng = np.random.default_rng(args.seed)
    ok = True

    m = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    res = linalg.svd(m)
    recon = res.left_vectors @ np.diag(res.singular_values) @ \
        res.right_vectors.conj().T
    ok &= _check("svd reconstruction",
                 np.linalg.norm(recon - m) <= 1e-10 * np.linalg.norm(m))
    for k in range(3):
        mm = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        brute = linalg.brute_force_singular_values(mm)
        ok &= _check(f"svd vs power-iteration oracle #{k}",
                     np.allclose(linalg.svdvals(mm), brute, atol=1e-8))

    for mu_param in (0.1, 0.25, 0.5, 0.75, 0.9):
        a = corpus.block_pair_example(mu_param)
        q1 = finsec.q1_check(a, 2.0, 40)
        expected = 1.0 / min(1.0 - mu_param, mu_param)
        ok &= _check(f"block-pair mu={mu_param}: limsup inverse norm "
                     f"{_fmt(q1['lhs'])}",
                     abs(q1["lhs"] - expected) <= 1e-8
                     and q1["gap"] <= 1e-6
                     and len(q1["spectrum"].members) == 5)
        q3 = finsec.q3_check(a, 2.0, 40)
        ok &= _check(f"block-pair mu={mu_param}: limsup condition number",
                     abs(q3["limsup_cond"]
                         - (1 + mu_param) / min(1 - mu_param, mu_param)) <= 1e-5)
    a0 = corpus.block_pair_example(0.0)
    ok &= _check("block-pair mu=0 unstable",
                 not finsec.finite_sections(a0, 40, 2.0).stable)

    for name, a in corpus.eventually_periodic_corpus().items():
        via_q = norms.essential_norm_q(a, 1e-6).value
        via_l = norms.essential_norm_via_limops(a)
        ok &= _check(f"essential norm agreement: {name}",
                     abs(via_q - via_l) <= 1e-6, f"gap {abs(via_q - via_l):.2e}")

    delta = 0.1
    for k in range(3):
        a = corpus.seeded_band(args.seed + k, width=2, dim=1)
        ub = norms.op_norm(a, 1e-4)
        d_eval = 129
        loc = norms.norm_localized(a, d_eval)
        ok &= _check(f"norm localization bracket (seed {args.seed + k})",
                     (1 - delta) * ub.value <= loc <= ub.value * (1 + 1e-3))

    witness_ok = True
    for k in range(3):
        lam = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        a = corpus.asymmetric_laurent()
        val = norms.inverse_norm_recip(operator.subtract_lambda(a, lam),
                                       1e-6, floor=1e-3)
        eps = val + 0.05
        w = pseudospec.witness_perturbation(a, lam, eps)
        witness_ok &= pseudospec.verify_witness(a, w)
    ok &= _check("rank-one witness soundness", witness_ok)

    return 0 if ok else EXIT_VERIFY


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bandops",
        description="norms, essential norms, pseudospectra and finite "
                    "sections of band operators on l^p(Z, C^d)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, spec=True):
        if spec:
            p.add_argument("spec", help="operator specification file (JSON)")
            p.add_argument("--echo-spec", action="store_true",
                           help="print the canonical form of the spec first")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--output", help="write CSV output to this path")

    for name, fn in (("norm", cmd_norm), ("essnorm", cmd_essnorm),
                     ("lowernorm", cmd_lowernorm), ("mu", cmd_mu)):
        p = sub.add_parser(name, help=f"compute {name} of the operator")
        add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("limitops", help="enumerate the operator spectrum")
    add_common(p)
    p.set_defaults(fn=cmd_limitops)

    p = sub.add_parser("pseudospec", help="pseudospectrum grid")
    add_common(p)
    p.add_argument("--box", required=True, help="re0,re1,im0,im1")
    p.add_argument("--nx", type=int, default=41)
    p.add_argument("--ny", type=int, default=41)
    p.add_argument("--essential", action="store_true")
    p.add_argument("--method", choices=("mu", "limitops", "both"),
                   default="mu")
    p.add_argument("--agree-tol", type=float, default=5e-3)
    p.add_argument("--jobs", type=int, default=0,
                   help=f"concurrent grid workers (default ${JOBS_ENV} or 1)")
    p.set_defaults(fn=cmd_pseudospec)

    p = sub.add_parser("finsec", help="finite-section stability analysis")
    add_common(p)
    p.add_argument("--nmax", type=int, default=finsec.DEFAULT_N_MAX)
    p.add_argument("--c", type=float, default=None,
                   help="padding constant (default: computed operator norm)")
    p.set_defaults(fn=cmd_finsec)

    p = sub.add_parser("verify", help="run the built-in verification battery")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SpecFormatError as exc:
        sys.stderr.write(f"spec error: {exc}\n")
        return EXIT_PARSE
    except (UnsupportedSymbolClassError, UnsupportedExponentError) as exc:
        sys.stderr.write(f"unsupported: {exc}\n")
        return EXIT_UNSUPPORTED
    except (NonConvergenceError, NotStableError) as exc:
        sys.stderr.write(f"did not converge: {exc}\n")
        return EXIT_NONCONVERGED
    except BandopsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
