"""Command-line front end.

Subcommands: epsilon, gap, bound, verify, sweep. Exit codes classify
failures so scripts can react without parsing messages:

    0  success
    1  internal error
    2  validation error (bad inputs, bad files, dimension caps)
    3  numerical ambiguity (guard band hit; manual review needed)
    4  method inconclusive (epsilon >= 1/2)
    5  verification failure

Output is deterministic for a fixed configuration and seed; files are
written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import closedform, martingale
from .errors import (
    InconclusiveBoundError,
    NumericalAmbiguityError,
    SpingapError,
    ValidationError,
    VerificationFailure,
)
from .models import model_from_selector

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_AMBIGUOUS = 3
EXIT_INCONCLUSIVE = 4
EXIT_VERIFICATION = 5


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--output", help="write the result to this path (atomic)")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text",
                   help="output format (default text)")
    p.add_argument("--seed", type=int, default=martingale.DEFAULT_SEED,
                   help="seed for the iterative solvers")
    p.add_argument("--tol-ker", type=float, default=None,
                   help="kernel threshold override (default 1e-10*(1+|H|))")
    p.add_argument("--cap-dense", type=int, default=4096,
                   help="dense eigensolver dimension cap")


def _add_model(p: argparse.ArgumentParser):
    p.add_argument("--model", required=True,
                   help="xxz | aklt | custom:<path>")
    p.add_argument("--xi", type=float, default=None,
                   help="XXZ anisotropy (required for --model xxz)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spingap",
        description="Certified spectral-gap lower bounds for frustration-free "
                    "quantum spin chains",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("epsilon", help="overlap parameter epsilon(m,n)")
    _add_model(pe)
    pe.add_argument("-m", type=int, required=True, dest="m")
    pe.add_argument("-n", type=int, required=True, dest="n")
    _add_common(pe)

    pg = sub.add_parser("gap", help="finite-volume gap table gamma(1,n)")
    _add_model(pg)
    pg.add_argument("-N", type=int, required=True, dest="N")
    pg.add_argument("--method", default="auto",
                    choices=("auto", "dense", "sector", "sector-dense",
                             "sector-lanczos"))
    _add_common(pg)

    pb = sub.add_parser("bound", help="certified lower bound on the gap")
    _add_model(pb)
    pb.add_argument("-m", type=int, required=True, dest="m")
    pb.add_argument("-n", type=int, required=True, dest="n")
    pb.add_argument("--m-max", type=int, default=8,
                    help="upper limit when the epsilon tail has no closed form")
    pb.add_argument("--gamma-method", default="auto",
                    choices=("auto", "dense", "sector", "sector-dense",
                             "sector-lanczos"))
    _add_common(pb)

    pv = sub.add_parser("verify", help="self checks and certificate audits")
    pv.add_argument("--suite",
                    choices=("lemmas", "theorem", "aklt-closed-form",
                             "xxz-closed-form"),
                    help="which check suite to run")
    pv.add_argument("--certificate", help="re-verify a stored certificate")
    pv.add_argument("--model", help="xxz | aklt | custom:<path>")
    pv.add_argument("--xi", type=float, default=None)
    pv.add_argument("-m", type=int, default=1, dest="m")
    pv.add_argument("-n", type=int, default=1, dest="n")
    pv.add_argument("-N", type=int, default=None, dest="N")
    pv.add_argument("--trials", type=int, default=500)
    pv.add_argument("--dim", type=int, default=None,
                    help="single dimension for the lemma suite (default 4,8,16)")
    pv.add_argument("--m-max", type=int, default=6,
                    help="largest m for the xxz closed-form suite")
    _add_common(pv)

    ps = sub.add_parser("sweep", help="CSV sweeps for plotting")
    _add_model(ps)
    ps.add_argument("-m", type=int, default=1, dest="m")
    ps.add_argument("-n", type=int, default=1, dest="n")
    ps.add_argument("--xi-start", type=float, default=None)
    ps.add_argument("--xi-stop", type=float, default=None)
    ps.add_argument("--xi-step", type=float, default=0.1)
    ps.add_argument("--grid-max", type=int, default=None,
                    help="sweep (m,n) over 1..grid-max instead of xi")
    _add_common(ps)
    return p


def _emit(args, text: str):
    if args.output:
        directory = os.path.dirname(os.path.abspath(args.output))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".spingap-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, args.output)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(text)


def _json_dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_epsilon(args) -> int:
    model = model_from_selector(args.model, xi=args.xi)
    res = martingale.epsilon(model, args.m, args.n)
    doc = {
        "model": model.name,
        "params": model.params,
        "m": res.m,
        "n": res.n,
        "epsilon": res.epsilon,
        "unit_multiplicity": res.unit_multiplicity,
        "ground_dim": res.ground_dim,
        "ambient_dim": res.ambient_dim,
        "spectrum": [float(x) for x in res.spectrum],
    }
    if args.format == "json":
        _emit(args, _json_dumps(doc))
    else:
        lines = [
            f"model        : {model.name} {model.params}",
            f"(m, n)       : ({res.m}, {res.n})",
            f"epsilon      : {closedform.format_float(res.epsilon)}",
            f"unit mult.   : {res.unit_multiplicity} (= dim ground space "
            f"{res.ground_dim})",
            f"K spectrum   : {np.array2string(res.spectrum, precision=12)}",
        ]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gap(args) -> int:
    model = model_from_selector(args.model, xi=args.xi)
    table = martingale.gamma_table(model, args.N, method=args.method,
                                   tol_ker=args.tol_ker, seed=args.seed)
    doc = {
        "model": model.name,
        "params": model.params,
        "N": table.N,
        "gamma": {
            str(n): {"value": table.gamma_of_n[n],
                     "provenance": table.provenance[n]}
            for n in sorted(table.gamma_of_n)
        },
        "gamma_N": table.gamma_N,
    }
    if args.format == "json":
        _emit(args, _json_dumps(doc))
    else:
        lines = [f"model {model.name} {model.params}: gamma(1,n) for n <= {table.N}"]
        for n in sorted(table.gamma_of_n):
            lines.append(
                f"  n={n:3d}  gamma={closedform.format_float(table.gamma_of_n[n])}"
                f"  [{table.provenance[n]}]"
            )
        lines.append(f"gamma_N = {closedform.format_float(table.gamma_N)}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_bound(args) -> int:
    model = model_from_selector(args.model, xi=args.xi)
    cert = martingale.bound_certificate(
        model, args.m, args.n, m_max=args.m_max,
        gamma_method=args.gamma_method, seed=args.seed,
    )
    summary = (
        f"{model.name} (m,n)=({cert.m},{cert.n}): "
        f"gap >= {closedform.format_float(cert.bound)} "
        f"[epsilon={closedform.format_float(cert.epsilon)} "
        f"({cert.epsilon_provenance}), "
        f"gamma_{cert.m + cert.n}={closedform.format_float(cert.gamma)}]\n"
    )
    if args.output:
        _emit(args, cert.to_json())
        sys.stdout.write(summary)
    elif args.format == "json":
        sys.stdout.write(cert.to_json())
    else:
        sys.stdout.write(summary)
    return EXIT_OK


def _verify_lines(args, lines, ok: bool) -> int:
    text = "\n".join(lines) + "\n"
    _emit(args, text)
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_verify(args) -> int:
    if args.certificate:
        cert = martingale.BoundCertificate.from_json(
            open(args.certificate).read()
        )
        check = martingale.verify_certificate(cert)
        lines = [
            f"certificate {args.certificate}: "
            f"{'PASS' if check.passed else 'FAIL'} "
            f"(max discrepancy {check.max_discrepancy:.3e})"
        ]
        return _verify_lines(args, lines, check.passed)
    if args.suite == "lemmas":
        dims = (args.dim,) if args.dim else (4, 8, 16)
        lines, ok = [], True
        for dim in dims:
            rep = martingale.verify_lemma_cs(args.trials, dim, seed=args.seed)
            ok &= rep.passed
            lines.append(
                f"lemma suite dim={dim}: {args.trials} trials, "
                f"{len(rep.violations)} violations -> "
                f"{'PASS' if rep.passed else 'FAIL'}"
            )
            for v in rep.violations:
                lines.append("  counterexample: " + json.dumps(v))
        return _verify_lines(args, lines, ok)
    if args.suite == "theorem":
        if not args.model or args.N is None:
            raise ValidationError("theorem suite needs --model and -N")
        model = model_from_selector(args.model, xi=args.xi)
        rep = martingale.verify_theorem_inequality(model, args.m, args.n, args.N)
        lines = [
            f"theorem inequality {model.name} (m,n,N)=({args.m},{args.n},{args.N}): "
            f"min eigenvalue {rep.min_eigenvalue:.3e} -> "
            f"{'PASS' if rep.passed else 'FAIL'}"
        ]
        return _verify_lines(args, lines, rep.passed)
    if args.suite == "aklt-closed-form":
        rep = closedform.cross_validate_aklt(args.m, args.n)
        lines = [
            f"aklt epsilon({args.m},{args.n}) three-way agreement: "
            f"spread {rep.max_spread:.3e} <= {rep.tolerance:.1e} -> PASS",
            "  " + json.dumps({k: closedform.format_float(v)
                               for k, v in rep.values.items()}),
        ]
        return _verify_lines(args, lines, rep.passed)
    if args.suite == "xxz-closed-form":
        if args.xi is None:
            raise ValidationError("xxz closed-form suite needs --xi")
        lines, ok = [], True
        for m in range(1, args.m_max + 1):
            rep = closedform.cross_validate_xxz(args.xi, m)
            ok &= rep.passed
            lines.append(
                f"xxz epsilon({m},1) xi={args.xi}: spread "
                f"{rep.max_spread:.3e} -> {'PASS' if rep.passed else 'FAIL'}"
            )
        return _verify_lines(args, lines, ok)
    raise ValidationError("verify needs --suite or --certificate")


def _sweep_rows_xi(args, model_name):
    count = 0
    if args.xi_start is not None and args.xi_stop is not None and args.xi_step > 0:
        count = int(np.floor((args.xi_stop - args.xi_start) / args.xi_step + 1e-9)) + 1
        count = max(count, 0)
    for i in range(count):
        xi = args.xi_start + i * args.xi_step
        row = {"model": model_name, "xi": xi, "m": args.m, "n": args.n}
        try:
            model = model_from_selector("xxz", xi=xi)
            if args.n == 1:
                row["epsilon_closed"] = closedform.xxz_epsilon_closed(xi, args.m)
            row["epsilon_numeric"] = martingale.epsilon(model, args.m, args.n).epsilon
            cert = martingale.bound_certificate(model, args.m, args.n)
            row["gamma"] = cert.gamma
            row["bound"] = cert.bound
            row["status"] = "ok"
        except SpingapError as exc:
            row["status"] = f"error: {exc}"
        yield row


def _sweep_rows_aklt_grid(args):
    for m in range(1, args.grid_max + 1):
        for n in range(1, args.grid_max + 1):
            row = {"model": "aklt", "m": m, "n": n}
            try:
                row["epsilon_closed"] = closedform.aklt_lambda(m, n).epsilon
                if 3 ** (m + n + 1) <= args.cap_dense:
                    model = model_from_selector("aklt")
                    row["epsilon_numeric"] = martingale.epsilon(model, m, n).epsilon
                    cert = martingale.bound_certificate(model, m, n)
                    row["gamma"] = cert.gamma
                    row["bound"] = cert.bound
                    row["status"] = "ok"
                else:
                    row["status"] = "numeric skipped: dimension cap"
            except SpingapError as exc:
                row["status"] = f"error: {exc}"
            yield row


def cmd_sweep(args) -> int:
    if args.model == "aklt" and args.grid_max:
        rows = _sweep_rows_aklt_grid(args)
    elif args.model == "xxz":
        rows = _sweep_rows_xi(args, "xxz")
    else:
        raise ValidationError(
            "sweep supports --model xxz (xi grid) or --model aklt --grid-max"
        )
    buf = io.StringIO()
    closedform.write_sweep_csv(buf, rows)
    _emit(args, buf.getvalue())
    return EXIT_OK


_COMMANDS = {
    "epsilon": cmd_epsilon,
    "gap": cmd_gap,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InconclusiveBoundError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except NumericalAmbiguityError as exc:
        print(f"numerical ambiguity: {exc}", file=sys.stderr)
        return EXIT_AMBIGUOUS
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SpingapError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
