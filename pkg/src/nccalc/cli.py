"""Batch front end: ``nccalc <command> --spec FILE [options]``.

Exit codes: 0 computed, 1 validation error, 2 guard tripped (rewrite budget
or dimension cap).  The JSON document is deterministic for a fixed spec,
command and seed; wall-clock timing is only included with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Optional, Sequence

from .calculus import RewriteBudgetExceeded, differential, partial_derivatives
from .exactmath import ExactMatrix, FieldMismatchError, ParseError
from .freealg import format_poly, parse
from .gda import AMBIGUITY_FLAGS, check_d_squared, freeness_check, lambda_dims
from .optimal import (
    DimensionCapExceeded,
    NonHomogeneousError,
    certify,
    check_consistency,
    hilbert_dims,
    nondegeneracy_check,
    optimal_ideal,
)
from .specfile import ProblemSpec, SpecError
from .twistlab import (
    Twist,
    generalized_ybe_solve,
    hecke_check,
    hlavaty_build,
    is_gybe_witness,
    lift12,
    lift23,
    linear_condition_check,
    minus_one_in_spectrum,
    remark34_check,
    wz_ybe_check,
    ybe_check,
)

COMMANDS = ("derive", "optimal", "consistency", "twist", "gda", "hilbert")
TWIST_CHECKS = ("ybe", "wz", "gybe", "hecke", "hlavaty", "remark34")


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nccalc", description="Exact coordinate differential calculus toolkit.")
    p.add_argument("command", help=f"one of: {', '.join(COMMANDS)}")
    p.add_argument("check", nargs="?", help=f"twist check: {', '.join(TWIST_CHECKS)}")
    p.add_argument("--spec", required=True, help="TOML problem specification")
    p.add_argument("--max-degree", type=int, help="truncation degree (overrides the spec file)")
    p.add_argument("--expr", help="polynomial for the derive command")
    p.add_argument("--out", help="also write the JSON report to this file")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    return p


def _matrix(m: ExactMatrix) -> list:
    return m.to_strings()


def _polys(ps) -> list[str]:
    return [format_poly(p) for p in ps]


def _need_twist(rule) -> Twist:
    if not rule.homogeneous:
        raise NonHomogeneousError("this command needs a homogeneous rule")
    return rule.alpha


# ---------- commands ----------

def cmd_derive(spec: ProblemSpec, args) -> dict:
    if not args.expr:
        raise UsageError("derive needs --expr")
    rule, _ = spec.build_rule()
    p = parse(args.expr, spec.n, spec.field)
    return {
        "expression": format_poly(p),
        "differential": str(differential(rule, p)),
        "partials": _polys(partial_derivatives(rule, p)),
    }


def _degrees(spec: ProblemSpec, args) -> int:
    return args.max_degree if args.max_degree is not None else spec.options.max_degree


def cmd_optimal(spec: ProblemSpec, args) -> dict:
    rule, _ = spec.build_rule()
    top = _degrees(spec, args)
    ideal = optimal_ideal(rule, top)
    cert = certify(rule, ideal, spec.options.seed)
    return {
        "hilbert_dims": hilbert_dims(ideal),
        "ideal_bases": {str(s): _polys(ideal.basis_polys(s)) for s in range(1, top + 1)},
        "nondegenerate": {str(s): v for s, v in nondegeneracy_check(rule, ideal).items()},
        "certificates": {
            "closure": {str(s): v for s, v in cert.closure.items()},
            "invariance": {str(s): v for s, v in cert.invariance.items()},
            "derivatives": {str(s): v for s, v in cert.derivatives.items()},
            "maximality": {str(s): v for s, v in cert.maximality.items()},
            "ok": cert.ok,
        },
        "truncation_degree": top,
        "exactness": "truncated",
    }


def cmd_hilbert(spec: ProblemSpec, args) -> dict:
    rule, _ = spec.build_rule()
    top = _degrees(spec, args)
    return {"hilbert_dims": hilbert_dims(optimal_ideal(rule, top)), "truncation_degree": top,
            "exactness": "truncated"}


def cmd_consistency(spec: ProblemSpec, args) -> dict:
    rule, assoc = spec.build_rule()
    gens = spec.relation_polys()
    if not gens:
        raise UsageError("consistency needs a non-empty relations list in the spec file")
    top = max(_degrees(spec, args), max(g.degree for g in gens))
    rep = check_consistency(rule, gens, top)
    out: dict[str, Any] = {
        "consistent": rep.consistent,
        "exactness": rep.exactness,
        "route": rep.route,
        "c1_holds": rep.c1_ok,
        "c2_holds": rep.c2_ok,
        "failures": [
            {"condition": f.condition, "relation": f.relation, "indices": list(f.indices),
             "residual": format_poly(f.residual)}
            for f in rep.failures
        ],
    }
    if rep.truncation_degree is not None:
        out["truncation_degree"] = rep.truncation_degree
    if rep.gamma is not None:
        out["gamma"] = [[*key, str(v)] for key, v in sorted(rep.gamma.items())]
    if assoc is not None:
        out["associativity"] = {
            "holds": assoc.holds,
            "violations": [list(t) for t in assoc.violations],
            "constant_violations": [list(t) for t in assoc.constant_violations],
        }
    return out


def cmd_twist(spec: ProblemSpec, args) -> dict:
    check = args.check
    if check not in TWIST_CHECKS:
        raise UsageError(f"twist needs one of: {', '.join(TWIST_CHECKS)}")
    rule, _ = spec.build_rule()
    a = _need_twist(rule)
    b = spec.twist("b") or a
    out: dict[str, Any] = {"check": check}
    if check == "ybe":
        out["ybe"] = ybe_check(a)
    elif check == "wz":
        out["wz_ybe"] = wz_ybe_check(a, b)
    elif check == "gybe":
        z = generalized_ybe_solve(a, b)
        out["c1_solvable"] = z is not None
        out["c2_holds"] = linear_condition_check(a, b)
        if z is not None:
            out["witness"] = _matrix(z.matrix)
        out["a12a23_is_witness"] = is_gybe_witness(a, b, lift12(a) @ lift23(a))
    elif check == "hecke":
        out["mu"] = str(spec.mu())
        out["hecke"] = hecke_check(a, spec.mu())
        out["minus_one_in_spectrum"] = minus_one_in_spectrum(a)
    elif check == "hlavaty":
        rep = hlavaty_build(a, spec.hlavaty_g())
        out.update({
            "b": _matrix(rep.b.matrix),
            "b_equals_a": rep.b == a,
            "ybe": rep.ybe_ok,
            "minus_one_in_spectrum": rep.minus_one_in_spectrum,
            "annihilates": rep.annihilates,
            "c1_holds": rep.c1_ok,
            "c2_holds": rep.c2_ok,
            "ok": rep.ok,
        })
    elif check == "remark34":
        c = spec.twist("c")
        if c is None or spec.twist("b") is None:
            raise UsageError("remark34 needs twists.b and twists.c in the spec file")
        out["holds"] = remark34_check(a, b, c)
    return out


def cmd_gda(spec: ProblemSpec, args) -> dict:
    rule, _ = spec.build_rule()
    _need_twist(rule)
    top = _degrees(spec, args)
    y = freeness_check(rule)
    return {
        "lambda_dims": lambda_dims(rule, top),
        "freeness_witness": None if y is None else _matrix(y.matrix),
        "freeness_witness_zero": None if y is None else y.is_zero(),
        "d_squared_ok": {str(s): v for s, v in check_d_squared(rule, top, spec.options.rewrite_budget).items()},
        "truncation_degree": top,
        "ambiguity_flags": list(AMBIGUITY_FLAGS),
    }


HANDLERS = {
    "derive": cmd_derive,
    "optimal": cmd_optimal,
    "consistency": cmd_consistency,
    "twist": cmd_twist,
    "gda": cmd_gda,
    "hilbert": cmd_hilbert,
}


# ---------- output ----------

def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(value, list) and value and isinstance(value[0], list) and len(value) > 4:
            lines.append(f"{prefix}:")
            for row in value:
                lines.append("  " + " ".join(str(x) for x in row))
        else:
            lines.append(f"{prefix}: {json.dumps(value) if not isinstance(value, str) else value}")

    if "results" in report:
        walk("", report["results"])
    if "error" in report:
        lines.append(f"error: {report['error']}")
    return "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"nccalc: {exc}", file=stderr)
        return 1
    report: dict[str, Any] = {"command": args.command if args.check is None else f"{args.command} {args.check}"}
    start = time.perf_counter()
    code = 0
    try:
        if args.command not in HANDLERS:
            raise UsageError(f"unknown command {args.command!r}; expected one of {', '.join(COMMANDS)}")
        if args.check is not None and args.command != "twist":
            raise UsageError(f"unexpected argument {args.check!r}")
        if args.max_degree is not None and args.max_degree < 1:
            raise UsageError("--max-degree must be positive")
        spec = ProblemSpec.load(args.spec)
        report["spec"] = spec.to_mapping()
        report["results"] = HANDLERS[args.command](spec, args)
    except (SpecError, UsageError, ParseError, FieldMismatchError, NonHomogeneousError, ValueError) as exc:
        code = 1
        report["error"] = str(exc)
    except (RewriteBudgetExceeded, DimensionCapExceeded) as exc:
        code = 2
        report["error"] = str(exc)
    report["exit_code"] = code
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 6)
    doc = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc + "\n")
    if code:
        print(f"nccalc: {report['error']}", file=stderr)
    print(doc if args.json else render_text(report), file=stdout)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
