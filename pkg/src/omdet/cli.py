"""Command-line front end: validation, generators, determinants, verification.

Subcommands:

  check             axiom report for a covector file, or fiber validity
  topes             list the topes of the input in canonical order
  faces             face census (weight degree, multiplicity) of the fiber
  det               exact symbolic determinant of the fiber's distance matrix
  formula           factored closed form of the same determinant
  verify            compare determinant against the factored form
  from-arrangement  covector set of a rational hyperplane arrangement (JSON)
  from-wiring       face fiber of a pseudoline wiring diagram (JSON)

Exit codes: 0 success / agreement; 1 axiom failure or verification
disagreement (the report is still printed); 2 input errors.  Output is
deterministic for fixed inputs, seed, and flags.
"""

from __future__ import annotations

import argparse
import json
import sys

from .polyring import (
    ExactDivisionError,
    IntPolynomial,
    Specialization,
    VarId,
    factored_str,
    poly_str,
)
from .signvec import (
    CovectorSet,
    FiberError,
    FiberView,
    check_covector_axioms,
    loops,
    parse_cov,
    format_cov,
    topal_fiber,
    validate_fiber,
)
from .varchenko import (
    DEFAULT_SYMBOLIC_LIMIT,
    SizeGuardError,
    bareiss_determinant,
    build_matrix,
    determinant,
    product_formula,
    verify,
)
from .realizable import RationalArrangement, arrangement_fiber, enumerate_covectors
from .wiring import WiringDiagram, face_census, faces as wiring_faces, validate as wiring_validate


class InputError(Exception):
    """Problem with user input; maps to exit code 2."""


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write_output(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _load_input(args) -> CovectorSet | FiberView:
    try:
        parsed = parse_cov(_read_text(args.input))
    except (ValueError, FiberError) as exc:
        raise InputError(f"{args.input}: {exc}") from exc
    flag_fiber = getattr(args, "fiber", None)
    flag_anchor = getattr(args, "anchor", None)
    if flag_fiber is None and flag_anchor is None:
        return parsed
    if (flag_fiber is None) != (flag_anchor is None):
        raise InputError("--fiber and --anchor must be given together")
    if isinstance(parsed, FiberView):
        raise InputError(
            "the file already declares a fiber header; conflicting --fiber/--anchor flags"
        )
    try:
        free = frozenset(int(tok) for tok in flag_fiber.split(",") if tok.strip())
        from .signvec import SignVector

        anchor = SignVector.from_string(flag_anchor)
        return topal_fiber(parsed, free, anchor)
    except (ValueError, FiberError) as exc:
        raise InputError(str(exc)) from exc


def _as_fiber(obj) -> FiberView:
    """Interpret the input as a fiber for the determinant-facing commands.

    A plain covector set must pass the axioms (exit 1 otherwise) and be
    loop-free; it is then its own fiber with I = [n].  A fiber file is
    validated structurally.
    """
    if isinstance(obj, FiberView):
        problems = validate_fiber(obj)
        if problems:
            raise _ReportedFailure(["fiber: FAIL"] + [f"  {p}" for p in problems])
        return obj
    report = check_covector_axioms(obj)
    if not report.ok:
        raise _ReportedFailure(["axioms: FAIL"] + [f"  {line}" for line in report.lines()])
    found = loops(obj)
    if found:
        raise InputError(f"covector set has loops at indices {sorted(found)}")
    return topal_fiber(obj, range(1, obj.n + 1), obj.members[0])


class _ReportedFailure(Exception):
    def __init__(self, lines):
        super().__init__("\n".join(lines))
        self.lines = lines


def _parse_specialize(text: str | None, nvars: int) -> Specialization | None:
    if text is None:
        return None
    text = text.strip()
    if text == "all=a":
        return Specialization.collapse_all(nvars)
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON specialization map: {exc}") from exc
        entries = doc.items()
    else:
        entries = []
        for chunk in text.split(","):
            if not chunk.strip():
                continue
            if "=" not in chunk:
                raise InputError(f"bad specialization entry {chunk!r} (expected var=value)")
            key, value = chunk.split("=", 1)
            entries.append((key.strip(), value.strip()))
    values = {}
    collapse = []
    for key, value in entries:
        try:
            var = _var_from_label(key)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        if var >= nvars:
            raise InputError(f"variable {key} is outside this input's universe")
        if value == "a":
            collapse.append(var)
        else:
            try:
                values[var] = int(value)
            except ValueError as exc:
                raise InputError(f"specialization value for {key} must be an integer or 'a'") from exc
    if collapse:
        if len(collapse) + len(values) < nvars:
            raise InputError(
                "a specialization using the collapsed symbol 'a' must cover every variable"
            )
        a = IntPolynomial.variable(1, 0)
        mapping = [(v, a) for v in collapse]
        mapping += [(v, IntPolynomial.const(1, c)) for v, c in values.items()]
        return Specialization(tuple(mapping), 1, ("a",))
    if not values:
        return None
    return Specialization.constants(nvars, values)


def _var_from_label(label: str) -> int:
    import re

    m = re.fullmatch(r"a(\d+)([pm])", label)
    if m is None:
        raise ValueError(f"unknown variable {label!r} (expected a<i>p or a<i>m)")
    return VarId(int(m.group(1)), "+" if m.group(2) == "p" else "-").index


def _cmd_check(args) -> int:
    obj = _load_input(args)
    if isinstance(obj, FiberView):
        problems = validate_fiber(obj)
        if args.format == "json":
            doc = {"kind": "fiber", "ok": not problems, "problems": list(problems)}
            print(json.dumps(doc, indent=2))
        else:
            print(f"fiber: {'PASS' if not problems else 'FAIL'}")
            for p in problems:
                print(f"  {p}")
        return 0 if not problems else 1
    report = check_covector_axioms(obj)
    if args.format == "json":
        doc = {"kind": "covector-set", "ok": report.ok, "axioms": report.lines()}
        print(json.dumps(doc, indent=2))
    else:
        print(f"axioms: {'PASS' if report.ok else 'FAIL'}")
        for line in report.lines():
            print(f"  {line}")
    return 0 if report.ok else 1


def _cmd_topes(args) -> int:
    fiber = _as_fiber(_load_input(args))
    for t in fiber.topes:
        print(t)
    return 0


def _cmd_faces(args) -> int:
    fiber = _as_fiber(_load_input(args))
    census = face_census(fiber)
    if args.format == "json":
        print(json.dumps(census.to_json(), indent=2))
    else:
        for line in census.lines():
            print(line)
    return 0


def _cmd_det(args) -> int:
    fiber = _as_fiber(_load_input(args))
    spec = _parse_specialize(args.specialize, 2 * fiber.n)
    matrix = build_matrix(fiber)
    entries = matrix.entries
    names = None
    nvars = matrix.nvars
    if spec is not None:
        entries = tuple(tuple(spec.apply_poly(e) for e in row) for row in entries)
        names = spec.names
        nvars = spec.nvars
    if matrix.size > args.max_symbolic and not args.force_symbolic:
        raise InputError(
            f"{matrix.size} topes exceed the symbolic guard of {args.max_symbolic}; "
            "pass --force-symbolic to override or use 'verify' in randomized mode"
        )
    det = bareiss_determinant([list(r) for r in entries], nvars)
    print(poly_str(det, names))
    return 0


def _cmd_formula(args) -> int:
    fiber = _as_fiber(_load_input(args))
    spec = _parse_specialize(args.specialize, 2 * fiber.n)
    form = product_formula(fiber)
    names = None
    if spec is not None:
        form = spec.apply_factored(form)
        names = spec.names
    print(factored_str(form, names))
    return 0


def _cmd_verify(args) -> int:
    fiber = _as_fiber(_load_input(args))
    spec = _parse_specialize(args.specialize, 2 * fiber.n)
    try:
        report = verify(
            fiber,
            mode=args.mode,
            seed=args.seed,
            evals=args.evals,
            specialize=spec,
            max_topes=args.max_symbolic,
            force_symbolic=args.force_symbolic,
            workers=args.workers,
        )
    except SizeGuardError as exc:
        raise InputError(str(exc)) from exc
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(f"mode: {report.mode}")
        print(f"topes: {report.tope_count}")
        print(f"formula: {factored_str(report.formula, report.names)}")
        if report.mode == "symbolic":
            print(f"determinant: {poly_str(report.determinant, report.names)}")
        else:
            print(f"prime: {report.prime}")
            print(f"degree bound: {report.degree_bound}")
            for idx, rec in enumerate(report.evals):
                status = "match" if rec.match else "MISMATCH"
                print(f"eval {idx}: det={rec.det_residue} formula={rec.formula_residue} {status}")
        print(f"agreement: {'true' if report.agreement else 'false'}")
    return 0 if report.agreement else 1


def _cmd_from_arrangement(args) -> int:
    try:
        arr = RationalArrangement.loads(_read_text(args.input))
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.input}: {exc}") from exc
    try:
        if arr.affine:
            out = arrangement_fiber(arr)
        else:
            out = enumerate_covectors(arr)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write_output(format_cov(out), args.output)
    return 0


def _cmd_from_wiring(args) -> int:
    try:
        wd = WiringDiagram.loads(_read_text(args.input))
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.input}: {exc}") from exc
    report = wiring_validate(wd)
    if not report.ok:
        raise InputError("; ".join(report.problems))
    _write_output(format_cov(wiring_faces(wd)), args.output)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omdet",
        description="Exact covector-set toolkit: axioms, fibers, distance determinants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, fiber_flags=True):
        p.add_argument("input", help="input file")
        p.add_argument("--format", choices=("text", "json"), default="text")
        if fiber_flags:
            p.add_argument("--fiber", help="free index set, e.g. 1,2,3 (with --anchor)")
            p.add_argument("--anchor", help="anchor sign string (with --fiber)")

    p = sub.add_parser("check", help="validate covector axioms or fiber structure")
    add_common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("topes", help="list topes in canonical order")
    add_common(p)
    p.set_defaults(func=_cmd_topes)

    p = sub.add_parser("faces", help="face census by weight degree and multiplicity")
    add_common(p)
    p.set_defaults(func=_cmd_faces)

    p = sub.add_parser("det", help="exact symbolic determinant")
    add_common(p)
    p.add_argument("--specialize", help="all=a, var=int list, or a JSON map")
    p.add_argument("--max-symbolic", type=int, default=DEFAULT_SYMBOLIC_LIMIT)
    p.add_argument("--force-symbolic", action="store_true")
    p.set_defaults(func=_cmd_det)

    p = sub.add_parser("formula", help="factored closed form of the determinant")
    add_common(p)
    p.add_argument("--specialize", help="all=a, var=int list, or a JSON map")
    p.set_defaults(func=_cmd_formula)

    p = sub.add_parser("verify", help="check determinant against the factored form")
    add_common(p)
    p.add_argument("--mode", choices=("auto", "symbolic", "randomized"), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--evals", type=int, default=5)
    p.add_argument("--specialize", help="all=a, var=int list, or a JSON map")
    p.add_argument("--max-symbolic", type=int, default=DEFAULT_SYMBOLIC_LIMIT)
    p.add_argument("--force-symbolic", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("from-arrangement", help="covector set of a rational arrangement")
    p.add_argument("input", help="arrangement JSON file")
    p.add_argument("-o", "--output", help="output .cov path (default stdout)")
    p.set_defaults(func=_cmd_from_arrangement)

    p = sub.add_parser("from-wiring", help="face fiber of a wiring diagram")
    p.add_argument("input", help="wiring JSON file")
    p.add_argument("-o", "--output", help="output .cov path (default stdout)")
    p.set_defaults(func=_cmd_from_wiring)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ReportedFailure as exc:
        for line in exc.lines:
            print(line)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FiberError, ExactDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
