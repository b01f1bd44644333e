"""Command-line front end: ``dilators <group> <command> [flags] [documents]``.

Documents are inline JSON or ``@path``.  Exit status: 0 success, 1 property
violation (or a certificate under ``--expect-exhausted``), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .calculus import CalculusError, compare, priority_permutation, security_profile
from .orders import BasePower, OrderError, TwoPower, build_order
from .predilator import (PredilatorError, TraceElement, term_from_json, term_to_json, trace_elements,
                         validate)
from .zoo import BUILTIN_THREADS, get_predilator, thread_from_json
from .lab import (DescentCertificate, LabError, ScatteredData, descend_probe, dl_descent,
                  embedding_from_descent, eta_power, eta_scattered, extract_thread, limit_tree,
                  check_limit_tree)

INPUT_ERRORS = (OrderError, PredilatorError, CalculusError, LabError, KeyError, TypeError, ValueError)


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class _Doc:
    """A JSON document given inline or as @path; ``label`` names it in diagnostics."""

    def __init__(self, raw: str, label: str):
        self.raw, self.label = raw, label

    def where(self) -> str:
        return self.raw[1:] if self.raw.startswith("@") else f"<{self.label}>"

    def load(self):
        text = self.raw
        if text.startswith("@"):
            try:
                text = Path(text[1:]).read_text()
            except OSError as exc:
                raise InputError(f"{self.where()}: cannot read file: {exc.strerror}") from None
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{self.where()}: invalid JSON: {exc.msg} at line {exc.lineno} "
                             f"column {exc.colno}") from None


def _parse(raw: str | None, label: str, convert):
    if raw is None:
        raise InputError(f"missing required document <{label}>")
    doc = _Doc(raw, label)
    obj = doc.load()
    try:
        return convert(obj)
    except INPUT_ERRORS as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        raise InputError(f"{doc.where()}: {msg}") from None


def _predilator(args):
    try:
        return get_predilator(args.predilator)
    except KeyError:
        raise InputError(f"<--predilator>: unknown predilator {args.predilator!r}") from None
    except OrderError as exc:
        raise InputError(f"<--predilator>: {exc}") from None


def _carrier(args, default=None):
    raw = args.carrier if args.carrier is not None else default
    return _parse(raw, "--carrier", build_order)


def _thread(args, default='{"builtin":"omega"}'):
    raw = args.L if args.L is not None else default
    if raw in BUILTIN_THREADS:
        raw = _dump({"builtin": raw})
    return _parse(raw, "--L", thread_from_json)


# -- handlers: each returns (exit code, output text) -------------------------------------

def cmd_order_compare(args):
    o = _carrier(args)
    x = _parse(args.x, "x", o.decode)
    y = _parse(args.y, "y", o.decode)
    res = str(o.compare(x, y))
    return 0, _dump({"result": res}) if args.json else res


def cmd_order_enum(args):
    o = _carrier(args)
    codes = [o.to_json(c) for c in o.prefix(args.count)]
    if args.json:
        return 0, _dump(codes)
    return 0, "\n".join(_dump(c) for c in codes)


def cmd_predil_validate(args):
    D = _predilator(args)
    rep = validate(D, args.levels, args.sample)
    if args.json:
        out = _dump(rep.to_json())
    else:
        lines = [f"{'pass' if rep.passed else 'FAIL'}: {D.name} levels<={args.levels} "
                 f"sample={args.sample} checks={rep.checks}{' (bounded)' if rep.bounded else ''}"]
        lines += [f"  {_dump(v)}" for v in rep.to_json()["violations"]]
        out = "\n".join(lines)
    return (0 if rep.passed else 1), out


def _term_reader(D, args):
    carrier = _carrier(args) if args.carrier is not None else None
    return lambda obj: term_from_json(D, obj, carrier)


def cmd_predil_compare(args):
    D = _predilator(args)
    read = _term_reader(D, args)
    s = _parse(args.s, "s", read)
    t = _parse(args.t, "t", read)
    res = str(compare(D, s, t))
    return 0, _dump({"result": res}) if args.json else res


def cmd_predil_trace(args):
    D = _predilator(args)
    items = [{"sigma": D.code_to_json(args.level, tr.sigma), "level": tr.level}
             for tr in trace_elements(D, args.level, args.bound)]
    if args.json:
        return 0, _dump(items)
    return 0, "\n".join(_dump(i) for i in items)


def _trace_reader(D):
    def read(obj):
        n = obj["level"]
        if not isinstance(n, int) or n < 0:
            raise PredilatorError("trace level must be a natural number")
        sigma = D.code_from_json(n, obj["sigma"])
        if not D.is_trace(n, sigma):
            raise PredilatorError("constructor does not have full support")
        return TraceElement(sigma, n)
    return read


def cmd_calculus_profile(args):
    D = _predilator(args)
    s = _parse(args.left, "left", _trace_reader(D))
    t = _parse(args.right, "right", _trace_reader(D))
    if s == t:
        raise InputError("<left>/<right>: trace elements must be distinct")
    prof = security_profile(D, s, t)
    if args.json:
        return 0, _dump(prof.to_json())
    pl = priority_permutation(D, s).perm
    return 0, f"P={prof.P} p={prof.p} eps={prof.eps:+d} piLeft={list(pl)} piRight={list(prof.pi_right)}"


def cmd_lab_descent(args):
    L = _thread(args)
    cert = dl_descent(L, args.count)
    out = cert.to_json()
    if args.embed:
        out["embedding"] = embedding_from_descent(L, cert.carrier, cert).to_json()
    return 0, _dump(out)


def cmd_lab_extract(args):
    cert = _parse(args.cert, "cert", DescentCertificate.from_json)
    if not cert.valid:
        raise InputError(f"{_Doc(args.cert, 'cert').where()}: certificate is not strictly descending")
    ex = extract_thread(cert.predilator, cert, level_budget=args.budget)
    return 0, _dump(ex.to_json())


def cmd_lab_eta_power(args):
    gamma = _parse(args.gamma, "--gamma", build_order)
    alpha = _carrier(args)
    L = _thread(args)
    x = _parse(args.x, "x", BasePower(alpha, gamma).decode)
    t = eta_power(gamma, L, alpha, x)
    D = get_predilator("dl:" + _dump(L.to_json()))
    return 0, _dump(term_to_json(D, t))


def cmd_lab_eta_scattered(args):
    data = _parse(args.data, "--data", ScatteredData.from_json)
    alpha = _carrier(args)
    L = _thread(args)
    x = _parse(args.x, "x", TwoPower(alpha).decode)
    try:
        t = eta_scattered(data, L, alpha, x)
    except LabError as exc:
        raise InputError(f"<--data>: {exc}") from None
    D = get_predilator("dl:" + _dump(L.to_json()))
    return 0, _dump(term_to_json(D, t))


def cmd_lab_probe(args):
    D = _predilator(args)
    alpha = _carrier(args)
    res = descend_probe(D, alpha, args.depth, args.width)
    code = 1 if args.expect_exhausted and res.status == "certificate" else 0
    return code, _dump(res.to_json())


def cmd_lab_limit_tree(args):
    tree = _parse(args.table, "table", limit_tree)
    rep = check_limit_tree(tree)
    out = tree.to_json()
    out["check"] = {"passed": rep.passed, "violations": rep.to_json()["violations"]}
    return (0 if rep.passed else 1), _dump(out)


def cmd_selftest(args):
    from .acceptance import run_all
    results = run_all(set(args.only) if args.only else None)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return (0 if ok else 1), "\n".join(lines)


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--predilator", default="two-power", help="registry name (default two-power)")
    common.add_argument("--carrier", help="OrderExpr JSON or @file")
    common.add_argument("--L", dest="L", help="ThreadOrder JSON or @file (default omega)")
    common.add_argument("--depth", type=int, default=16)
    common.add_argument("--width", type=int, default=32)
    common.add_argument("--levels", type=int, default=4)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--expect-exhausted", action="store_true")

    p = argparse.ArgumentParser(prog="dilators", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, help_):
        q = sub.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=func)
        return q

    order = groups.add_parser("order", help="order expressions and element codes").add_subparsers(
        dest="cmd", required=True)
    q = leaf(order, "compare", cmd_order_compare, "compare two element codes")
    q.add_argument("x")
    q.add_argument("y")
    q = leaf(order, "enum", cmd_order_enum, "list the first codes of an order")
    q.add_argument("--count", type=int, default=10)

    predil = groups.add_parser("predil", help="predilators and their extensions").add_subparsers(
        dest="cmd", required=True)
    q = leaf(predil, "validate", cmd_predil_validate, "bounded functor/support checks")
    q.add_argument("--sample", type=int, default=100)
    q = leaf(predil, "compare", cmd_predil_compare, "compare two terms")
    q.add_argument("s")
    q.add_argument("t")
    q = leaf(predil, "trace", cmd_predil_trace, "full-support constructors of one level")
    q.add_argument("--level", type=int, default=2)
    q.add_argument("--bound", type=int, default=100)

    calc = groups.add_parser("calculus", help="comparison calculus").add_subparsers(dest="cmd", required=True)
    q = leaf(calc, "profile", cmd_calculus_profile, "security profile of two trace elements")
    q.add_argument("left")
    q.add_argument("right")

    lab = groups.add_parser("lab", help="constructions and probes").add_subparsers(dest="cmd", required=True)
    q = leaf(lab, "descent", cmd_lab_descent, "descending sequence in D_L(omega*L)")
    q.add_argument("--count", type=int, default=5)
    q.add_argument("--embed", action="store_true", help="also read off the embedding of L")
    q = leaf(lab, "extract", cmd_lab_extract, "thread extraction from a certificate")
    q.add_argument("cert")
    q.add_argument("--budget", type=int, default=12, help="max level sum for security profiles")
    q = leaf(lab, "eta-power", cmd_lab_eta_power, "(1+alpha)^gamma -> D_L(alpha*2^gamma)")
    q.add_argument("--gamma", required=True)
    q.add_argument("x")
    q = leaf(lab, "eta-scattered", cmd_lab_eta_scattered, "2^alpha via a scattered witness")
    q.add_argument("--data", required=True)
    q.add_argument("x")
    leaf(lab, "probe", cmd_lab_probe, "bounded search for a descending sequence")
    q = leaf(lab, "limit-tree", cmd_lab_limit_tree, "tree from a limit-lemma table")
    q.add_argument("table")

    q = groups.add_parser("selftest", parents=[common], help="run the acceptance suite")
    q.add_argument("--only", type=int, nargs="*")
    q.set_defaults(func=cmd_selftest)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    for flag in ("depth", "width", "levels"):
        if getattr(args, flag) < 0:
            print(f"error: <--{flag}>: must be non-negative", file=err)
            return 2
    try:
        code, text = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return 2
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=err)
        return 2
    if text:
        print(text, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
