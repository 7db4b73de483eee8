"""Command-line front end. Exit codes: 0 success/positive, 1 negative decision, 2 error."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import bisim, charts, coind, extraction, fixtures, kernel, lee, solutions, transform
from .errors import MilnerkitError
from .sexpr import dump_proof, load_proof_file
from .syntax import parse_equation, parse_expr, render_expr, star_height, terminates, normed

SYSTEM_CHOICES = ("aci", "mil-", "mil", "mil'", "milbar'", "cmil", "cmil1", "cmilbar", "clc", "cc")


class Out:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, text: str, data: dict):
        if self.fmt == "json":
            print(json.dumps(data, indent=2, sort_keys=True))
        else:
            print(text)


def _expr(s: str):
    if os.path.isfile(s):
        with open(s) as fh:
            s = fh.read().strip()
    return parse_expr(s)


def _cap(args):
    return args.cap if args.cap is not None else charts.default_cap()


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------- commands

def cmd_parse(args, out):
    e = _expr(args.expr)
    d = {"expr": render_expr(e), "star_height": star_height(e), "terminates": terminates(e),
         "normed": normed(e)}
    out.emit("\n".join(f"{k}: {v}" for k, v in d.items()), d)
    return 0


def _chart_out(args, out, chart, marks=None):
    if args.dot:
        dot = charts.export_dot(charts.LabeledChart(chart, marks) if marks is not None else chart)
        if args.output:
            _write(args.output, dot)
        else:
            print(dot)
        return 0
    d = chart.to_json(marks)
    if args.output:
        _write(args.output, json.dumps(d, indent=2))
    lines = [f"{len(chart.vertices)} vertices, {len(chart.transitions)} transitions, start {chart.start}"]
    for t in sorted(chart.transitions):
        m = "" if marks is None or not marks[t] else f" [{marks[t]}]"
        lines.append(f"  {t[0]} -{t[1]}->{m} {t[2]}")
    lines.append("terminating: " + ", ".join(sorted(chart.terminating)))
    out.emit("\n".join(lines), d)
    return 0


def cmd_chart(args, out):
    return _chart_out(args, out, charts.chart_interpretation(_expr(args.expr), cap=_cap(args)))


def cmd_onechart(args, out):
    lc = charts.one_chart_interpretation(_expr(args.expr), cap=_cap(args))
    return _chart_out(args, out, lc.chart, lc.marks)


def cmd_lee(args, out):
    chart, marks = charts.load_chart(args.file)
    if args.action == "infer":
        try:
            lc = lee.infer_witness(chart, exhaustive=args.exhaustive, guarded=args.guarded,
                                   cap=_cap(args))
        except MilnerkitError as exc:
            out.emit(f"no witness: {exc}", {"found": False, "reason": str(exc)})
            return 1
        return _chart_out(args, out, lc.chart, lc.marks)
    if marks is None:
        raise MilnerkitError("witness file needs 'mark' fields on its transitions")
    rep = lee.validate_witness(charts.LabeledChart(chart, marks), require_guarded=args.guarded)
    text = "valid" if rep.valid else f"invalid at stage {rep.violation[0]}: {rep.violation[1]} ({rep.message})"
    out.emit(text, rep.to_json())
    return 0 if rep.valid else 1


def cmd_bisim(args, out):
    e, f = _expr(args.e), _expr(args.f)
    c1 = charts.chart_interpretation(e, cap=_cap(args))
    c2 = charts.chart_interpretation(f, cap=_cap(args))
    rel = bisim.find_one_bisimulation(c1, c2)
    ok = rel is not None
    d = {"bisimilar": ok}
    if ok:
        d["relation"] = sorted([u, w] for (u, w) in rel)
    out.emit("bisimilar" if ok else "not bisimilar", d)
    return 0 if ok else 1


def _solution_json(cs, chart):
    return {v: {"value": render_expr(cs[v]), "cert": dump_proof(cs.certificates[v])}
            for v in chart.vertices}


def cmd_solution(args, out):
    if args.action == "projection":
        e = _expr(args.target)
        lc = charts.one_chart_interpretation(e, cap=_cap(args))
        cs = solutions.projection_solution(e, lc)
        errs = solutions.solution_errors(cs, lc.chart)
        d = {"chart": lc.to_json(), "values": _solution_json(cs, lc.chart), "errors": errs}
        if args.output:
            _write(args.output, json.dumps(d, indent=2))
        text = "\n".join(f"{v}: {render_expr(cs[v])}" for v in lc.chart.vertices)
        out.emit(text + ("\ncertificates check" if not errs else f"\nerrors: {errs}"),
                 {"values": {v: render_expr(cs[v]) for v in lc.chart.vertices}, "errors": errs})
        return 0 if not errs else 1
    with open(args.target) as fh:
        d = json.load(fh)
    chart, _ = charts.chart_from_json(d["chart"])
    from .sexpr import load_proof
    base = os.path.dirname(os.path.abspath(args.target))
    vals = {v: parse_expr(x["value"]) for v, x in d["values"].items()}
    certs = {v: load_proof(x["cert"], base) for v, x in d["values"].items() if "cert" in x}
    cs = solutions.CertifiedSolution(vals, kernel.system(args.system or "mil-"), certs)
    errs = solutions.solution_errors(cs, chart)
    out.emit("solution checks" if not errs else "\n".join(f"{v}: {m}" for v, m in errs),
             {"valid": not errs, "errors": errs})
    return 0 if not errs else 1


def cmd_extract(args, out):
    chart, marks = charts.load_chart(args.file)
    if marks is None:
        raise MilnerkitError("extraction needs a witness file with 'mark' fields")
    lc = charts.LabeledChart(chart, marks)
    ex = extraction.Extractor(lc)
    vals = {}
    for v in chart.vertices:
        x = ex.s(v)
        if args.simplify:
            x = extraction.simplify(x)[0]
        vals[v] = render_expr(x)
    d = {"absolute": vals}
    if args.relative:
        d["relative"] = {f"{w} -> {v}": render_expr(x) for (w, v), x in
                         sorted(ex.table().relative.items())}
    text = "\n".join(f"s({v}) = {x}" for v, x in vals.items())
    if args.relative:
        text += "\n" + "\n".join(f"t({k}) = {x}" for k, x in d["relative"].items())
    out.emit(text, d)
    return 0


def cmd_check_proof(args, out):
    sysname = args.system_pos or args.system or "mil"
    sys_ = kernel.system(sysname)
    p = load_proof_file(args.file)
    if args.assume:
        sys_ = sys_.with_assumptions([parse_equation(a) for a in args.assume])
    c = kernel.check_proof(sys_, p)
    if args.expect and c != parse_equation(args.expect):
        out.emit(f"proof concludes {c}, expected {args.expect}", {"valid": False, "conclusion": str(c)})
        return 1
    out.emit(f"valid in {sys_.name}: {c}", {"valid": True, "conclusion": str(c), "system": sys_.name,
                                            "nodes": kernel.count_nodes(p)})
    return 0


def cmd_check_coind(args, out):
    cp = coind.load_coindproof(args.file)
    if args.close_with_aci:
        cp = coind.close_with_aci(cp)
        if args.output:
            coind.save_coindproof(cp, args.output)
    sys_ = kernel.system(args.system or "mil-")
    if args.assume:
        sys_ = sys_.with_assumptions([parse_equation(a) for a in args.assume])
    claimed = parse_equation(args.claim) if args.claim else None
    witnessed = True if args.witnessed else None
    d = coind.coindproof_diagnostic(sys_, cp, claimed, witnessed)
    if d is None:
        out.emit(f"valid coinductive proof of {cp.claim()}", {"valid": True, "claim": str(cp.claim())})
        return 0
    v, msg = d
    out.emit(f"invalid{'' if v is None else ' at ' + str(v)}: {msg}",
             {"valid": False, "vertex": v, "message": msg})
    return 1


def _emit_transform(args, out, result, rep: transform.TransformReport):
    text = dump_proof(result)
    if args.output:
        _write(args.output, text + "\n")
    d = rep.to_json()
    if args.format == "json":
        out.emit("", d)
    else:
        if not args.output:
            print(text)
        print(json.dumps(d, sort_keys=True))
    return 0 if rep.rechecked else 1


def cmd_transform(args, out):
    if args.action == "rsp-to-coind":
        e, f, g = _expr(args.e), _expr(args.f), _expr(args.g)
        cp = transform.rsp_to_coindproof(e, f, g)
        prem = solutions.rsp_premise(e, f, g)
        ok = coind.check_coindproof(kernel.MIL_MINUS.with_assumptions([prem]), cp, None, True)
        d = coind.coindproof_to_json(cp)
        if args.output:
            _write(args.output, json.dumps(d, indent=2))
        rep = {"claim": str(cp.claim()), "assumption": str(prem), "vertices": len(cp.chart.vertices),
               "rechecked": ok}
        if args.format == "json":
            out.emit("", {"proof": d, "report": rep})
        else:
            for v in cp.chart.vertices:
                print(f"{v}: {cp.labels[v]}")
            print(json.dumps(rep, sort_keys=True))
        return 0 if ok else 1
    p = load_proof_file(args.file)
    src = kernel.system(args.system) if args.system else None
    if args.action == "to-cmil1":
        kernel.check_proof(src or kernel.MIL, p)
        r = transform.mil_to_cmil1(p, cap=args.cap)
        target = kernel.CMIL1
    elif args.action == "to-mil":
        kernel.check_proof(src or kernel.CMIL, p)
        r = transform.cmil_to_mil(p, cap=args.cap)
        target = kernel.MIL
    else:
        kernel.check_proof(src or (kernel.CMIL_BAR if args.cc else kernel.CMIL), p)
        r = transform.cmil_to_clc(p, cc=args.cc, cap=args.cap)
        target = kernel.CC if args.cc else kernel.CLC
    return _emit_transform(args, out, r, transform.report(target, p, r))


def cmd_prove_cc(args, out):
    e, f = _expr(args.e), _expr(args.f)
    try:
        p = transform.complete_cc_proof(e, f)
    except MilnerkitError as exc:
        out.emit(f"no CC proof: {exc}", {"found": False, "reason": str(exc)})
        return 1
    c = kernel.check_proof(kernel.CC, p)
    rep = transform.TransformReport(c, c, "cc", True)
    return _emit_transform(args, out, p, rep)


def cmd_fixtures(args, out):
    results = fixtures.run_fixtures()
    ok = all(r["ok"] for r in results)
    lines = [f"{'PASS' if r['ok'] else 'FAIL'} {r['name']} ({r['seconds']:.3f}s)"
             + ("" if r["ok"] else f": {r['message']}") for r in results]
    out.emit("\n".join(lines), {"passed": ok, "fixtures": results})
    return 0 if ok else 1


def cmd_sweep(args, out):
    from .sweep import run_sweep
    res = run_sweep(seed=args.seed if args.seed is not None else 0, count=args.count,
                    max_ops=args.max_ops)
    ok = all(r["failures"] == 0 for r in res.values())
    lines = [f"{k}: {v['checked']} checked, {v['failures']} failures" for k, v in res.items()]
    out.emit("\n".join(lines), {"passed": ok, "suites": res})
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--system", choices=SYSTEM_CHOICES)
    common.add_argument("--seed", type=int)
    common.add_argument("--cap", type=int)
    common.add_argument("--dot", action="store_true")
    common.add_argument("-o", "--output")

    ap = argparse.ArgumentParser(prog="milnerkit", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and describe an expression")
    p.add_argument("expr")
    p.set_defaults(fn=cmd_parse)
    for name, fn in (("chart", cmd_chart), ("onechart", cmd_onechart)):
        p = sub.add_parser(name, parents=[common], help=f"{name} interpretation of an expression")
        p.add_argument("expr")
        p.set_defaults(fn=fn)
    p = sub.add_parser("lee", parents=[common], help="infer or validate LLEE-witnesses")
    p.add_argument("action", choices=("infer", "validate"))
    p.add_argument("file")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--guarded", action="store_true")
    p.set_defaults(fn=cmd_lee)
    p = sub.add_parser("bisim", parents=[common], help="decide bisimilarity of two expressions")
    p.add_argument("e")
    p.add_argument("f")
    p.set_defaults(fn=cmd_bisim)
    p = sub.add_parser("solution", parents=[common], help="projection solutions and solution files")
    p.add_argument("action", choices=("projection", "check"))
    p.add_argument("target", help="expression (projection) or solution file (check)")
    p.set_defaults(fn=cmd_solution)
    p = sub.add_parser("extract", parents=[common], help="extract expressions from a witness file")
    p.add_argument("file")
    p.add_argument("--simplify", action="store_true")
    p.add_argument("--relative", action="store_true")
    p.set_defaults(fn=cmd_extract)
    p = sub.add_parser("check-proof", parents=[common], help="check a proof-term file")
    p.add_argument("system_pos", nargs="?", choices=SYSTEM_CHOICES, metavar="SYSTEM")
    p.add_argument("file")
    p.add_argument("--expect")
    p.add_argument("--assume", action="append")
    p.set_defaults(fn=cmd_check_proof)
    p = sub.add_parser("check-coind", parents=[common], help="check a coinductive-proof file")
    p.add_argument("file")
    p.add_argument("--claim")
    p.add_argument("--witnessed", action="store_true")
    p.add_argument("--close-with-aci", action="store_true")
    p.add_argument("--assume", action="append")
    p.set_defaults(fn=cmd_check_coind)
    p = sub.add_parser("transform", parents=[common], help="proof transformations")
    p.add_argument("action", choices=("rsp-to-coind", "to-cmil1", "to-mil", "to-clc"))
    p.add_argument("file", nargs="?")
    p.add_argument("--e")
    p.add_argument("--f")
    p.add_argument("--g")
    p.add_argument("--cc", action="store_true")
    p.set_defaults(fn=cmd_transform)
    p = sub.add_parser("prove-cc", parents=[common], help="CC proof along a bisimulation")
    p.add_argument("e")
    p.add_argument("f")
    p.set_defaults(fn=cmd_prove_cc)
    p = sub.add_parser("fixtures", parents=[common], help="run the worked-example corpus")
    p.add_argument("action", choices=("run",))
    p.set_defaults(fn=cmd_fixtures)
    p = sub.add_parser("sweep", parents=[common], help="randomized property sweep")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-ops", type=int, default=14)
    p.set_defaults(fn=cmd_sweep)
    return ap


def _validate(args, ap):
    if args.command == "transform":
        if args.action == "rsp-to-coind":
            if not (args.e and args.f and args.g):
                ap.error("transform rsp-to-coind needs --e, --f and --g")
        elif not args.file:
            ap.error(f"transform {args.action} needs a proof file")
    if args.cap is not None and args.cap <= 0:
        ap.error("--cap must be positive")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        _validate(args, ap)
    except SystemExit:
        return 2
    out = Out(args.format)
    try:
        return args.fn(args, out)
    except (MilnerkitError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
