"""``ckscope`` command line.

Exit status: 0 for success or a true verdict, 1 for a false verdict, 2 for
usage, format or cap errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Optional, Sequence

from . import __version__
from .conditions import ALL_CONDITIONS, ConditionName, NoFrameCondition, condition_witness
from .corpus import resolve, verify_corpus
from .hilbert import BUILTINS, AxiomSet, builtin_proof, check_proof
from .io import (
    FormatError,
    dump_json,
    load_frame,
    load_json,
    model_from_dict,
    model_to_dict,
    proof_from_dict,
    proof_to_dict,
    to_dot,
)
from .kripke import FrameError, Model, ValuationError, bits, forces, schema_refutation, truth_set
from .search import SearchCapExceeded, correspondence_audit, find_countermodel
from .syntax import ParseError, depth, parse, render, tree
from .transform import OPS, run_transform

OK, FALSE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args: argparse.Namespace, text: str, data: Any) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=False))
    else:
        print(text)


def _formula(text: str):
    return parse(text)


def _axioms(spec: Optional[str]) -> AxiomSet:
    names = [a.strip() for a in (spec or "").split(",") if a.strip()]
    return AxiomSet.of(*names)


def _world_set(model: Model, mask: int) -> list[str]:
    return [model.frame.name(w) for w in bits(mask)]


def _load_model_any(path: str) -> Model:
    return model_from_dict(load_json(resolve(path)))


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    f = _formula(args.formula)
    _emit(args, tree(f), {"formula": render(f), "depth": depth(f), "tree": tree(f)})
    return OK


def cmd_print(args) -> int:
    f = _formula(args.formula)
    _emit(args, render(f), {"formula": render(f)})
    return OK


def cmd_check_proof(args) -> int:
    proof, axioms = proof_from_dict(load_json(resolve(args.proof)))
    if args.axioms is not None:
        axioms = AxiomSet(_axioms(args.axioms).extras, axioms.user_schemas)
    report = check_proof(proof, axioms)
    data = {"accepted": report.accepted, "line": report.line, "reason": report.reason, "axioms": str(axioms)}
    if report.accepted:
        data["conclusion"] = {"context": sorted(map(render, proof.context)), "formula": render(proof.formula)}
        text = f"accepted in {axioms}: {proof.lines[-1]}"
    else:
        text = str(report)
    _emit(args, text, data)
    return OK if report.accepted else FALSE


def cmd_builtin(args) -> int:
    if args.name is None:
        _emit(args, "\n".join(BUILTINS), {"builtins": list(BUILTINS)})
        return OK
    proof, axioms = builtin_proof(args.name)
    report = check_proof(proof, axioms)
    if args.emit:
        dump_json(proof_to_dict(proof, axioms), args.emit)
    text = f"{proof}\n{report} in {axioms}" if args.show else f"{render(proof.formula)}\n{len(proof)} lines, {report} in {axioms}"
    _emit(args, text, {"name": args.name, "formula": render(proof.formula), "axioms": str(axioms),
                       "lines": len(proof), "accepted": report.accepted})
    return OK if report.accepted else FALSE


def cmd_model_check(args) -> int:
    model = _load_model_any(args.model)
    f = _formula(args.formula)
    t = truth_set(model, f)
    if args.at is not None:
        verdict = forces(model, model.frame.index(args.at), f)
        text = f"{args.at} {'forces' if verdict else 'does not force'} {render(f)}"
    else:
        verdict = t == model.frame.full
        text = f"true at: {', '.join(_world_set(model, t))}\nvalid in model: {str(verdict).lower()}"
    _emit(args, text, {"formula": render(f), "true_at": _world_set(model, t), "verdict": verdict})
    return OK if verdict else FALSE


def cmd_frame_valid(args) -> int:
    frame = load_frame(resolve(args.frame))
    f = _formula(args.formula)
    ref = schema_refutation(frame, f)
    data: dict = {"formula": render(f), "valid": ref is None}
    if ref is None:
        text = f"valid: {render(f)}"
    else:
        model, w = ref
        data["countermodel"] = {"world": frame.name(w), "model": model_to_dict(model)}
        val = ", ".join(f"{p}={{{','.join(_world_set(model, m))}}}" for p, m in sorted(model.valuation.items()))
        text = f"not valid: fails at {frame.name(w)} under {val or 'the empty valuation'}"
    _emit(args, text, data)
    return OK if ref is None else FALSE


def cmd_check_frame(args) -> int:
    frame = load_frame(resolve(args.frame))
    names = [c.strip() for c in args.conditions.split(",") if c.strip()] if args.conditions else [c.value for c in ALL_CONDITIONS]
    lines, data = [], {}
    for name in names:
        try:
            cond = ConditionName(name)
        except ValueError:
            raise UsageError(f"unknown condition {name!r}") from None
        wit = condition_witness(frame, cond)
        line = f"{cond.value}: {str(wit is None).lower()}"
        if args.explain and wit is not None:
            line += f"  (violated at {', '.join(frame.name(w) for w in wit)})"
        lines.append(line)
        data[cond.value] = {"holds": wit is None, "witness": None if wit is None else [frame.name(w) for w in wit]}
    _emit(args, "\n".join(lines), data)
    return OK


def cmd_decide(args) -> int:
    f = _formula(args.formula)
    axioms = _axioms(args.axioms)
    res = find_countermodel(f, axioms, args.max_worlds, args.mode, workers=args.workers)
    stats = res.stats
    data: dict = {
        "formula": render(f),
        "axioms": str(axioms),
        "mode": args.mode,
        "outcome": res.outcome,
        "bound": res.bound,
        "stats": {
            "frames_enumerated": stats.frames_enumerated,
            "frames_examined": stats.frames_examined,
            "valuations_examined": stats.valuations_examined,
            "elapsed": round(stats.elapsed, 4),
        },
    }
    if res.found:
        model = res.model
        data["world"] = model.frame.name(res.world)
        data["model"] = model_to_dict(model)
        text = f"countermodel on {model.frame.n} worlds, fails at {model.frame.name(res.world)}\n{json.dumps(model_to_dict(model))}"
        if args.emit_model:
            dump_json(model_to_dict(model), args.emit_model)
        if args.dot:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(to_dot(model))
    else:
        text = f"exhausted: no countermodel up to {res.bound} worlds (this is not a derivation)"
    text += f"\n{stats.frames_examined} frames, {stats.valuations_examined} valuations, {stats.elapsed:.2f}s"
    _emit(args, text, data)
    return FALSE if res.found else OK


def cmd_audit(args) -> int:
    spots = [(p, load_frame(resolve(p))) for p in args.spot or []]
    report = correspondence_audit(args.axiom, args.max_worlds, extra_frames=spots)
    data = report.to_dict()
    if args.report:
        dump_json(data, args.report)
    lines = [f"{args.axiom} up to {args.max_worlds} worlds: {'PASS' if report.passed else 'FAIL'} ({report.frames} frames)"]
    for b in data["buckets"]:
        lines.append(f"  suff={b['suff']!s:5} corr={b['corr']!s:5} valid={b['valid']!s:5} {b['count']}")
    for s in data["spot_checks"]:
        lines.append(f"  spot {s['label']}: suff={s['suff']} corr={s['corr']} valid={s['valid']}")
    for v in data["violations"][:5]:
        lines.append(f"  violation at {v['where']}: {v['problem']}")
    _emit(args, "\n".join(lines), data)
    return OK if report.passed else FALSE


def cmd_transform(args) -> int:
    model = _load_model_any(args.model)
    report = run_transform(model, args.op, check_preservation=args.check_preservation,
                           depth=args.depth, input_id=args.model)
    out = model_to_dict(report.output)
    if args.emit:
        dump_json(out, args.emit)
    pres = report.preservation
    pres_data: Any = pres
    if isinstance(pres, tuple):
        pres_data = {"world": model.frame.name(pres[0]), "formula": render(pres[1])}
    lines = [f"{args.op}: {report.output.frame.n} worlds"]
    lines += [f"{c}: {str(v).lower()}" for c, v in report.conditions.items()]
    if pres is not None:
        lines.append("preservation: pass" if pres == "pass" else
                     f"preservation: FAIL at {pres_data['world']} on {pres_data['formula']}")
    _emit(args, "\n".join(lines), {"op": args.op, "conditions": report.conditions,
                                  "preservation": pres_data, "output": out})
    return OK if report.ok else FALSE


def cmd_dot(args) -> int:
    model = _load_model_any(args.model)
    text = to_dot(model)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        print(json.dumps({"dot": text}))
    elif not args.output:
        sys.stdout.write(text)
    return OK


def cmd_corpus(args) -> int:
    if args.action != "verify":
        raise UsageError(f"unknown corpus action {args.action!r}")
    results = verify_corpus(args.entry)
    if args.entry is not None and not results:
        raise UsageError(f"no corpus entry {args.entry!r}")
    bad = [r for r in results if not r.ok]
    lines = [f"{'ok  ' if r.ok else 'FAIL'} {r.entry}: {r.description} -> {r.actual}" for r in results]
    lines.append(f"{len(results) - len(bad)}/{len(results)} corpus checks reproduced")
    _emit(args, "\n".join(lines), [
        {"entry": r.entry, "check": r.description, "expected": r.expected, "actual": r.actual, "ok": r.ok}
        for r in results
    ])
    return FALSE if bad else OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="ckscope", description="Constructive modal logic workbench.")
    p.add_argument("--version", action="version", version=f"ckscope {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help, description=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("parse", cmd_parse, "parse a formula and print its syntax tree")
    sp.add_argument("formula")
    sp = add("print", cmd_print, "print a formula in canonical form")
    sp.add_argument("formula")

    sp = add("check-proof", cmd_check_proof, "check a proof file")
    sp.add_argument("proof")
    sp.add_argument("--axioms", help="override the extra axioms, e.g. Nd,Idb")

    sp = add("builtin", cmd_builtin, "build and check a library proof (no name: list them)")
    sp.add_argument("name", nargs="?", choices=list(BUILTINS))
    sp.add_argument("--emit", metavar="FILE", help="write the proof as JSON")
    sp.add_argument("--show", action="store_true", help="print every line")

    sp = add("model-check", cmd_model_check, "evaluate a formula on a model")
    sp.add_argument("model")
    sp.add_argument("formula")
    sp.add_argument("--at", metavar="WORLD")

    sp = add("frame-valid", cmd_frame_valid, "is a formula valid on a frame (as a schema)?")
    sp.add_argument("frame")
    sp.add_argument("formula")

    sp = add("check-frame", cmd_check_frame, "evaluate frame conditions")
    sp.add_argument("frame")
    sp.add_argument("--conditions", help="comma-separated names (default: all)")
    sp.add_argument("--explain", action="store_true", help="show a violating tuple of worlds")

    sp = add("decide", cmd_decide, "bounded countermodel search")
    sp.add_argument("formula")
    sp.add_argument("--axioms", default="", help="extra axioms, e.g. Nd,Idb")
    sp.add_argument("--max-worlds", type=int, default=3)
    sp.add_argument("--mode", choices=["corr", "suff", "schema"], default="corr")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--emit-model", metavar="FILE")
    sp.add_argument("--dot", metavar="FILE")

    sp = add("audit", cmd_audit, "correspondence audit of an axiom over small frames")
    sp.add_argument("--axiom", required=True, choices=["Nd", "Cd", "Idb", "Ndb"])
    sp.add_argument("--max-worlds", type=int, default=3)
    sp.add_argument("--spot", action="append", metavar="FRAME", help="extra frame file to include")
    sp.add_argument("--report", metavar="FILE")

    sp = add("transform", cmd_transform, "apply a frame transformation to a model")
    sp.add_argument("model")
    sp.add_argument("--op", required=True, choices=list(OPS))
    sp.add_argument("--check-preservation", action="store_true")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--emit", metavar="FILE")

    sp = add("dot", cmd_dot, "render a frame or model as Graphviz DOT")
    sp.add_argument("model")
    sp.add_argument("-o", "--output", metavar="FILE")

    sp = add("corpus", cmd_corpus, "bundled figure corpus")
    sp.add_argument("action", choices=["verify"])
    sp.add_argument("--entry", help="verify a single entry")
    return p


_USER_ERRORS = (
    UsageError,
    ParseError,
    FormatError,
    FrameError,
    ValuationError,
    SearchCapExceeded,
    NoFrameCondition,
    KeyError,
    ValueError,
)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    try:
        return args.func(args)
    except SearchCapExceeded as e:
        print(f"ckscope: cap exceeded: {e}", file=sys.stderr)
    except ParseError as e:
        print(f"ckscope: parse error: {e}", file=sys.stderr)
    except (FormatError, FrameError, ValuationError) as e:
        print(f"ckscope: bad input: {e}", file=sys.stderr)
    except _USER_ERRORS as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"ckscope: error: {msg}", file=sys.stderr)
    return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
