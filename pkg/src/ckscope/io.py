"""JSON formats for frames, models and proofs, and Graphviz DOT export.

Frame file::

    {"worlds": ["x", "y", "bomb"], "bomb": "bomb",
     "leq": [["x", "y"]], "r": [["x", "bomb"], ["bomb", "bomb"]],
     "auto_close_leq": true}

Worlds may be referred to by name or by index. A model file adds
``"valuation": {"p": ["y", "bomb"]}``. Proof files hold ``axioms`` (extra
axiom names), optional ``user_schemas`` (formula strings, addressed as
``U0``, ``U1``, ...) and ``lines``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .hilbert.calculus import AxiomSet, Line, Proof
from .kripke import Frame, FrameError, Model, ValuationError, bits, make_model, validate_frame
from .syntax import ParseError, parse, render


class FormatError(ValueError):
    """A file or JSON value does not follow the expected format."""


def load_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: malformed JSON ({e})") from None
    except OSError as e:
        raise FormatError(f"{path}: cannot read ({e.strerror})") from None


def dump_json(data: Any, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# frames and models


def _world(ref: Any, lookup: dict[str, int], n: int) -> int:
    if isinstance(ref, bool):
        raise FormatError(f"bad world reference {ref!r}")
    if isinstance(ref, int):
        if not 0 <= ref < n:
            raise FormatError(f"world index {ref} out of range")
        return ref
    if isinstance(ref, str) and ref in lookup:
        return lookup[ref]
    raise FormatError(f"unknown world {ref!r}")


def _pairs(data: Any, key: str, lookup: dict[str, int], n: int) -> list[tuple[int, int]]:
    raw = data.get(key, [])
    if not isinstance(raw, list):
        raise FormatError(f"{key!r} must be a list of pairs")
    out = []
    for pair in raw:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise FormatError(f"{key!r} entries must be pairs, got {pair!r}")
        out.append((_world(pair[0], lookup, n), _world(pair[1], lookup, n)))
    return out


def frame_from_dict(data: Any) -> Frame:
    if not isinstance(data, dict):
        raise FormatError("a frame must be a JSON object")
    worlds = data.get("worlds")
    if isinstance(worlds, int):
        worlds = [str(i) for i in range(worlds)]
    if not isinstance(worlds, list) or not worlds or not all(isinstance(w, str) for w in worlds):
        raise FormatError("'worlds' must be a non-empty list of names")
    if len(set(worlds)) != len(worlds):
        raise FormatError("world names must be distinct")
    lookup = {w: i for i, w in enumerate(worlds)}
    n = len(worlds)
    if "bomb" not in data:
        raise FormatError("missing 'bomb'")
    bomb = _world(data["bomb"], lookup, n)
    leq = _pairs(data, "leq", lookup, n)
    r = _pairs(data, "r", lookup, n)
    auto = data.get("auto_close_leq", False)
    if not isinstance(auto, bool):
        raise FormatError("'auto_close_leq' must be a boolean")
    return validate_frame(n, bomb, leq, r, auto_close=auto, names=worlds)


def _names(frame: Frame) -> list[str]:
    return [frame.name(w) for w in range(frame.n)]


def frame_to_dict(frame: Frame) -> dict:
    """Serialise with all non-reflexive order pairs; reload needs no closure."""
    name = frame.name
    return {
        "worlds": _names(frame),
        "bomb": name(frame.bomb),
        "leq": [[name(x), name(y)] for x, y in frame.leq_pairs() if x != y],
        "r": [[name(x), name(y)] for x, y in frame.r_pairs()],
        "auto_close_leq": True,
    }


def model_from_dict(data: Any) -> Model:
    frame = frame_from_dict(data)
    raw = data.get("valuation", {})
    if not isinstance(raw, dict):
        raise FormatError("'valuation' must map proposition names to world lists")
    lookup = {frame.name(w): w for w in range(frame.n)}
    val = {}
    for p, worlds in raw.items():
        if not isinstance(worlds, list):
            raise FormatError(f"valuation of {p!r} must be a list of worlds")
        val[p] = [_world(w, lookup, frame.n) for w in worlds]
    return make_model(frame, val)


def model_to_dict(model: Model) -> dict:
    out = frame_to_dict(model.frame)
    out["valuation"] = {
        p: [model.frame.name(w) for w in bits(m)] for p, m in sorted(model.valuation.items())
    }
    return out


def load_frame(path: Union[str, Path]) -> Frame:
    return frame_from_dict(load_json(path))


def load_model(path: Union[str, Path]) -> Model:
    return model_from_dict(load_json(path))


# ---------------------------------------------------------------------------
# proofs


def _formula(text: Any, where: str):
    if not isinstance(text, str):
        raise FormatError(f"{where}: formula must be a string")
    try:
        return parse(text)
    except ParseError as e:
        raise FormatError(f"{where}: {e}") from None


def proof_from_dict(data: Any) -> tuple[Proof, AxiomSet]:
    if not isinstance(data, dict) or not isinstance(data.get("lines"), list):
        raise FormatError("a proof must be an object with a 'lines' list")
    names = data.get("axioms", [])
    if isinstance(names, str):
        names = [a for a in names.split(",") if a]
    users = [_formula(s, f"user schema {i}") for i, s in enumerate(data.get("user_schemas", []))]
    try:
        axioms = AxiomSet.of(*names, user_schemas=users)
    except ValueError as e:
        raise FormatError(str(e)) from None
    lines = []
    for i, raw in enumerate(data["lines"]):
        where = f"line {i}"
        if not isinstance(raw, dict):
            raise FormatError(f"{where}: must be an object")
        ctx = [_formula(g, where) for g in raw.get("context", [])]
        refs = raw.get("refs", [])
        if not isinstance(refs, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in refs):
            raise FormatError(f"{where}: refs must be a list of line numbers")
        subst = raw.get("subst")
        if subst is not None:
            if not isinstance(subst, dict):
                raise FormatError(f"{where}: subst must be an object")
            subst = {k: _formula(v, where) for k, v in subst.items()}
        rule = raw.get("rule")
        if not isinstance(rule, str):
            raise FormatError(f"{where}: missing rule")
        lines.append(Line.make(ctx, _formula(raw.get("formula"), where), rule, refs, raw.get("schema"), subst))
    return Proof(tuple(lines)), axioms


def proof_to_dict(proof: Proof, axioms: AxiomSet) -> dict:
    lines = []
    for line in proof.lines:
        item: dict[str, Any] = {
            "context": sorted(render(g) for g in line.context),
            "formula": render(line.formula),
            "rule": line.rule,
            "refs": list(line.refs),
        }
        if line.schema is not None:
            item["schema"] = line.schema
        if line.subst is not None:
            item["subst"] = {k: render(v) for k, v in line.subst}
        lines.append(item)
    return {
        "axioms": sorted(axioms.extras),
        "user_schemas": [render(s) for s in axioms.user_schemas],
        "lines": lines,
    }


def load_proof(path: Union[str, Path]) -> tuple[Proof, AxiomSet]:
    return proof_from_dict(load_json(path))


# ---------------------------------------------------------------------------
# DOT


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def _quote(s: str) -> str:
    return f'"{_escape(s)}"'


def to_dot(model: Union[Model, Frame], name: str = "ckmodel") -> str:
    """Graphviz digraph: order edges solid, R edges dashed and labelled ``R``.

    The bomb is double-circled and each node label lists the propositions
    true there.
    """
    if isinstance(model, Frame):
        model = Model(model, {})
    fr = model.frame
    out = [f"digraph {_quote(name)} {{", "  node [shape=circle];"]
    for w in range(fr.n):
        true_here = [p for p, m in sorted(model.valuation.items()) if m >> w & 1]
        label = _escape(fr.name(w)) + ("\\n" + _escape(",".join(true_here)) if true_here else "")
        attrs = [f'label="{label}"']
        if w == fr.bomb:
            attrs.insert(0, "shape=doublecircle")
        out.append(f"  {_quote(fr.name(w))} [{', '.join(attrs)}];")
    for x, y in fr.leq_pairs():
        if x != y:
            out.append(f"  {_quote(fr.name(x))} -> {_quote(fr.name(y))};")
    for x, y in fr.r_pairs():
        out.append(f'  {_quote(fr.name(x))} -> {_quote(fr.name(y))} [style=dashed, label="R"];')
    out.append("}")
    return "\n".join(out) + "\n"


__all__ = [
    "FormatError",
    "FrameError",
    "ValuationError",
    "dump_json",
    "frame_from_dict",
    "frame_to_dict",
    "load_frame",
    "load_json",
    "load_model",
    "load_proof",
    "model_from_dict",
    "model_to_dict",
    "proof_from_dict",
    "proof_to_dict",
    "to_dot",
]
