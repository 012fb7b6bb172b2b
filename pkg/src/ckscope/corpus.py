"""The bundled corpus of figure frames, models and builtin proofs.

``manifest.json`` lists every file with the verdicts it must reproduce;
:func:`verify_corpus` re-derives each verdict through the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .conditions import check_condition
from .hilbert.calculus import AxiomSet, check_proof
from .io import FormatError, load_frame, load_json, load_model, load_proof
from .kripke import Model, forces, frame_validates_schema
from .search import find_countermodel
from .syntax import parse
from .transform import run_transform

CORPUS_DIR = Path(__file__).with_name("data")


def corpus_path(name: str) -> Path:
    return CORPUS_DIR / name


def resolve(path: str) -> Path:
    """A user path, falling back to the bundled corpus for ``corpus/...``."""
    p = Path(path)
    if p.exists():
        return p
    parts = p.parts
    if parts and parts[0] == "corpus":
        bundled = CORPUS_DIR.joinpath(*parts[1:])
        if bundled.exists():
            return bundled
    return p


@dataclass(frozen=True)
class CheckOutcome:
    entry: str
    description: str
    expected: Any
    actual: Any

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def _run_check(entry: dict, check: dict, obj: Any) -> CheckOutcome:
    kind = check["type"]
    eid = entry["id"]
    frame = obj.frame if isinstance(obj, Model) else obj
    if kind == "condition":
        return CheckOutcome(eid, f"{check['name']}", check["expect"], check_condition(frame, check["name"]))
    if kind == "schema_valid":
        schema = AxiomSet.of(check["axiom"]).schema(check["axiom"])
        return CheckOutcome(eid, f"validates {check['axiom']}", check["expect"], frame_validates_schema(frame, schema))
    if kind == "forces":
        w = frame.index(check["world"])
        actual = forces(obj, w, parse(check["formula"]))
        return CheckOutcome(eid, f"{check['world']} forces {check['formula']}", check["expect"], actual)
    if kind == "transform":
        report = run_transform(obj, check["op"])
        expected = {"worlds": check["worlds"], **check["conditions"]}
        actual = {"worlds": report.output.frame.n, **report.conditions}
        return CheckOutcome(eid, f"{check['op']} output", expected, actual)
    if kind == "proves":
        proof, axioms = obj
        accepted = bool(check_proof(proof, axioms)) and not proof.context and proof.formula == parse(check["formula"])
        return CheckOutcome(eid, f"proof of {check['formula']} in {axioms}", check["expect"], accepted)
    if kind == "search":
        axioms = AxiomSet.of(*check["axioms"])
        res = find_countermodel(parse(check["formula"]), axioms, check["max_worlds"], check["mode"])
        desc = f"search {check['formula']} in {axioms} ({check['mode']}, <= {check['max_worlds']} worlds)"
        return CheckOutcome(eid, desc, check["expect"], res.outcome)
    raise FormatError(f"{eid}: unknown check type {kind!r}")


def _load(entry: dict) -> Any:
    kind = entry["kind"]
    if kind == "targets":
        return None
    path = corpus_path(entry["file"])
    if kind == "frame":
        return load_frame(path)
    if kind == "model":
        return load_model(path)
    if kind == "proof":
        return load_proof(path)
    raise FormatError(f"{entry['id']}: unknown entry kind {kind!r}")


def manifest() -> list[dict]:
    return load_json(corpus_path("manifest.json"))["entries"]


def verify_corpus(only: Optional[str] = None) -> list[CheckOutcome]:
    """Every check of the manifest (or of entry ``only``), in manifest order."""
    out = []
    for entry in manifest():
        if only is not None and entry["id"] != only:
            continue
        obj = _load(entry)
        for check in entry["checks"]:
            out.append(_run_check(entry, check, obj))
    return out
