"""Axiom tables, proof objects and the proof checker for CK + Ax."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from ..syntax import Box, Formula, Imp, match_schema, parse, render, substitute

BASE_SCHEMAS: dict[str, Formula] = {
    name: parse(text)
    for name, text in {
        "A1": "p -> q -> p",
        "A2": "(p -> q -> r) -> (p -> q) -> p -> r",
        "A3": "p -> q -> p /\\ q",
        "A4": "p /\\ q -> p",
        "A5": "p /\\ q -> q",
        "A6": "p -> p \\/ q",
        "A7": "q -> p \\/ q",
        "A8": "(p -> r) -> (q -> r) -> p \\/ q -> r",
        "A9": "bot -> p",
        "Kb": "[](p -> q) -> []p -> []q",
        "Kd": "[](p -> q) -> <>p -> <>q",
    }.items()
}

EXTRA_SCHEMAS: dict[str, Formula] = {
    name: parse(text)
    for name, text in {
        "Nd": "<>bot -> bot",
        "Cd": "<>(p \\/ q) -> <>p \\/ <>q",
        "Idb": "(<>p -> []q) -> [](p -> q)",
        "Ndb": "<>bot -> []bot",
        "wCD": "[](p \\/ q) -> (<>p -> []q) -> []q",
    }.items()
}


@dataclass(frozen=True)
class AxiomSet:
    """The axioms of CK + Ax: IPL, Kb and Kd, plus extras and user schemas.

    User schemas are addressed as ``U0``, ``U1``, ... in proofs.
    """

    extras: frozenset[str] = frozenset()
    user_schemas: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        unknown = set(self.extras) - EXTRA_SCHEMAS.keys()
        if unknown:
            raise ValueError(f"unknown axiom(s): {', '.join(sorted(unknown))}")
        object.__setattr__(self, "extras", frozenset(self.extras))
        object.__setattr__(self, "user_schemas", tuple(self.user_schemas))

    @classmethod
    def of(cls, *names: str, user_schemas: Iterable[Formula] = ()) -> "AxiomSet":
        return cls(frozenset(names), tuple(user_schemas))

    def schemas(self) -> dict[str, Formula]:
        out = dict(BASE_SCHEMAS)
        for name in EXTRA_SCHEMAS:
            if name in self.extras:
                out[name] = EXTRA_SCHEMAS[name]
        for i, s in enumerate(self.user_schemas):
            out[f"U{i}"] = s
        return out

    def schema(self, name: str) -> Optional[Formula]:
        if name in BASE_SCHEMAS:
            return BASE_SCHEMAS[name]
        if name in self.extras:
            return EXTRA_SCHEMAS[name]
        if name.startswith("U") and name[1:].isdigit() and int(name[1:]) < len(self.user_schemas):
            return self.user_schemas[int(name[1:])]
        return None

    def extra_schemas(self) -> dict[str, Formula]:
        """The schemas beyond CK (named extras and user schemas)."""
        return {k: v for k, v in self.schemas().items() if k not in BASE_SCHEMAS}

    def __str__(self) -> str:
        parts = ["CK"] + [n for n in EXTRA_SCHEMAS if n in self.extras]
        parts += [f"U{i}" for i in range(len(self.user_schemas))]
        return "+".join(parts)


CK = AxiomSet()

Context = frozenset  # of Formula


def _freeze_subst(s: Optional[Mapping[str, Formula]]) -> Optional[tuple[tuple[str, Formula], ...]]:
    return None if s is None else tuple(sorted(s.items()))


@dataclass(frozen=True)
class Line:
    """One consecution ``context |- formula`` and its justification."""

    context: frozenset
    formula: Formula
    rule: str
    refs: tuple[int, ...] = ()
    schema: Optional[str] = None
    subst: Optional[tuple[tuple[str, Formula], ...]] = None

    @classmethod
    def make(
        cls,
        context: Iterable[Formula],
        formula: Formula,
        rule: str,
        refs: Sequence[int] = (),
        schema: Optional[str] = None,
        subst: Optional[Mapping[str, Formula]] = None,
    ) -> "Line":
        return cls(frozenset(context), formula, rule, tuple(refs), schema, _freeze_subst(subst))

    @property
    def subst_map(self) -> Optional[dict[str, Formula]]:
        return None if self.subst is None else dict(self.subst)

    def consecution(self) -> tuple[frozenset, Formula]:
        return self.context, self.formula

    def __str__(self) -> str:
        ctx = ", ".join(sorted(render(g) for g in self.context))
        just = self.rule
        if self.rule == "Ax":
            just += f" {self.schema}"
        if self.refs:
            just += " " + ",".join(map(str, self.refs))
        return f"{ctx} |- {render(self.formula)}    [{just}]"


@dataclass(frozen=True)
class Proof:
    """A list of lines; the last line is the proved consecution."""

    lines: tuple[Line, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lines", tuple(self.lines))

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[Line]:
        return iter(self.lines)

    @property
    def context(self) -> frozenset:
        return self.lines[-1].context

    @property
    def formula(self) -> Formula:
        return self.lines[-1].formula

    def conclusion(self) -> tuple[frozenset, Formula]:
        return self.lines[-1].consecution()

    def __str__(self) -> str:
        return "\n".join(f"{i:3d}. {line}" for i, line in enumerate(self.lines))


@dataclass(frozen=True)
class CheckReport:
    accepted: bool
    line: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accepted"
        return f"rejected at line {self.line}: {self.reason}"


def _line_error(line: Line, i: int, lines: Sequence[Line], axioms: AxiomSet) -> Optional[str]:
    for k in line.refs:
        if not 0 <= k < i:
            return f"bad index {k}"
    if line.rule == "Ax":
        if line.refs:
            return "Ax takes no premises"
        schema = axioms.schema(line.schema or "")
        if schema is None:
            return f"schema not in axiom set: {line.schema}"
        if line.subst is not None:
            if substitute(schema, line.subst_map) != line.formula:
                return f"formula is not the stated instance of {line.schema}"
        elif match_schema(schema, line.formula) is None:
            return f"formula is not an instance of {line.schema}"
        return None
    if line.rule == "MP":
        if len(line.refs) != 2:
            return "MP needs two premises"
        minor, major = lines[line.refs[0]], lines[line.refs[1]]
        if minor.context != line.context or major.context != line.context:
            return "context mismatch on MP"
        if major.formula != Imp(minor.formula, line.formula):
            return "MP premises do not have the shapes phi and phi -> psi"
        return None
    if line.rule == "Nec":
        if len(line.refs) != 1:
            return "Nec needs one premise"
        premise = lines[line.refs[0]]
        if premise.context:
            return "nonempty-context Nec premise"
        if line.formula != Box(premise.formula):
            return "Nec conclusion is not the boxed premise"
        return None
    if line.rule == "El":
        if line.refs:
            return "El takes no premises"
        if line.formula not in line.context:
            return "El formula is not in the context"
        return None
    return f"unknown rule {line.rule!r}"


def check_proof(proof: Proof, axioms: AxiomSet = CK) -> CheckReport:
    """Accept iff every line is justified by Ax, MP, Nec or El."""
    if not proof.lines:
        return CheckReport(False, None, "empty proof")
    for i, line in enumerate(proof.lines):
        err = _line_error(line, i, proof.lines, axioms)
        if err is not None:
            return CheckReport(False, i, err)
    return CheckReport(True)


class ProofError(ValueError):
    """A transformer was handed an invalid proof or unusable arguments."""


def require_valid(proof: Proof, axioms: AxiomSet) -> None:
    report = check_proof(proof, axioms)
    if not report:
        raise ProofError(f"input proof invalid: {report}")
