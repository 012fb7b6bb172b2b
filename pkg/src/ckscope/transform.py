"""Frame transformations that keep diamond-free truth but force Cd/Idb or Nd/Cd.

``bomb_saturate`` makes the bomb a top element reachable by R from every
world; ``plus_duplicate`` adds a modally blind copy ``x+`` of every ordinary
world, order-equivalent to ``x``. Both keep the worlds of the input at the
same indices, so the identity is the world map for preservation checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .conditions import ConditionName, check_condition
from .kripke import Frame, Model, bits, reflexive_transitive_closure, signature_closure, validate_frame
from .syntax import Formula


def bomb_saturate(frame: Frame) -> Frame:
    """Add ``x <= bomb`` and ``x R bomb`` for every world ``x``."""
    b = frame.bomb_bit
    leq = tuple(row | b for row in frame.leq)
    r = tuple(row | b for row in frame.r)
    return Frame(frame.n, frame.bomb, leq, r, frame.names)


def bomb_saturate_model(model: Model) -> Model:
    # valuations contain the bomb, so they stay upsets
    return Model(bomb_saturate(model.frame), dict(model.valuation))


def plus_layout(frame: Frame, copy_bomb: bool = False) -> list[int]:
    """Original world of each appended copy, in index order."""
    copies = [w for w in range(frame.n) if w != frame.bomb]
    if copy_bomb:
        copies.append(frame.bomb)
    return copies


def plus_duplicate(model: Model, copy_bomb: bool = False) -> Model:
    """Append a copy ``x+`` of each non-bomb world with an empty R row.

    ``x+`` sits in the order exactly where ``x`` does. With ``copy_bomb``
    the bomb also gets a copy, which is an isolated ordinary world.
    Original worlds keep their indices.
    """
    fr = model.frame
    copies = plus_layout(fr, copy_bomb)
    twin = {orig: fr.n + k for k, orig in enumerate(copies)}
    n = fr.n + len(copies)
    leq = [0] * n
    for x in range(fr.n):
        if x == fr.bomb:
            continue
        for y in bits(fr.leq[x]):
            targets = 1 << y
            if y != fr.bomb:
                targets |= 1 << twin[y]
            leq[x] |= targets
            leq[twin[x]] |= targets
    leq[fr.bomb] = fr.bomb_bit
    if copy_bomb:
        leq[twin[fr.bomb]] = 1 << twin[fr.bomb]
    leq = list(reflexive_transitive_closure(n, leq))
    r = list(fr.r) + [0] * len(copies)
    names = tuple(fr.name(w) for w in range(fr.n)) + tuple(fr.name(w) + "+" for w in copies)
    frame = Frame(n, fr.bomb, tuple(leq), tuple(r), names)
    val = {}
    for p, m in model.valuation.items():
        extra = 0
        for w in bits(m):
            if w != fr.bomb:
                extra |= 1 << twin[w]
        val[p] = m | extra
    return Model(frame, val)


@dataclass
class TransformReport:
    input_id: str
    output: Model
    conditions: dict[str, bool] = field(default_factory=dict)
    # None when preservation was not checked, "pass", or (world, formula)
    preservation: Union[None, str, tuple[int, Formula]] = None

    @property
    def ok(self) -> bool:
        return all(self.conditions.values()) and self.preservation in (None, "pass")


def preservation_check(
    before: Model,
    after: Model,
    world_map: Optional[Mapping[int, int]] = None,
    max_depth: int = 3,
    props: Optional[Sequence[str]] = None,
    *,
    input_id: str = "",
    diamond_free: bool = True,
) -> TransformReport:
    """Compare truth at ``x`` and ``world_map[x]`` for all formulas up to ``max_depth``.

    Only diamond-free formulas are compared by default. The first
    discrepancy, in order of formula depth, is reported as (world, formula).
    """
    if world_map is None:
        world_map = {w: w for w in range(before.frame.n)}
    if props is None:
        props = sorted(set(before.valuation) | set(after.valuation)) or ["p"]
    sigs = signature_closure([before, after], props, max_depth, diamond_free=diamond_free)
    verdict: Union[str, tuple[int, Formula]] = "pass"
    for (tb, ta), f in sigs.items():
        bad = [x for x in range(before.frame.n) if (tb >> x & 1) != (ta >> world_map[x] & 1)]
        if bad:
            verdict = (bad[0], f)
            break
    return TransformReport(input_id, after, {}, verdict)


OPS = {
    "bomb-saturate": (bomb_saturate_model, (ConditionName.CdStrong, ConditionName.IdbCorr)),
    "plus-duplicate": (plus_duplicate, (ConditionName.NdCorr, ConditionName.CdCorr)),
}


def run_transform(
    model: Model,
    op: str,
    *,
    check_preservation: bool = False,
    depth: int = 3,
    input_id: str = "",
) -> TransformReport:
    """Apply ``op``, validate the output and check its target conditions."""
    if op not in OPS:
        raise ValueError(f"unknown transformation {op!r}; expected one of {', '.join(OPS)}")
    fn, conds = OPS[op]
    out = fn(model)
    fr = out.frame
    validate_frame(fr.n, fr.bomb, fr.leq_pairs(), fr.r_pairs())
    report = TransformReport(input_id, out, {c.value: check_condition(fr, c) for c in conds})
    if check_preservation:
        props = sorted(model.valuation) or ["p"]
        report.preservation = preservation_check(model, out, None, depth, props).preservation
    return report
