"""Exhaustive frame enumeration, correspondence audits and bounded search.

Frames on ``n`` worlds always put the bomb at index ``n - 1``. Preorders are
generated as reflexive-transitive closures of edge sets that never leave the
bomb, deduplicated on the closed rows; R ranges over every relation whose
bomb row is ``{bomb}``.
"""

from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .conditions import (
    AXIOM_CONDITIONS,
    ConditionName,
    check_condition,
)
from .hilbert.calculus import (
    CK,
    AxiomSet,
    Line,
    Proof,
    check_proof,
)
from .kripke import (
    Frame,
    Model,
    bits,
    enumerate_valuations,
    frame_validates_schema,
    reflexive_transitive_closure,
    truth_set,
    validate_frame,
)
from .syntax import Box, Formula, Imp, props, subformulas, substitute

DEFAULT_MAX_FRAMES = 2_000_000


class SearchCapExceeded(RuntimeError):
    """The requested enumeration is larger than the configured cap."""


def max_frames_cap(override: Optional[int] = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("CKSCOPE_MAX_FRAMES")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SearchCapExceeded(f"CKSCOPE_MAX_FRAMES is not an integer: {env!r}") from None
    return DEFAULT_MAX_FRAMES


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=None)
def enumerate_preorders(n: int) -> tuple[tuple[int, ...], ...]:
    """All preorders on ``0..n-1`` with world ``n - 1`` maximal, as row masks."""
    if n < 1:
        raise ValueError("n must be at least 1")
    bomb = n - 1
    edges = [(x, y) for x in range(n) if x != bomb for y in range(n) if y != x]
    seen: dict[tuple[int, ...], None] = {}
    for k in range(1 << len(edges)):
        rows = [0] * n
        for i, (x, y) in enumerate(edges):
            if k >> i & 1:
                rows[x] |= 1 << y
        seen.setdefault(reflexive_transitive_closure(n, rows), None)
    return tuple(seen)


def count_raw_frames(n: int) -> int:
    """Frames on ``n`` worlds before any condition filter."""
    return len(enumerate_preorders(n)) * (1 << n * (n - 1))


def _r_rows(n: int) -> Iterator[tuple[int, ...]]:
    bomb = n - 1
    row_range = range(1 << n)
    for combo in itertools.product(row_range, repeat=n - 1):
        yield combo + (1 << bomb,)


def _frames_for_preorder(n: int, leq: tuple[int, ...]) -> Iterator[Frame]:
    for r in _r_rows(n):
        yield Frame(n, n - 1, leq, r)


def _permute(frame: Frame, perm: Sequence[int]) -> tuple:
    n = frame.n

    def move(row: int) -> int:
        m = 0
        for y in bits(row):
            m |= 1 << perm[y]
        return m

    leq = [0] * n
    r = [0] * n
    for x in range(n):
        leq[perm[x]] = move(frame.leq[x])
        r[perm[x]] = move(frame.r[x])
    return tuple(leq), tuple(r)


def canonical_form(frame: Frame) -> tuple:
    """Least relabelling of the frame under permutations fixing the bomb."""
    others = [w for w in range(frame.n) if w != frame.bomb]
    best = None
    for p in itertools.permutations(others):
        perm = list(range(frame.n))
        for src, dst in zip(others, p):
            perm[src] = dst
        key = _permute(frame, perm)
        if best is None or key < best:
            best = key
    return best


def enumerate_frames(
    n: int,
    conditions: Iterable[Union[ConditionName, str]] = (),
    *,
    up_to_isomorphism: bool = False,
    max_frames: Optional[int] = None,
) -> Iterator[Frame]:
    """Every CK-frame on ``n`` worlds satisfying ``conditions``, in a fixed order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    cap = max_frames_cap(max_frames)
    total = count_raw_frames(n)
    if total > cap:
        raise SearchCapExceeded(f"{total} frames on {n} worlds exceeds the cap of {cap}")
    conds = [ConditionName(c) for c in conditions]
    seen: set = set()
    for leq in enumerate_preorders(n):
        for frame in _frames_for_preorder(n, leq):
            if not all(check_condition(frame, c) for c in conds):
                continue
            if up_to_isomorphism:
                key = canonical_form(frame)
                if key in seen:
                    continue
                seen.add(key)
            yield frame


# ---------------------------------------------------------------------------
# countermodel search


@dataclass(frozen=True)
class SearchStats:
    frames_enumerated: int = 0
    frames_examined: int = 0
    valuations_examined: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def __add__(self, other: "SearchStats") -> "SearchStats":
        return SearchStats(
            self.frames_enumerated + other.frames_enumerated,
            self.frames_examined + other.frames_examined,
            self.valuations_examined + other.valuations_examined,
        )


@dataclass(frozen=True)
class SearchResult:
    """Either a verified countermodel or the bound that was exhausted.

    ``frames_examined`` counts frames that passed the axiom filter.
    """

    outcome: str
    model: Optional[Model]
    world: Optional[int]
    bound: int
    stats: SearchStats

    @property
    def found(self) -> bool:
        return self.outcome == "countermodel"


class FrameFilter:
    """Membership test for the frame class of an axiom set.

    ``corr``/``suff`` use the frame conditions; axioms without a known
    condition (wCD, user schemas) are always checked as schemas. ``schema``
    checks every extra axiom by brute-force validity.
    """

    def __init__(self, axioms: AxiomSet, mode: str = "corr"):
        if mode not in ("corr", "suff", "schema"):
            raise ValueError(f"mode must be corr, suff or schema, not {mode!r}")
        self.axioms = axioms
        self.mode = mode
        self.conditions: list[ConditionName] = []
        self.schemas: list[Formula] = []
        k = 0 if mode == "suff" else 1
        for name, schema in axioms.extra_schemas().items():
            if mode != "schema" and name in AXIOM_CONDITIONS:
                self.conditions.append(AXIOM_CONDITIONS[name][k])
            else:
                self.schemas.append(schema)

    def __call__(self, frame: Frame) -> bool:
        return all(check_condition(frame, c) for c in self.conditions) and all(
            frame_validates_schema(frame, s) for s in self.schemas
        )


def _search_preorder(target: Formula, flt: FrameFilter, n: int, leq: tuple[int, ...]):
    """Scan the frames over one preorder; stop at the first countermodel."""
    names = sorted(props(target))
    enumerated = examined = valuations = 0
    for frame in _frames_for_preorder(n, leq):
        enumerated += 1
        if not flt(frame):
            continue
        examined += 1
        for val in enumerate_valuations(frame, names):
            valuations += 1
            model = Model(frame, val)
            missing = frame.full & ~truth_set(model, target)
            if missing:
                stats = SearchStats(enumerated, examined, valuations)
                return stats, (model, next(bits(missing)))
    return SearchStats(enumerated, examined, valuations), None


def _search_task(args):
    return _search_preorder(*args)


def _verify(target: Formula, flt: FrameFilter, model: Model, world: int) -> None:
    fr = model.frame
    again = validate_frame(fr.n, fr.bomb, fr.leq_pairs(), fr.r_pairs())
    if again != fr:
        raise AssertionError("countermodel frame does not re-validate")
    if not flt(fr):
        raise AssertionError("countermodel frame fails the axiom filter")
    for m in model.valuation.values():
        if not (m & fr.bomb_bit and fr.is_upset(m)):
            raise AssertionError("countermodel valuation is not admissible")
    if truth_set(model, target) >> world & 1:
        raise AssertionError("countermodel world forces the target")


def find_countermodel(
    target: Formula,
    axioms: AxiomSet = CK,
    max_worlds: int = 3,
    mode: str = "corr",
    *,
    min_worlds: int = 1,
    workers: int = 1,
    max_frames: Optional[int] = None,
) -> SearchResult:
    """Search frames of the axiom class, smallest first, for a refutation.

    ``exhausted`` only means there is no countermodel up to ``max_worlds``.
    Results and counts do not depend on ``workers``.
    """
    start = time.perf_counter()
    flt = FrameFilter(axioms, mode)
    cap = max_frames_cap(max_frames)
    for n in range(min_worlds, max_worlds + 1):
        if count_raw_frames(n) > cap:
            raise SearchCapExceeded(f"{count_raw_frames(n)} frames on {n} worlds exceeds the cap of {cap}")
    total = SearchStats()
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for n in range(min_worlds, max_worlds + 1):
            tasks = [(target, flt, n, leq) for leq in enumerate_preorders(n)]
            results = pool.map(_search_task, tasks, chunksize=4) if pool else map(_search_task, tasks)
            for stats, hit in results:
                total = total + stats
                if hit is not None:
                    model, world = hit
                    _verify(target, flt, model, world)
                    return SearchResult(
                        "countermodel", model, world, max_worlds, _timed(total, start)
                    )
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return SearchResult("exhausted", None, None, max_worlds, _timed(total, start))


def _timed(stats: SearchStats, start: float) -> SearchStats:
    return SearchStats(
        stats.frames_enumerated,
        stats.frames_examined,
        stats.valuations_examined,
        time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# correspondence audit


@dataclass
class AuditReport:
    axiom: str
    max_worlds: int
    frames: int = 0
    # (suff, corr, valid) -> number of frames
    buckets: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    spot_checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def count(self, suff: Optional[bool] = None, corr: Optional[bool] = None, valid: Optional[bool] = None) -> int:
        want = (suff, corr, valid)
        return sum(
            c
            for key, c in self.buckets.items()
            if all(w is None or w == k for w, k in zip(want, key))
        )

    def record(self, label, frame: Frame, suff: bool, corr: bool, valid: bool) -> None:
        problems = []
        if suff and not valid:
            problems.append("suff holds but the axiom is not valid")
        if corr != valid:
            problems.append("corr and validity disagree")
        for p in problems:
            self.violations.append((label, frame, p))

    def to_dict(self) -> dict:
        from .io import frame_to_dict

        return {
            "axiom": self.axiom,
            "max_worlds": self.max_worlds,
            "frames": self.frames,
            "passed": self.passed,
            "buckets": [
                {"suff": s, "corr": c, "valid": v, "count": k}
                for (s, c, v), k in sorted(self.buckets.items())
            ],
            "violations": [
                {"where": str(label), "frame": frame_to_dict(fr), "problem": p}
                for label, fr, p in self.violations
            ],
            "spot_checks": [
                {"label": label, "suff": s, "corr": c, "valid": v}
                for label, s, c, v in self.spot_checks
            ],
        }


def correspondence_audit(
    axiom: str,
    max_worlds: int,
    *,
    extra_frames: Iterable[tuple[str, Frame]] = (),
    max_frames: Optional[int] = None,
) -> AuditReport:
    """Compare the two frame conditions of ``axiom`` with its validity.

    Passes iff the sufficient condition implies validity and the
    correspondence condition is equivalent to it, on every frame with at
    most ``max_worlds`` worlds and on each of ``extra_frames``.
    """
    if axiom not in AXIOM_CONDITIONS:
        raise ValueError(f"no frame conditions known for {axiom!r}")
    suff_c, corr_c = AXIOM_CONDITIONS[axiom]
    schema = AxiomSet.of(axiom).schema(axiom)
    report = AuditReport(axiom, max_worlds)

    def triple(frame: Frame) -> tuple[bool, bool, bool]:
        return (
            check_condition(frame, suff_c),
            check_condition(frame, corr_c),
            frame_validates_schema(frame, schema),
        )

    for n in range(1, max_worlds + 1):
        for i, frame in enumerate(enumerate_frames(n, max_frames=max_frames)):
            key = triple(frame)
            report.frames += 1
            report.buckets[key] = report.buckets.get(key, 0) + 1
            report.record((n, i), frame, *key)
    for label, frame in extra_frames:
        key = triple(frame)
        report.spot_checks.append((label, *key))
        report.record(label, frame, *key)
    return report


# ---------------------------------------------------------------------------
# bounded proof search


def _instances(schema: Formula, pools: dict[int, Sequence[Formula]]) -> Iterator[tuple[Formula, dict]]:
    names = sorted(props(schema))
    pool = pools[len(names)] if len(names) in pools else pools[max(pools)]
    for combo in itertools.product(pool, repeat=len(names)):
        s = dict(zip(names, combo))
        yield substitute(schema, s), s


def bounded_proof_search(target: Formula, axioms: AxiomSet = CK, depth: int = 3) -> Optional[Proof]:
    """Forward search for a closed proof of ``target`` with ``depth`` MP rounds.

    Schema metavariables range over the subformulas of the target and the
    implications between them (three-variable schemas use subformulas only),
    so the search is sound but far from complete.
    """
    subs = list(dict.fromkeys(subformulas(target)))
    imps = list(dict.fromkeys(subs + [Imp(a, b) for a in subs for b in subs]))
    pools = {0: [], 1: imps, 2: imps, 3: subs}
    # formula -> justification: ("Ax", name, subst) | ("MP", minor, major) | ("Nec", body)
    known: dict[Formula, tuple] = {}
    for name, schema in axioms.schemas().items():
        for inst, s in _instances(schema, pools):
            known.setdefault(inst, ("Ax", name, s))
    boxable = {f.body for f in imps if isinstance(f, Box)}
    for _ in range(depth + 1):
        if target in known:
            break
        new: dict[Formula, tuple] = {}
        for f in known:
            if isinstance(f, Imp) and f.left in known and f.right not in known:
                new.setdefault(f.right, ("MP", f.left, f))
            if f in boxable and Box(f) not in known:
                new.setdefault(Box(f), ("Nec", f))
        if not new:
            break
        known.update(new)
    if target not in known:
        return None
    return _reconstruct(target, known, axioms)


def _reconstruct(target: Formula, known: dict, axioms: AxiomSet) -> Proof:
    index: dict[Formula, int] = {}
    lines: list[Line] = []
    stack = [(target, False)]
    while stack:
        f, ready = stack.pop()
        if f in index:
            continue
        just = known[f]
        deps = list(just[1:3]) if just[0] == "MP" else [just[1]] if just[0] == "Nec" else []
        if not ready:
            stack.append((f, True))
            stack.extend((d, False) for d in deps if d not in index)
            continue
        if just[0] == "Ax":
            line = Line.make((), f, "Ax", (), just[1], just[2])
        else:
            line = Line.make((), f, just[0], [index[d] for d in deps])
        index[f] = len(lines)
        lines.append(line)
    proof = Proof(tuple(lines))
    report = check_proof(proof, axioms)
    if not report:
        raise AssertionError(f"reconstructed proof fails to check: {report}")
    return proof
