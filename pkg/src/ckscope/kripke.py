"""Finite CK-frames and models with an exploding world, and forcing.

Worlds are the integers ``0..n-1``. Relations are stored row-wise as
bitmasks: bit ``y`` of ``leq[x]`` is set iff ``x <= y``, and bit ``y`` of
``r[x]`` iff ``x R y``. Truth sets are bitmasks over worlds, computed bottom
up over subformulas.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .syntax import And, Bot, Box, Dia, Formula, Imp, Or, Prop, props, subformulas


def bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(worlds: Iterable[int]) -> int:
    m = 0
    for w in worlds:
        m |= 1 << w
    return m


class FrameError(ValueError):
    """Raw data does not describe a CK-frame."""


class NotPreorderError(FrameError):
    pass


class BombNotMaximalError(FrameError):
    pass


class BombRowError(FrameError):
    pass


class ValuationError(ValueError):
    pass


def reflexive_transitive_closure(n: int, rows: Sequence[int]) -> tuple[int, ...]:
    out = [rows[x] | (1 << x) for x in range(n)]
    for k in range(n):
        kb = 1 << k
        row_k = out[k]
        for x in range(n):
            if out[x] & kb:
                out[x] |= row_k
    return tuple(out)


@dataclass(frozen=True)
class Frame:
    """A CK-frame ``(X, bomb, <=, R)``; build through :func:`validate_frame`."""

    n: int
    bomb: int
    leq: tuple[int, ...]
    r: tuple[int, ...]
    names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def bomb_bit(self) -> int:
        return 1 << self.bomb

    def name(self, w: int) -> str:
        if self.names is not None:
            return self.names[w]
        return "bomb" if w == self.bomb else f"w{w}"

    def index(self, name: str) -> int:
        for w in range(self.n):
            if self.name(w) == name:
                return w
        raise KeyError(f"no world named {name!r}")

    @cached_property
    def geq(self) -> tuple[int, ...]:
        """``geq[y]``: the worlds below ``y``."""
        return tuple(mask_of(x for x in range(self.n) if self.leq[x] >> y & 1) for y in range(self.n))

    @cached_property
    def r_inv(self) -> tuple[int, ...]:
        return tuple(mask_of(x for x in range(self.n) if self.r[x] >> y & 1) for y in range(self.n))

    @cached_property
    def box_reach(self) -> tuple[int, ...]:
        """Worlds ``z`` with ``x <= y R z`` for some ``y``."""
        out = []
        for x in range(self.n):
            m = 0
            for y in bits(self.leq[x]):
                m |= self.r[y]
            out.append(m)
        return tuple(out)

    def is_upset(self, mask: int) -> bool:
        return all(self.leq[x] & ~mask == 0 for x in bits(mask))

    def leq_pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.n) for y in bits(self.leq[x])]

    def r_pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x in range(self.n) for y in bits(self.r[x])]


def validate_frame(
    n: int,
    bomb: int,
    leq: Iterable[tuple[int, int]],
    r: Iterable[tuple[int, int]],
    *,
    auto_close: bool = False,
    names: Optional[Sequence[str]] = None,
) -> Frame:
    """Check the CK-frame laws on raw pair lists and build a :class:`Frame`.

    With ``auto_close`` the ``<=`` pairs are replaced by their
    reflexive-transitive closure before checking.
    """
    if n < 1:
        raise FrameError("a frame needs at least one world")
    if not 0 <= bomb < n:
        raise FrameError(f"bomb index {bomb} out of range")
    if names is not None and (len(names) != n or len(set(names)) != n):
        raise FrameError("world names must be distinct, one per world")
    leq_rows = [0] * n
    r_rows = [0] * n
    for rel, rows in ((leq, leq_rows), (r, r_rows)):
        for x, y in rel:
            if not (0 <= x < n and 0 <= y < n):
                raise FrameError(f"pair ({x}, {y}) mentions an unknown world")
            rows[x] |= 1 << y
    if auto_close:
        leq_rows = list(reflexive_transitive_closure(n, leq_rows))
    else:
        for x in range(n):
            if not leq_rows[x] >> x & 1:
                raise NotPreorderError(f"<= is not reflexive at {x}")
        if tuple(leq_rows) != reflexive_transitive_closure(n, leq_rows):
            raise NotPreorderError("<= is not transitive")
    if leq_rows[bomb] != 1 << bomb:
        raise BombNotMaximalError("bomb not maximal: some world lies strictly above it")
    if r_rows[bomb] != 1 << bomb:
        raise BombRowError("bomb R-row must be exactly {bomb}")
    return Frame(n, bomb, tuple(leq_rows), tuple(r_rows), tuple(names) if names is not None else None)


@dataclass(frozen=True)
class Model:
    frame: Frame
    valuation: Mapping[str, int]

    def value(self, name: str) -> int:
        # absent propositions denote the least admissible upset {bomb}
        return self.valuation.get(name, self.frame.bomb_bit)

    def __hash__(self) -> int:
        return hash((self.frame, tuple(sorted(self.valuation.items()))))


def make_model(frame: Frame, valuation: Mapping[str, Iterable[int] | int]) -> Model:
    """Build a model; each value is a world set (iterable or bitmask)."""
    vals = {}
    for name, worlds in valuation.items():
        m = worlds if isinstance(worlds, int) else mask_of(worlds)
        if not m & frame.bomb_bit:
            raise ValuationError(f"V({name}) must contain the bomb")
        if not frame.is_upset(m):
            raise ValuationError(f"V({name}) is not an upset")
        vals[name] = m
    return Model(frame, vals)


# ---------------------------------------------------------------------------
# forcing


def imp_set(frame: Frame, a: int, b: int) -> int:
    bad = a & ~b
    return mask_of(x for x in range(frame.n) if not frame.leq[x] & bad)


def box_set(frame: Frame, a: int) -> int:
    return mask_of(x for x in range(frame.n) if not frame.box_reach[x] & ~a)


def dia_set(frame: Frame, a: int) -> int:
    # successors y of x whose R-row misses a
    blind = mask_of(y for y in range(frame.n) if not frame.r[y] & a)
    return mask_of(x for x in range(frame.n) if not frame.leq[x] & blind)


def truth_set(model: Model, f: Formula, _memo: Optional[dict] = None) -> int:
    """The set of worlds forcing ``f``, as a bitmask."""
    memo = {} if _memo is None else _memo
    frame = model.frame
    for g in subformulas(f):
        if g in memo:
            continue
        if isinstance(g, Prop):
            v = model.value(g.name)
        elif isinstance(g, Bot):
            v = frame.bomb_bit
        elif isinstance(g, And):
            v = memo[g.left] & memo[g.right]
        elif isinstance(g, Or):
            v = memo[g.left] | memo[g.right]
        elif isinstance(g, Imp):
            v = imp_set(frame, memo[g.left], memo[g.right])
        elif isinstance(g, Box):
            v = box_set(frame, memo[g.body])
        else:
            v = dia_set(frame, memo[g.body])
        memo[g] = v
    return memo[f]


def forces(model: Model, w: int, f: Formula) -> bool:
    return bool(truth_set(model, f) >> w & 1)


def model_validates(model: Model, context: Iterable[Formula], formula: Formula) -> bool:
    """Every world forcing all of ``context`` forces ``formula``."""
    memo: dict = {}
    ctx = model.frame.full
    for g in context:
        ctx &= truth_set(model, g, memo)
    return ctx & ~truth_set(model, formula, memo) == 0


def enumerate_upsets(frame: Frame) -> list[int]:
    """Upsets containing the bomb, in increasing bitmask order."""
    others = [w for w in range(frame.n) if w != frame.bomb]
    out = []
    for k in range(1 << len(others)):
        m = frame.bomb_bit | mask_of(w for i, w in enumerate(others) if k >> i & 1)
        if frame.is_upset(m):
            out.append(m)
    out.sort()
    return out


def enumerate_valuations(frame: Frame, prop_names: Sequence[str]) -> Iterator[dict[str, int]]:
    ups = enumerate_upsets(frame)
    for combo in itertools.product(ups, repeat=len(prop_names)):
        yield dict(zip(prop_names, combo))


def schema_refutation(frame: Frame, schema: Formula) -> Optional[tuple[Model, int]]:
    """A model on ``frame`` and a world where ``schema`` fails, if any."""
    names = sorted(props(schema))
    for val in enumerate_valuations(frame, names):
        m = Model(frame, val)
        t = truth_set(m, schema)
        if t != frame.full:
            missing = frame.full & ~t
            return m, next(bits(missing))
    return None


def frame_validates_schema(frame: Frame, schema: Formula) -> bool:
    """Validity of every substitution instance of ``schema`` on ``frame``.

    Checking the schema itself under all valuations suffices: for an
    instance ``schema[p := phi]`` and valuation ``V``, the truth set of
    ``phi`` is an upset containing the bomb (persistence plus the bomb
    forcing everything), so ``V'(p) := [[phi]]_V`` is a valuation under
    which the schema has exactly the truth set of the instance under ``V``.
    """
    return schema_refutation(frame, schema) is None


def signature_closure(
    models: Sequence[Model],
    prop_names: Sequence[str],
    max_depth: int,
    *,
    diamond_free: bool = False,
) -> dict[tuple[int, ...], Formula]:
    """Every joint truth-set signature of formulas up to ``max_depth``.

    The truth set of a compound formula depends only on the truth sets of
    its immediate subformulas, so closing the atomic signatures under the
    connectives level by level reaches exactly the signatures realised by
    formulas of depth at most ``max_depth``. Each signature maps to the
    first formula found with it (of least depth). This replaces literal
    enumeration, which is astronomically large beyond depth 3.
    """
    frames = [m.frame for m in models]

    def sig(fn) -> tuple[int, ...]:
        return tuple(fn(i, fr) for i, fr in enumerate(frames))

    found: dict[tuple[int, ...], Formula] = {}
    frontier: list[tuple[int, ...]] = []

    def add(s: tuple[int, ...], f: Formula) -> None:
        if s not in found:
            found[s] = f
            frontier.append(s)

    add(sig(lambda i, fr: fr.bomb_bit), Bot())
    for p in prop_names:
        add(sig(lambda i, fr: models[i].value(p)), Prop(p))
    for _ in range(max_depth):
        old = list(found.items())
        fresh = set(frontier)
        frontier.clear()
        for a, fa in old:
            add(sig(lambda i, fr: box_set(fr, a[i])), Box(fa))
            if not diamond_free:
                add(sig(lambda i, fr: dia_set(fr, a[i])), Dia(fa))
            for b, fb in old:
                # pairs of two old signatures were already combined
                if a not in fresh and b not in fresh:
                    continue
                add(tuple(x & y for x, y in zip(a, b)), And(fa, fb))
                add(tuple(x | y for x, y in zip(a, b)), Or(fa, fb))
                add(sig(lambda i, fr: imp_set(fr, a[i], b[i])), Imp(fa, fb))
        if not frontier:
            break
    return found
