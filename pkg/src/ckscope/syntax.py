r"""Formula AST, concrete grammar, substitution and schema matching.

Concrete syntax (tightest binding first)::

    ~  []  <>        prefix operators
    /\               conjunction, right-associative
    \/               disjunction, right-associative
    ->               implication, right-associative

``bot`` is falsum, ``top`` and ``~phi`` are sugar for ``bot -> bot`` and
``phi -> bot``; the sugar is eliminated while parsing, so the AST has
exactly seven constructors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence, Union


class Formula:
    """Base class of the seven formula constructors."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot"


@dataclass(frozen=True, slots=True)
class Prop(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Prop({self.name!r})"


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Dia(Formula):
    body: Formula


BOT = Bot()
Binary = Union[And, Or, Imp]
Unary = Union[Box, Dia]
Substitution = Mapping[str, Formula]


def neg(f: Formula) -> Formula:
    return Imp(f, BOT)


TOP = neg(BOT)


# ---------------------------------------------------------------------------
# structural functions


def depth(f: Formula) -> int:
    if isinstance(f, (Bot, Prop)):
        return 0
    if isinstance(f, (Box, Dia)):
        return 1 + depth(f.body)
    return 1 + max(depth(f.left), depth(f.right))


def props(f: Formula) -> frozenset[str]:
    """Names of the propositions occurring in ``f``."""
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Prop):
            out.add(g.name)
        elif isinstance(g, (Box, Dia)):
            stack.append(g.body)
        elif isinstance(g, (And, Or, Imp)):
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas of ``f``, children before parents."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if g in seen:
            return
        if isinstance(g, (Box, Dia)):
            walk(g.body)
        elif isinstance(g, (And, Or, Imp)):
            walk(g.left)
            walk(g.right)
        seen[g] = None

    walk(f)
    return list(seen)


def is_diamond_free(f: Formula) -> bool:
    if isinstance(f, Dia):
        return False
    if isinstance(f, Box):
        return is_diamond_free(f.body)
    if isinstance(f, (And, Or, Imp)):
        return is_diamond_free(f.left) and is_diamond_free(f.right)
    return True


def big_disjunction(gamma: Sequence[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``bot``."""
    if not gamma:
        return BOT
    out = gamma[-1]
    for g in reversed(gamma[:-1]):
        out = Or(g, out)
    return out


def substitute(f: Formula, s: Substitution) -> Formula:
    if isinstance(f, Prop):
        return s.get(f.name, f)
    if isinstance(f, Bot):
        return f
    if isinstance(f, Box):
        return Box(substitute(f.body, s))
    if isinstance(f, Dia):
        return Dia(substitute(f.body, s))
    return type(f)(substitute(f.left, s), substitute(f.right, s))


def match_schema(schema: Formula, candidate: Formula) -> Optional[dict[str, Formula]]:
    """First-order matching of ``candidate`` against ``schema``.

    Every proposition of ``schema`` is a metavariable. Returns the unique
    substitution ``s`` (restricted to the schema's propositions) with
    ``substitute(schema, s) == candidate``, or ``None``.
    """
    s: dict[str, Formula] = {}
    stack = [(schema, candidate)]
    while stack:
        pat, cand = stack.pop()
        if isinstance(pat, Prop):
            bound = s.get(pat.name)
            if bound is None:
                s[pat.name] = cand
            elif bound != cand:
                return None
        elif type(pat) is not type(cand):
            return None
        elif isinstance(pat, (Box, Dia)):
            stack.append((pat.body, cand.body))
        elif isinstance(pat, (And, Or, Imp)):
            stack.append((pat.left, cand.left))
            stack.append((pat.right, cand.right))
    return s


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(->|/\\|\\/|\[\]|<>|~|\(|\))|([a-z][a-z0-9_]*))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        tokens.append((m.group(1) or m.group(2), start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        if self.peek() == "\\/":
            self.take()
            return Or(left, self.disjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        if self.peek() == "/\\":
            self.take()
            return And(left, self.conjunction())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return neg(self.unary())
        if tok == "[]":
            self.take()
            return Box(self.unary())
        if tok == "<>":
            self.take()
            return Dia(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok, pos = self.tokens[self.i]
        if tok == "(":
            self.take()
            inner = self.formula()
            if self.peek() != ")":
                raise ParseError("unbalanced parenthesis: expected ')'", self.pos())
            self.take()
            return inner
        if tok == "<end>":
            raise ParseError("dangling operator: unexpected end of input", pos)
        if tok in ("->", "/\\", "\\/", ")"):
            raise ParseError(f"dangling operator: unexpected {tok!r}", pos)
        self.take()
        if tok == "bot":
            return BOT
        if tok == "top":
            return TOP
        return Prop(tok)


def parse(text: str) -> Formula:
    """Parse ``text``; raises :class:`ParseError` with a character position."""
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "<end>":
        tok = p.peek()
        msg = "unbalanced parenthesis: unexpected ')'" if tok == ")" else f"unexpected token {tok!r}"
        raise ParseError(msg, p.pos())
    return f


# ---------------------------------------------------------------------------
# printing

_LEVEL = {Imp: 1, Or: 2, And: 3, Box: 4, Dia: 4, Bot: 5, Prop: 5}
_SYMBOL = {Imp: "->", Or: "\\/", And: "/\\", Box: "[]", Dia: "<>"}


def render(f: Formula) -> str:
    """Minimal-parenthesis rendering; ``parse(render(f)) == f``."""
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Prop):
        return f.name
    level = _LEVEL[type(f)]
    if isinstance(f, (Box, Dia)):
        body = render(f.body)
        if _LEVEL[type(f.body)] < level:
            body = f"({body})"
        return _SYMBOL[type(f)] + body
    left, right = render(f.left), render(f.right)
    # right-associative: a same-level left operand needs brackets
    if _LEVEL[type(f.left)] <= level:
        left = f"({left})"
    if _LEVEL[type(f.right)] < level:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(f)]} {right}"


def tree(f: Formula, indent: str = "") -> str:
    """Indented AST dump used by the ``parse`` subcommand."""
    if isinstance(f, Bot):
        return indent + "Bot"
    if isinstance(f, Prop):
        return f"{indent}Prop {f.name}"
    name = type(f).__name__
    if isinstance(f, (Box, Dia)):
        return f"{indent}{name}\n" + tree(f.body, indent + "  ")
    return f"{indent}{name}\n" + tree(f.left, indent + "  ") + "\n" + tree(f.right, indent + "  ")


# ---------------------------------------------------------------------------
# enumeration


class EnumerationCapExceeded(RuntimeError):
    pass


def count_formulas(n_props: int, max_depth: int, diamond_free: bool = False) -> int:
    """Number of formulas over ``n_props`` propositions of depth <= ``max_depth``."""
    unary = 1 if diamond_free else 2
    total = n_props + 1
    for _ in range(max_depth):
        total = n_props + 1 + unary * total + 3 * total * total
    return total


def enumerate_formulas(
    prop_names: Sequence[str],
    max_depth: int,
    *,
    diamond_free: bool = False,
    cap: Optional[int] = None,
) -> Iterator[Formula]:
    """Every formula of depth <= ``max_depth`` over ``prop_names``, once each.

    Order: by depth, then constructor (``And, Or, Imp, Box, Dia``), then
    lexicographically by the enumeration index of the children.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    emitted = 0

    def emit(f: Formula) -> Formula:
        nonlocal emitted
        emitted += 1
        if cap is not None and emitted > cap:
            raise EnumerationCapExceeded(f"more than {cap} formulas requested")
        return f

    pool: list[Formula] = [BOT] + [Prop(p) for p in prop_names]
    for f in pool:
        yield emit(f)
    # pool[:shallow] has depth < d - 1, pool[shallow:] has depth exactly d - 1
    shallow = 0
    for _ in range(max_depth):
        fresh: list[Formula] = []
        n = len(pool)
        for ctor in (And, Or, Imp):
            for i in range(n):
                for j in range(n):
                    if i >= shallow or j >= shallow:
                        f = ctor(pool[i], pool[j])
                        fresh.append(f)
                        yield emit(f)
        for ctor in (Box,) if diamond_free else (Box, Dia):
            for i in range(shallow, n):
                f = ctor(pool[i])
                fresh.append(f)
                yield emit(f)
        shallow = n
        pool.extend(fresh)


# ---------------------------------------------------------------------------
# named formulas

P, Q, R = Prop("p"), Prop("q"), Prop("r")

GREFE = parse("(~[]bot -> []bot) -> []bot")
NN_BOX_BOT = parse("~~[]bot -> []bot")
NN_BOX = parse("~~[]p -> []~~p")
EQ7 = parse("~[]bot -> (~~[]p -> []~~p)")
WCDB = parse("[](p \\/ q) -> ((~[]~p -> []q) -> []q)")
