"""Proof construction and the admissible-rule transformers.

All transformers work on a :class:`ProofBuilder`, a line store that
deduplicates identical lines so that derived proofs stay DAG-shaped. Every
line they add is justified by one of the four primitive rules.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Optional

from ..syntax import Box, Formula, Imp, match_schema, props, render, substitute
from .calculus import (
    CK,
    EXTRA_SCHEMAS,
    AxiomSet,
    Line,
    Proof,
    ProofError,
    require_valid,
)

ALL_NAMED = AxiomSet(frozenset(EXTRA_SCHEMAS))


class ProofBuilder:
    def __init__(self, axioms: AxiomSet = CK):
        self.axioms = axioms
        self.lines: list[Line] = []
        self._index: dict[Line, int] = {}
        self._used: dict[int, frozenset] = {}

    def __getitem__(self, i: int) -> Line:
        return self.lines[i]

    def add(self, line: Line) -> int:
        i = self._index.get(line)
        if i is None:
            i = len(self.lines)
            self.lines.append(line)
            self._index[line] = i
        return i

    def include(self, proof: Proof) -> int:
        """Copy ``proof`` in; returns the index of its last line."""
        remap: list[int] = []
        for line in proof.lines:
            refs = tuple(remap[k] for k in line.refs)
            remap.append(self.add(Line(line.context, line.formula, line.rule, refs, line.schema, line.subst)))
        return remap[-1]

    # primitive rules -------------------------------------------------------

    def ax(self, name: str, context: Iterable[Formula] = (), **subst: Formula) -> int:
        schema = self.axioms.schema(name)
        if schema is None:
            raise ProofError(f"schema not in axiom set: {name}")
        used = props(schema)
        subst = {k: v for k, v in subst.items() if k in used}
        return self.add(Line.make(context, substitute(schema, subst), "Ax", (), name, subst))

    def el(self, context: Iterable[Formula], f: Formula) -> int:
        context = frozenset(context)
        if f not in context:
            raise ProofError(f"{render(f)} is not in the context")
        return self.add(Line(context, f, "El"))

    def mp(self, minor: int, major: int) -> int:
        a, b = self.lines[minor], self.lines[major]
        if a.context != b.context:
            raise ProofError("context mismatch on MP")
        if not (isinstance(b.formula, Imp) and b.formula.left == a.formula):
            raise ProofError(f"cannot apply {render(b.formula)} to {render(a.formula)}")
        return self.add(Line(a.context, b.formula.right, "MP", (minor, major)))

    def nec(self, premise: int, context: Iterable[Formula] = ()) -> int:
        p = self.lines[premise]
        if p.context:
            raise ProofError("nonempty-context Nec premise")
        return self.add(Line(frozenset(context), Box(p.formula), "Nec", (premise,)))

    def proof(self, root: int) -> Proof:
        """The lines ``root`` depends on, renumbered, ending with ``root``."""
        needed: set[int] = set()
        stack = [root]
        while stack:
            i = stack.pop()
            if i not in needed:
                needed.add(i)
                stack.extend(self.lines[i].refs)
        order = sorted(needed)
        new = {old: k for k, old in enumerate(order)}
        out = []
        for old in order:
            line = self.lines[old]
            out.append(Line(line.context, line.formula, line.rule, tuple(new[k] for k in line.refs), line.schema, line.subst))
        return Proof(tuple(out))

    # derived steps (propositional) ------------------------------------------

    def imp_refl(self, context: Iterable[Formula], a: Formula) -> int:
        """``context |- a -> a`` from A1, A2 and two MPs."""
        aa = Imp(a, a)
        s1 = self.ax("A1", context, p=a, q=aa)
        s2 = self.ax("A2", context, p=a, q=aa, r=a)
        s3 = self.mp(s1, s2)
        s4 = self.ax("A1", context, p=a, q=a)
        return self.mp(s4, s3)

    def syll(self, ab: int, bc: int) -> int:
        """From ``a -> b`` and ``b -> c`` (same context) get ``a -> c``."""
        ctx = self.lines[ab].context
        a_b = self.lines[ab].formula
        b_c = self.lines[bc].formula
        a, c = a_b.left, b_c.right
        k = self.mp(bc, self.ax("A1", ctx, p=b_c, q=a))
        s = self.mp(k, self.ax("A2", ctx, p=a, q=a_b.right, r=c))
        return self.mp(ab, s)

    def and_intro(self, i: int, j: int) -> int:
        ctx = self.lines[i].context
        a, b = self.lines[i].formula, self.lines[j].formula
        return self.mp(j, self.mp(i, self.ax("A3", ctx, p=a, q=b)))

    def and_left(self, i: int) -> int:
        f = self.lines[i].formula
        return self.mp(i, self.ax("A4", self.lines[i].context, p=f.left, q=f.right))

    def and_right(self, i: int) -> int:
        f = self.lines[i].formula
        return self.mp(i, self.ax("A5", self.lines[i].context, p=f.left, q=f.right))

    def or_elim(self, disj: int, left: int, right: int) -> int:
        """From ``a \\/ b``, ``a -> c`` and ``b -> c`` get ``c``."""
        ctx = self.lines[disj].context
        d = self.lines[disj].formula
        c = self.lines[left].formula.right
        s = self.mp(left, self.ax("A8", ctx, p=d.left, q=d.right, r=c))
        return self.mp(disj, self.mp(right, s))

    def efq(self, bot: int, target: Formula) -> int:
        return self.mp(bot, self.ax("A9", self.lines[bot].context, p=target))

    # derived steps (modal) --------------------------------------------------

    def box_mono(self, imp: int, context: Iterable[Formula] = ()) -> int:
        """From ``|- a -> b`` get ``context |- []a -> []b`` (Nec, Kb, MP)."""
        f = self.lines[imp].formula
        return self.mp(self.nec(imp, context), self.ax("Kb", context, p=f.left, q=f.right))

    def dia_mono(self, imp: int, context: Iterable[Formula] = ()) -> int:
        """From ``|- a -> b`` get ``context |- <>a -> <>b`` (Nec, Kd, MP)."""
        f = self.lines[imp].formula
        return self.mp(self.nec(imp, context), self.ax("Kd", context, p=f.left, q=f.right))

    # admissible rules -------------------------------------------------------

    def _rebuild(self, root: int, expand: Callable[[int], Iterable[int]], step: Callable[[int, dict], int]) -> int:
        # iterative post-order over the lines selected by `expand`
        done: dict[int, int] = {}
        stack = [(root, False)]
        while stack:
            i, ready = stack.pop()
            if i in done:
                continue
            if ready:
                done[i] = step(i, done)
                continue
            stack.append((i, True))
            for k in expand(i):
                if k not in done:
                    stack.append((k, False))
        return done[root]

    def used(self, root: int) -> frozenset:
        """Context formulas the derivation of ``root`` actually uses (via El)."""
        memo = self._used

        def expand(i: int) -> Iterable[int]:
            line = self.lines[i]
            return [k for k in line.refs if k not in memo] if line.rule == "MP" else ()

        def step(i: int, done: dict) -> frozenset:
            if i not in memo:
                line = self.lines[i]
                if line.rule == "El":
                    memo[i] = frozenset({line.formula})
                elif line.rule == "MP":
                    memo[i] = memo[line.refs[0]] | memo[line.refs[1]]
                else:
                    memo[i] = frozenset()
            return memo[i]

        if root in memo:
            return memo[root]
        return self._rebuild(root, expand, step)

    def recontext(self, root: int, context: Iterable[Formula]) -> int:
        """Re-derive ``root`` under ``context``, which must cover :meth:`used`."""
        context = frozenset(context)
        missing = self.used(root) - context
        if missing:
            raise ProofError(f"context lacks {', '.join(sorted(map(render, missing)))}")

        def expand(i: int) -> Iterable[int]:
            line = self.lines[i]
            return line.refs if line.rule == "MP" and line.context != context else ()

        def step(i: int, done: dict) -> int:
            line = self.lines[i]
            if line.context == context:
                return i
            if line.rule == "MP":
                return self.mp(done[line.refs[0]], done[line.refs[1]])
            if line.rule == "Nec":
                return self.nec(line.refs[0], context)
            return self.add(Line(context, line.formula, line.rule, (), line.schema, line.subst))

        return self._rebuild(root, expand, step)

    def weaken(self, root: int, extra: Iterable[Formula]) -> int:
        return self.recontext(root, self.lines[root].context | frozenset(extra))

    def deduce(self, root: int, pivot: Formula) -> int:
        """From ``G, pivot |- b`` get ``G |- pivot -> b``.

        Sub-derivations that never use ``pivot`` are moved to the smaller
        context and lifted with A1; only the pivot-dependent MP spine gets
        the A2 translation.
        """
        if pivot not in self.lines[root].context:
            raise ProofError(f"pivot {render(pivot)} is not in the context")

        def expand(i: int) -> Iterable[int]:
            line = self.lines[i]
            if line.rule == "MP" and pivot in self.used(i):
                return line.refs
            return ()

        def step(i: int, done: dict) -> int:
            line = self.lines[i]
            ctx = line.context - {pivot}
            f = line.formula
            if pivot not in self.used(i):
                plain = self.recontext(i, ctx)
                return self.mp(plain, self.ax("A1", ctx, p=f, q=pivot))
            if line.rule == "El":
                return self.imp_refl(ctx, pivot)
            minor = self.lines[line.refs[0]].formula
            s = self.ax("A2", ctx, p=pivot, q=minor, r=f)
            return self.mp(done[line.refs[0]], self.mp(done[line.refs[1]], s))

        return self._rebuild(root, expand, step)

    def detach(self, root: int) -> int:
        """From ``G |- a -> b`` get ``G, a |- b``."""
        f = self.lines[root].formula
        if not isinstance(f, Imp):
            raise ProofError("conclusion is not an implication")
        w = self.weaken(root, {f.left})
        return self.mp(self.el(self.lines[w].context, f.left), w)

    def substitute(self, root: int, sigma: Mapping[str, Formula]) -> int:
        def expand(i: int) -> Iterable[int]:
            return self.lines[i].refs

        def step(i: int, done: dict) -> int:
            line = self.lines[i]
            ctx = frozenset(substitute(g, sigma) for g in line.context)
            if line.rule == "MP":
                return self.mp(done[line.refs[0]], done[line.refs[1]])
            if line.rule == "Nec":
                return self.nec(done[line.refs[0]], ctx)
            if line.rule == "El":
                return self.el(ctx, substitute(line.formula, sigma))
            schema = self.axioms.schema(line.schema)
            inner = line.subst_map
            if inner is None:
                inner = match_schema(schema, line.formula)
            composed = {v: substitute(g, sigma) for v, g in inner.items()}
            return self.add(Line.make(ctx, substitute(schema, composed), "Ax", (), line.schema, composed))

        return self._rebuild(root, expand, step)

    def k_rule(self, root: int) -> int:
        """From ``g1..gn |- a`` get ``[]g1..[]gn |- []a``."""
        gammas = sorted(self.lines[root].context, key=render)
        cur = root
        for g in reversed(gammas):
            cur = self.deduce(cur, g)
        boxed = frozenset(Box(g) for g in gammas)
        cur = self.nec(cur, boxed)
        for g in gammas:
            body = self.lines[cur].formula.body
            kb = self.ax("Kb", boxed, p=g, q=body.right)
            cur = self.mp(self.el(boxed, Box(g)), self.mp(cur, kb))
        return cur


# ---------------------------------------------------------------------------
# proof-to-proof API


def _builder_for(proof: Proof, axioms: Optional[AxiomSet]) -> tuple[ProofBuilder, int]:
    axioms = ALL_NAMED if axioms is None else axioms
    require_valid(proof, axioms)
    b = ProofBuilder(axioms)
    return b, b.include(proof)


def weaken(proof: Proof, extra: Iterable[Formula], axioms: Optional[AxiomSet] = None) -> Proof:
    """Monotonicity: a proof of ``G |- a`` becomes one of ``G + extra |- a``."""
    b, root = _builder_for(proof, axioms)
    return b.proof(b.weaken(root, extra))


def deduction(proof: Proof, pivot: Formula, axioms: Optional[AxiomSet] = None) -> Proof:
    """Deduction theorem: ``G, pivot |- b`` becomes ``G |- pivot -> b``."""
    b, root = _builder_for(proof, axioms)
    return b.proof(b.deduce(root, pivot))


def detach(proof: Proof, axioms: Optional[AxiomSet] = None) -> Proof:
    """Detachment: ``G |- a -> b`` becomes ``G, a |- b``."""
    b, root = _builder_for(proof, axioms)
    return b.proof(b.detach(root))


def k_rule(proof: Proof, axioms: Optional[AxiomSet] = None) -> Proof:
    """``G |- a`` becomes ``[]G |- []a`` for finite ``G``."""
    b, root = _builder_for(proof, axioms)
    return b.proof(b.k_rule(root))


def substitute_proof(proof: Proof, sigma: Mapping[str, Formula], axioms: Optional[AxiomSet] = None) -> Proof:
    """Structurality: apply a uniform substitution to every line."""
    b, root = _builder_for(proof, axioms)
    return b.proof(b.substitute(root, sigma))
