"""Seeded generation of small valid proofs for property testing."""

from __future__ import annotations

import random
from typing import Optional

from ..syntax import BOT, And, Box, Dia, Formula, Imp, Or, Prop
from .builder import ProofBuilder
from .calculus import CK, AxiomSet, Proof

_ATOMS = (Prop("p"), Prop("q"), BOT)


def random_formula(rng: random.Random, depth: int = 2) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(_ATOMS)
    kind = rng.randrange(5)
    if kind == 0:
        return Box(random_formula(rng, depth - 1))
    if kind == 1:
        return Dia(random_formula(rng, depth - 1))
    ctor = (And, Or, Imp)[kind - 2]
    return ctor(random_formula(rng, depth - 1), random_formula(rng, depth - 1))


def random_proof(
    rng: random.Random,
    axioms: AxiomSet = CK,
    max_lines: int = 15,
    context: Optional[frozenset] = None,
) -> Proof:
    """A checking proof with at most ``max_lines`` lines.

    Lines mix Ax, El, MP (often through an A1 or conjunction instance, so
    that MP actually fires) and Nec on empty-context lines. The largest
    derivation built is returned.
    """
    if context is None:
        context = frozenset(random_formula(rng, 1) for _ in range(rng.randrange(3)))
    target = rng.randint(1, max_lines)
    names = sorted(axioms.schemas())
    b = ProofBuilder(axioms)
    roots: list[int] = []

    def room(k: int) -> bool:
        return len(b.lines) + k <= target

    while True:
        choice = rng.random()
        ctx = context if rng.random() < 0.75 else frozenset()
        same_ctx = [i for i in roots if b[i].context == ctx]
        empty_ctx = [i for i in roots if not b[i].context]
        if choice < 0.15 and ctx and room(1):
            roots.append(b.el(ctx, rng.choice(sorted(ctx, key=str))))
        elif choice < 0.3 and room(1):
            name = rng.choice(names)
            subst = {v: random_formula(rng, 1) for v in "pqr"}
            roots.append(b.ax(name, ctx, **subst))
        elif choice < 0.5 and same_ctx and room(2):
            i = rng.choice(same_ctx)
            a1 = b.ax("A1", ctx, p=b[i].formula, q=random_formula(rng, 1))
            roots.append(b.mp(i, a1))
        elif choice < 0.7 and len(same_ctx) > 1 and room(3):
            i, j = rng.sample(same_ctx, 2)
            roots.append(b.and_intro(i, j))
        elif choice < 0.82 and empty_ctx and room(1):
            roots.append(b.nec(rng.choice(empty_ctx), context if rng.random() < 0.5 else ()))
        elif room(1):
            pairs = [
                (i, j)
                for i in roots
                for j in roots
                if b[i].context == b[j].context
                and isinstance(b[j].formula, Imp)
                and b[j].formula.left == b[i].formula
            ]
            if pairs:
                roots.append(b.mp(*rng.choice(pairs)))
            else:
                roots.append(b.ax("A9", ctx, p=random_formula(rng, 1)))
        if not room(1):
            break
    if not roots:
        roots.append(b.ax("A9", context, p=BOT))
    # the largest derivation built, latest first on ties
    return max((b.proof(i) for i in reversed(roots)), key=len)
