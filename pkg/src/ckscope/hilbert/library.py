"""Named derivations, built with :class:`ProofBuilder` and checked on demand."""

from __future__ import annotations

from typing import Callable

from ..syntax import BOT, And, Box, Dia, Imp, Or, P, Q, neg
from .builder import ProofBuilder
from .calculus import AxiomSet, Proof


def _double_negation_intro(b: ProofBuilder, a) -> int:
    """``|- a -> ~~a``."""
    ctx = {a, neg(a)}
    f = b.mp(b.el(ctx, a), b.el(ctx, neg(a)))
    return b.deduce(b.deduce(f, neg(a)), a)


def _box_p_dia_not_p(b: ProofBuilder) -> int:
    """``|- []p -> (<>~p -> <>bot)`` via ``[]p -> []~~p`` and Kd."""
    box_nn = b.box_mono(_double_negation_intro(b, P))
    kd = b.ax("Kd", p=neg(P), q=BOT)
    return b.syll(box_nn, kd)


def wcd_from_idb() -> tuple[Proof, AxiomSet]:
    """``|- [](p \\/ q) -> ((<>p -> []q) -> []q)`` in CK + Idb."""
    ax = AxiomSet.of("Idb")
    b = ProofBuilder(ax)
    # |- (p \/ q) -> ((p -> q) -> q)
    inner = {Or(P, Q), Imp(P, Q)}
    q = b.or_elim(b.el(inner, Or(P, Q)), b.el(inner, Imp(P, Q)), b.imp_refl(inner, Q))
    lemma = b.deduce(b.deduce(q, Imp(P, Q)), Or(P, Q))

    hyp = Imp(Dia(P), Box(Q))
    ctx = {Box(Or(P, Q)), hyp}
    box_pq = b.mp(b.el(ctx, hyp), b.ax("Idb", ctx, p=P, q=Q))
    step = b.mp(b.el(ctx, Box(Or(P, Q))), b.box_mono(lemma, ctx))
    box_q = b.mp(box_pq, b.mp(step, b.ax("Kb", ctx, p=Imp(P, Q), q=Q)))
    return b.proof(b.deduce(b.deduce(box_q, hyp), Box(Or(P, Q)))), ax


def eq7_ndb_idb() -> tuple[Proof, AxiomSet]:
    """``|- ~[]bot -> (~~[]p -> []~~p)`` in CK + Ndb + Idb."""
    ax = AxiomSet.of("Ndb", "Idb")
    b = ProofBuilder(ax)
    box_p, dia_np, box_bot = Box(P), Dia(neg(P)), Box(BOT)
    nn_box_p, n_box_bot = neg(neg(box_p)), neg(box_bot)

    # []p -> (<>~p -> <>bot), then Ndb: []p -> (<>~p -> []bot)
    kd_step = _box_p_dia_not_p(b)
    ctx = {box_p, dia_np}
    dia_bot = b.mp(b.el(ctx, dia_np), b.mp(b.el(ctx, box_p), b.weaken(kd_step, ctx)))
    ndb_step = b.mp(dia_bot, b.ax("Ndb", ctx))
    ndb_step = b.deduce(b.deduce(ndb_step, dia_np), box_p)

    # intuitionistic rewrite: ~~[]p -> (~[]bot -> ~<>~p)
    ctx = {nn_box_p, n_box_bot, dia_np, box_p}
    bot = b.mp(
        b.mp(b.el(ctx, dia_np), b.mp(b.el(ctx, box_p), b.weaken(ndb_step, ctx))),
        b.el(ctx, n_box_bot),
    )
    not_box_p = b.deduce(bot, box_p)
    bot = b.mp(not_box_p, b.el(ctx - {box_p}, nn_box_p))
    rewritten = b.deduce(b.deduce(b.deduce(bot, dia_np), n_box_bot), nn_box_p)

    # currying and commutativity of /\: ~[]bot -> (~~[]p -> ~<>~p)
    ctx = {And(nn_box_p, n_box_bot)}
    conj = b.el(ctx, And(nn_box_p, n_box_bot))
    uncurried = b.mp(b.and_right(conj), b.mp(b.and_left(conj), b.weaken(rewritten, ctx)))
    uncurried = b.deduce(uncurried, And(nn_box_p, n_box_bot))
    ctx = {And(n_box_bot, nn_box_p)}
    conj = b.el(ctx, And(n_box_bot, nn_box_p))
    swap = b.deduce(b.and_intro(b.and_right(conj), b.and_left(conj)), And(n_box_bot, nn_box_p))
    swapped = b.syll(swap, uncurried)
    ctx = {n_box_bot, nn_box_p}
    conj = b.and_intro(b.el(ctx, n_box_bot), b.el(ctx, nn_box_p))
    curried = b.mp(conj, b.weaken(swapped, ctx))

    # ~<>~p is <>~p -> bot; with bot -> []bot get <>~p -> []bot
    ctx = {n_box_bot, nn_box_p, dia_np}
    bot = b.mp(b.el(ctx, dia_np), b.weaken(curried, ctx))
    to_box_bot = b.deduce(b.efq(bot, box_bot), dia_np)

    # Idb with p := ~p, q := bot gives []~~p
    result = b.mp(to_box_bot, b.ax("Idb", b[to_box_bot].context, p=neg(P), q=BOT))
    return b.proof(b.deduce(b.deduce(result, nn_box_p), n_box_bot)), ax


def wcdb_from_nd_wcd() -> tuple[Proof, AxiomSet]:
    """``|- [](p \\/ q) -> ((~[]~p -> []q) -> []q)`` in CK + Nd + wCD."""
    ax = AxiomSet.of("Nd", "wCD")
    b = ProofBuilder(ax)
    # <>p -> ~[]~p, a theorem of CK + Nd
    ctx = {Dia(P), Box(neg(P))}
    kd = b.ax("Kd", ctx, p=P, q=BOT)
    dia_bot = b.mp(b.el(ctx, Dia(P)), b.mp(b.el(ctx, Box(neg(P))), kd))
    bot = b.mp(dia_bot, b.ax("Nd", ctx))
    dia_to_nbox = b.deduce(b.deduce(bot, Box(neg(P))), Dia(P))

    hyp = Imp(neg(Box(neg(P))), Box(Q))
    ctx = {Box(Or(P, Q)), hyp}
    dia_to_box_q = b.syll(b.weaken(dia_to_nbox, ctx), b.el(ctx, hyp))
    wcd = b.ax("wCD", ctx, p=P, q=Q)
    box_q = b.mp(dia_to_box_q, b.mp(b.el(ctx, Box(Or(P, Q))), wcd))
    return b.proof(b.deduce(b.deduce(box_q, hyp), Box(Or(P, Q)))), ax


def _nn_box(b: ProofBuilder) -> int:
    box_p, dia_np, box_bot = Box(P), Dia(neg(P)), Box(BOT)
    nn_box_p = neg(neg(box_p))
    # []p -> ~<>~p from Kd and Nd
    kd_step = _box_p_dia_not_p(b)
    ctx = {box_p, dia_np}
    dia_bot = b.mp(b.el(ctx, dia_np), b.mp(b.el(ctx, box_p), b.weaken(kd_step, ctx)))
    nd_step = b.deduce(b.deduce(b.mp(dia_bot, b.ax("Nd", ctx)), dia_np), box_p)
    # ~~[]p -> (<>~p -> bot)
    ctx = {nn_box_p, dia_np, box_p}
    bot = b.mp(b.el(ctx, dia_np), b.mp(b.el(ctx, box_p), b.weaken(nd_step, ctx)))
    bot = b.mp(b.deduce(bot, box_p), b.el(ctx - {box_p}, nn_box_p))
    # bot -> []bot, then Idb
    to_box_bot = b.deduce(b.efq(bot, box_bot), dia_np)
    result = b.mp(to_box_bot, b.ax("Idb", b[to_box_bot].context, p=neg(P), q=BOT))
    return b.deduce(result, nn_box_p)


def nn_box_from_nd_idb() -> tuple[Proof, AxiomSet]:
    """``|- ~~[]p -> []~~p`` in CK + Nd + Idb."""
    ax = AxiomSet.of("Nd", "Idb")
    b = ProofBuilder(ax)
    return b.proof(_nn_box(b)), ax


def grefe_consequence_nd_idb() -> tuple[Proof, AxiomSet]:
    """``|- ~~[]bot -> []bot`` in CK + Nd + Idb."""
    ax = AxiomSet.of("Nd", "Idb")
    b = ProofBuilder(ax)
    inst = b.substitute(_nn_box(b), {"p": BOT})
    # []~~bot -> []bot by the K-rule on ~~bot |- bot
    ctx = {neg(neg(BOT))}
    bot = b.mp(b.imp_refl(ctx, BOT), b.el(ctx, neg(neg(BOT))))
    boxed = b.deduce(b.k_rule(bot), Box(neg(neg(BOT))))
    return b.proof(b.syll(inst, boxed)), ax


BUILTINS: dict[str, Callable[[], tuple[Proof, AxiomSet]]] = {
    "wcd_from_idb": wcd_from_idb,
    "eq7_ndb_idb": eq7_ndb_idb,
    "wcdb_from_nd_wcd": wcdb_from_nd_wcd,
    "nn_box_from_nd_idb": nn_box_from_nd_idb,
    "grefe_consequence_nd_idb": grefe_consequence_nd_idb,
}


def builtin_proof(name: str) -> tuple[Proof, AxiomSet]:
    try:
        make = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin proof {name!r}; known: {', '.join(BUILTINS)}") from None
    return make()
