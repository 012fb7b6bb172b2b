"""Acceptance suite: one test per criterion, each timed against its budget.

Runs under pytest (the verdict lines appear in the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from itertools import combinations

from ckscope.conditions import check_condition
from ckscope.corpus import corpus_path
from ckscope.hilbert import (
    BASE_SCHEMAS,
    BUILTINS,
    CK,
    EXTRA_SCHEMAS,
    AxiomSet,
    builtin_proof,
    check_proof,
    deduction,
    detach,
    k_rule,
    random_formula,
    random_proof,
    substitute_proof,
    weaken,
)
from ckscope.io import load_frame, load_model
from ckscope.kripke import Model, enumerate_upsets, forces, frame_validates_schema, signature_closure
from ckscope.search import (
    FrameFilter,
    correspondence_audit,
    enumerate_frames,
    find_countermodel,
)
from ckscope.syntax import EQ7, NN_BOX, NN_BOX_BOT, WCDB, parse
from ckscope.transform import bomb_saturate, bomb_saturate_model, plus_duplicate, preservation_check

try:
    from .conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def small_frames():
    return [fr for n in (1, 2, 3) for fr in enumerate_frames(n)]


def verdict(number, label, budget, body):
    """Run ``body`` (which returns a list of failures), record and assert."""
    start = time.perf_counter()
    failures = body()
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        failures.append(f"took {elapsed:.1f}s, budget {budget}s")
    status = "PASS" if not failures else "FAIL"
    text = f"{status} criterion {number}: {label} ({elapsed:.2f}s / {budget}s)"
    if failures:
        text += " -- " + "; ".join(map(str, failures[:3]))
    ACCEPTANCE_LINES.append(text)
    print(text)
    assert not failures, text


# 1 -------------------------------------------------------------------------------


def test_criterion_1_figures():
    def body():
        bad = []
        timings = {}

        def timed(name, fn):
            t = time.perf_counter()
            ok = fn()
            timings[name] = time.perf_counter() - t
            if not ok:
                bad.append(f"{name} verdict")
            if timings[name] >= 1.0:
                bad.append(f"{name} took {timings[name]:.2f}s")

        def fig2a():
            fr = load_frame(corpus_path("fig2a.json"))
            return frame_validates_schema(fr, EXTRA_SCHEMAS["Nd"]) and not check_condition(fr, "NdSuff")

        def fig2b():
            fr = load_frame(corpus_path("fig2b.json"))
            return (
                frame_validates_schema(fr, EXTRA_SCHEMAS["Idb"])
                and not check_condition(fr, "IdbSuff")
                and not check_condition(fr, "IdbWeak")
            )

        def fig5a():
            m = load_model(corpus_path("fig5a.json"))
            fr = m.frame
            conds = all(check_condition(fr, c) for c in ("NdbSuff", "CdStrong", "IdbSuff"))
            return conds and m.value("p") == fr.bomb_bit and not forces(m, fr.index("x"), NN_BOX)

        def fig5b():
            a = load_model(corpus_path("fig5b_eq7.json"))
            b = load_model(corpus_path("fig5b_wcdb.json"))
            fa = a.frame
            return (
                a.value("p") == 1 << fa.index("w") | fa.bomb_bit
                and b.value("p") == 1 << fa.index("z") | fa.bomb_bit
                and b.value("q") == 1 << fa.index("w") | fa.bomb_bit
                and a.frame == b.frame
                and not forces(a, fa.index("x"), EQ7)
                and not forces(b, fa.index("x"), WCDB)
            )

        for name, fn in (("fig2a", fig2a), ("fig2b", fig2b), ("fig5a", fig5a), ("fig5b", fig5b)):
            timed(name, fn)
        return bad

    verdict(1, "figure reproduction", 4.0, body)


# 2 -------------------------------------------------------------------------------


def test_criterion_2_correspondence_audit():
    def body():
        bad = []
        for axiom in ("Nd", "Cd", "Idb", "Ndb"):
            report = correspondence_audit(axiom, 3)
            bad += [f"{axiom}: {p}" for _, _, p in report.violations]
        for fr in small_frames():
            if check_condition(fr, "CdStrong"):
                if not check_condition(fr, "CdSuff"):
                    bad.append("CdStrong without CdSuff")
                if check_condition(fr, "IdbSuff") != check_condition(fr, "IdbWeak"):
                    bad.append("IdbSuff and IdbWeak differ under CdStrong")
        return bad

    verdict(2, "correspondence audit on all frames up to 3 worlds", 300.0, body)


# 3 -------------------------------------------------------------------------------


def test_criterion_3_proof_library():
    def body():
        bad = []
        for name in BUILTINS:
            proof, axioms = builtin_proof(name)
            report = check_proof(proof, axioms)
            if not report:
                bad.append(f"{name}: {report}")
        targets = {
            "wcd_from_idb": parse("[](p \\/ q) -> (<>p -> []q) -> []q"),
            "eq7_ndb_idb": EQ7,
            "grefe_consequence_nd_idb": NN_BOX_BOT,
        }
        for name, target in targets.items():
            if builtin_proof(name)[0].formula != target:
                bad.append(f"{name}: wrong conclusion")
        if set(builtin_proof("grefe_consequence_nd_idb")[1].extras) != {"Nd", "Idb"}:
            bad.append("grefe consequence uses the wrong axioms")
        return bad

    verdict(3, "builtin proofs check", 1.0, body)


# 4 -------------------------------------------------------------------------------


def test_criterion_4_countermodel_search():
    def body():
        bad = []
        for target, axioms, mode, label in (
            (NN_BOX_BOT, CK, "corr", "~~[]bot -> []bot in CK"),
            (NN_BOX, AxiomSet.of("Ndb", "Cd", "Idb"), "suff", "~~[]p -> []~~p, suff class"),
        ):
            res = find_countermodel(target, axioms, 4, mode)
            if not res.found:
                bad.append(f"{label}: {res.outcome}")
                continue
            fr = res.model.frame
            if not FrameFilter(axioms, mode)(fr) or forces(res.model, res.world, target):
                bad.append(f"{label}: countermodel does not verify")
        res = find_countermodel(parse("p -> p"), CK, 3)
        if res.outcome != "exhausted":
            bad.append(f"p -> p: {res.outcome}")
        return bad

    verdict(4, "countermodel search", 120.0, body)


# 5 -------------------------------------------------------------------------------


def test_criterion_5_transformations():
    def body():
        bad = []
        for fr in small_frames():
            sat = bomb_saturate(fr)
            if not (check_condition(sat, "CdStrong") and check_condition(sat, "IdbCorr")):
                bad.append(("saturate", fr))
            for up in enumerate_upsets(fr):
                m = Model(fr, {"p": up})
                plus = plus_duplicate(m)
                if not (check_condition(plus.frame, "NdCorr") and check_condition(plus.frame, "CdCorr")):
                    bad.append(("plus", fr))
                for out in (bomb_saturate_model(m), plus):
                    result = preservation_check(m, out, None, 3, ["p"]).preservation
                    if result != "pass":
                        bad.append(("preservation", fr, result))
        return bad

    verdict(5, "transformations and preservation", 300.0, body)


# 6 -------------------------------------------------------------------------------


def axiom_sets():
    sets = []
    for k in range(4):
        sets += [AxiomSet.of(*c) for c in combinations(("Nd", "Cd", "Idb"), k)]
    for k in range(3):
        sets += [AxiomSet.of("Ndb", *c) for c in combinations(("Cd", "Idb"), k)]
    return sets


def test_criterion_6_soundness_smoke():
    def body():
        bad = []
        frames = small_frames()
        sets = axiom_sets()
        assert len(sets) == 12
        for fr in frames:
            for name, schema in BASE_SCHEMAS.items():
                if not frame_validates_schema(fr, schema):
                    bad.append((name, fr))
        for ax, mode in [(s, "corr") for s in sets] + [
            (AxiomSet.of("wCD"), "schema"),
            (AxiomSet.of("Nd", "wCD"), "schema"),
        ]:
            flt = FrameFilter(ax, mode)
            for fr in frames:
                if not flt(fr):
                    continue
                for name, schema in ax.extra_schemas().items():
                    if not frame_validates_schema(fr, schema):
                        bad.append((str(ax), name, fr))
        return bad

    verdict(6, "axioms valid on their frame classes", 180.0, body)


# 7 -------------------------------------------------------------------------------


def test_criterion_7_calculus_properties():
    axiom_choices = [CK, AxiomSet.of("Nd", "Cd", "Idb"), AxiomSet.of("Ndb", "wCD")]

    def body():
        bad = []
        for seed in range(200):
            rng = random.Random(seed)
            ax = axiom_choices[seed % len(axiom_choices)]
            pf = random_proof(rng, ax, 15)
            if len(pf) > 15 or not check_proof(pf, ax):
                bad.append((seed, "generator"))
                continue
            if pf.context:
                base, pivot = pf, rng.choice(sorted(pf.context, key=str))
            else:
                pivot = random_formula(rng, 1)
                base = weaken(pf, [pivot], ax)
            ded = deduction(base, pivot, ax)
            back = detach(ded, ax)
            if not (check_proof(ded, ax) and check_proof(back, ax)):
                bad.append((seed, "deduction/detach"))
            elif back.conclusion() != base.conclusion():
                bad.append((seed, "round trip"))
            extra = random_formula(rng, 2)
            sigma = {v: random_formula(rng, 2) for v in "pq"}
            for label, out in (
                ("k_rule", k_rule(pf, ax)),
                ("weaken", weaken(pf, [extra], ax)),
                ("substitute", substitute_proof(pf, sigma, ax)),
            ):
                if not check_proof(out, ax):
                    bad.append((seed, label))
        return bad

    verdict(7, "deduction, detach, k_rule, weaken, substitution on 200 random proofs", 30.0, body)


# 8 -------------------------------------------------------------------------------


def test_criterion_8_semantic_invariants():
    def body():
        bad = []
        for fr in small_frames():
            for up in enumerate_upsets(fr):
                m = Model(fr, {"p": up})
                for (ts,), f in signature_closure([m], ["p"], 4).items():
                    if not fr.is_upset(ts):
                        bad.append(("persistence", fr, f))
                    if not ts & fr.bomb_bit:
                        bad.append(("bomb", fr, f))
        return bad

    verdict(8, "persistence and the exploding world, depth 4", 60.0, body)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
