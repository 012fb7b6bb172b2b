import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ckscope.kripke import Model, enumerate_upsets, reflexive_transitive_closure, validate_frame
from ckscope.syntax import BOT, And, Box, Dia, Imp, Or, Prop

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("CKSCOPE_HYPOTHESIS_EXAMPLES", "150")),
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ATOMS = st.sampled_from([BOT, Prop("p"), Prop("q"), Prop("r")])


def formulas(max_leaves: int = 25):
    return st.recursive(
        ATOMS,
        lambda sub: st.one_of(
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Imp, sub, sub),
            st.builds(Box, sub),
            st.builds(Dia, sub),
        ),
        max_leaves=max_leaves,
    )


@st.composite
def frames(draw, max_worlds: int = 4):
    """Random CK-frames with the bomb at a random index."""
    n = draw(st.integers(1, max_worlds))
    bomb = draw(st.integers(0, n - 1))
    full = (1 << n) - 1
    rows = [draw(st.integers(0, full)) if x != bomb else 0 for x in range(n)]
    leq = reflexive_transitive_closure(n, rows)
    r = [draw(st.integers(0, full)) if x != bomb else 1 << bomb for x in range(n)]
    leq_pairs = [(x, y) for x in range(n) for y in range(n) if leq[x] >> y & 1]
    r_pairs = [(x, y) for x in range(n) for y in range(n) if r[x] >> y & 1]
    return validate_frame(n, bomb, leq_pairs, r_pairs)


@st.composite
def models(draw, max_worlds: int = 4, prop_names=("p", "q", "r")):
    frame = draw(frames(max_worlds))
    ups = enumerate_upsets(frame)
    return Model(frame, {p: draw(st.sampled_from(ups)) for p in prop_names})


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def corpus_file():
    from ckscope.corpus import corpus_path

    return lambda name: str(corpus_path(name))
