import random

import pytest
from hypothesis import settings, strategies as st

from splitgame.core import Structure, Vocabulary
from splitgame.randgen import FormulaGenerator, random_structure

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

P = Vocabulary.of({"P": 1})
R = Vocabulary.of({"R": 2})
E = Vocabulary.of({"E": 2})
LT = Vocabulary.of({"lt": 2})


def chain(n: int) -> Structure:
    return Structure.build(LT, n, {"lt": {(i, j) for i in range(n) for j in range(i + 1, n)}})


def unary(n: int, ps) -> Structure:
    return Structure.build(P, n, {"P": {(i,) for i in ps}})


@pytest.fixture
def p_pair():
    """Two elements, P={0} against P empty."""
    return unary(2, [0]), unary(2, [])


@st.composite
def structures(draw, vocab=R, max_size=3):
    n = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_structure(random.Random(seed), vocab, n, density=draw(st.sampled_from([0.2, 0.5, 0.8])))


@st.composite
def formulas(draw, vocab=R, max_rank=3, width=2, free=("x", "y")):
    seed = draw(st.integers(0, 2**32 - 1))
    gen = FormulaGenerator(random.Random(seed), vocab, width)
    return gen.formula(draw(st.integers(0, max_rank)), free)


@st.composite
def sentences(draw, vocab=R, max_rank=3, width=2):
    seed = draw(st.integers(0, 2**32 - 1))
    gen = FormulaGenerator(random.Random(seed), vocab, width)
    return gen.sentence(draw(st.integers(0, max_rank)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
