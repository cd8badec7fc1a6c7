import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from dvfinv import PolySystem

F = Fraction

small_fractions = st.builds(
    Fraction,
    st.integers(min_value=-9, max_value=9),
    st.integers(min_value=1, max_value=5),
)
nonzero_fractions = small_fractions.filter(lambda c: c != 0)


@st.composite
def normalized_polys(draw, max_degree=5):
    """Coefficient lists with V(0) = 0 and V'(0) != 0."""
    deg = draw(st.integers(min_value=1, max_value=max_degree))
    lead = draw(nonzero_fractions)
    rest = draw(st.lists(small_fractions, min_size=deg - 1, max_size=deg - 1))
    return [F(0), lead] + rest


def random_poly(rng: random.Random, max_degree: int = 5) -> list:
    deg = rng.randint(1, max_degree)
    coeffs = [F(0), F(rng.choice([n for n in range(-6, 7) if n]), rng.randint(1, 4))]
    coeffs += [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(deg - 1)]
    return coeffs


@pytest.fixture
def quad_system():
    # V1 = z1 + z2^2/2, V2 = z2 - z1 z2
    return PolySystem.from_terms([
        {(1, 0): 1, (0, 2): F(1, 2)},
        {(0, 1): 1, (1, 1): -1},
    ])


T3 = [0, -3, 0, 4]
T3_U7 = [F(0), F(-1, 3), F(0), F(-4, 81), F(0), F(-16, 729), F(0), F(-256, 19683)]


# acceptance reporting ---------------------------------------------------------------

ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[num]
        line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
