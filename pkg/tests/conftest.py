from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lttower.frac_series import SeriesRing
from lttower.gf_tower import make_tower

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def f4_tower():
    return make_tower(2, 2)


@pytest.fixture(scope="session")
def f9_tower():
    return make_tower(3, 2)


EXPONENTS = [Fraction(0), Fraction(1), Fraction(2), Fraction(3), Fraction(1, 3), Fraction(1, 9), Fraction(4, 3)]


def series_strategy(ring, max_terms=4, exponents=EXPONENTS, truncated=True):
    """Random series in ``ring`` with a few terms and optional truncation."""
    F = ring.field
    mono = st.tuples(*[st.sampled_from(exponents) for _ in ring.names])
    coeff = st.integers(min_value=1, max_value=F.order - 1)

    @st.composite
    def build(draw):
        terms = draw(st.dictionaries(mono, coeff, max_size=max_terms))
        prec = draw(st.sampled_from([4, 6, 9])) if truncated and draw(st.booleans()) else None
        s = ring.zero()
        for m, c in terms.items():
            s = s + ring.monomial(m, F.element(c))
        return s if prec is None else s.truncate(prec)

    return build()


def ring_uv(q=3, degree=2):
    F = make_tower(q, degree).top()
    return SeriesRing(F, ["u", "v"])


def point_strategy(ring, max_terms=2, degree=2):
    """Polynomials with integer exponents and positive valuation (no constant term)."""
    F = ring.field
    mono = st.tuples(*[st.integers(0, degree) for _ in ring.names]).filter(any)
    coeff = st.integers(min_value=1, max_value=F.order - 1)

    @st.composite
    def build(draw):
        terms = draw(st.dictionaries(mono, coeff, min_size=1, max_size=max_terms))
        s = ring.zero()
        for m, c in terms.items():
            s = s + ring.monomial(m, F.element(c))
        return s

    return build()
