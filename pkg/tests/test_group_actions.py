import random
from fractions import Fraction

import pytest
from conftest import point_strategy
from hypothesis import given, settings
from hypothesis import strategies as st

from lttower.frac_series import PrecisionError, SeriesRing
from lttower.gf_tower import make_tower, norm_to
from lttower.group_actions import (
    GLElement,
    TwistedSeries,
    act_d,
    act_gl,
    act_gl_right,
    act_weil,
    d_on_points,
    gl_on_points,
    random_gl,
    reduced_norm,
    twisted_mul,
    verify_gb_square,
)
from lttower.pi_series import PiSeries

T4 = make_tower(2, 2)
K2, L4 = T4[0], T4[1]
T9 = make_tower(3, 2)
K3, L9 = T9[0], T9[1]
R4 = SeriesRing(L4, ["X1", "X2"])
R9 = SeriesRing(L9, ["X1", "X2"])


def twisted(field, max_len=3, prec=None, unit=False):
    lo = 1 if unit else 0
    return st.lists(st.integers(0, field.order - 1), min_size=1, max_size=max_len).map(
        lambda cs: TwistedSeries.from_list(field, [max(cs[0], lo)] + cs[1:],
                                           prec=prec if prec is not None else float("inf")))


gl2 = st.integers(0, 2 ** 32).map(lambda seed: random_gl(K2, 2, random.Random(seed), 1))
gl3 = st.integers(0, 2 ** 32).map(lambda seed: random_gl(K3, 2, random.Random(seed), 1))


# ----- GL_n(O_K) -----

def test_act_gl_identity_and_scalar():
    s = R9.gen("X1") * R9.gen("X2") + R9.gen("X2") ** 3
    assert act_gl(GLElement.identity(K3, 2), s) == s
    g = GLElement.scalar(K3, 2, 2)
    x1, x2 = R9.gens()
    assert act_gl(g, x1) == x1.scale(2)
    assert act_gl(g, x1 * x2) == (x1 * x2).scale(4)


def test_act_gl_single_pi_entry():
    g = GLElement.from_lists(K2, [[[1], [0, 1]], [[0], [1]]])
    x1, x2 = R4.gens()
    # pi acts as X -> X^(q^n), so the (1,2) entry pi sends X_1 to X_1 + X_2^4
    assert act_gl(g, x1) == x1 + x2 ** 4
    assert act_gl(g, x2) == x2
    # the right convention goes through the transpose
    assert act_gl_right(g, x2) == x2 + x1 ** 4


@settings(max_examples=20)
@given(gl2, gl2, point_strategy(R4))
def test_act_gl_composes_as_a_pullback(g, h, s):
    assert act_gl(h, act_gl(g, s)) == act_gl(g * h, s)


@settings(max_examples=20)
@given(gl2, twisted(L4, unit=True), point_strategy(R4))
def test_gl_and_d_commute(g, b, s):
    assert act_gl(g, act_d(b, s)) == act_d(b, act_gl(g, s))


def test_act_gl_precision_certificate():
    g = GLElement.from_lists(K2, [[[1], [0]], [[0], [1]]], prec=2)
    s = R4.gen("X1")
    # entries known mod pi^2, so images are known below q^(2*2) = 16
    assert act_gl(g, s, prec=16) == s.truncate(16)
    with pytest.raises(PrecisionError):
        act_gl(g, s, prec=17)


def test_gl_validation():
    with pytest.raises(ValueError):
        GLElement.from_lists(K2, [[[0, 1], [0]], [[0], [1]]])  # det = pi
    with pytest.raises(ValueError):
        GLElement([[PiSeries(L4, {0: 2})]])  # coefficient outside F_q
    with pytest.raises(ValueError):
        GLElement([[PiSeries.pi_power(K2, -1)]])


def test_gl_on_points_matches_substitution():
    g = GLElement.from_lists(K3, [[[1, 1], [2]], [[0, 1], [1]]])
    x1, x2 = R9.gens()
    assert gl_on_points(g, [x1, x2]) == [act_gl(g, x1), act_gl(g, x2)]


# ----- twisted series -----

def test_varpi_relations():
    w = TwistedSeries.varpi(L4)
    for a in range(1, 4):
        A = TwistedSeries.const(L4, a)
        assert w * A == TwistedSeries(L4, {1: L4.frob(a, 1)})
    assert w * w == TwistedSeries.varpi(L4, 2)
    assert (w * w).is_central()
    assert (w * w).to_pi(K2) == PiSeries.pi_power(K2, 1)
    assert not w.is_central()


@given(twisted(L9), twisted(L9), twisted(L9))
def test_twisted_mul_associative_and_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(twisted(L9, prec=6, unit=True))
def test_twisted_inverse(b):
    one = TwistedSeries.const(L9, 1)
    inv = b.inverse()
    assert (b * inv).truncate(6) == one.truncate(6)
    assert (inv * b).truncate(6) == one.truncate(6)


def test_twisted_monomial_inverse_exact():
    b = TwistedSeries(L9, {3: 5})
    inv = b.inverse()
    assert b * inv == TwistedSeries.const(L9, 1)
    with pytest.raises(PrecisionError):
        TwistedSeries.from_list(L9, [1, 1]).inverse()


def test_act_d_varpi_and_composition():
    w = TwistedSeries.varpi(L4)
    x1, x2 = R4.gens()
    assert act_d(w, x1 * x2) == x1 ** 2 * x2 ** 2
    b1 = TwistedSeries.from_list(L4, [1, 2])
    b2 = TwistedSeries.from_list(L4, [3, 0, 1])
    s = x1 + x1 * x2
    assert act_d(b2, act_d(b1, s)) == act_d(b1 * b2, s)
    assert d_on_points(b1, [x1]) == [act_d(b1, x1)]


# ----- reduced norm -----

@pytest.mark.parametrize("tower", [T4, T9, make_tower(2, 3)])
def test_reduced_norm_of_constants(tower):
    K, L = tower[0], tower[1]
    for a in range(1, L.order):
        expected = norm_to(L.element(a), K).value
        assert reduced_norm(TwistedSeries.const(L, a)) == PiSeries(K, {0: expected})


@pytest.mark.parametrize("tower", [T4, T9, make_tower(2, 3)])
def test_reduced_norm_of_varpi_and_one(tower):
    K, L = tower[0], tower[1]
    n = L.qdegree
    sign = 1 if n % 2 else -1
    assert reduced_norm(TwistedSeries.varpi(L)) == PiSeries.pi_power(K, 1) * sign
    assert reduced_norm(TwistedSeries.const(L, 1)) == PiSeries.const(K, 1)


@given(twisted(L9, prec=5), twisted(L9, prec=5))
def test_reduced_norm_multiplicative(a, b):
    lhs = reduced_norm(a * b)
    rhs = reduced_norm(a) * reduced_norm(b)
    assert lhs.agrees_with(rhs)


# ----- Weil group -----

def test_act_weil_examples():
    x1 = R9.gen("X1")
    c = 4
    s = x1.scale_code(c)
    assert act_weil(0, s) == s
    expected = R9.monomial({"X1": Fraction(1, 3)}, L9.element(L9.frob(c, 1)))
    assert act_weil(1, s) == expected


@given(point_strategy(R9), st.integers(-3, 3))
def test_act_weil_inverse(s, m):
    assert act_weil(m, act_weil(-m, s)) == s


@settings(max_examples=20)
@given(twisted(L9, unit=True), point_strategy(R9), st.integers(-2, 2))
def test_weil_conjugates_d_action(b, s, m):
    # conjugating the pullback by a degree-m element twists coefficients by tau^(2m)
    lhs = act_weil(m, act_d(b, act_weil(-m, s)))
    assert lhs == act_d(b.twist(2 * m), s)


# ----- the commuting square -----

def test_gb_square_trivial_cases():
    pts = list(R4.gens())
    one = TwistedSeries.const(L4, 1)
    assert verify_gb_square(GLElement.identity(K2, 2), one, pts, 16) >= 16
    R = SeriesRing(L9, ["X1", "X2"])
    g = GLElement.scalar(K3, 2, 2)
    assert verify_gb_square(g, TwistedSeries.const(L9, 1), list(R.gens()), 18) >= 18


@settings(max_examples=6)
@given(gl2, st.integers(1, 3), st.integers(0, 3))
def test_gb_square_random(g, a0, a1):
    g = GLElement([[e.truncate(3) for e in row] for row in g.matrix])
    b = TwistedSeries(L4, {0: a0, 1: a1})
    assert verify_gb_square(g, b, list(R4.gens()), 24) >= 24


def test_gb_square_refuses_undecidable_precision():
    g = GLElement([[e.truncate(3) for e in row] for row in GLElement.identity(K2, 2).matrix])
    with pytest.raises(PrecisionError):
        verify_gb_square(g, TwistedSeries.const(L4, 1), list(R4.gens()), 40)


# ----- serialization -----

@settings(max_examples=10)
@given(gl3, twisted(L9, prec=4))
def test_json_roundtrips(g, b):
    g2 = GLElement.from_dict(g.to_dict())
    assert g2.matrix == g.matrix
    assert TwistedSeries.from_dict(b.to_dict()) == b
    assert twisted_mul(b, b) == twisted_mul(TwistedSeries.from_dict(b.to_dict()), b)


def test_display_convention_breaks_the_square():
    g = GLElement.from_lists(K2, [[[1], [0, 1]], [[0], [1]]])
    one = TwistedSeries.const(L4, 1)
    pts = list(R4.gens())
    assert verify_gb_square(g, one, pts, 24) >= 24
    # X_1 -> X_1 + X_2^q leaves delta(X_2^q, X_2), whose lowest term X_2^4 survives
    assert verify_gb_square(g, one, pts, 24, convention="display") == 4
