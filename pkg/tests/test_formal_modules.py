import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lttower.det_map import moore_det
from lttower.formal_modules import (
    LevelTuple,
    ModuleLaw,
    UndecidableError,
    annihilator_coefficients,
    fq_elements,
    height_one_law,
    iext_dimension,
    is_drinfeld_basis,
    moore_annihilator,
    phi_tower,
    polynomial_in,
    standard_law,
    teichmuller_lift,
    universal_law,
    verify_modI2,
    wedge_law,
)
from lttower.frac_series import PrecisionError, SeriesRing
from lttower.gf_tower import make_tower
from lttower.pi_series import PiSeries

F2 = make_tower(2, 1).top()
F3 = make_tower(3, 1).top()
F4 = make_tower(2, 2).top()


def alphas(field, max_len=4, prec=6):
    """Truncated elements of O_K with F_q coefficients."""
    return st.lists(st.integers(0, field.q - 1), min_size=1, max_size=max_len).map(
        lambda cs: PiSeries.from_list(field, [field.from_int(c) for c in cs], prec=prec))


# ----- alpha_multiple -----

def test_alpha_one_and_pi_on_standard():
    for q, n in [(2, 2), (3, 1), (2, 3)]:
        F = make_tower(q, 1).top()
        G0 = standard_law(F, n)
        T = G0.ring.gen("T")
        assert G0.alpha_multiple(PiSeries.const(F, 1)) == T
        assert G0.alpha_multiple(PiSeries.pi_power(F, 1)) == T ** (q ** n)
        assert G0.alpha_multiple(PiSeries.pi_power(F, 2)) == T ** (q ** (2 * n))


def test_alpha_pi_is_the_pi_series():
    for law in (universal_law(F3, 2), height_one_law(F2), wedge_law(F2, 3)):
        assert law.alpha_multiple(PiSeries.pi_power(law.field, 1)) == law.pi_series


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_wedge_law_two_terms(n):
    for F in (F2, F3):
        law = wedge_law(F, n)
        s = law.alpha_multiple(PiSeries.pi_power(F, 1))
        R = law.ring
        sign = 1 if n % 2 else -1
        assert s == R.monomial({"T": 1, "pi": 1}) + R.monomial({"T": F.q}, sign)
        assert len(s) == 2


@given(alphas(F3), alphas(F3))
def test_alpha_multiple_is_a_ring_action(a, b):
    law = universal_law(F3, 2)
    prec = 12
    ma, mb = law.alpha_multiple(a, prec), law.alpha_multiple(b, prec)
    T = law.var
    assert law.alpha_multiple(a + b, prec).agrees_with(ma + mb)
    lhs = law.alpha_multiple(a * b, prec)
    rhs = ma.compose({T: mb}).truncate(prec)
    assert lhs.agrees_with(rhs)


@given(alphas(F2, prec=5))
def test_alpha_multiple_linear_coefficient(a):
    law = height_one_law(F2)
    s = law.alpha_multiple(a, 12)
    # the T-linear part is alpha itself
    parts = polynomial_in(s, "T")
    lin = parts.get(Fraction(1), law.ring.zero())
    for k in range(1, 5):
        expected = a.coeffs.get(k - 1, 0)
        got = lin.terms.get((Fraction(0), Fraction(k - 1)), 0)
        assert got == expected


def test_alpha_multiple_errors():
    law = height_one_law(F2)
    with pytest.raises(PrecisionError):
        law.alpha_multiple(PiSeries.pi_power(F2, 3), prec=2)
    with pytest.raises(ValueError):
        law.alpha_multiple(PiSeries.pi_power(F2, -1))
    G = standard_law(F4, 1)
    with pytest.raises(ValueError):
        G.alpha_multiple(PiSeries.from_list(F4, [2]))  # not in F_2


def test_law_validation_and_json():
    R = SeriesRing(F2, ["T", "pi"])
    with pytest.raises(ValueError):
        ModuleLaw(R.monomial({"T": 3}) + R.monomial({"T": 1, "pi": 1}), 1)
    with pytest.raises(ValueError):
        ModuleLaw(R.monomial({"T": 2}), 1)  # no linear pi term
    with pytest.raises(ValueError):
        ModuleLaw(R.monomial({"T": 1, "pi": 1}) + R.monomial({"T": 4}), 1)  # height mismatch
    for law in (universal_law(F3, 3), wedge_law(F2, 2, reduced=True), standard_law(F4, 2)):
        back = ModuleLaw.from_dict(law.to_dict())
        assert back.pi_series == law.pi_series and back.height == law.height and back.tag == law.tag


# ----- Moore annihilator -----

def test_moore_annihilator_n1_closed_form():
    for F in (F2, F3, make_tower(5, 1).top()):
        R = SeriesRing(F, ["x"])
        x = R.gen("x")
        P = moore_annihilator([x])
        S = P.ring
        T, xs = S.gen("T"), x.change_ring(S)
        assert P == T ** F.q - xs ** (F.q - 1) * T


def test_moore_annihilator_of_zero_points():
    R = SeriesRing(F3, ["x"])
    P = moore_annihilator([R.zero(), R.zero()])
    assert P == P.ring.gen("T") ** 9


def _symbolic(q, n):
    F = make_tower(q, 1).top()
    R = SeriesRing(F, [f"x{i}" for i in range(1, n + 1)] + ["T"], [1] * n + [0])
    return R, [R.gen(f"x{i}") for i in range(1, n + 1)]


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (3, 2), (2, 3)])
def test_moore_annihilator_recursion_matches_product(q, n):
    R, xs = _symbolic(q, n)
    assert moore_annihilator(xs) == moore_annihilator(xs, method="product")


@pytest.mark.parametrize("q,n", [(2, 2), (3, 2), (2, 3)])
def test_moore_annihilator_determinant_identity(q, n):
    # P(T) * Delta(x_1..x_n) = Delta(x_1..x_n, T)
    R, xs = _symbolic(q, n)
    T = R.gen("T")
    assert moore_annihilator(xs) * moore_det(xs) == moore_det(xs + [T])


@given(st.lists(st.integers(1, 3), min_size=2, max_size=2), st.lists(st.integers(1, 5), min_size=2, max_size=2))
def test_moore_annihilator_vanishes_on_span(codes, exps):
    R = SeriesRing(F4, ["e"])
    pts = [R.monomial({"e": k}, F4.element(c)) for k, c in zip(exps, codes)]
    P = moore_annihilator(pts)
    S = P.ring
    for a in itertools.product(fq_elements(F4), repeat=2):
        comb = R.zero()
        for c, x in zip(a, pts):
            comb = comb + x.scale_code(c)
        val = P.compose({"T": comb.change_ring(S)}, target=S)
        assert val.is_zero()


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (2, 3), (3, 2)])
def test_verify_mod_i2(n, q):
    assert verify_modI2(n, q)


def test_annihilator_coefficients_degrees():
    R, xs = _symbolic(2, 2)
    U0, U1 = annihilator_coefficients(xs)
    t = R.index["T"]

    def degrees(s):
        return {sum(e for j, e in enumerate(m) if j != t) for m in s.terms}

    assert degrees(U0) == {3} and degrees(U1) == {2}


# ----- Drinfeld bases -----

def test_zero_tuple_is_drinfeld_basis_of_standard_law():
    G0 = standard_law(F2, 2)
    for m in (1, 2):
        R = SeriesRing(F2, ["e"], nil={"e": 2 ** (2 * m + 2)})
        assert is_drinfeld_basis(G0, LevelTuple(m, [R.zero(), R.zero()]))


def test_zero_point_rejected_for_height_one_over_o_l():
    H = height_one_law(F4)
    R = SeriesRing(F4, ["pi"])
    assert not is_drinfeld_basis(H, LevelTuple(1, [R.zero(prec=10)]))


def test_level_two_torsion_points_accepted():
    G0 = standard_law(F2, 2)
    R = SeriesRing(F2, ["e"], nil={"e": 16})
    # any x with x^4 = 0 is pi-torsion since [pi](T) = T^4
    for a, b in [(4, 4), (4, 6), (5, 7)]:
        tup = LevelTuple(2, [R.monomial({"e": a}), R.monomial({"e": b})])
        assert is_drinfeld_basis(G0, tup)


def _drinfeld_oracle(law, pts):
    """Expand the q^n linear factors directly; [pi](T) = T^(q^n) divides iff no lower term survives."""
    P = moore_annihilator(pts, method="product")
    top = P.ring.gen("T") ** law.field.q ** law.height
    return (P - top).is_zero()


def test_drinfeld_pairs_match_brute_force():
    law = standard_law(F4, 2)
    R = SeriesRing(F4, ["e"], nil={"e": 16})
    found = []
    for a in range(1, 9):
        for b in range(a, 9):
            for c in range(1, 4):
                pts = [R.monomial({"e": a}), R.monomial({"e": b}).scale_code(c)]
                got = is_drinfeld_basis(law, LevelTuple(1, pts))
                assert got == _drinfeld_oracle(law, pts)
                if got:
                    found.append((a, b, c))
    assert found[:2] == [(6, 6, 2), (6, 6, 3)]
    assert found == [(6, 6, 2), (6, 6, 3), (7, 7, 2), (7, 7, 3), (8, 8, 1), (8, 8, 2), (8, 8, 3)]


def test_drinfeld_undecidable_on_truncated_input():
    H = height_one_law(F2)
    R = SeriesRing(F2, ["pi"])
    # x = pi + O(pi^3) leaves the remainder -(x + pi)T = O(pi^3), which is not decided
    x = R.monomial({"pi": 1}).truncate(3)
    with pytest.raises(UndecidableError):
        is_drinfeld_basis(H, LevelTuple(1, [x]))
    assert not is_drinfeld_basis(H, LevelTuple(1, [R.monomial({"pi": 2}).truncate(3)]))


def test_level_tuple_validation():
    R = SeriesRing(F2, ["e"])
    with pytest.raises(ValueError):
        LevelTuple(0, [R.gen("e")])
    with pytest.raises(ValueError):
        LevelTuple(1, [R.one()])


# ----- height one tower -----

@pytest.mark.parametrize("F", [F2, F3])
def test_phi_tower(F):
    q = F.q
    phis = phi_tower(F, 2, prec=40)
    R = phis[0].ring
    assert phis[0].agrees_with(R.monomial({"pi": 1}) + R.monomial({"T": q - 1}))
    assert max(polynomial_in(phis[1], "T")) == (q - 1) * q
    const = polynomial_in(phis[0], "T")[Fraction(0)]
    assert const.agrees_with(R.monomial({"pi": 1}))


# ----- Teichmuller lift -----

def test_teichmuller_lift_of_root_sequence():
    law = standard_law(F2, 1)
    R = SeriesRing(F2, ["e"], nil={"e": 2})
    xs = [R.monomial({"e": Fraction(1, 2 ** i)}) for i in range(4)]
    zs = teichmuller_lift(law, xs, {"e": 1})
    assert zs[0] == R.gen("e")
    assert zs == xs[:3]
    # another choice of lifts gives the same answer
    eps = R.gen("e")
    assert teichmuller_lift(law, xs, {"e": 1}, lifts=[x + eps for x in xs]) == zs


def test_teichmuller_lift_of_zero_and_errors():
    law = standard_law(F2, 1)
    R = SeriesRing(F2, ["e"], nil={"e": 2})
    assert teichmuller_lift(law, [R.zero()] * 3, {"e": 1}) == [R.zero()] * 2
    with pytest.raises(ValueError):
        teichmuller_lift(law, [R.zero()] * 3, {"e": 1}, lifts=[R.one()] * 3)
    with pytest.raises(ValueError):
        teichmuller_lift(law, [R.zero()], {"e": 1})
    S = SeriesRing(F2, ["e"])
    with pytest.raises(ValueError):
        teichmuller_lift(law, [S.zero()] * 3, {"e": 1})


# ----- Iext -----

def _brute_monomials(n, q, m):
    bound = q ** ((m - 1) * n)
    R = SeriesRing(F2 if q == 2 else F3, [f"X{i}" for i in range(n)], nil={f"X{i}": bound for i in range(n)})
    count = 0
    for exps in itertools.product(range(bound + 1), repeat=n):
        if not R.monomial(dict(zip(R.names, exps))).is_zero():
            count += 1
    return count


@pytest.mark.parametrize("n,q,m", [(1, 2, 1), (1, 2, 2), (2, 2, 2), (1, 3, 2), (2, 3, 2), (1, 2, 3)])
def test_iext_dimension_matches_monomial_count(n, q, m):
    assert iext_dimension(n, q, m) == _brute_monomials(n, q, m)


def test_iext_small_values():
    assert iext_dimension(3, 5, 1) == 1
    assert iext_dimension(1, 2, 2) == 2
    assert iext_dimension(2, 2, 2) == 16
    with pytest.raises(ValueError):
        iext_dimension(2, 2, 0)
