import pytest
from hypothesis import given
from hypothesis import strategies as st

from lttower.frac_series import PrecisionError
from lttower.gf_tower import make_tower
from lttower.isocrystals import (
    InconclusiveError,
    Isocrystal,
    apply,
    dual,
    height_from_pi_image,
    identity,
    is_nilpotent,
    standard,
    top_exterior,
)
from lttower.pi_series import PiSeries, leibniz_det, matmul, matrix_inverse

F4 = make_tower(2, 2).top()
F9 = make_tower(3, 2).top()


def pi(field, k=1):
    return PiSeries.pi_power(field, k)


def pi_series(field, max_len=4):
    return st.lists(st.integers(0, field.order - 1), min_size=1, max_size=max_len).flatmap(
        lambda cs: st.sampled_from([None, 6, 9]).map(
            lambda p: PiSeries.from_list(field, cs, prec=p if p is not None else float("inf"))))


# ----- PiSeries -----

@given(pi_series(F9), pi_series(F9), pi_series(F9))
def test_pi_series_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a + b) * c == a * c + b * c or ((a + b) * c).agrees_with(a * c + b * c)
    assert (a * b).frob(1) == a.frob(1) * b.frob(1)
    assert a.frob(2) == a  # tau^2 = 1 on F_9


@given(pi_series(F4))
def test_pi_series_inverse(a):
    a = a.truncate(8) if a.prec == float("inf") else a
    if a.is_zero():
        return
    inv = a.inverse()
    assert (a * inv).agrees_with(PiSeries.const(F4, 1))


def test_pi_series_from_list_takes_codes():
    s = PiSeries.from_list(F4, [2, 0, 3])
    assert s.code(0) == 2 and s.code(2) == 3
    # const reads ints as integers
    assert PiSeries.const(F4, 2).is_zero()


def test_pi_series_exact_inverse_rules():
    assert pi(F4, 3).inverse() == pi(F4, -3)
    with pytest.raises(PrecisionError):
        PiSeries.from_list(F4, [1, 1]).inverse()
    with pytest.raises(ZeroDivisionError):
        PiSeries(F4).inverse()


def test_matrix_inverse_and_det():
    one = PiSeries.const(F9, 1)
    m = [[one, pi(F9)], [pi(F9, 2), one + pi(F9)]]
    m = [[e.truncate(10) for e in row] for row in m]
    inv = matrix_inverse(m, one)
    prod = matmul(m, inv)
    for i in range(2):
        for j in range(2):
            assert prod[i][j].agrees_with(one if i == j else PiSeries(F9))
    assert leibniz_det(m, one).agrees_with(one + pi(F9) - pi(F9, 3))


# ----- crystals -----

def test_standard_small_cases():
    assert standard(1, F4).matrix == [[pi(F4)]]
    m = standard(2, F9).matrix
    zero, one = PiSeries(F9), PiSeries.const(F9, 1)
    assert m == [[zero, one], [pi(F9), zero]]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("field", [F4, F9])
def test_standard_det_and_top_exterior(n, field):
    M = standard(n, field)
    expected = pi(field) if n % 2 == 1 else -pi(field)
    assert M.det() == expected
    assert top_exterior(M).matrix == [[expected]]
    assert top_exterior(top_exterior(M)) == top_exterior(M)


def test_apply_companion_action():
    M = standard(2, F9)
    zero, one = PiSeries(F9), PiSeries.const(F9, 1)
    assert apply(M, [one, zero]) == [zero, one]
    assert apply(M, [one, zero], 2) == [pi(F9), zero]
    M3 = standard(3, F4)
    e = [PiSeries.const(F4, 1), PiSeries(F4), PiSeries(F4)]
    assert apply(M3, e, 3) == [pi(F4), PiSeries(F4), PiSeries(F4)]


def test_identity_crystal_applies_tau():
    M = identity(1, F4)
    t = PiSeries.from_list(F4, [2, 3, 1])
    assert apply(M, [t], 5) == [t.frob(5)]


@given(st.lists(pi_series(F9, 3), min_size=3, max_size=3), st.integers(-3, 3), st.integers(-3, 3))
def test_apply_is_additive_in_powers(v, i, j):
    M = standard(3, F9)
    try:
        lhs = apply(M, apply(M, v, j), i)
        rhs = apply(M, v, i + j)
    except PrecisionError:
        return
    assert all(a.agrees_with(b) for a, b in zip(lhs, rhs))


def test_apply_semilinear():
    M = standard(2, F4)
    c = PiSeries.from_list(F4, [2])
    v = [PiSeries.from_list(F4, [1, 3]), PiSeries.from_list(F4, [0, 2])]
    lhs = apply(M, [c * x for x in v])
    rhs = [c.frob(1) * x for x in apply(M, v)]
    assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2, 3])
def test_nilpotency(n):
    M = standard(n, F4)
    assert is_nilpotent(M)
    assert not is_nilpotent(identity(n, F4))
    # F nilpotent on M iff F^-1 nilpotent on the dual
    assert is_nilpotent(dual(M), inverse=True)
    assert not is_nilpotent(dual(identity(n, F4)), inverse=True)


def test_double_dual():
    for n in (1, 2, 3):
        M = standard(n, F9)
        assert dual(dual(M)) == M


def test_nilpotency_inconclusive_and_bad_depth():
    # det has valuation 1 but one entry has a pole, so neither certificate applies
    zero, one = PiSeries(F4), PiSeries.const(F4, 1)
    M = Isocrystal([[pi(F4, -1), one], [zero, pi(F4, 2)]], F4)
    with pytest.raises(InconclusiveError):
        is_nilpotent(M)
    with pytest.raises(ValueError):
        is_nilpotent(M, probe_depth=0)


def test_isocrystal_validation_and_json():
    zero = PiSeries(F4)
    with pytest.raises(ValueError):
        Isocrystal([[zero]], F4)
    with pytest.raises(ValueError):
        Isocrystal([[zero, zero]], F4)
    M = standard(3, F4)
    assert Isocrystal.from_dict(M.to_dict()) == M


def test_height_from_pi_image():
    assert height_from_pi_image({2: 1, 3: 5}) == 2
    assert height_from_pi_image({0: 0, 1: 3}) == 1
    with pytest.raises(ValueError):
        height_from_pi_image({0: 0})
