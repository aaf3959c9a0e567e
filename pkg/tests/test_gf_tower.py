import pytest
from hypothesis import given
from hypothesis import strategies as st

from lttower.gf_tower import FieldDesc, common_tower, frobenius, make_tower, norm_to, trace_to

TOWERS = [(2, 2), (2, 3), (3, 2), (4, 2), (2, 6), (5, 2)]


def test_f4_generator_frobenius():
    F = make_tower(2, 2).top()
    assert F.modulus == (1, 1, 1)
    t = F([0, 1])
    assert frobenius(t, 1) == t ** 2 == t + 1


@pytest.mark.parametrize("q,n", TOWERS)
def test_frobenius_order_and_fixed_field(q, n):
    tower = make_tower(q, n)
    K, L = tower.base(), tower.top()
    for a in range(L.order):
        assert L.frob(a, n) == a
        assert L.frob(L.frob(a, 1), -1) == a
    fixed = [a for a in range(L.order) if L.frob(a, 1) == a]
    assert sorted(fixed) == sorted(tower.up_table(0, tower.index(L)))
    assert len(fixed) == K.order == q


def test_norm_f4_to_f2_brute_force():
    tower = make_tower(2, 2)
    K, L = tower.base(), tower.top()
    # a^(1+2) = a^3 = 1 on F_4^x
    assert [norm_to(L.element(a), K).value for a in range(1, 4)] == [1, 1, 1]
    assert norm_to(K.element(1), K).value == 1


@pytest.mark.parametrize("q,n", TOWERS)
def test_norm_trace_against_power_formulas(q, n):
    tower = make_tower(q, n)
    K, L = tower.base(), tower.top()
    e = (q ** n - 1) // (q - 1)
    for a in range(L.order):
        x = L.element(a)
        assert tower.embed(norm_to(x, K), L).value == L.pow(a, e)
        total = 0
        for i in range(n):
            total = L.add(total, L.frob(a, i))
        assert tower.embed(trace_to(x, K), L).value == total


@given(st.integers(0, 15), st.integers(0, 15))
def test_trace_is_additive(a, b):
    tower = make_tower(2, 4)
    K, L = tower.base(), tower.top()
    x, y = L.element(a), L.element(b)
    assert trace_to(x + y, K) == trace_to(x, K) + trace_to(y, K)


@given(st.integers(1, 80), st.integers(1, 80))
def test_field_axioms_f81(a, b):
    F = make_tower(3, 4).top()
    x, y = F.element(a), F.element(b)
    assert (x * y) / y == x
    assert x * x.inverse() == 1
    assert (x + y) - y == x
    assert frobenius(x * y, 1) == frobenius(x, 1) * frobenius(y, 1)
    assert frobenius(x + y, 1) == frobenius(x, 1) + frobenius(y, 1)


@pytest.mark.parametrize("q,n", [(2, 2), (3, 2), (2, 6)])
def test_vectorized_ops_match_scalar(q, n):
    import numpy as np
    F = make_tower(q, n).top()
    a = np.arange(F.order)
    b = (a * 7 + 3) % F.order
    assert list(F.vmul(a, b)) == [F.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.vadd(a, b)) == [F.add(int(x), int(y)) for x, y in zip(a, b)]
    assert list(F.vpow(a, q + 1)) == [F.pow(int(x), q + 1) for x in a]


def test_embeddings_commute():
    tower = make_tower(2, 2, 3)
    assert [F.order for F in tower.fields] == [2, 4, 64]
    direct = tower.up_table(0, 2)
    via = [tower.up_table(1, 2)[c] for c in tower.up_table(0, 1)]
    assert direct == via
    # the embedding is a ring map
    F4, F64 = tower[1], tower[2]
    up = tower.up_table(1, 2)
    for a in range(4):
        for b in range(4):
            assert up[F4.mul(a, b)] == F64.mul(up[a], up[b])


def test_int_vs_code():
    F = make_tower(2, 2).top()
    # ints are integers: 2 = 0 in characteristic 2, while code 2 is the generator
    assert F.from_int(2) == 0
    assert F.element(2).value == 2


def test_fielddesc_json_roundtrip_and_common_tower():
    tower = make_tower(3, 2)
    K, L = tower.base(), tower.top()
    s = L.to_json()
    L2 = FieldDesc.from_json(s)
    assert L2 == L and L2.to_json() == s
    K2 = FieldDesc.from_json(K.to_json())
    rebuilt = common_tower(K2, L2)
    assert rebuilt.up_table(rebuilt.index(K2), rebuilt.index(L2)) == tower.up_table(0, 1)


def test_bad_fields_rejected():
    with pytest.raises(ValueError):
        FieldDesc(4, 1)
    with pytest.raises(ValueError):
        FieldDesc(2, 2, [1, 0, 1])  # t^2 + 1 = (t + 1)^2
    with pytest.raises(ValueError):
        make_tower(6, 2)
    F = make_tower(2, 2).top()
    with pytest.raises(ZeroDivisionError):
        F.inv(0)
