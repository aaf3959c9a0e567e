"""
Finite fields and series with fractional exponents
==================================================

A tour of the two data structures everything else is built on: a tower of
finite fields with int-coded elements, and sparse truncated series whose
exponents live in Z[1/q].
"""

from fractions import Fraction

from lttower.frac_series import SeriesRing
from lttower.gf_tower import make_tower, norm_to

# F_81 over F_3.  Elements are int codes.
tower = make_tower(3, 4)
F3, F81 = tower[0], tower.top()
F9 = make_tower(3, 2).top()
print("field sizes in the tower:", [F.order for F in tower.fields])

g = F81.gen
print("generator code:", g, " order of Frobenius on F_81:", F81.qdegree)
print("norm of g down to F_3:", norm_to(F81.element(g), F3))

# A codes-vs-integers reminder: element(c) wraps a code, scale(k) reads k as an integer.
R = SeriesRing(F9, ["u", "v"])
u, v = R.gens()
print("3*u is zero in characteristic 3:", u.scale(3).is_zero())

# Fractional exponents come for free; q-th roots are exact.
root = R.monomial({"u": Fraction(1, 3)})
print("u^(1/3) cubed:", root ** 3)
print("qth_root(u + v^2):", (u + v ** 2).qth_root())

# Truncation tracks what is actually known.
a = (u + v * v).truncate(5)
b = u.truncate(3)
print("(u + v^2 + O(5)) * (u + O(3)) =", a * b)

# Everything round-trips through JSON.
s = (u * v + root).truncate(4)
print(s.to_json())
