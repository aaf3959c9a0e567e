"""
The reduction polynomial and its points
=======================================

Near a CM point the defining congruence reduces to a polynomial N over F_p.
For n = 2 it has a closed form; for larger n it is computed.  We count its
points over a few finite fields, fit the counts, and look at the algebra S
whose unit group acts on the variety.
"""

from lttower import affinoid_lab as al

for q in (2, 3):
    print(f"N(2, {q}, 1) =", al.n_polynomial(2, q, 1))
print("N(3, 2, 1) =", al.n_polynomial(3, 2, 1))

# The congruence holds with room to spare: residual valuation vs the bound.
cm = al.CMData(2, 2, 1)
print("residual valuation:", al.verify_congruence(cm, prec=12, cap=8), " bound:", 2 * cm.val_t())

# Point counts over F_(q^(2r)) for r = 1, 2, 3, and a two-term fit from r = 1, 2.
counts = [al.variety_count(2, 2, 1, r) for r in (1, 2, 3)]
A, B = al.fit_two_term(counts, 2, -1)
print("counts:", counts, " fit A, B:", A, B, " predicted r = 3:", A * 2 ** 6 + B * (-2) ** 3)

N = al.n_polynomial(2, 2, 1)
print("smooth over F_4:", al.is_nonsingular(N, al.CMData(2, 2, 1).L))

# The algebra S and its multiplication table.
S = al.SAlgebra(2, 2, 1)
names = ["1"] + [f"e_{i}" for i in range(1, S.n + 1)]
for name, row in zip(names, S.table_rows()):
    print(f"  {name:>4}:", row)
print("U(F_4) is a group:", al.check_u_group(S))
