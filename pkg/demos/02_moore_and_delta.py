"""
Moore determinants and the alternating map
==========================================

The Moore determinant is F_q-multilinear and alternating.  Summing it over
Frobenius shifts (x_i -> x_i^(q^(n a_i)) with sum a_i = 0) gives a map that is
alternating over the larger ring O_K.  The sum is infinite; a finite window of
shifts is certified exact below a stated precision.
"""

from lttower.det_map import WindowError, delta_standard, min_window, moore_det
from lttower.frac_series import SeriesRing
from lttower.gf_tower import make_tower

F = make_tower(2, 2).top()
R = SeriesRing(F, ["X1", "X2"])
x1, x2 = R.gens()

print("Moore det of (X1, X2) over F_2:", moore_det([x1, x2]))

# Which window do we need?  Points of valuation 1, precision 16 vs 17.
for prec in (16, 17):
    print(f"prec {prec}: window A = {min_window(2, 2, 1, prec).A}")

d = delta_standard([x1, x2], 1, 16)
print("delta(X1, X2) mod degree 16:", d)

# Alternating: delta(x, x) vanishes to the working precision.
print("delta(X1, X1) is zero:", delta_standard([x1, x1], 1, 16).is_zero())

# Asking for more than the window certifies is an error, not a silent truncation.
try:
    delta_standard([x1, x2], 0, 16)
except WindowError as exc:
    print("refused:", exc)
