"""
Three commuting actions
=======================

GL_n(O_K) acts through the module structure, the units of the division
algebra act through the endomorphism ring, and the Weil group acts by
Frobenius twists.  Here all actions are pullbacks on series in X1..Xn.
"""

import random

from lttower.frac_series import SeriesRing
from lttower.gf_tower import make_tower
from lttower.group_actions import (
    GLElement, TwistedSeries, act_d, act_gl, act_weil, random_gl, reduced_norm, verify_gb_square,
)

tower = make_tower(2, 2)
K, L = tower[0], tower[1]
R = SeriesRing(L, ["X1", "X2"])
x1, x2 = R.gens()

# An entry pi in position (1, 2) sends X1 to X1 + X2^(q^n).
g = GLElement.from_lists(K, [[[1], [0, 1]], [[0], [1]]])
print("g . X1 =", act_gl(g, x1))

# varpi acts as X -> X^q and satisfies varpi^n = pi.
w = TwistedSeries.varpi(L)
print("varpi . X1*X2 =", act_d(w, x1 * x2))
print("varpi^2 as an element of O_K:", (w * w).to_pi(K))
print("reduced norm of varpi:", reduced_norm(w))

# The Weil group shifts exponents by q-powers.
print("Frobenius twist of X1:", act_weil(1, x1))

# GL and D commute; verify_gb_square returns the precision it certified.
rng = random.Random(7)
h = random_gl(K, 2, rng, 1)
h = GLElement([[e.truncate(3) for e in row] for row in h.matrix])
b = TwistedSeries(L, {0: 1, 1: 3})
print("commuting square certified to degree", verify_gb_square(h, b, [x1, x2], 24))
