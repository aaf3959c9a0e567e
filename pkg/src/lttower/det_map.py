"""Moore determinants, the alternating map delta on the standard module, and mu_m.

On the standard module pi acts by X -> X^(q^n), so pi^a x = x^(q^(n a)) for
every integer a (fractional exponents when a < 0).  delta is the sum of Moore
determinants of (pi^(a_1) x_1, ..., pi^(a_n) x_n) over integer tuples with
sum 0; the sum converges and is truncated by a window with a certificate.
"""

import itertools

from .formal_modules import LevelTuple, is_drinfeld_basis, wedge_law
from .frac_series import INF, FracSeries, PrecisionError


class WindowError(PrecisionError):
    """The chosen window cannot certify the requested precision."""


def _det(mat, prec=INF):
    """Permutation expansion with products truncated at ``prec``."""
    n = len(mat)
    ring = mat[0][0].ring
    total = ring.zero()
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = mat[0][perm[0]].truncate(prec)
        for i in range(1, n):
            term = term.mul(mat[i][perm[i]], prec)
        total = total - term if inv % 2 else total + term
    return total


def moore_det(points, prec=INF):
    """det(points_i^(q^j)) for i, j = 0..n-1."""
    ring = points[0].ring
    for x in points:
        if x.ring != ring:
            raise ValueError("points must share one ring")
    n = len(points)
    mat = [[x.frob(j) for j in range(n)] for x in points]
    return _det(mat, prec)


class WindowSpec:
    """Tuples (a_1..a_n) with sum 0 and every a_i <= A (hence a_i >= -(n-1)A)."""

    def __init__(self, A):
        if A < 0:
            raise ValueError("window must be nonnegative")
        self.A = A

    def tuples(self, n):
        A = self.A
        lo = -(n - 1) * A
        for head in itertools.product(range(lo, A + 1), repeat=n - 1):
            last = -sum(head)
            if lo <= last <= A:
                yield head + (last,)

    def certified_bound(self, n, q, minval):
        """Lower bound on the valuation of every discarded term."""
        return q ** (n * (self.A + 1)) * minval

    def __repr__(self):
        return f"WindowSpec(A={self.A})"


def min_window(n, q, minval, prec):
    """Smallest A whose window certifies ``prec``."""
    if minval <= 0:
        raise ValueError("points must have positive valuation")
    A = 0
    while q ** (n * (A + 1)) * minval < prec:
        A += 1
    return WindowSpec(A)


def delta_standard(points, window, prec, product_ring=None):
    """delta(x_1..x_n) on the standard module, known up to weighted valuation ``prec``.

    A discarded tuple has some a_i > A; every monomial of its Moore determinant
    contains (x_i^(q^(n a_i)))^(q^j) for some j >= 0, of valuation at least
    q^(n(A+1)) * min val(x_i).  Requiring this to reach ``prec`` makes the
    truncation exact below ``prec``.

    ``product_ring`` (same variables, possibly with a monomial ideal) is where
    the Moore determinants are multiplied out; the shifts x^(q^(n a)) are
    taken first in the points' own ring, where q-th roots are legal.
    """
    n = len(points)
    ring = points[0].ring
    q = ring.q
    if prec == INF:
        raise ValueError("delta needs a finite precision")
    minval = min(x.effective_valuation() for x in points)
    if minval <= 0:
        raise ValueError("points must be topologically nilpotent")
    if isinstance(window, int):
        window = WindowSpec(window)
    if minval != INF and window.certified_bound(n, q, minval) < prec:
        need = min_window(n, q, minval, prec).A
        raise WindowError(f"window A={window.A} too small for precision {prec}; need A >= {need}")
    target = ring if product_ring is None else product_ring
    total = target.zero(prec)
    for a in window.tuples(n):
        shifted = [x.frob(n * ai) for x, ai in zip(points, a)]
        if target is not ring:
            shifted = [FracSeries(target, dict(x.terms), x.prec) for x in shifted]
        total = total + moore_det(shifted, prec)
    return total.truncate(prec)


def level_tuples(n, m):
    """Tuples with 0 <= a_i < m summing to (m-1)(n-1)."""
    target = (m - 1) * (n - 1)
    return [a for a in itertools.product(range(m), repeat=n) if sum(a) == target]


def mu_level(law, m, points, prec=INF):
    """sum over level tuples of the Moore determinant of ([pi^(a_i)] x_i)."""
    n = len(points)
    cache = {}

    def mult(i, a):
        if (i, a) not in cache:
            cache[(i, a)] = law.apply(a, points[i], prec)
        return cache[(i, a)]

    ring = points[0].ring
    total = ring.zero()
    for a in level_tuples(n, m):
        total = total + moore_det([mult(i, ai) for i, ai in enumerate(a)], prec)
    return total


def check_drinfeld_preservation(law, m, tup):
    """Whether mu_m of a Drinfeld basis of law[pi^m] is a Drinfeld basis of the wedge law.

    Raises ValueError if the input is not a Drinfeld basis, and propagates
    UndecidableError when precision cannot settle either side.
    """
    if not isinstance(tup, LevelTuple):
        tup = LevelTuple(m, tup)
    if not is_drinfeld_basis(law, tup):
        raise ValueError("input tuple is not a Drinfeld basis")
    n = len(tup.points)
    mu = mu_level(law, m, tup.points)
    reduced = "pi" not in tup.ring.index
    wedge = wedge_law(law.field, n, reduced=reduced, pi_weight=_pi_weight(tup.ring))
    return is_drinfeld_basis(wedge, LevelTuple(m, [mu]))


def _pi_weight(ring):
    if "pi" in ring.index:
        return ring.weights[ring.index["pi"]]
    return 1


def leading_epsilon(field, alphas):
    """det(alpha_i^(q^j)) as a field code."""
    n = len(alphas)
    mat = [[field.frob(a, j) for j in range(n)] for a in alphas]
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = field.mul(term, mat[i][perm[i]])
        total = field.sub(total, term) if inv % 2 else field.add(total, term)
    return total

