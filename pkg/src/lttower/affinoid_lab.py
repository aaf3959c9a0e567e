"""Special affinoids around a CM point and their reduction varieties.

A CM point has coordinates alpha_i * x with alpha_1..alpha_n an F_q-basis of
F_{q^n} and x a formal fractional variable of weight 1.  The affinoid is
parametrized by Y_1..Y_n (weight 0) through explicit coordinate changes, and
delta of the new coordinates is congruent to t + C(Y)^(q^m) t^(q^m), where t
is delta of the CM point and C is a polynomial over F_p.

Three labelings of that polynomial appear here:

* ``congruence_polynomial``: the Y_i exactly as they enter the coordinates,
  including the sign, so that the congruence holds verbatim;
* ``ball_polynomial``: Y_i twisted by Frobenius so that Y_i is the e_i
  coordinate of the finite algebra S; then U(F_{q^n}) acts by right
  translation with N(y u) = N(y) + N(u), and the diagonal torus acts by
  Y_i -> a^(q^i - 1) Y_i;
* ``n_polynomial``: the ball labeling read backwards (Y_k -> Y_(n+1-k)), the
  normalization in which n = 2 gives Y_1 + Y_1^q - Y_2^(q+1).
"""

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .det_map import delta_standard, leading_epsilon, min_window
from .frac_series import INF, FracSeries, PrecisionError, SeriesRing
from .gf_tower import FieldDesc, make_tower
from .group_actions import GLElement, TwistedSeries
from .pi_series import PiSeries

DEFAULT_BUDGET = 1 << 24


class BudgetError(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, needed, budget):
        super().__init__(f"enumeration needs {needed} evaluations, budget is {budget}")
        self.needed = needed
        self.budget = budget


def _budget(budget):
    if budget is not None:
        return budget
    return int(os.environ.get("LTTOWER_BUDGET", DEFAULT_BUDGET))


# ----- CM data and coordinates -----

class CMData:
    """n, q, m and an F_q-basis alpha of F_{q^n} (default: powers of the generator)."""

    def __init__(self, n, q, m, alphas=None, tower=None):
        if n < 1 or m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        self.n, self.q, self.m = n, q, m
        self.tower = tower or make_tower(q, n)
        self.K = self.tower.base()
        self.L = self.tower[self.tower.index(next(F for F in self.tower.fields if F.qdegree == n))]
        L = self.L
        if alphas is None:
            alphas = [L.pow(L.gen, i) for i in range(n)]
        self.alphas = [a.value if hasattr(a, "value") else a for a in alphas]
        if len(self.alphas) != n:
            raise ValueError("need n basis elements")
        self.epsilon = leading_epsilon(L, self.alphas)
        if self.epsilon == 0:
            raise ValueError("alphas are not an F_q-basis of F_{q^n}")
        self._coords_cache = None

    @property
    def odd(self):
        return self.m % 2 == 1

    def ring(self, cap=None):
        names = ["x"] + [f"Y{i}" for i in range(1, self.n + 1)]
        weights = [1] + [0] * self.n
        if cap is None:
            return SeriesRing(self.L, names, weights)
        return SeriesRing(self.L, names, weights, cap=(names[1:], cap))

    def val_t(self):
        return (self.q ** self.n - 1) // (self.q - 1)

    # coordinates of F_{q^n} in the basis alpha
    def basis_coordinates(self, code):
        if self._coords_cache is None:
            L, q = self.L, self.q
            fq = [c for c in range(L.order) if L.frob(c, 1) == c]
            table = {}
            for vec in itertools.product(range(q), repeat=self.n):
                acc = 0
                for k, a in zip(vec, self.alphas):
                    acc = L.add(acc, L.mul(fq[k], a))
                table[acc] = tuple(fq[k] for k in vec)
            self._coords_cache = table
        return self._coords_cache[code]

    def __repr__(self):
        return f"CMData(n={self.n}, q={self.q}, m={self.m})"


def cm_t(cm, window=None, prec=None):
    """t = delta(alpha_1 x, ..., alpha_n x)."""
    ring = cm.ring()
    x = ring.gen("x")
    pts = [x.scale_code(a) for a in cm.alphas]
    if prec is None:
        prec = cm.val_t() * cm.q ** cm.m + 1
    if window is None:
        window = min_window(cm.n, cm.q, 1, prec)
    return delta_standard(pts, window, prec)


def coords(cm):
    """X_1..X_n of the affinoid as exact series in x, Y_1..Y_n.

    Odd m: X_i = a_i x + sum_{r<n} (a_i x Y_r)^(q^((m-1)n/2 + r)) + (a_i x Y_n)^(q^(mn)).
    Even m: X_i = a_i x + sum_{r<n} (a_i^(q^r) x Y_r)^(q^(mn/2)) + (a_i x Y_n)^(q^(mn)).
    """
    ring = cm.ring()
    L = cm.L
    n, m = cm.n, cm.m
    out = []
    for a in cm.alphas:
        acc = ring.monomial({"x": 1}).scale_code(a)
        for r in range(1, n):
            if cm.odd:
                acc = acc + ring.monomial({"x": 1, f"Y{r}": 1}).scale_code(a).frob((m - 1) * n // 2 + r)
            else:
                acc = acc + ring.monomial({"x": 1, f"Y{r}": 1}).scale_code(L.frob(a, r)).frob(m * n // 2)
        acc = acc + ring.monomial({"x": 1, f"Y{n}": 1}).scale_code(a).frob(m * n)
        out.append(acc)
    return out


# ----- the polynomial N -----

class NPolynomial:
    """Polynomial in Y_1..Y_n with coefficients in F_p (dict exponent tuple -> int mod p)."""

    def __init__(self, n, p, terms):
        self.n = n
        self.p = p
        self.terms = {tuple(e): c % p for e, c in terms.items() if c % p}

    def __eq__(self, other):
        return isinstance(other, NPolynomial) and (self.n, self.p, self.terms) == (other.n, other.p, other.terms)

    def __hash__(self):
        return hash((self.n, self.p, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def relabel(self, perm):
        """New polynomial with Y_(i+1) renamed to Y_(perm[i]+1)."""
        out = {}
        for e, c in self.terms.items():
            f = [0] * self.n
            for i, k in enumerate(e):
                f[perm[i]] = k
            out[tuple(f)] = c
        return NPolynomial(self.n, self.p, out)

    def scale(self, c):
        return NPolynomial(self.n, self.p, {e: v * c for e, v in self.terms.items()})

    def partial(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i] % self.p:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = (out.get(tuple(f), 0) + c * e[i]) % self.p
        return NPolynomial(self.n, self.p, out)

    def constant_partial(self):
        """Index of a variable whose partial derivative is a nonzero constant, else None."""
        for i in range(self.n):
            d = self.partial(i)
            if list(d.terms) == [(0,) * self.n]:
                return i
        return None

    def evaluate(self, field, point):
        acc = 0
        for e, c in self.terms.items():
            term = field.from_int(c)
            for y, k in zip(point, e):
                term = field.mul(term, field.pow(y, k))
            acc = field.add(acc, term)
        return acc

    def evaluate_array(self, field, cols):
        """Vectorized evaluation; cols[i] is a numpy array of codes for Y_(i+1)."""
        size = len(cols[0])
        acc = np.zeros(size, dtype=np.int64)
        for e, c in self.terms.items():
            term = np.full(size, field.from_int(c), dtype=np.int64)
            for col, k in zip(cols, e):
                if k:
                    term = field.vmul(term, field.vpow(col, k))
            acc = field.vadd(acc, term)
        return acc

    def as_series(self, ring):
        terms = {}
        for e, c in self.terms.items():
            mono = {f"Y{i + 1}": k for i, k in enumerate(e) if k}
            terms.update(ring.monomial(mono, c).terms)
        return FracSeries(ring, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), [-k for k in t[0]])):
            mono = "*".join(f"Y_{i + 1}" + (f"^{k}" if k != 1 else "") for i, k in enumerate(e) if k) or "1"
            neg = self.p > 2 and c == self.p - 1
            mag = 1 if neg else c
            body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append(("-" if neg else "+") + body)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    __repr__ = __str__

    def to_dict(self):
        return {"n": self.n, "p": self.p, "terms": [{"exps": list(e), "coeff": c} for e, c in sorted(self.terms.items())]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["n"], d["p"], {tuple(t["exps"]): t["coeff"] for t in d["terms"]})


def _poly_mul(a, b, p, m):
    """Product in F_p[Y][pi]/(pi^(m+1)); keys are (pi exponent, Y exponent tuple)."""
    out = {}
    for (ka, ea), ca in a.items():
        for (kb, eb), cb in b.items():
            k = ka + kb
            if k > m:
                continue
            key = (k, tuple(x + y for x, y in zip(ea, eb)))
            out[key] = (out.get(key, 0) + ca * cb) % p
    return {key: c for key, c in out.items() if c}


def psi_matrix(n, q, m):
    """Entries as dicts (pi exponent, Y exponents) -> int, indices 0..n-1.

    Diagonal: 1 + pi^m Y_n^(q^b).  Off the diagonal, for odd m,
    E[a][b] = pi^e Y_((b-a) mod n)^(q^b) with e = (m-1)/2 if a < b and (m+1)/2
    otherwise; for even m, E[a][b] = pi^(m/2) Y_((a-b) mod n)^(q^b).
    """
    zero = (0,) * n

    def ymono(idx, k):
        e = [0] * n
        e[idx - 1] = k
        return tuple(e)

    mat = []
    for a in range(n):
        row = []
        for b in range(n):
            if a == b:
                row.append({(0, zero): 1, (m, ymono(n, q ** b)): 1})
            elif m % 2:
                e = (m - 1) // 2 if a < b else (m + 1) // 2
                row.append({(e, ymono((b - a) % n, q ** b)): 1} if e <= m else {})
            else:
                row.append({(m // 2, ymono((a - b) % n, q ** b)): 1})
        mat.append(row)
    return mat


def _n_matrix_coefficient(n, q, m):
    p = FieldDesc(_prime_of(q), 1).p
    mat = psi_matrix(n, q, m)
    total = {}
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = {(0, (0,) * n): 1}
        for i in range(n):
            term = _poly_mul(term, mat[i][perm[i]], p, m)
            if not term:
                break
        sgn = -1 if inv % 2 else 1
        for key, c in term.items():
            total[key] = (total.get(key, 0) + sgn * c) % p
    return NPolynomial(n, p, {e: c for (k, e), c in total.items() if k == m})


def _prime_of(q):
    return next(k for k in range(2, q + 1) if q % k == 0)


def congruence_polynomial(n, q, m):
    """C with delta(coords) = t + C^(q^m) t^(q^m) modulo higher order, in the coordinate labeling."""
    N = _n_matrix_coefficient(n, q, m)
    return N.scale(-1) if ((n - 1) * m) % 2 else N


def ball_polynomial(n, q, m):
    """N in the coordinates of S, where U(F_{q^n}) acts by right translation (unsigned).

    In these coordinates N(y u) = N(y) + N(u) for y, u in U(F_{q^n}).
    Even m: the coordinate labeling.  Odd m >= 3: Y_r <-> Y_(n-r) for r < n,
    which gives the same polynomial as even m.  m = 1: Y_r is replaced by
    Y_r^(q^(n-1-r)) for r < n, a Frobenius twist that is bijective on points.
    """
    N = _n_matrix_coefficient(n, q, m)
    if m % 2 == 0:
        return N
    if m >= 3:
        return N.relabel([n - 2 - i if i < n - 1 else n - 1 for i in range(n)])
    twist = [q ** (n - 1 - r) for r in range(1, n)] + [1]
    return NPolynomial(n, N.p, {tuple(e * t for e, t in zip(mono, twist)): c for mono, c in N.terms.items()})


def n_polynomial(n, q, m):
    """N with indices read backwards; for n = 2 this is Y_1 + Y_1^q - Y_2^(q+1)."""
    return ball_polynomial(n, q, m).relabel([n - 1 - i for i in range(n)])


def verify_congruence(cm, prec=None, cap=None, window=None):
    """x-valuation of delta(coords) - t - C^(q^m) t^(q^m).

    The congruence holds when the result exceeds q^m * val(t).  ``cap`` bounds
    the total Y-degree of products (the identity is checked in the quotient by
    that monomial ideal); coordinates and their q-power shifts stay exact.
    """
    q, m, n = cm.q, cm.m, cm.n
    bound = q ** m * cm.val_t()
    if prec is None:
        prec = bound + 1
    if prec <= bound:
        raise ValueError(f"precision must exceed {bound} to test the congruence")
    ring = cm.ring()
    work = cm.ring(cap)
    if window is None:
        window = min_window(n, q, 1, prec)
    X = coords(cm)
    lhs = delta_standard(X, window, prec, product_ring=work if cap is not None else None)
    t = delta_standard([ring.gen("x").scale_code(a) for a in cm.alphas], window, prec)
    t = FracSeries(work, dict(t.terms), t.prec)
    C = congruence_polynomial(n, q, m).as_series(work)
    corr = C.frob(m).mul(t.frob(m), prec)
    resid = (lhs - t - corr).truncate(prec)
    return resid.effective_valuation()


# ----- points on the reduction -----

def _field_for(n, q, r):
    return make_tower(q, n * r).top()


def _chunks(total, parts):
    step = -(-total // parts)
    return [(s, min(total, s + step)) for s in range(0, total, step)]


def _grid(field, n, lo, hi):
    idx = np.arange(lo, hi, dtype=np.int64)
    cols = []
    for _ in range(n):
        idx, d = np.divmod(idx, field.order)
        cols.append(d)
    return cols


def _count_range(args):
    N, field, lo, hi, with_partials = args
    cols = _grid(field, N.n, lo, hi)
    mask = N.evaluate_array(field, cols) == 0
    if with_partials:
        for i in range(N.n):
            d = N.partial(i)
            if d.is_zero():
                continue
            mask &= d.evaluate_array(field, cols) == 0
    return int(mask.sum())


def _exhaust(N, field, with_partials, budget, workers):
    total = field.order ** N.n
    b = _budget(budget)
    if total > b:
        raise BudgetError(total, b)
    pieces = _chunks(total, max(1, min(64, total // 4096 or 1)))
    jobs = [(N, field, lo, hi, with_partials) for lo, hi in pieces]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return sum(pool.map(_count_range, jobs))
    return sum(map(_count_range, jobs))


def count_points(N, field, budget=None, workers=1):
    """Number of F-rational zeros of N by exhaustion."""
    if N.is_zero():
        raise ValueError("N vanishes identically")
    return _exhaust(N, field, False, budget, workers)


def singular_points(N, field, budget=None, workers=1):
    """Number of common zeros of N and all its partial derivatives in F^n."""
    return _exhaust(N, field, True, budget, workers)


def is_nonsingular(N, field, budget=None, workers=1):
    """No common zero of N and its partials over ``field``.

    Exhaustive when the field fits the budget; otherwise a nonzero constant
    partial derivative settles it, and failing that a BudgetError is raised.
    """
    try:
        return singular_points(N, field, budget, workers) == 0
    except BudgetError:
        if N.constant_partial() is not None:
            return True
        raise


def variety_count(n, q, m, r, budget=None, workers=1):
    """Points of N = 0 over F_{q^(n r)}."""
    return count_points(n_polynomial(n, q, m), _field_for(n, q, r), budget, workers)


def fit_two_term(counts, q, sign):
    """Fit c_r = A q^(2r) + B (sign q)^r on r = 1, 2 and return (A, B) as Fractions."""
    c1, c2 = Fraction(counts[0]), Fraction(counts[1])
    a1, b1 = Fraction(q ** 2), Fraction(sign * q)
    a2, b2 = Fraction(q ** 4), Fraction((sign * q) ** 2)
    det = a1 * b2 - a2 * b1
    A = (c1 * b2 - c2 * b1) / det
    B = (a1 * c2 - a2 * c1) / det
    return A, B


# ----- the algebra S and the group U(F_{q^n}) -----

class SAlgebra:
    """F_{q^n}-algebra with basis 1, e_1..e_n, e_i a = a^(q^i) e_i.

    m = 1: e_i e_j = e_(i+j) if i + j <= n, else 0.
    m >= 2: e_i e_j = e_n if i + j = n, else 0.
    Elements are tuples (c_0, c_1, ..., c_n) of codes.
    """

    def __init__(self, n, q, m, field=None, check=True):
        self.n, self.q, self.m = n, q, m
        self.field = field or make_tower(q, n).top()
        if self.field.qdegree != n:
            raise ValueError("S is defined over F_{q^n}")
        self.table = {}
        for i in range(n + 1):
            for j in range(n + 1):
                self.table[(i, j)] = self._rule(i, j)
        if check and self.field.order <= 64:
            self.check_associative()

    def _rule(self, i, j):
        n = self.n
        if i == 0:
            return j
        if j == 0:
            return i
        if self.m == 1:
            return i + j if i + j <= n else None
        return n if i + j == n else None

    def mul(self, a, b):
        F = self.field
        out = [0] * (self.n + 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                k = self.table[(i, j)]
                if k is None:
                    continue
                out[k] = F.add(out[k], F.mul(x, F.frob(y, i)))
        return tuple(out)

    def vmul(self, a, b):
        """Vectorized product; a and b are lists of n+1 numpy code arrays."""
        F = self.field
        size = len(a[0])
        out = [np.zeros(size, dtype=np.int64) for _ in range(self.n + 1)]
        for i in range(self.n + 1):
            for j in range(self.n + 1):
                k = self.table[(i, j)]
                if k is None:
                    continue
                out[k] = F.vadd(out[k], F.vmul(a[i], F.vpow(b[j], self.q ** i)))
        return out

    def check_associative(self):
        """Exhaustive on monomials a e_i with a in F_{q^n}; biadditivity does the rest.

        (a e_i)(b e_j) = a b^(q^i) e_(i j), so each triple of basis indices
        needs one vectorized comparison over all (a, b, c).
        """
        F, q = self.field, self.q
        size = F.order
        grid = np.arange(size ** 3, dtype=np.int64)
        a, rest = grid % size, grid // size
        b, c = rest % size, rest // size
        for i, j, k in itertools.product(range(self.n + 1), repeat=3):
            ij = self.table[(i, j)]
            left_idx = None if ij is None else self.table[(ij, k)]
            jk = self.table[(j, k)]
            right_idx = None if jk is None else self.table[(i, jk)]
            left = None
            if left_idx is not None:
                left = F.vmul(F.vmul(a, F.vpow(b, q ** i)), F.vpow(c, q ** ij))
            right = None
            if right_idx is not None:
                right = F.vmul(a, F.vpow(F.vmul(b, F.vpow(c, q ** j)), q ** i))
            if left is None and right is None:
                continue
            if left_idx != right_idx or (left != right).any():
                raise ArithmeticError(f"multiplication rule is not associative at e_{i} e_{j} e_{k}")
        return True

    def table_rows(self):
        """Basis products as strings, for display."""
        name = ["1"] + [f"e_{i}" for i in range(1, self.n + 1)]
        return [[name[self.table[(i, j)]] if self.table[(i, j)] is not None else "0"
                 for j in range(self.n + 1)] for i in range(self.n + 1)]


def u_mul(S, y, z):
    """(1 + sum y_i e_i)(1 + sum z_i e_i) on coordinate tuples (y_1..y_n)."""
    prod = S.mul((1,) + tuple(y), (1,) + tuple(z))
    if prod[0] != 1:
        raise ArithmeticError("product left the unipotent group")
    return prod[1:]


def u_inverse(S, y):
    """Inverse of 1 + v through the finite geometric series sum (-v)^k."""
    F = S.field
    v = (0,) + tuple(y)
    neg = tuple(F.neg(c) for c in v)
    acc = (1,) + (0,) * S.n
    power = (1,) + (0,) * S.n
    for _ in range(S.n):
        power = S.mul(power, neg)
        acc = tuple(F.add(a, b) for a, b in zip(acc, power))
    return acc[1:]


def _u_inverse_columns(S, cols):
    """Vectorized u_inverse: columns of (1 + v)^-1 = sum_k (-v)^k."""
    F = S.field
    size = len(cols[0])
    one = np.ones(size, dtype=np.int64)
    zero = np.zeros(size, dtype=np.int64)
    minus = np.full(size, F.minus_one, dtype=np.int64)
    neg = [zero] + [F.vmul(c, minus) for c in cols]
    acc = [one] + [zero] * S.n
    power = list(acc)
    for _ in range(S.n):
        power = S.vmul(power, neg)
        acc = [F.vadd(x, y) for x, y in zip(acc, power)]
    return acc


def u_elements(S):
    """All points of U(F_{q^n}) as numpy columns (y_1..y_n)."""
    F = S.field
    return _grid(F, S.n, 0, F.order ** S.n)


def check_u_group(S, budget=None, chunk=1 << 18):
    """Identity and inverses on every point of U(F_{q^n}), closure from the table.

    Points are processed in chunks; a BudgetError is raised when the group
    has more points than the budget allows.  Associativity is inherited
    from S and checked there.
    """
    F = S.field
    n = S.n
    total = F.order ** n
    b = _budget(budget)
    if total > b:
        raise BudgetError(total, b)
    # closure for every pair: no product of e_i, e_j (i, j >= 1) has a 1-component
    if any(S.table[(i, j)] == 0 for i in range(1, n + 1) for j in range(1, n + 1)):
        return False
    for lo in range(0, total, chunk):
        cols = _grid(F, n, lo, min(total, lo + chunk))
        size = len(cols[0])
        one = np.ones(size, dtype=np.int64)
        zero = np.zeros(size, dtype=np.int64)
        full = [one] + cols
        ident = [one] + [zero] * n
        for got in (S.vmul(full, ident), S.vmul(ident, full)):
            if any((g != c).any() for g, c in zip(got, full)):
                return False
        inv = _u_inverse_columns(S, cols)
        for got in (S.vmul(full, inv), S.vmul(inv, full)):
            if (got[0] != 1).any() or any((g != 0).any() for g in got[1:]):
                return False
    return S.check_associative() if F.order <= 64 else True


def augmentation_nilpotent(S):
    """Every product of n + 1 basis vectors e_i (i >= 1) is zero.

    Together with associativity this makes 1 + v invertible with inverse
    sum_k (-v)^k for every v, so U(F_{q^n}) is a group without enumeration.
    """
    n = S.n
    level = set(range(1, n + 1))
    for _ in range(n):
        level = {S.table[(i, j)] for i in level for j in range(1, n + 1)} - {None}
        if 0 in level:
            return False
    return not level


# ----- the stabilizer action on the reduction -----

def jaction(S, point, actor):
    """Action on U-coordinates (y_1..y_n).

    actor = ("diag", a): y_i -> a^(q^i - 1) y_i, y_n fixed;
    actor = ("frobenius", k): y_i -> y_i^(q^k);
    actor = ("u", u): right multiplication by the U-point u.
    """
    F = S.field
    kind, val = actor
    if kind == "diag":
        if val == 0:
            raise ValueError("diagonal actor must be a unit")
        out = [F.mul(F.pow(val, S.q ** i - 1), y) for i, y in enumerate(point[:-1], start=1)]
        return tuple(out) + (point[-1],)
    if kind == "frobenius":
        return tuple(F.frob(y, val) for y in point)
    if kind == "u":
        return u_mul(S, point, val)
    raise ValueError(f"unknown actor {kind}")


def conjugate(S, point, a):
    """a^-1 (1 + sum y_i e_i) a in S."""
    F = S.field
    u = (1,) + tuple(point)
    out = S.mul(S.mul((F.inv(a),) + (0,) * S.n, u), (a,) + (0,) * S.n)
    return out[1:]


def check_jaction_preservation(n, q, m, labeling="ball", budget=None):
    """Whether the diagonal action preserves the zero locus of N over F_{q^n}.

    Returns a report dict; ``labeling`` is "ball" (S coordinates) or "reversed"
    (the n_polynomial indexing).  Nothing is asserted here.
    """
    N = ball_polynomial(n, q, m) if labeling == "ball" else n_polynomial(n, q, m)
    S = SAlgebra(n, q, m, check=False)
    F = S.field
    total = F.order ** n
    b = _budget(budget)
    if total * (F.order - 1) > b:
        raise BudgetError(total * (F.order - 1), b)
    cols = _grid(F, n, 0, total)
    on = N.evaluate_array(F, cols) == 0
    for a in range(1, F.order):
        moved = [F.vmul(col, np.full(total, F.pow(a, q ** (i + 1) - 1), dtype=np.int64)) if i < n - 1 else col
                 for i, col in enumerate(cols)]
        still = N.evaluate_array(F, moved) == 0
        bad = np.nonzero(on & ~still)[0]
        if len(bad):
            k = int(bad[0])
            return {"preserved": False, "labeling": labeling, "actor": a,
                    "point": [int(c[k]) for c in cols]}
    return {"preserved": True, "labeling": labeling, "actor": None, "point": None}


# ----- membership in U and U_D, reduction to U(F_{q^n}) -----

def sigma_matrix(cm, coeffs):
    """Matrix over F_q (codes of K) of v -> sum_j c_j v^(q^j) in the basis alpha (column convention)."""
    L, K = cm.L, cm.K
    tower = cm.tower
    down = tower.down_table(tower.index(K), tower.index(L))
    n = cm.n
    cols = []
    for a in cm.alphas:
        img = 0
        for j, c in coeffs.items():
            img = L.add(img, L.mul(c, L.frob(a, j)))
        cols.append([down[v] for v in cm.basis_coordinates(img)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def sigma_decompose(cm, mat):
    """c_0..c_(n-1) in F_{q^n} with mat = sum_j c_j sigma^j, by solving the Moore system."""
    L, K = cm.L, cm.K
    tower = cm.tower
    up = tower.up_table(tower.index(K), tower.index(L))
    n = cm.n
    # images of the basis vectors
    imgs = []
    for j in range(n):
        acc = 0
        for i in range(n):
            acc = L.add(acc, L.mul(up[mat[i][j]], cm.alphas[i]))
        imgs.append(acc)
    # solve sum_k c_k alpha_i^(q^k) = imgs[i]
    A = [[L.frob(a, k) for k in range(n)] + [imgs[i]] for i, a in enumerate(cm.alphas)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        inv = L.inv(A[col][col])
        A[col] = [L.mul(v, inv) for v in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [L.sub(v, L.mul(f, w)) for v, w in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def gl_sigma_coefficients(cm, g, depth):
    """c[(j, k)] for pi-degrees k < depth; raises if g is truncated too early."""
    n = cm.n
    for row in g.matrix:
        for e in row:
            if e.prec < depth:
                raise PrecisionError(f"entries known to pi^{e.prec}, need pi^{depth}")
    out = {}
    for k in range(depth):
        mat = [[g.matrix[i][j].coeffs.get(k, 0) for j in range(n)] for i in range(n)]
        for j, c in enumerate(sigma_decompose(cm, mat)):
            if c:
                out[(j, k)] = c
    return out


def l_element(cm, terms, prec=INF):
    """GLElement for sum over (j, k) of c pi^k sigma^j, terms {(j, k): code}."""
    n = cm.n
    K = cm.K
    entries = [[{} for _ in range(n)] for _ in range(n)]
    by_k = {}
    for (j, k), c in terms.items():
        by_k.setdefault(k, {})[j] = c
    for k, coeffs in by_k.items():
        mat = sigma_matrix(cm, coeffs)
        for i in range(n):
            for j in range(n):
                if mat[i][j]:
                    entries[i][j][k] = mat[i][j]
    return GLElement([[PiSeries(K, entries[i][j], prec) for j in range(n)] for i in range(n)], check=False)


def membership_u(cm, elem):
    """Membership in U (for a GLElement) or U_D (for a TwistedSeries)."""
    n, m = cm.n, cm.m
    if isinstance(elem, GLElement):
        half = -(-m // 2)
        c = gl_sigma_coefficients(cm, elem, m)
        if c.get((0, 0), 0) != 1:
            return False
        for (j, k), v in c.items():
            if j == 0 and 0 < k < m:
                return False
            if j >= 1 and k < half:
                return False
        return True
    if isinstance(elem, TwistedSeries):
        half = m // 2
        need = max(n * (m - 1), n * half - 1) + 1
        if elem.prec < need:
            raise PrecisionError(f"series known to varpi^{elem.prec}, need varpi^{need}")
        if elem.valuation() < 0:
            return False
        if elem.coeffs.get(0, 0) != 1:
            return False
        for k, a in elem.coeffs.items():
            t, i = divmod(k, n)
            if i == 0 and 0 < t < m:
                return False
            if i != 0 and t < half:
                return False
        return True
    raise TypeError("expected a GLElement or a TwistedSeries")


def reduce_to_s(cm, g, b):
    """Image of (g, b) in U x U_D under the surjection to U(F_{q^n})."""
    n, m = cm.n, cm.m
    L = cm.L
    if not membership_u(cm, g) or not membership_u(cm, b):
        raise ValueError("element is not in U x U_D")
    c = gl_sigma_coefficients(cm, g, m + 1)
    if b.prec <= n * m:
        raise PrecisionError(f"series known to varpi^{b.prec}, need varpi^{n * m + 1}")
    a = b.coeffs
    out = []
    if m % 2 == 0:
        for i in range(1, n):
            out.append(c.get((i, m // 2), 0))
        out.append(L.sub(c.get((0, m), 0), a.get(n * m, 0)))
    else:
        base = n * (m - 1) // 2
        for i in range(1, n):
            out.append(a.get(base + i, 0))
        out.append(L.sub(a.get(n * m, 0), c.get((0, m), 0)))
    return tuple(out)

