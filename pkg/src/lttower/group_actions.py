"""Actions of GL_n(O_K), O_D and Weil elements on the fractional series model.

The tower model is a ring of fractional power series in X_1..X_n.  Group
elements act by substitution (pullback):

* g in GL_n(O_K) with entries sum_m a^(ij)_m pi^m sends X_i to
  sum_{j,m} a^(ij)_m X_j^(q^(n m)), because pi acts on the standard module
  by X -> X^(q^n);
* b = sum a_m varpi^m in O_D sends every X_i to sum_m a_m X_i^(q^m);
* a Weil element of degree m twists coefficients by tau^m and sends X to X^(q^-m).

As pullbacks these compose contravariantly: act_gl(h, act_gl(g, s)) equals
act_gl(g h, s), and likewise for act_d.
"""

import json
import math
from fractions import Fraction

from .det_map import delta_standard, min_window
from .formal_modules import wedge_law
from .frac_series import INF, FracSeries, PrecisionError
from .gf_tower import FieldDesc, common_tower, make_tower
from .pi_series import PiSeries, leibniz_det


def _embed_table(src, dst):
    if src == dst:
        return None
    tower = common_tower(src, dst)
    return tower.up_table(tower.index(src), tower.index(dst))


# ----- GL_n(O_K) -----

class GLElement:
    """An n x n matrix over O_K given by PiSeries entries over F_q."""

    def __init__(self, matrix, check=True):
        self.matrix = [list(row) for row in matrix]
        self.n = len(self.matrix)
        self.field = self.matrix[0][0].field
        if check:
            for row in self.matrix:
                for e in row:
                    if e.valuation() < 0:
                        raise ValueError("entries must be integral")
                    if any(self.field.frob(c, 1) != c for c in e.coeffs.values()):
                        raise ValueError("entries must have coefficients in F_q")
            d = self.det()
            if d.prec > 0 and d.valuation() != 0:
                raise ValueError("determinant is not a unit")

    @classmethod
    def from_lists(cls, field, rows, prec=INF):
        """rows[i][j] is a list of pi-coefficients (ints) of entry (i, j)."""
        return cls([[PiSeries.from_list(field, [field.from_int(c) for c in e], prec=prec) for e in row]
                    for row in rows])

    @classmethod
    def identity(cls, field, n):
        one, zero = PiSeries.const(field, 1), PiSeries(field)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, field, n, alpha):
        a, zero = PiSeries.const(field, alpha), PiSeries(field)
        return cls([[a if i == j else zero for j in range(n)] for i in range(n)])

    def det(self):
        return leibniz_det(self.matrix, PiSeries.const(self.field, 1))

    def __mul__(self, other):
        n = self.n
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                s = self.matrix[i][0] * other.matrix[0][j]
                for k in range(1, n):
                    s = s + self.matrix[i][k] * other.matrix[k][j]
                row.append(s)
            rows.append(row)
        return GLElement(rows, check=False)

    def transpose(self):
        n = self.n
        return GLElement([[self.matrix[j][i] for j in range(n)] for i in range(n)], check=False)

    def to_dict(self):
        return {"field": self.field.to_dict(), "matrix": [[e.to_dict() for e in row] for row in self.matrix]}

    @classmethod
    def from_dict(cls, d):
        F = FieldDesc.from_dict(d["field"])
        return cls([[PiSeries.from_dict(e, F) for e in row] for row in d["matrix"]])


def _gl_images(g, ring, names, convention):
    """Images of the named variables under g, with the pi-truncation tail as precision."""
    n = g.n
    if len(names) != n:
        raise ValueError(f"need {n} variables, got {len(names)}")
    q = ring.q
    table = _embed_table(g.field, ring.field)
    step = n if convention == "module" else 1
    images = {}
    for i, nm in enumerate(names):
        terms = {}
        prec = INF
        for j, nj in enumerate(names):
            e = g.matrix[i][j]
            w = ring.weights[ring.index[nj]]
            if e.prec != INF:
                prec = min(prec, Fraction(q) ** (step * e.prec) * w)
            for m, c in e.coeffs.items():
                code = c if table is None else table[c]
                mono = [Fraction(0)] * ring.nvars
                mono[ring.index[nj]] = Fraction(q) ** (step * m)
                terms[tuple(mono)] = code
        images[nm] = FracSeries(ring, terms, prec)
    return images


def act_gl(g, s, names=None, prec=None, convention="module"):
    """Pull back s along X_i -> sum_{j,m} a^(ij)_m X_j^(q^(n m)).

    ``convention="display"`` uses X_j^(q^m) instead; it is kept only to show
    that it is not compatible with the module structure.  If ``prec`` is
    given, an error is raised when the truncation of g cannot support it.
    """
    ring = s.ring
    names = names or [nm for nm, w in zip(ring.names, ring.weights) if w > 0]
    images = _gl_images(g, ring, names, convention)
    out = s.substitute_linear(images)
    if prec is not None:
        if out.prec < prec:
            raise PrecisionError("pi-truncation of g is too short for the requested precision")
        out = out.truncate(prec)
    return out


def act_gl_right(g, s, names=None, prec=None):
    """Right-action convention: act through the transpose of g."""
    return act_gl(g.transpose(), s, names, prec)


def gl_on_points(g, points, convention="module"):
    """Module action on a column of points: (g x)_i = sum_j [g_ij](x_j)."""
    n = g.n
    ring = points[0].ring
    q = ring.q
    table = _embed_table(g.field, ring.field)
    step = n if convention == "module" else 1
    out = []
    for i in range(n):
        acc = ring.zero()
        for j in range(n):
            e = g.matrix[i][j]
            for m, c in e.coeffs.items():
                code = c if table is None else table[c]
                acc = acc + points[j].frob(step * m).scale_code(code)
            if e.prec != INF:
                acc = acc.truncate(q ** (step * e.prec) * points[j].effective_valuation())
        out.append(acc)
    return out


# ----- O_D and D^x -----

class TwistedSeries:
    """sum_m a_m varpi^m with a_m in F_{q^n}, varpi a = a^q varpi, varpi^n = pi.

    ``prec`` is the truncation order: coefficients of varpi^m for m >= prec
    are unknown.  Exponents may be negative.
    """

    __slots__ = ("field", "n", "coeffs", "prec")

    def __init__(self, field, coeffs=None, prec=INF, n=None):
        self.field = field
        self.n = field.qdegree if n is None else n
        if field.qdegree % self.n:
            raise ValueError("coefficient field must contain F_{q^n}")
        self.prec = prec
        self.coeffs = {int(m): c for m, c in (coeffs or {}).items() if c and m < prec}

    @classmethod
    def from_list(cls, field, values, start=0, prec=INF, n=None):
        return cls(field, {start + i: v for i, v in enumerate(values)}, prec, n)

    @classmethod
    def const(cls, field, a, prec=INF, n=None):
        return cls(field, {0: a}, prec, n)

    @classmethod
    def varpi(cls, field, k=1, n=None):
        return cls(field, {k: 1}, INF, n)

    def valuation(self):
        return min(self.coeffs) if self.coeffs else INF

    def effective_valuation(self):
        v = self.valuation()
        return v if v < self.prec else self.prec

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, TwistedSeries) and self.field == other.field and self.n == other.n
                and self.prec == other.prec and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.n, self.prec, frozenset(self.coeffs.items())))

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return TwistedSeries(self.field, self.coeffs, prec, self.n)

    def __add__(self, other):
        F = self.field
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = F.add(out.get(m, 0), c)
        return TwistedSeries(F, out, min(self.prec, other.prec), self.n)

    def __neg__(self):
        F = self.field
        return TwistedSeries(F, {m: F.neg(c) for m, c in self.coeffs.items()}, self.prec, self.n)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return twisted_mul(self, other)

    def twist(self, k):
        """Apply tau^k to every coefficient."""
        F = self.field
        return TwistedSeries(F, {m: F.frob(c, k) for m, c in self.coeffs.items()}, self.prec, self.n)

    def inverse(self, prec=None):
        """Two-sided inverse; the precision must be finite unless b is a monomial."""
        v = self.valuation()
        if v == INF:
            raise ZeroDivisionError("no known nonzero coefficient")
        F = self.field
        lead = self.coeffs[v]
        if len(self.coeffs) == 1 and self.prec == INF:
            # (a varpi^v)^-1 = varpi^-v a^-1 = (a^-1)^(q^-v) varpi^-v
            return TwistedSeries(F, {-v: F.frob(F.inv(lead), -v)}, INF, self.n)
        P = self.prec if prec is None else min(prec + v, self.prec)
        if P == INF:
            raise PrecisionError("inverse of an exact non-monomial series needs a precision")
        # b = a varpi^v (1 + r); (1 + r)^-1 = sum (-r)^k
        head = TwistedSeries(F, {v: lead}, INF, self.n)
        head_inv = head.inverse()
        r = twisted_mul(head_inv, self) - TwistedSeries.const(F, 1, n=self.n)
        depth = P - v
        r = r.truncate(depth)
        acc = TwistedSeries.const(F, 1, prec=depth, n=self.n)
        term = TwistedSeries.const(F, 1, n=self.n)
        neg_r = -r
        for _ in range(depth):
            term = twisted_mul(term, neg_r).truncate(depth)
            if term.is_zero() and term.prec >= depth:
                break
            acc = acc + term
        return twisted_mul(acc, head_inv)

    def is_central(self):
        F = self.field
        return all(m % self.n == 0 and F.frob(c, 1) == c for m, c in self.coeffs.items())

    def to_pi(self, base):
        """A central element as a PiSeries over the subfield ``base`` = F_q."""
        if not self.is_central():
            raise ValueError("element is not central")
        down = None
        if base != self.field:
            tower = common_tower(base, self.field)
            down = tower.down_table(tower.index(base), tower.index(self.field))
        prec = INF if self.prec == INF else math.ceil(self.prec / self.n)
        return PiSeries(base, {m // self.n: (c if down is None else down[c]) for m, c in self.coeffs.items()}, prec)

    def __repr__(self):
        parts = [f"{self.field.element(c).coeffs}*w^{m}" for m, c in sorted(self.coeffs.items())] or ["0"]
        tail = "" if self.prec == INF else f" + O(w^{self.prec})"
        return "<" + " + ".join(parts) + tail + ">"

    def to_dict(self):
        return {
            "field": self.field.to_dict(), "n": self.n,
            "prec": "inf" if self.prec == INF else int(self.prec),
            "terms": [{"exp": m, "coeff": self.field.element(c).coeffs} for m, c in sorted(self.coeffs.items())],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d, field=None):
        F = field or FieldDesc.from_dict(d["field"])
        prec = INF if d["prec"] == "inf" else int(d["prec"])
        return cls(F, {t["exp"]: F(t["coeff"]).value for t in d["terms"]}, prec, d.get("n"))


def twisted_mul(b1, b2):
    """(a varpi^i)(c varpi^j) = a c^(q^i) varpi^(i+j), with big-O bookkeeping."""
    if b1.field != b2.field or b1.n != b2.n:
        raise ValueError("incompatible twisted series")
    F = b1.field
    va, vb = b1.effective_valuation(), b2.effective_valuation()
    prec = min(b1.prec + vb, b2.prec + va)
    out = {}
    for i, a in b1.coeffs.items():
        for j, c in b2.coeffs.items():
            k = i + j
            if k < prec:
                out[k] = F.add(out.get(k, 0), F.mul(a, F.frob(c, i)))
    return TwistedSeries(F, out, prec, b1.n)


def reduced_norm(b, base=None):
    """Reduced norm D -> K as a PiSeries over F_q.

    Left multiplication by b on D viewed as a right L-space with basis
    varpi^0..varpi^(n-1) has matrix M[i][j] = sum_k a_(nk+i-j)^(q^-i) pi^k.
    """
    F = b.field
    n = b.n
    if base is None:
        base = F.tower.base() if F.tower is not None else make_tower(F.q, F.qdegree).base()
    mat = []
    for i in range(n):
        row = []
        for j in range(n):
            coeffs = {}
            for m, c in b.coeffs.items():
                if (m - i + j) % n == 0:
                    coeffs[(m - i + j) // n] = F.frob(c, -i)
            prec = INF if b.prec == INF else math.ceil(Fraction(b.prec - i + j, n))
            row.append(PiSeries(F, coeffs, prec))
        mat.append(row)
    det = leibniz_det(mat, PiSeries.const(F, 1))
    if base == F:
        return det
    tower = common_tower(base, F)
    down = tower.down_table(tower.index(base), tower.index(F))
    try:
        return PiSeries(base, {k: down[c] for k, c in det.coeffs.items()}, det.prec)
    except KeyError:
        raise ArithmeticError("reduced norm left F_q") from None


def _d_images(b, ring, names):
    q = ring.q
    table = _embed_table(b.field, ring.field)
    images = {}
    for nm in names:
        idx = ring.index[nm]
        w = ring.weights[idx]
        terms = {}
        for m, c in b.coeffs.items():
            mono = [Fraction(0)] * ring.nvars
            mono[idx] = Fraction(q) ** m
            terms[tuple(mono)] = c if table is None else table[c]
        prec = INF if b.prec == INF else Fraction(q) ** b.prec * w
        images[nm] = FracSeries(ring, terms, prec)
    return images


def act_d(b, s, names=None, prec=None):
    """Pull back s along X_i -> sum_m a_m X_i^(q^m) in every variable independently."""
    ring = s.ring
    names = names or [nm for nm, w in zip(ring.names, ring.weights) if w > 0]
    out = s.substitute_linear(_d_images(b, ring, names))
    if prec is not None:
        if out.prec < prec:
            raise PrecisionError("truncation of b is too short for the requested precision")
        out = out.truncate(prec)
    return out


def act_d_right(b, s, names=None, prec=None, inv_prec=None):
    """Right-action convention: act through b^-1."""
    return act_d(b.inverse(inv_prec), s, names, prec)


def d_on_points(b, points):
    """[b](x) = sum_m a_m x^(q^m) for each point."""
    ring = points[0].ring
    table = _embed_table(b.field, ring.field)
    out = []
    for x in points:
        acc = ring.zero()
        for m, c in b.coeffs.items():
            acc = acc + x.frob(m).scale_code(c if table is None else table[c])
        if b.prec != INF:
            acc = acc.truncate(ring.q ** b.prec * x.effective_valuation())
        out.append(acc)
    return out


# ----- Weil group -----

def act_weil(m, s):
    """Coefficients by tau^m, every exponent times q^-m."""
    if m == 0:
        return s
    F = s.field
    return s.scale_exponents(Fraction(s.ring.q) ** (-m)).map_coefficients(lambda c: F.frob(c, m))


# ----- determinant compatibility -----

def wedge_scalar(x, series, n):
    """[x] on the reduced wedge law: sum_m c_m ((-1)^(n-1))^m series^(q^m)."""
    law = wedge_law(series.field, n, reduced=True)
    return law.apply(x, series)


def gb_action_on_points(g, b, points, convention="module"):
    return gl_on_points(g, d_on_points(b, points), convention)


def verify_gb_square(g, b, points, prec, convention="module"):
    """Valuation of delta((g, b) x) - [det(g) N(b)](delta(x)).

    The right side uses the reduced determinant law.  The result is the
    effective valuation of the difference; the square commutes to ``prec``
    when it is at least ``prec``.  Truncated inputs that cannot decide the
    square up to ``prec`` raise PrecisionError.
    """
    n = g.n
    ring = points[0].ring
    q = ring.q
    x = g.det() * _to_base(reduced_norm(b), g.field)
    moved = gb_action_on_points(g, b, points, convention)
    minval = min(p.effective_valuation() for p in points)
    minval2 = min(p.effective_valuation() for p in moved)
    lhs = delta_standard(moved, min_window(n, q, minval2, prec), prec)
    base = delta_standard(points, min_window(n, q, minval, prec), prec)
    rhs = wedge_scalar(x, base, n)
    diff = (lhs - rhs).truncate(prec)
    if diff.prec < prec and diff.valuation() >= diff.prec:
        raise PrecisionError(f"inputs determine the square only to {diff.prec}, asked for {prec}")
    return diff.effective_valuation()


def _to_base(pis, field):
    if pis.field == field:
        return pis
    tower = common_tower(field, pis.field)
    down = tower.down_table(tower.index(field), tower.index(pis.field))
    return PiSeries(field, {k: down[c] for k, c in pis.coeffs.items()}, pis.prec)


def random_gl(field, n, rng, degree=2):
    """A random element of GL_n(O_K) with polynomial entries of the given degree."""
    fq = [c for c in range(field.order) if field.frob(c, 1) == c]
    while True:
        rows = [[PiSeries(field, {k: rng.choice(fq) for k in range(degree + 1)}) for _ in range(n)] for _ in range(n)]
        try:
            return GLElement(rows)
        except ValueError:
            continue

