"""Truncated Laurent series in one variable pi over a finite field.

Used for elements of O_K = F_q[[pi]], O_L = F_{q^n}[[pi]], their fraction
fields, matrix entries of group elements and isocrystals.  A series is a
sparse dict exponent -> coefficient code with an integer (or infinite)
precision: coefficients of pi^k for k >= prec are unknown.
"""

import itertools
import math

from .frac_series import INF, PrecisionError
from .gf_tower import FieldElem


class PiSeries:
    __slots__ = ("field", "coeffs", "prec")

    def __init__(self, field, coeffs=None, prec=INF):
        self.field = field
        self.prec = prec
        out = {}
        for k, c in (coeffs or {}).items():
            if isinstance(c, FieldElem):
                c = c.value
            if c and k < prec:
                out[int(k)] = c
        self.coeffs = out

    @classmethod
    def from_list(cls, field, values, start=0, prec=INF):
        """Coefficients given in order from pi^start (FieldElem, code or int)."""
        out = {}
        for i, v in enumerate(values):
            if isinstance(v, FieldElem):
                v = v.value
            out[start + i] = v
        return cls(field, out, prec)

    @classmethod
    def const(cls, field, c, prec=INF):
        if isinstance(c, FieldElem):
            c = c.value
        elif isinstance(c, int):
            c = field.from_int(c)
        return cls(field, {0: c}, prec)

    @classmethod
    def pi_power(cls, field, k=1, prec=INF):
        return cls(field, {k: 1}, prec)

    # ----- queries -----
    def valuation(self):
        return min(self.coeffs) if self.coeffs else INF

    def effective_valuation(self):
        v = self.valuation()
        return v if v < self.prec else self.prec

    def coefficient(self, k):
        if k >= self.prec:
            raise PrecisionError(f"coefficient of pi^{k} unknown (precision {self.prec})")
        return FieldElem(self.field, self.coeffs.get(k, 0))

    def code(self, k):
        if k >= self.prec:
            raise PrecisionError(f"coefficient of pi^{k} unknown (precision {self.prec})")
        return self.coeffs.get(k, 0)

    def is_zero(self):
        return not self.coeffs

    def is_unit_integral(self):
        """Valuation exactly 0 (a unit of the power series ring)."""
        return self.valuation() == 0

    def __eq__(self, other):
        if not isinstance(other, PiSeries):
            return NotImplemented
        return self.field == other.field and self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.prec, frozenset(self.coeffs.items())))

    def agrees_with(self, other):
        diff = self - other
        return diff.is_zero()

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return PiSeries(self.field, self.coeffs, prec)

    # ----- arithmetic -----
    def _lift(self, other):
        if isinstance(other, PiSeries):
            if other.field != self.field:
                raise ValueError("field mismatch")
            return other
        if isinstance(other, (int, FieldElem)):
            return PiSeries.const(self.field, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        F = self.field
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = F.add(out.get(k, 0), c)
        return PiSeries(F, out, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return PiSeries(F, {k: F.neg(c) for k, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        F = self.field
        va, vb = self.effective_valuation(), other.effective_valuation()
        prec = min(self.prec + vb, other.prec + va)
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k < prec:
                    out[k] = F.add(out.get(k, 0), F.mul(a, b))
        return PiSeries(F, out, prec)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = PiSeries.const(self.field, 1)
        for _ in range(e):
            result = result * self
        return result

    def inverse(self):
        """Inverse in the Laurent series field; needs a known leading term."""
        v = self.valuation()
        if v == INF:
            raise ZeroDivisionError("series has no known nonzero term")
        F = self.field
        prec = self.prec - 2 * v if self.prec != INF else INF
        # u = self / pi^v has unit constant term
        u = {k - v: c for k, c in self.coeffs.items()}
        if prec == INF:
            top = max(u)
            if top != 0:
                raise PrecisionError("inverse of an exact non-monomial series needs a precision")
            return PiSeries(F, {-v: F.inv(u[0])}, INF)
        inv0 = F.inv(u[0])
        n = prec + v  # u^{-1} needs terms up to pi^(prec + v)
        w = {}
        for k in range(max(n, 0)):
            s = 1 if k == 0 else 0
            for j in range(1, k + 1):
                if j in u and (k - j) in w:
                    s = F.sub(s, F.mul(u[j], w[k - j]))
            w[k] = F.mul(s, inv0)
        return PiSeries(F, {k - v: c for k, c in w.items()}, prec)

    def __truediv__(self, other):
        other = self._lift(other)
        return self * other.inverse()

    def frob(self, k):
        """Apply tau**k to every coefficient (pi is fixed)."""
        F = self.field
        return PiSeries(F, {e: F.frob(c, k) for e, c in self.coeffs.items()}, self.prec)

    def map_field(self, fn, field):
        """Move coefficients to another field via a code map (e.g. a tower embedding)."""
        return PiSeries(field, {k: fn(c) for k, c in self.coeffs.items()}, self.prec)

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            parts = []
            for k in sorted(self.coeffs):
                c = FieldElem(self.field, self.coeffs[k])
                cs = str(c.value) if self.field.degree == 1 else str(c.coeffs)
                parts.append(cs if k == 0 else f"{cs}*pi^{k}")
            body = " + ".join(parts)
        tail = "" if self.prec == INF else f" + O(pi^{self.prec})"
        return f"<{body}{tail}>"

    def to_dict(self):
        return {
            "prec": "inf" if self.prec == INF else int(self.prec),
            "terms": [{"exp": k, "coeff": FieldElem(self.field, c).coeffs} for k, c in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_dict(cls, d, field):
        prec = INF if d["prec"] == "inf" else int(d["prec"])
        return cls(field, {t["exp"]: field(t["coeff"]).value for t in d["terms"]}, prec)


def leibniz_det(mat, one):
    """Determinant by permutation expansion; entries need +, -, * only."""
    n = len(mat)
    total = None
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = one
        for i in range(n):
            term = term * mat[i][perm[i]]
        term = -term if inv % 2 else term
        total = term if total is None else total + term
    return total


def minor(mat, i, j):
    return [row[:j] + row[j + 1:] for k, row in enumerate(mat) if k != i]


def matrix_inverse(mat, one):
    """Inverse through the adjugate; entries must support .inverse()."""
    n = len(mat)
    det = leibniz_det(mat, one)
    dinv = det.inverse()
    if n == 1:
        return [[dinv]]
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = leibniz_det(minor(mat, j, i), one)
            inv[i][j] = (c if (i + j) % 2 == 0 else -c) * dinv
    return inv


def matmul(a, b):
    n, m, k = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            s = a[i][0] * b[0][j]
            for t in range(1, m):
                s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def min_valuation(mat):
    return min((e.effective_valuation() for row in mat for e in row), default=math.inf)
