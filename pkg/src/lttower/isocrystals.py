"""K-isocrystals over k as matrices of a tau-semilinear operator.

Row convention: row i of the matrix holds the coordinates of F(b_i), so for a
row vector v of Laurent series, F(v) = tau(v) @ M.  The standard crystal of
dimension n uses the basis e, Fe, ..., F^(n-1)e and has the companion matrix
with 1's above the diagonal and pi in the lower-left corner.
"""

import json

from .frac_series import INF, PrecisionError
from .gf_tower import FieldDesc
from .pi_series import PiSeries, leibniz_det, matmul, matrix_inverse, min_valuation


class InconclusiveError(PrecisionError):
    """The probe depth was not enough to certify an answer."""


class Isocrystal:
    def __init__(self, matrix, field=None):
        self.matrix = [list(row) for row in matrix]
        self.dim = len(self.matrix)
        if any(len(row) != self.dim for row in self.matrix):
            raise ValueError("matrix must be square")
        self.field = field or self.matrix[0][0].field
        det = self.det()
        if det.is_zero():
            raise ValueError("matrix is not invertible at the available precision")

    def det(self):
        return leibniz_det(self.matrix, PiSeries.const(self.field, 1))

    def inverse_matrix(self):
        return matrix_inverse(self.matrix, PiSeries.const(self.field, 1))

    def frob_matrix(self, k):
        return [[e.frob(k) for e in row] for row in self.matrix]

    def power_matrix(self, k):
        """Matrix of F^k for k >= 1: tau^(k-1)(M) ... tau(M) M in the row convention.

        F^k(v) = tau^k(v) @ M_k with M_k = tau^(k-1)(M) @ ... @ tau(M) @ M.
        """
        acc = self.matrix
        for j in range(1, k):
            acc = matmul(self.frob_matrix(j), acc)
        return acc

    def __eq__(self, other):
        return isinstance(other, Isocrystal) and self.matrix == other.matrix

    def __repr__(self):
        return f"Isocrystal({self.matrix!r})"

    def to_dict(self):
        return {"field": self.field.to_dict(), "matrix": [[e.to_dict() for e in row] for row in self.matrix]}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d):
        F = FieldDesc.from_dict(d["field"])
        return cls([[PiSeries.from_dict(e, F) for e in row] for row in d["matrix"]], F)


def standard(n, field):
    """Companion matrix: F(b_i) = b_{i+1} for i < n-1 and F(b_{n-1}) = pi b_0."""
    zero = PiSeries(field)
    one = PiSeries.const(field, 1)
    mat = [[zero] * n for _ in range(n)]
    for i in range(n - 1):
        mat[i][i + 1] = one
    mat[n - 1][0] = PiSeries.pi_power(field, 1)
    return Isocrystal(mat, field)


def identity(n, field):
    zero = PiSeries(field)
    one = PiSeries.const(field, 1)
    return Isocrystal([[one if i == j else zero for j in range(n)] for i in range(n)], field)


def _row_times(v, mat):
    n = len(mat)
    out = []
    for j in range(n):
        s = v[0] * mat[0][j]
        for i in range(1, n):
            s = s + v[i] * mat[i][j]
        out.append(s)
    return out


def apply(M, v, i=1):
    """F^i(v); negative i uses F^-1(w) = tau^-1(w @ M^-1)."""
    v = list(v)
    if len(v) != M.dim:
        raise ValueError("vector has the wrong dimension")
    if i >= 0:
        for _ in range(i):
            v = _row_times([c.frob(1) for c in v], M.matrix)
    else:
        inv = M.inverse_matrix()
        for _ in range(-i):
            v = [c.frob(-1) for c in _row_times(v, inv)]
    for c in v:
        if c.prec != INF and c.prec <= c.valuation() and not c.is_zero():
            raise PrecisionError("all retained terms lost to precision")
    return v


def top_exterior(M):
    """The determinant crystal: F acts on the top exterior power by det(M)."""
    return Isocrystal([[M.det()]], M.field)


def dual(M):
    """Dual crystal with F*(lambda) = tau o lambda o F^-1; matrix (M^-1)^T.

    With the row convention the dual basis satisfies F*(b_i^*) = sum_k (M^-1)_{ki} b_k^*.
    """
    inv = M.inverse_matrix()
    n = M.dim
    return Isocrystal([[inv[k][i] for k in range(n)] for i in range(n)], M.field)


def inverse_operator_matrix(M):
    """Matrix of F^-1 as a tau^-1-semilinear operator: F^-1(w) = tau^-1(w) @ tau^-1(M^-1)."""
    return [[e.frob(-1) for e in row] for row in M.inverse_matrix()]


def is_nilpotent(M, probe_depth=4, inverse=False):
    """Whether F (or F^-1 when ``inverse``) is topologically nilpotent.

    True is certified when some power F^(d*j), j <= probe_depth, has matrix
    with all entries of valuation >= 1 (then valuations grow without bound by
    submultiplicativity).  False is certified when the matrix of F is integral
    and F^d is not 0 mod pi (the reduction has a bijective part), or when the
    determinant has valuation <= 0.  Anything else is inconclusive.
    """
    if probe_depth < 1:
        raise ValueError("probe_depth must be at least 1")
    d = M.dim
    if inverse:
        base = inverse_operator_matrix(M)
        shift = -1
    else:
        base = M.matrix
        shift = 1

    def twist(mat, j):
        return [[e.frob(shift * j) for e in row] for row in mat]

    acc = base
    power = 1
    for j in range(1, probe_depth + 1):
        while power < d * j:
            acc = matmul(twist(base, power), acc)
            power += 1
        if min_valuation(acc) >= 1:
            return True
    integral = min_valuation(base) >= 0
    if integral:
        return False
    det = leibniz_det(base, PiSeries.const(M.field, 1))
    if det.effective_valuation() <= 0:
        return False
    raise InconclusiveError("nilpotency not decided at this probe depth")


def height_from_pi_image(coeffs):
    """Height of a formal module from the image of pi in k<<tau>>.

    ``coeffs`` maps tau-powers to coefficient codes for the series
    sum_j a_j tau^j; the height is the first j with a_j != 0.
    """
    nz = [j for j, c in coeffs.items() if c]
    if not nz:
        raise ValueError("pi cannot act as zero")
    return min(nz)
