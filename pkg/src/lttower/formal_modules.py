"""One-dimensional formal O_K-module laws with additive underlying group.

In characteristic p the O_K-action of such a law is determined by its
F_q-linear [pi]-series, and for alpha = sum a_m pi^m with a_m in F_q

    [alpha](T) = sum_m a_m [pi]^{(m)}(T),

where [pi]^{(m)} is the m-fold composite.  This is the only way the action is
computed here: additivity of the law and F_q-linearity of each iterate make
the sum an O_K-module action (checked by property tests).

Laws live in a SeriesRing whose first variable is ``T``; the remaining
variables (``pi``, ``u1``, ...) form the coefficient ring.  Points live in
other rings; coefficient variables missing from a point's ring are sent to 0,
so for instance a law over k[[pi]] evaluated on a ring without ``pi`` is its
reduction with pi = 0.
"""

import itertools
from fractions import Fraction

from .frac_series import INF, FracSeries, PrecisionError, SeriesRing, q_power_exponent
from .gf_tower import common_tower, make_tower
from .pi_series import PiSeries


class UndecidableError(PrecisionError):
    """The available precision does not decide the question asked."""


class ModuleLaw:
    """A law given by its [pi]-series in the variable ``T``."""

    def __init__(self, pi_series, height, tag="custom", var="T"):
        self.pi_series = pi_series
        self.ring = pi_series.ring
        self.height = height
        self.tag = tag
        self.var = var
        self._validate()

    def _validate(self):
        ring, t = self.ring, self.ring.index[self.var]
        q = ring.q
        for mono in self.pi_series.terms:
            e = mono[t]
            k = q_power_exponent(e, q) if e else None
            if k is None or k < 0:
                raise ValueError("[pi]-series must be F_q-linear in T")
            if any(x.denominator != 1 for x in mono):
                raise ValueError("coefficient exponents must be integers")
        # linear coefficient is pi (or 0 when the ring has no pi)
        lin = {m: c for m, c in self.pi_series.terms.items() if m[t] == 1}
        if "pi" in ring.index:
            expected = ring.monomial({self.var: 1, "pi": 1}).terms
            if lin != expected:
                raise ValueError("linear coefficient of [pi] must be pi")
        elif lin:
            raise ValueError("linear coefficient must vanish when pi = 0")
        # reduction modulo the coefficient ideal
        red = {m[t]: c for m, c in self.pi_series.terms.items() if all(e == 0 for i, e in enumerate(m) if i != t)}
        if not red or min(red) != Fraction(q) ** self.height:
            raise ValueError("reduction of [pi] must start with a unit times T^(q^height)")

    @property
    def field(self):
        return self.ring.field

    @property
    def coefficient_vars(self):
        return [nm for nm in self.ring.names if nm != self.var]

    def __repr__(self):
        return f"ModuleLaw({self.tag}, height={self.height}, [pi](T)={self.pi_series!r})"

    def to_dict(self):
        return {"tag": self.tag, "height": self.height, "var": self.var, "pi_series": self.pi_series.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls(FracSeries.from_dict(d["pi_series"]), d["height"], d["tag"], d.get("var", "T"))

    # ----- action -----
    def iterate(self, m, prec=INF):
        """[pi^m](T) as a series in the law's ring."""
        g = self.ring.gen(self.var)
        for _ in range(m):
            g = self.pi_series.truncate(prec).compose({self.var: g}).truncate(prec)
        return g

    def alpha_multiple(self, alpha, prec=INF):
        return alpha_multiple(self, alpha, prec)

    def apply(self, alpha, x, prec=INF):
        """[alpha](x) for a point x (a series in some ring)."""
        if isinstance(alpha, int):
            alpha = PiSeries.pi_power(self.field, alpha)
        mult = alpha_multiple(self, alpha, prec)
        return evaluate_at(self, mult, x)


def _move(series, target):
    """Re-express ``series`` in ``target``; variables absent from target are set to 0."""
    src = series.ring
    F = src.field
    out = {}
    pos = [(i, target.index[nm]) for i, nm in enumerate(src.names) if nm in target.index]
    gone = [i for i, nm in enumerate(src.names) if nm not in target.index]
    zero = [Fraction(0)] * target.nvars
    for mono, c in series.terms.items():
        if any(mono[i] for i in gone):
            continue
        full = list(zero)
        for i, j in pos:
            full[j] = mono[i]
        full = tuple(full)
        s = F.add(out.get(full, 0), c)
        if s:
            out[full] = s
        else:
            out.pop(full, None)
    if series.prec == INF:
        prec = INF
    else:
        ratios = [target.weights[j] / src.weights[i] for i, j in pos if src.weights[i] > 0 and target.weights[j] > 0]
        prec = series.prec * min(ratios) if ratios else INF
    return FracSeries(target, out, prec)


def evaluate_at(law, series_in_T, x):
    """Substitute T -> x into a series of the law's ring (coefficients moved to x's ring)."""
    target = x.ring
    if law.var in target.index:
        raise ValueError(f"point ring already uses the law variable {law.var}")
    ext = target.extended([law.var], [0])
    moved = _move(series_in_T, ext)
    return moved.compose({law.var: x.change_ring(ext)}, target=ext).restrict_to(target)


def _embed_coeff(law, alpha, code):
    if alpha.field == law.field:
        return code
    tower = common_tower(alpha.field, law.field)
    return tower.up_table(tower.index(alpha.field), tower.index(law.field))[code]


def alpha_multiple(law, alpha, prec=INF):
    """[alpha](T) = sum_m a_m [pi]^{(m)}(T), truncated at ``prec``.

    A finite precision M of alpha bounds the unknown tail by the valuation of
    [pi^M](T); the linear term alpha*T must survive, otherwise an error is raised.
    """
    F = law.field
    if alpha.valuation() < 0:
        raise ValueError("alpha must be integral")
    M = alpha.prec
    depth = max(alpha.coeffs, default=-1) + 1 if M == INF else M
    step = law.pi_series.truncate(prec)
    g = law.ring.gen(law.var).truncate(prec)
    result = law.ring.zero(prec)
    vanished = False
    for m in range(depth):
        c = alpha.coeffs.get(m, 0)
        if c:
            code = _embed_coeff(law, alpha, c)
            if F.frob(code, 1) != code:
                raise ValueError("coefficients of alpha must lie in F_q")
            result = result + g.scale_code(code)
        if m + 1 < depth or M != INF:
            g = step.compose({law.var: g}).truncate(prec)
            if g.is_zero() and g.prec >= prec:
                vanished = True
                break
    if M != INF and not vanished:
        result = result.truncate(g.effective_valuation())
    v = alpha.valuation()
    lin = None
    if v != INF and "pi" in law.ring.index:
        lin = law.ring.weights[law.ring.index[law.var]] + v * law.ring.weights[law.ring.index["pi"]]
    elif v == 0:
        lin = law.ring.weights[law.ring.index[law.var]]
    if lin is not None and result.prec <= lin:
        raise PrecisionError("precision too small to hold the linear term of [alpha]")
    return result


# ----- standard constructions -----

def standard_law(field, n):
    """G_0 over k: [pi](T) = T^(q^n), with pi acting as 0 on coefficients."""
    ring = SeriesRing(field, ["T"])
    return ModuleLaw(ring.monomial({"T": field.q ** n}), n, "standard")


def universal_law(field, n, pi_weight=1):
    """G^univ: [pi](T) = pi T + u_1 T^q + ... + u_{n-1} T^(q^(n-1)) + T^(q^n)."""
    names = ["T", "pi"] + [f"u{i}" for i in range(1, n)]
    ring = SeriesRing(field, names, [1, pi_weight] + [1] * (n - 1))
    q = field.q
    s = ring.monomial({"T": 1, "pi": 1}) + ring.monomial({"T": q ** n})
    for i in range(1, n):
        s = s + ring.monomial({"T": q ** i, f"u{i}": 1})
    return ModuleLaw(s, n, "universal")


def wedge_law(field, n, reduced=False, pi_weight=1):
    """The determinant law: [pi](T) = pi T + (-1)^(n-1) T^q (pi = 0 when reduced)."""
    sign = 1 if n % 2 else -1
    if reduced:
        ring = SeriesRing(field, ["T"])
        s = ring.monomial({"T": field.q}, sign)
    else:
        ring = SeriesRing(field, ["T", "pi"], [1, pi_weight])
        s = ring.monomial({"T": 1, "pi": 1}) + ring.monomial({"T": field.q}, sign)
    return ModuleLaw(s, 1, "wedge")


def height_one_law(field, pi_weight=1):
    """[pi](T) = pi T + T^q over O_K (or O_L)."""
    ring = SeriesRing(field, ["T", "pi"], [1, pi_weight])
    return ModuleLaw(ring.monomial({"T": 1, "pi": 1}) + ring.monomial({"T": field.q}), 1, "height-one")


# ----- level structures -----

class LevelTuple:
    """n points of a test ring meant as a Drinfeld basis at level m."""

    def __init__(self, m, points):
        if m < 1:
            raise ValueError("level must be at least 1")
        points = list(points)
        ring = points[0].ring
        for x in points:
            if x.ring != ring:
                raise ValueError("points must share one ring")
            if x.terms and x.effective_valuation() <= 0 and not ring.has_ideal:
                raise ValueError("points must be topologically nilpotent")
        self.m = m
        self.points = points
        self.ring = ring


def fq_elements(field):
    """Codes of the elements of F_q inside ``field``."""
    return [c for c in range(field.order) if field.frob(c, 1) == c]


def moore_annihilator(points, var="T", method="recursive"):
    """prod over a in F_q^n of (T - sum a_i x_i), as a series in ``var``.

    The result is F_q-linear in T.  ``method="product"`` multiplies the q^n
    linear factors directly; the default uses the recursion
    P_k(T) = P_{k-1}(T)^q - P_{k-1}(x_k)^(q-1) P_{k-1}(T).
    """
    ring = points[0].ring
    ext = ring if var in ring.index else ring.extended([var], [0])
    pts = [x if x.ring == ext else x.change_ring(ext) for x in points]
    T = ext.gen(var)
    F = ext.field
    q = ext.q
    if method == "product":
        fq = fq_elements(F)
        result = ext.one()
        for coeffs in itertools.product(fq, repeat=len(pts)):
            comb = ext.zero()
            for c, x in zip(coeffs, pts):
                comb = comb + x.scale_code(c)
            result = result * (T - comb)
        return result
    P = T
    for x in pts:
        v = P.compose({var: x}, target=ext) if var in P.ring.index else P
        P = P.frob(1) - v.power(q - 1) * P
    return P


def polynomial_in(series, var):
    """Split a series into {exponent of var: coefficient series without var}."""
    ring = series.ring
    t = ring.index[var]
    parts = {}
    for mono, c in series.terms.items():
        e = mono[t]
        rest = mono[:t] + (Fraction(0),) + mono[t + 1:]
        parts.setdefault(e, {})[rest] = c
    return {e: FracSeries(ring, terms, series.prec) for e, terms in parts.items()}


def divide_polynomial(num, den, var):
    """Euclidean division in var; den must have a unit constant leading coefficient.

    Returns (quotient, remainder) as dicts exponent -> coefficient series.
    """
    ring = num.ring
    F = ring.field
    npoly = polynomial_in(num, var)
    dpoly = polynomial_in(den, var)
    for e in list(npoly) + list(dpoly):
        if e.denominator != 1:
            raise ValueError("division needs integer exponents in the variable")
    ddeg = max(dpoly)
    lead = dpoly[ddeg]
    zero_mono = ring._zero_mono
    if len(lead.terms) != 1 or zero_mono not in lead.terms:
        raise ValueError("leading coefficient of the divisor must be a nonzero constant")
    linv = F.inv(lead.terms[zero_mono])
    rem = dict(npoly)
    quot = {}
    while True:
        live = [e for e, s in rem.items() if not s.is_zero()]
        if not live:
            break
        top = max(live)
        if top < ddeg:
            break
        c = rem.pop(top).scale_code(linv)
        shift = top - ddeg
        quot[shift] = c
        for e, s in dpoly.items():
            if e == ddeg:
                continue
            k = e + shift
            rem[k] = rem.get(k, ring.zero()) - c * s
    return quot, {e: s for e, s in rem.items()}


def is_drinfeld_basis(law, tup):
    """Whether the product over v in (pi^(m-1) O_K / pi^m)^n of (T - phi(v)) is divisible by [pi](T)."""
    ring = tup.ring
    m = tup.m
    ys = [law.apply(m - 1, x) for x in tup.points]
    ext = ring if law.var in ring.index else ring.extended([law.var], [0])
    P = moore_annihilator([y.change_ring(ext) for y in ys], law.var)
    f = _move(law.pi_series, ext)
    _, rem = divide_polynomial(P, f, law.var)
    undecided = False
    for e, s in rem.items():
        if not s.is_zero():
            return False
        if s.prec != INF:
            undecided = True
    if undecided:
        raise UndecidableError("remainder vanishes to the available precision only")
    return True


def verify_modI2(n, q, prec=INF):
    """Check that U_1..U_{n-1} of the Moore annihilator have x-degree >= 2.

    The U_i are the coefficients of T^(q^i) in prod_a (T - sum a_i x_i) with
    symbolic x_1..x_n; each is homogeneous of degree q^n - q^i.
    """
    field = make_tower(q, 1).base()
    names = [f"x{i}" for i in range(1, n + 1)]
    ring = SeriesRing(field, names + ["T"], [1] * n + [0])
    pts = [ring.gen(nm) for nm in names]
    P = moore_annihilator(pts, "T")
    parts = polynomial_in(P, "T")
    t = ring.index["T"]
    for i in range(1, n):
        U = parts.get(Fraction(q ** i))
        if U is None:
            continue
        degs = {sum(e for j, e in enumerate(mono) if j != t) for mono in U.terms}
        if min(degs) < 2 or len(degs) != 1:
            return False
    return True


def annihilator_coefficients(points, var="T"):
    """The U_i (coefficient of T^(q^i)) of the Moore annihilator, i = 0..n-1."""
    P = moore_annihilator(points, var)
    parts = polynomial_in(P, var)
    q = P.ring.q
    return [parts.get(Fraction(q ** i), P.ring.zero()) for i in range(len(points))]


# ----- height one tower -----

def phi_tower(field, m, prec=INF, pi_weight=1):
    """Phi_1, ..., Phi_m for [pi](T) = pi T + T^q, with Eisenstein checks.

    Phi(T) = [pi](T)/T and Phi_k(T) = Phi([pi^(k-1)](T)).
    """
    law = height_one_law(field, pi_weight)
    ring = law.ring
    q = field.q
    t = ring.index["T"]
    pi = ring.index["pi"]
    # divide [pi](T) by T
    phi = FracSeries(ring, {mono[:t] + (mono[t] - 1,) + mono[t + 1:]: c for mono, c in law.pi_series.terms.items()},
                     law.pi_series.prec)
    out = []
    for k in range(1, m + 1):
        inner = law.iterate(k - 1, prec)
        phik = phi.compose({"T": inner}).truncate(prec)
        parts = polynomial_in(phik, "T")
        deg = max(parts)
        if deg != (q - 1) * q ** (k - 1):
            raise PrecisionError(f"Phi_{k} has degree {deg}, expected {(q - 1) * q ** (k - 1)}")
        lead = parts[deg]
        if set(lead.terms) != {ring._zero_mono}:
            raise PrecisionError(f"Phi_{k} leading coefficient is not a unit")
        const = parts.get(Fraction(0))
        if const is None or min(mono[pi] for mono in const.terms) != 1:
            raise PrecisionError(f"Phi_{k} constant term does not have valuation 1")
        for e, s in parts.items():
            if e != deg and any(mono[pi] < 1 for mono in s.terms):
                raise PrecisionError(f"Phi_{k} is not Eisenstein")
        out.append(phik)
    return out


# ----- universal cover points -----

def nilpotency_order(ring, ideal):
    """Smallest k with I^k = 0, for I generated by var^bound over ``ideal``."""
    total = 0
    for nm, b in ideal.items():
        i = ring.index[nm]
        if i not in ring.nil:
            raise ValueError(f"ideal generator {nm} is not nilpotent in the ring")
        N = ring.nil[i]
        b = Fraction(b)
        k = -(-N // b)  # ceil
        total += int(k) - 1
    return total + 1


def reduce_mod(x, ideal):
    """Image of x in R/I (I generated by var^bound)."""
    ring = x.ring
    nil = {ring.names[i]: b for i, b in ring.nil.items()}
    for nm, b in ideal.items():
        nil[nm] = min(Fraction(b), nil.get(nm, Fraction(b)))
    cap = None if ring.cap is None else (tuple(ring.names[i] for i in ring.cap[0]), ring.cap[1])
    quot = SeriesRing(ring.field, ring.names, ring.weights, nil, cap)
    return FracSeries(quot, dict(x.terms), x.prec)


def teichmuller_lift(law, points, ideal, lifts=None):
    """Lift a compatible sequence x_1, x_2, ... of R/I-points of the universal cover.

    ``points`` are representatives in R of the sequence mod I, with
    [pi](x_{i+1}) = x_i modulo I.  The lift is z_i = [pi^k](y_{i+k}) for the
    stabilization depth k = (nilpotency order of I) - 1, where y_i are the
    chosen set-theoretic lifts (default: the given representatives).  Returns
    the lifted sequence z_1, ..., z_{len - k}.
    """
    ring = points[0].ring
    if "pi" in law.ring.index and "pi" in ring.index and "pi" not in ideal:
        raise ValueError("the ideal of definition must contain pi")
    order = nilpotency_order(ring, ideal)
    k = order - 1
    for a, b in zip(points, points[1:]):
        if not reduce_mod(law.apply(1, b) - a, ideal).is_zero():
            raise ValueError("input sequence is not compatible modulo the ideal")
    ys = list(points if lifts is None else lifts)
    for x, y in zip(points, ys):
        if not reduce_mod(x - y, ideal).is_zero():
            raise ValueError("lifts do not reduce to the input")
    if len(ys) <= k:
        raise ValueError(f"need more than {k} terms of the sequence to stabilize")
    zs = [law.apply(k, ys[i + k]) for i in range(len(ys) - k)]
    for a, b in zip(zs, zs[1:]):
        if not (law.apply(1, b) - a).is_zero():
            raise PrecisionError("lifted sequence failed to stabilize")
    return zs


def iext_dimension(n, q, m):
    """k-dimension of k[X_1..X_n]/(X_1,...,X_n)^[q^((m-1)n)], i.e. q^((m-1)n*n)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return q ** ((m - 1) * n * n)
