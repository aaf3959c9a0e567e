"""Truncated sparse series with exponents in Z[1/q]_{>=0}.

A ``SeriesRing`` fixes the coefficient field, the ordered variable names and a
nonnegative rational weight per variable.  A ``FracSeries`` is a finite dict
from exponent tuples (``Fraction`` entries) to nonzero coefficient codes,
together with a precision ``prec``: every monomial whose weighted valuation is
at least ``prec`` is unknown.  ``prec`` may be ``INF`` for exact polynomials.

A ring may also carry a monomial ideal that is treated as exactly zero: per
variable nilpotency bounds (``nil``) and a total-degree cap on a group of
variables (``cap``).  These model test rings such as k[e]/(e^16) and the
Y-degree truncation used in the affinoid congruence.
"""

import json
import math
from fractions import Fraction

from .gf_tower import FieldDesc, FieldElem

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when a value is requested beyond the known precision."""


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if math.isinf(x):
            return INF
        raise TypeError("floats are not accepted as exponents")
    if isinstance(x, str):
        return INF if x == "inf" else Fraction(x)
    return Fraction(x)


def _exponent(e):
    """Exponents are exact; a float is accepted only when it is integral."""
    if isinstance(e, float):
        if not e.is_integer():
            raise TypeError("fractional exponents must be given as Fraction, not float")
        e = int(e)
    return Fraction(e)


def _fmt(x):
    if x == INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def q_power_exponent(e, q):
    """Return k if the positive rational e equals q**k for an integer k, else None."""
    e = Fraction(e)
    if e <= 0:
        return None
    k = 0
    while e.denominator == 1 and e.numerator % q == 0 and e > 1:
        e /= q
        k += 1
    if e == 1:
        return k
    while e.numerator == 1 and e.denominator % q == 0:
        e *= q
        k -= 1
    return k if e == 1 else None


class FracExponent:
    """A value num / q**dlog in canonical form (dlog = 0 or q does not divide num)."""

    __slots__ = ("num", "dlog")

    def __init__(self, num, dlog, q):
        if num < 0 or dlog < 0:
            raise ValueError("exponents are nonnegative")
        while dlog > 0 and num % q == 0:
            num //= q
            dlog -= 1
        self.num = num
        self.dlog = dlog

    @classmethod
    def from_value(cls, value, q):
        value = Fraction(value)
        dlog = 0
        while (value * q ** dlog).denominator != 1:
            dlog += 1
            if dlog > 4096:
                raise ValueError(f"{value} is not in Z[1/{q}]")
        return cls(int(value * q ** dlog), dlog, q)

    def value(self, q):
        return Fraction(self.num, q ** self.dlog)

    def __eq__(self, other):
        return isinstance(other, FracExponent) and (self.num, self.dlog) == (other.num, other.dlog)

    def __hash__(self):
        return hash((self.num, self.dlog))

    def __repr__(self):
        return f"FracExponent({self.num}, {self.dlog})"


class SeriesRing:
    """Variables, weights and coefficient field shared by a family of series."""

    def __init__(self, field, names, weights=None, nil=None, cap=None):
        if not isinstance(field, FieldDesc):
            raise TypeError("field must be a FieldDesc")
        self.field = field
        self.q = field.q
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        if weights is None:
            weights = [1] * len(self.names)
        if isinstance(weights, dict):
            weights = [weights.get(nm, 1) for nm in self.names]
        self.weights = tuple(Fraction(w) for w in weights)
        if len(self.weights) != len(self.names) or any(w < 0 for w in self.weights):
            raise ValueError("one nonnegative weight per variable")
        self.index = {nm: i for i, nm in enumerate(self.names)}
        self.nil = {}
        for nm, b in (nil or {}).items():
            self.nil[self.index[nm]] = Fraction(b)
        if cap is not None:
            cnames, bound = cap
            self.cap = (tuple(self.index[nm] for nm in cnames), Fraction(bound))
        else:
            self.cap = None
        self.nvars = len(self.names)
        self._zero_mono = (Fraction(0),) * self.nvars

    # ----- identity -----
    def key(self):
        cap = None if self.cap is None else (tuple(self.names[i] for i in self.cap[0]), self.cap[1])
        nil = tuple(sorted((self.names[i], b) for i, b in self.nil.items()))
        return (self.field.key(), self.names, self.weights, nil, cap)

    def __eq__(self, other):
        return isinstance(other, SeriesRing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"SeriesRing({self.names}, weights={[str(w) for w in self.weights]}, field={self.field!r})"

    @property
    def has_ideal(self):
        return bool(self.nil) or self.cap is not None

    def killed(self, mono):
        """True if the monomial lies in the ring's defining monomial ideal."""
        for i, b in self.nil.items():
            if mono[i] >= b:
                return True
        if self.cap is not None:
            idx, bound = self.cap
            if sum(mono[i] for i in idx) > bound:
                return True
        return False

    def wval(self, mono):
        return sum(w * e for w, e in zip(self.weights, mono) if w)

    # ----- constructors -----
    def zero(self, prec=INF):
        return FracSeries(self, {}, prec)

    def one(self):
        return self.const(1)

    def const(self, c):
        code = self._code(c)
        return FracSeries(self, {self._zero_mono: code} if code else {}, INF)

    def gen(self, name):
        mono = [Fraction(0)] * self.nvars
        mono[self.index[name]] = Fraction(1)
        return FracSeries(self, {tuple(mono): 1}, INF)

    def gens(self):
        return [self.gen(nm) for nm in self.names]

    def monomial(self, exps, coeff=1, prec=INF):
        """Monomial from a dict name -> exponent (or a full tuple)."""
        if isinstance(exps, dict):
            mono = [Fraction(0)] * self.nvars
            for nm, e in exps.items():
                mono[self.index[nm]] = _exponent(e)
            mono = tuple(mono)
        else:
            mono = tuple(_exponent(e) for e in exps)
        code = self._code(coeff)
        return FracSeries(self, {mono: code} if code else {}, prec)

    def from_terms(self, terms, prec=INF):
        out = {}
        F = self.field
        for mono, c in terms.items():
            mono = tuple(_exponent(e) for e in mono)
            code = self._code(c)
            out[mono] = F.add(out.get(mono, 0), code)
        return FracSeries(self, out, prec)

    def _code(self, c):
        if isinstance(c, FieldElem):
            if c.field != self.field:
                raise ValueError("coefficient from another field")
            return c.value
        return self.field.from_int(int(c))

    # ----- ring changes -----
    def extended(self, names, weights=None):
        """A ring with extra variables appended (same field and ideal)."""
        names = [nm for nm in names if nm not in self.index]
        if weights is None:
            weights = [1] * len(names)
        elif isinstance(weights, dict):
            weights = [weights.get(nm, 1) for nm in names]
        nil = {self.names[i]: b for i, b in self.nil.items()}
        cap = None if self.cap is None else (tuple(self.names[i] for i in self.cap[0]), self.cap[1])
        return SeriesRing(self.field, self.names + tuple(names), self.weights + tuple(Fraction(w) for w in weights), nil, cap)

    def with_ideal(self, nil=None, cap=None):
        return SeriesRing(self.field, self.names, self.weights, nil, cap)

    def to_dict(self):
        d = {
            "vars": [{"name": nm, "weight": _fmt(w)} for nm, w in zip(self.names, self.weights)],
            "field": self.field.to_dict(),
        }
        if self.has_ideal:
            ideal = {}
            if self.nil:
                ideal["nil"] = [{"name": self.names[i], "bound": _fmt(b)} for i, b in sorted(self.nil.items())]
            if self.cap is not None:
                ideal["cap"] = {"names": [self.names[i] for i in self.cap[0]], "bound": _fmt(self.cap[1])}
            d["ideal"] = ideal
        return d

    @classmethod
    def from_dict(cls, d):
        field = FieldDesc.from_dict(d["field"])
        names = [v["name"] for v in d["vars"]]
        weights = [Fraction(v["weight"]) for v in d["vars"]]
        nil, cap = None, None
        ideal = d.get("ideal")
        if ideal:
            if "nil" in ideal:
                nil = {e["name"]: Fraction(e["bound"]) for e in ideal["nil"]}
            if "cap" in ideal:
                cap = (tuple(ideal["cap"]["names"]), Fraction(ideal["cap"]["bound"]))
        return cls(field, names, weights, nil, cap)


class FracSeries:
    """Element of a SeriesRing known up to weighted valuation ``prec``.

    Arithmetic propagates precision with the usual big-O rules; a product has
    ``prec = min(prec_a + val_b, prec_b + val_a)``.  Operations never mutate
    their inputs.  ``exact_rep`` is False once the ring's ideal has dropped a
    term, after which q-th roots are refused (they are not well defined on the
    quotient).
    """

    __slots__ = ("ring", "terms", "prec", "exact_rep")

    def __init__(self, ring, terms, prec=INF, exact_rep=True, _clean=False):
        self.ring = ring
        self.prec = _frac(prec) if prec != INF else INF
        self.exact_rep = exact_rep
        if _clean:
            self.terms = terms
            return
        clean = {}
        for mono, c in terms.items():
            if not c:
                continue
            if ring.wval(mono) >= self.prec:
                continue
            if ring.has_ideal and ring.killed(mono):
                self.exact_rep = False
                continue
            clean[mono] = c
        self.terms = clean

    # ----- basic queries -----
    @property
    def field(self):
        return self.ring.field

    def valuation(self):
        if not self.terms:
            return INF
        w = self.ring.wval
        return min(w(m) for m in self.terms)

    def effective_valuation(self):
        """min(valuation, prec): the valuation certified for the true value."""
        v = self.valuation()
        return v if v < self.prec else self.prec

    def coefficient(self, mono):
        """Coefficient of a monomial (dict name -> exponent, or tuple)."""
        if isinstance(mono, dict):
            full = [Fraction(0)] * self.ring.nvars
            for nm, e in mono.items():
                full[self.ring.index[nm]] = Fraction(e)
            mono = tuple(full)
        else:
            mono = tuple(Fraction(e) for e in mono)
        if self.ring.wval(mono) >= self.prec:
            raise PrecisionError("coefficient unknown beyond precision")
        return FieldElem(self.field, self.terms.get(mono, 0))

    def is_zero(self):
        """No known nonzero term (the series may still be nonzero beyond prec)."""
        return not self.terms

    def is_exact(self):
        return self.prec == INF

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, FracSeries):
            return NotImplemented
        return self.ring == other.ring and self.prec == other.prec and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.prec, frozenset(self.terms.items())))

    def agrees_with(self, other, prec=None):
        """True if self - other has no known term below ``prec`` (default: joint precision)."""
        diff = self - other
        bound = diff.prec if prec is None else min(prec, diff.prec)
        return diff.truncate(bound).is_zero()

    # ----- arithmetic -----
    def _check(self, other):
        if self.ring != other.ring:
            raise ValueError("series live in different rings")

    def _lift(self, other):
        if isinstance(other, FracSeries):
            self._check(other)
            return other
        if isinstance(other, (int, FieldElem)):
            return self.ring.const(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        F = self.field
        prec = min(self.prec, other.prec)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = F.add(out.get(mono, 0), c)
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return FracSeries(self.ring, out, prec, self.exact_rep and other.exact_rep,
                          _clean=(prec == self.prec == other.prec))

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return FracSeries(self.ring, {m: F.neg(c) for m, c in self.terms.items()}, self.prec,
                          self.exact_rep, _clean=True)

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

    def scale(self, c):
        """Multiply by a scalar: a FieldElem, or an int read as an integer."""
        return self.scale_code(c.value if isinstance(c, FieldElem) else self.field.from_int(c))

    def scale_code(self, code):
        """Multiply by the field element with the given code."""
        if code == 0:
            return FracSeries(self.ring, {}, self.prec, self.exact_rep, _clean=True)
        F = self.field
        return FracSeries(self.ring, {m: F.mul(c2, code) for m, c2 in self.terms.items()}, self.prec,
                          self.exact_rep, _clean=True)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElem)):
            return self.scale(other)
        if not isinstance(other, FracSeries):
            return NotImplemented
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other, prec=INF):
        """Product, optionally truncated further at ``prec``."""
        self._check(other)
        va, vb = self.effective_valuation(), other.effective_valuation()
        P = min(self.prec + vb, other.prec + va, _frac(prec) if prec != INF else INF)
        ring = self.ring
        F = ring.field
        w = ring.wval
        ta = sorted(((w(m), m, c) for m, c in self.terms.items()), key=lambda t: t[0])
        tb = sorted(((w(m), m, c) for m, c in other.terms.items()), key=lambda t: t[0])
        out = {}
        exact = self.exact_rep and other.exact_rep
        has_ideal = ring.has_ideal
        if tb:
            vmin_b = tb[0][0]
            for vx, mx, cx in ta:
                if vx + vmin_b >= P:
                    break
                for vy, my, cy in tb:
                    if vx + vy >= P:
                        break
                    mono = tuple(a + b for a, b in zip(mx, my))
                    if has_ideal and ring.killed(mono):
                        exact = False
                        continue
                    s = F.add(out.get(mono, 0), F.mul(cx, cy))
                    if s:
                        out[mono] = s
                    else:
                        del out[mono]
        return FracSeries(ring, out, P, exact, _clean=True)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        return self.power(k)

    def power(self, k, prec=INF):
        """Integer power using the q-adic digits of k and the Frobenius map."""
        result = self.ring.one()
        q = self.ring.q
        base = self
        first = True
        while k:
            k, digit = divmod(k, q)
            for _ in range(digit):
                result = base.truncate(prec) if first else result.mul(base, prec)
                first = False
            if k:
                base = base.frob(1)
        return result.truncate(prec) if not first else result

    def truncate(self, prec):
        if prec == INF or (self.prec != INF and prec >= self.prec):
            return self
        prec = _frac(prec)
        w = self.ring.wval
        return FracSeries(self.ring, {m: c for m, c in self.terms.items() if w(m) < prec}, prec,
                          self.exact_rep, _clean=True)

    # ----- Frobenius -----
    def frob(self, k):
        """The ring map a -> a**(q**k): exponents times q**k, coefficients by tau**k.

        For k < 0 this is the q**|k|-th root, which exists because the
        coefficient field is perfect and exponents live in Z[1/q].
        """
        if k == 0:
            return self
        ring = self.ring
        if k < 0 and ring.has_ideal and not self.exact_rep:
            raise PrecisionError("q-th root of a series truncated by the ring's ideal is not defined")
        F = ring.field
        factor = Fraction(ring.q) ** k
        out = {}
        for mono, c in self.terms.items():
            out[tuple(e * factor for e in mono)] = F.frob(c, k)
        prec = self.prec * factor if self.prec != INF else INF
        return FracSeries(ring, out, prec, self.exact_rep, _clean=not ring.has_ideal)

    def qth_root(self):
        return self.frob(-1)

    def map_coefficients(self, fn):
        """Apply fn to each coefficient code (fn must be additive and injective)."""
        return FracSeries(self.ring, {m: fn(c) for m, c in self.terms.items()}, self.prec, self.exact_rep)

    def scale_exponents(self, factor, names=None):
        """Multiply the exponents of the named variables (default all) by ``factor``.

        The precision is rescaled by the smallest factor over variables of
        positive weight that are affected.
        """
        factor = Fraction(factor)
        ring = self.ring
        idx = range(ring.nvars) if names is None else [ring.index[nm] for nm in names]
        idx = set(idx)
        out = {}
        for mono, c in self.terms.items():
            out[tuple(e * factor if i in idx else e for i, e in enumerate(mono))] = c
        if self.prec == INF:
            prec = INF
        else:
            ratios = [factor if i in idx else Fraction(1) for i in range(ring.nvars) if ring.weights[i] > 0]
            prec = self.prec * min(ratios) if ratios else self.prec
        return FracSeries(ring, out, prec, self.exact_rep)

    # ----- substitution -----
    def substitute_linear(self, images):
        """Substitute variables by F_q-linear fractional series.

        ``images`` maps variable names to series in a common target ring; each
        image must be a sum of single-variable monomials with exponent a power
        of q (possibly negative) and have positive valuation.  Variables not in
        ``images`` are sent to the variable of the same name in the target ring.
        """
        for nm, img in images.items():
            q = img.ring.q
            for mono in img.terms:
                nz = [e for e in mono if e]
                if len(nz) != 1 or q_power_exponent(nz[0], q) is None:
                    raise ValueError(f"image of {nm} is not F_q-linear")
            if img.effective_valuation() <= 0:
                raise ValueError(f"image of {nm} is not topologically nilpotent")
        return self.compose(images)

    def compose(self, images, target=None):
        """General substitution of variables by series (no linearity check).

        Fractional exponents are handled through q-th roots of the image, so
        images must be honest (untruncated by any ideal) representatives.
        """
        if target is None:
            target = next(iter(images.values())).ring if images else self.ring
        for img in images.values():
            if img.ring != target:
                raise ValueError("all images must live in one ring")
        ring = self.ring
        for nm in ring.names:
            if nm not in images and nm not in target.index:
                raise ValueError(f"variable {nm} has no image")
        # precision bound for the unknown tail of self
        ratios = []
        for i, nm in enumerate(ring.names):
            w = ring.weights[i]
            if w == 0:
                continue
            if nm in images:
                v = images[nm].effective_valuation()
            else:
                v = target.weights[target.index[nm]]
            ratios.append(Fraction(v) / w if v != INF else INF)
        rho = min(ratios) if ratios else INF
        if self.prec == INF:
            P = INF
        elif rho == INF:
            P = INF
        else:
            if rho <= 0:
                raise PrecisionError("substitution images must have positive valuation")
            P = self.prec * rho
        q = ring.q
        cache = {}

        def image_power(nm, e):
            key = (nm, e)
            if key in cache:
                return cache[key]
            if nm not in images:
                val = target.monomial({nm: e})
            else:
                d = 0
                while (e * q ** d).denominator != 1:
                    d += 1
                N = int(e * q ** d)
                val = images[nm].frob(-d).power(N, P)
            cache[key] = val
            return val

        F = target.field
        acc = {}
        prec = P
        exact = True
        for mono, c in sorted(self.terms.items()):
            term = FracSeries(target, {target._zero_mono: c}, INF, _clean=True)
            for nm, e in zip(ring.names, mono):
                if e == 0:
                    continue
                term = term.mul(image_power(nm, e), P)
                if term.is_zero() and term.prec >= P:
                    break
            prec = min(prec, term.prec)
            exact = exact and term.exact_rep
            for m2, c2 in term.terms.items():
                s = F.add(acc.get(m2, 0), c2)
                if s:
                    acc[m2] = s
                else:
                    del acc[m2]
        return FracSeries(target, acc, prec, exact)

    def change_ring(self, target):
        """Re-express in a ring whose variables include ours (by name)."""
        idx = [target.index[nm] for nm in self.ring.names]
        if target.field != self.field:
            raise ValueError("field mismatch")
        out = {}
        zero = [Fraction(0)] * target.nvars
        for mono, c in self.terms.items():
            full = list(zero)
            for i, e in zip(idx, mono):
                full[i] = e
            out[tuple(full)] = c
        if self.prec == INF:
            P = INF
        else:
            ratios = [target.weights[j] / w for j, w in zip(idx, self.ring.weights) if w > 0]
            P = self.prec * min(ratios) if ratios else INF
        return FracSeries(target, out, P)

    def restrict_to(self, target, values=None):
        """Drop variables absent from ``target`` by setting them to 0 (or to given constants 0)."""
        keep = [(i, target.index[nm]) for i, nm in enumerate(self.ring.names) if nm in target.index]
        dropped = [i for i, nm in enumerate(self.ring.names) if nm not in target.index]
        out = {}
        F = self.field
        for mono, c in self.terms.items():
            if any(mono[i] for i in dropped):
                continue
            full = [Fraction(0)] * target.nvars
            for i, j in keep:
                full[j] = mono[i]
            full = tuple(full)
            s = F.add(out.get(full, 0), c)
            if s:
                out[full] = s
            else:
                out.pop(full, None)
        if self.prec == INF:
            P = INF
        else:
            ratios = [target.weights[j] / self.ring.weights[i] for i, j in keep if self.ring.weights[i] > 0]
            P = self.prec * min(ratios) if ratios else INF
        return FracSeries(target, out, P)

    # ----- display and serialization -----
    def sorted_terms(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for mono, c in sorted(self.terms.items(), key=lambda t: (self.ring.wval(t[0]), t[0]))[:12]:
                mon = "*".join(f"{nm}^{_fmt(e)}" if e != 1 else nm for nm, e in zip(self.ring.names, mono) if e)
                coeff = str(FieldElem(self.field, c).coeffs) if self.field.degree > 1 else str(c)
                parts.append(f"{coeff}*{mon}" if mon else coeff)
            body = " + ".join(parts) + (" + ..." if len(self.terms) > 12 else "")
        tail = "" if self.prec == INF else f" + O({_fmt(self.prec)})"
        return f"<{body}{tail}>"

    def to_dict(self):
        q = self.ring.q
        F = self.field
        terms = []
        for mono, c in sorted(self.terms.items()):
            exps = []
            for e in mono:
                fe = FracExponent.from_value(e, q)
                exps.append({"num": fe.num, "dlog": fe.dlog})
            terms.append({"exps": exps, "coeff": FieldElem(F, c).coeffs})
        d = self.ring.to_dict()
        d["prec"] = _fmt(self.prec)
        d["terms"] = terms
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d, ring=None):
        if ring is None:
            ring = SeriesRing.from_dict(d)
        q = ring.q
        F = ring.field
        terms = {}
        for t in d["terms"]:
            mono = tuple(FracExponent(e["num"], e["dlog"], q).value(q) for e in t["exps"])
            terms[mono] = F(t["coeff"]).value
        return cls(ring, terms, _frac(d["prec"]))

    @classmethod
    def from_json(cls, s, ring=None):
        return cls.from_dict(json.loads(s), ring)


def series_sum(items, ring):
    total = ring.zero()
    for s in items:
        total = total + s
    return total
