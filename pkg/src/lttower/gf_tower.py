"""Finite fields F_{p^d} and towers F_p ⊂ F_q ⊂ F_{q^n} ⊂ F_{q^{ns}}.

Elements are stored as integer codes: the base-p digits of the code are the
coefficients of the reduced polynomial representative, lowest degree first.
Multiplication goes through exp/log tables built from a primitive element,
addition through XOR (p = 2) or a Zech logarithm table.
"""

import json
from functools import reduce

import numpy as np


def _digits(code, p, d):
    out = []
    for _ in range(d):
        code, r = divmod(code, p)
        out.append(r)
    return out


def _undigits(digits, p):
    code = 0
    for c in reversed(digits):
        code = code * p + c
    return code


def _poly_rem(a, b, p):
    """Remainder of a by monic b over F_p (coefficient lists, low degree first)."""
    a = list(a)
    db = len(b) - 1
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % p
        if c:
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - c * b[j]) % p
    return [c % p for c in a[:db]]


def is_irreducible(modulus, p):
    """Brute-force factor search: no monic factor of degree 1..d//2 divides."""
    d = len(modulus) - 1
    if d < 1 or modulus[-1] % p != 1:
        return False
    for k in range(1, d // 2 + 1):
        for tail in range(p ** k):
            cand = _digits(tail, p, k) + [1]
            if not any(_poly_rem(modulus, cand, p)):
                return False
    return True


def irreducible_modulus(p, d):
    """Lowest monic irreducible of degree d over F_p.

    Tails are scanned in increasing order of their base-p code, so the result
    is deterministic and reproducible from (p, d) alone.
    """
    if d == 1:
        return [0, 1]
    for tail in range(p ** d):
        cand = _digits(tail, p, d) + [1]
        if cand[0] and is_irreducible(cand, p):
            return cand
    raise ValueError("no irreducible polynomial found")  # unreachable


def _is_prime(p):
    return p >= 2 and all(p % k for k in range(2, int(p ** 0.5) + 1))


class FieldDesc:
    """The field F_{p^degree} = F_p[t]/(modulus).

    ``q`` is the size of the base field used by Frobenius: ``frobenius(a, 1)``
    is ``a**q``.  It must be a power of p whose exponent divides ``degree``.
    """

    def __init__(self, p, degree, modulus=None, q=None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if degree < 1:
            raise ValueError("degree must be positive")
        if modulus is None:
            modulus = irreducible_modulus(p, degree)
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != degree + 1 or not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is not irreducible of degree {degree}")
        q = p if q is None else q
        r = 0
        qq = q
        while qq % p == 0:
            qq //= p
            r += 1
        if qq != 1 or r == 0 or degree % r:
            raise ValueError(f"q = {q} is not a power of {p} with exponent dividing {degree}")
        self.p = p
        self.degree = degree
        self.modulus = tuple(modulus)
        self.q = q
        self.q_exp = r                       # q = p**q_exp
        self.order = p ** degree
        self.qdegree = degree // r           # degree over F_q
        self.tower = None
        self._build_tables()

    # ----- construction -----
    def _mul_by_t(self, digits):
        p, d, mod = self.p, self.degree, self.modulus
        top = digits[-1]
        shifted = [0] + digits[:-1]
        if top:
            shifted = [(shifted[i] - top * mod[i]) % p for i in range(d)]
        return shifted

    def _poly_mul_codes(self, a, b):
        p, d = self.p, self.degree
        da, db = _digits(a, p, d), _digits(b, p, d)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        prod = [c % p for c in prod] + [0]
        return _undigits(_poly_rem(prod, list(self.modulus), p), p)

    def _build_tables(self):
        Q, n1 = self.order, self.order - 1
        if Q == 2:
            self.gen = 1
            exp = [1]
        else:
            exp = None
            for g in range(2, Q):
                powers = [1]
                x = g
                while x != 1:
                    powers.append(x)
                    x = self._poly_mul_codes(x, g)
                if len(powers) == n1:
                    exp = powers
                    self.gen = g
                    break
        self.exp = exp
        log = [-1] * Q
        for k, c in enumerate(exp):
            log[c] = k
        self.log = log
        p = self.p
        zech = [-1] * n1
        for k, c in enumerate(exp):
            c0 = c % p
            one_plus = c - c0 + (c0 + 1) % p
            zech[k] = log[one_plus] if one_plus else -1
        self.zech = zech
        self.minus_one = 1 if p == 2 else exp[n1 // 2]
        self.exp_np = np.array(exp + exp, dtype=np.int64)
        self.log_np = np.array(log, dtype=np.int64)
        self.zech_np = np.array(zech, dtype=np.int64)

    # ----- identity -----
    def key(self):
        return (self.p, self.degree, self.modulus, self.q)

    def __eq__(self, other):
        return isinstance(other, FieldDesc) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FieldDesc(p={self.p}, degree={self.degree}, q={self.q})"

    # ----- raw arithmetic on integer codes -----
    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self.log[a], self.log[b]
        z = self.zech[(lb - la) % (self.order - 1)]
        if z < 0:
            return 0
        return self.exp[(la + z) % (self.order - 1)]

    def neg(self, a):
        if self.p == 2 or a == 0:
            return a
        return self.mul(a, self.minus_one)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.order - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self.exp[(-self.log[a]) % (self.order - 1)]

    def pow(self, a, e):
        if e == 0:
            return 1
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 0
        return self.exp[(self.log[a] * e) % (self.order - 1)]

    def frob(self, a, i):
        """a**(q**i) on codes; i may be negative."""
        if a == 0 or a == 1:
            return a
        k = i % self.qdegree
        if k == 0:
            return a
        return self.exp[(self.log[a] * pow(self.q, k, self.order - 1)) % (self.order - 1)]

    def from_int(self, n):
        """Image of the integer n under Z -> F_p -> F."""
        return n % self.p

    def embed_prime(self, n):
        return n % self.p

    def elements(self):
        return range(self.order)

    # ----- vectorized arithmetic (numpy int64 code arrays) -----
    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp_np[(self.log_np[a] + self.log_np[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        out = self.exp_np[(self.log_np[a] * (e % (self.order - 1))) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        a, b = np.broadcast_arrays(a, b)
        la, lb = self.log_np[a], self.log_np[b]
        z = self.zech_np[(lb - la) % (self.order - 1)]
        out = np.where(z < 0, 0, self.exp_np[(la + np.where(z < 0, 0, z)) % (self.order - 1)])
        out = np.where(a == 0, b, out)
        return np.where(b == 0, a, out)

    def vscale(self, a, c):
        """Multiply a code array by a scalar code."""
        return self.vmul(a, np.full(np.shape(a), c, dtype=np.int64))

    # ----- elements -----
    def __call__(self, value):
        if isinstance(value, FieldElem):
            if value.field != self:
                raise ValueError("element belongs to another field")
            return value
        if isinstance(value, (list, tuple)):
            return FieldElem(self, _undigits([int(c) % self.p for c in value], self.p))
        return FieldElem(self, self.from_int(int(value)))

    def element(self, code):
        if not 0 <= code < self.order:
            raise ValueError("code out of range")
        return FieldElem(self, code)

    def zero(self):
        return FieldElem(self, 0)

    def one(self):
        return FieldElem(self, 1)

    def generator(self):
        return FieldElem(self, self.gen)

    def in_subfield(self, a, qdeg):
        """True if the code a lies in the subfield of degree qdeg over F_q."""
        return self.frob(a, qdeg) == a

    # ----- serialization -----
    def to_dict(self):
        return {"p": self.p, "degree": self.degree, "modulus": list(self.modulus), "q": self.q}

    @classmethod
    def from_dict(cls, d):
        return cls(d["p"], d["degree"], d["modulus"], d.get("q"))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


class FieldElem:
    """A value in a FieldDesc; thin wrapper around the integer code."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        self.field = field
        self.value = value

    @property
    def coeffs(self):
        return _digits(self.value, self.field.p, self.field.degree)

    def _other(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise ValueError("field mismatch")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.sub(o, self.value))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.mul(self.value, self.field.inv(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field.mul(o, self.field.inv(self.value)))

    def __pow__(self, e):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def inverse(self):
        return FieldElem(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return isinstance(other, FieldElem) and other.field == self.field and other.value == self.value

    def __hash__(self):
        return hash((self.field.key(), self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElem({self.coeffs}, p={self.field.p})"


def frobenius(a, i):
    """a**(q**i) where q is the base size of a's field; i may be negative."""
    return FieldElem(a.field, a.field.frob(a.value, i))


class Tower:
    """A chain of fields F_q = F[0] ⊂ F[1] ⊂ ... over a common q = p**r.

    ``rel_degrees`` are degrees over F_q and must divide one another in order,
    e.g. ``Tower(2, 1, (1, 2, 4))`` for F_2 ⊂ F_4 ⊂ F_16.  Consecutive levels
    are linked by the embedding sending t to the smallest root (by code) of the
    lower modulus; longer embeddings are composites, so all of them commute.
    """

    def __init__(self, p, r, rel_degrees):
        rel_degrees = tuple(rel_degrees)
        for a, b in zip(rel_degrees, rel_degrees[1:]):
            if b % a:
                raise ValueError("tower degrees must divide one another")
        q = p ** r
        self.p, self.r, self.q = p, r, q
        self.rel_degrees = rel_degrees
        self.fields = [FieldDesc(p, r * d, q=q) for d in rel_degrees]
        for lvl, F in enumerate(self.fields):
            F.tower = self
            F.level = lvl
        # maps[i]: list, code in level i -> code in level i+1
        self._up = []
        for lo, hi in zip(self.fields, self.fields[1:]):
            self._up.append(self._embedding(lo, hi))
        self._up_cache = {}
        self._down_cache = {}

    @staticmethod
    def _embedding(lo, hi):
        if lo.degree == hi.degree:
            return list(range(lo.order))
        mod = lo.modulus

        def ev(x):
            acc = 0
            for c in reversed(mod):
                acc = hi.add(hi.mul(acc, x), hi.from_int(c))
            return acc

        root = next(x for x in range(hi.order) if ev(x) == 0)
        powers = [1]
        for _ in range(lo.degree - 1):
            powers.append(hi.mul(powers[-1], root))
        table = []
        for code in range(lo.order):
            acc = 0
            for c, pw in zip(_digits(code, lo.p, lo.degree), powers):
                for _ in range(c):
                    acc = hi.add(acc, pw)
            table.append(acc)
        return table

    def __getitem__(self, i):
        return self.fields[i]

    def __len__(self):
        return len(self.fields)

    def base(self):
        return self.fields[0]

    def top(self):
        return self.fields[-1]

    def index(self, field):
        for i, F in enumerate(self.fields):
            if F == field:
                return i
        raise ValueError(f"{field!r} is not in this tower")

    def up_table(self, i, j):
        """Code table for the embedding of level i into level j (i <= j)."""
        key = (i, j)
        if key not in self._up_cache:
            table = list(range(self.fields[i].order))
            for k in range(i, j):
                step = self._up[k]
                table = [step[c] for c in table]
            self._up_cache[key] = table
        return self._up_cache[key]

    def down_table(self, i, j):
        """Dict inverting up_table(i, j)."""
        key = (i, j)
        if key not in self._down_cache:
            self._down_cache[key] = {c: k for k, c in enumerate(self.up_table(i, j))}
        return self._down_cache[key]

    def embed(self, a, target):
        """Image of a in the larger field ``target``."""
        i, j = self.index(a.field), self.index(target)
        if i > j:
            raise ValueError("target is below the element's field")
        return FieldElem(target, self.up_table(i, j)[a.value])

    def restrict(self, a, target):
        """Preimage of a in the smaller field ``target``; error if a is not there."""
        i, j = self.index(target), self.index(a.field)
        try:
            return FieldElem(target, self.down_table(i, j)[a.value])
        except KeyError:
            raise ValueError("element does not lie in the requested subfield") from None


def _conjugates(a, subfield):
    F = a.field
    if subfield == F:
        return F, None, [a.value]
    if subfield.qdegree > F.qdegree:
        raise ValueError("subfield lies above the element's field")
    tower = common_tower(subfield, F)
    rel = F.qdegree // subfield.qdegree
    return F, tower, [F.frob(a.value, subfield.qdegree * k) for k in range(rel)]


def norm_to(a, subfield):
    """Product of the conjugates of a over ``subfield``, as an element of it."""
    F, tower, conj = _conjugates(a, subfield)
    val = reduce(F.mul, conj, 1)
    if tower is None:
        return FieldElem(F, val)
    return tower.restrict(FieldElem(F, val), subfield)


def trace_to(a, subfield):
    """Sum of the conjugates of a over ``subfield``, as an element of it."""
    F, tower, conj = _conjugates(a, subfield)
    val = reduce(F.add, conj, 0)
    if tower is None:
        return FieldElem(F, val)
    return tower.restrict(FieldElem(F, val), subfield)


def make_tower(q, n, s=1):
    """Tower F_q ⊂ F_{q^n} ⊂ F_{q^{ns}} for a prime power q (levels deduplicated)."""
    p = next(k for k in range(2, q + 1) if q % k == 0)
    r = 0
    qq = q
    while qq % p == 0:
        qq //= p
        r += 1
    if qq != 1:
        raise ValueError(f"q = {q} is not a prime power")
    degs = []
    for d in (1, n, n * s):
        if not degs or degs[-1] != d:
            degs.append(d)
    return Tower(p, r, degs)


def common_tower(small, big):
    """A tower containing both fields: their own if shared, else the default one.

    Fields read back from JSON carry no tower; the default tower reproduces
    them whenever they were built by ``make_tower`` in the first place.
    """
    for tower in (big.tower, small.tower):
        if tower is not None:
            try:
                tower.index(small)
                tower.index(big)
                return tower
            except ValueError:
                pass
    if small.p != big.p or small.q != big.q or big.qdegree % small.qdegree:
        raise ValueError("fields are not in a common tower")
    tower = make_tower(small.q, small.qdegree, big.qdegree // small.qdegree)
    tower.index(small)
    tower.index(big)
    return tower
