"""The ten acceptance checks, shared by ``lttower selftest`` and the test suite.

Each check returns a Result.  ``detail`` holds only deterministic data, so the
printed report is byte-identical across runs with the same seed; timings are
kept separately in ``seconds``.
"""

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import affinoid_lab as al
from .det_map import check_drinfeld_preservation, delta_standard, min_window
from .formal_modules import (
    LevelTuple,
    ModuleLaw,
    height_one_law,
    is_drinfeld_basis,
    standard_law,
)
from .frac_series import FracSeries, SeriesRing
from .gf_tower import FieldDesc, make_tower
from .group_actions import GLElement, TwistedSeries, random_gl, reduced_norm, verify_gb_square
from .isocrystals import Isocrystal, standard
from .pi_series import PiSeries

DEFAULT_SEED = 20240601


@dataclass
class Result:
    number: int
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.ok else "FAIL"
        return f"criterion {self.number:2d} {tag}  {self.name}  {json.dumps(self.detail, sort_keys=True)}"


def _timed(number, name, fn, *args):
    start = time.perf_counter()
    try:
        ok, detail = fn(*args)
    except (ArithmeticError, ValueError, al.BudgetError) as exc:
        ok, detail = False, {"error": type(exc).__name__, "message": str(exc)}
    return Result(number, name, ok, detail, time.perf_counter() - start)


# ----- 1: closed form for n = 2 -----

def closed_form_n2(seed=None):
    detail = {}
    ok = True
    for q in (2, 3):
        for m in (1, 2, 3):
            start = time.perf_counter()
            got = al.n_polynomial(2, q, m)
            want = al.NPolynomial(2, q, {(1, 0): 1, (q, 0): 1, (0, q + 1): -1})
            fast = time.perf_counter() - start < 1.0
            detail[f"q={q},m={m}"] = str(got)
            ok = ok and got == want and fast
    return ok, detail


# ----- 2: the main congruence -----

def main_congruence(seed=None):
    detail = {}
    ok = True
    for q, prec in ((2, 12), (3, 24)):
        cm = al.CMData(2, q, 1)
        bound = q * cm.val_t()
        resid = al.verify_congruence(cm, prec=prec, cap=8)
        detail[f"q={q}"] = {"residual": str(resid), "bound": bound, "prec": prec}
        ok = ok and resid > bound
    return ok, detail


# ----- 3: delta is K-alternating -----

def random_point(ring, rng, terms=2, degree=2):
    """A few monomials of positive valuation with nonzero coefficients."""
    F = ring.field
    acc = ring.zero()
    for _ in range(rng.randint(1, terms)):
        exps = {nm: rng.randint(0, degree) for nm in ring.names}
        exps[rng.choice(ring.names)] += 1
        acc = acc + ring.monomial(exps, F.element(rng.randrange(1, F.order)))
    return acc


def alternating_failures(n, q, count, prec, seed):
    """Number of sampled tuples violating vanishing, additivity or semilinearity."""
    F = make_tower(q, 2).top()
    ring = SeriesRing(F, ["u", "v"])
    rng = random.Random(seed)
    window = min_window(n, q, 1, prec)
    sign = 1 if n % 2 else -1
    bad = 0
    for _ in range(count):
        pts = [random_point(ring, rng) for _ in range(n)]
        y = random_point(ring, rng)
        slot = rng.randrange(n)
        d = delta_standard(pts, window, prec)
        repeated = delta_standard([pts[0]] + pts[:n - 1], window, prec)
        summed = list(pts)
        summed[slot] = pts[slot] + y
        other = list(pts)
        other[slot] = y
        additive = delta_standard(summed, window, prec) - d - delta_standard(other, window, prec)
        shifted = delta_standard([pts[0].frob(n)] + pts[1:], window, prec)
        twisted = d.frob(1) if sign == 1 else -d.frob(1)
        ok = (repeated.truncate(prec).is_zero() and additive.truncate(prec).is_zero()
              and shifted.agrees_with(twisted, prec))
        bad += not ok
    return bad


def delta_alternating(seed=DEFAULT_SEED):
    detail = {}
    ok = True
    for n, q, prec in ((2, 2, 16), (3, 2, 16), (2, 3, 18)):
        bad = alternating_failures(n, q, 100, prec, seed)
        detail[f"n={n},q={q}"] = {"samples": 100, "failures": bad, "prec": prec}
        ok = ok and bad == 0
    return ok, detail


# ----- 4: the commuting square -----

def random_gb(K, L, rng):
    g = random_gl(K, 2, rng, 2)
    g = GLElement([[e.truncate(3) for e in row] for row in g.matrix])
    b = TwistedSeries(L, {0: rng.randrange(1, L.order), 1: rng.randrange(L.order), 2: rng.randrange(L.order)})
    return g, b


def gb_square(seed=DEFAULT_SEED, count=25, prec=24):
    tower = make_tower(2, 2)
    K, L = tower[0], tower[1]
    ring = SeriesRing(L, ["X1", "X2"])
    points = list(ring.gens())
    rng = random.Random(seed)
    failures = 0
    worst = None
    for _ in range(count):
        g, b = random_gb(K, L, rng)
        resid = verify_gb_square(g, b, points, prec)
        worst = resid if worst is None else min(worst, resid)
        failures += resid < prec
    return failures == 0, {"samples": count, "prec": prec, "failures": failures, "min_residual": str(worst)}


# ----- 5: point counts -----

def point_counts(seed=None):
    counts = [al.variety_count(2, 2, 1, r) for r in (1, 2, 3)]
    fits = {}
    for sign in (1, -1):
        A, B = al.fit_two_term(counts[:2], 2, sign)
        pred = A * 2 ** 6 + B * (sign * 2) ** 3
        fits[sign] = (A, B, pred)
    matching = [s for s, (_, _, pred) in fits.items() if pred == counts[2]]
    detail = {"counts": counts,
              "fits": {str(s): {"A": str(A), "B": str(B), "predicted_r3": str(p)} for s, (A, B, p) in fits.items()},
              "matching_sign": matching}
    return counts[0] == 8 and bool(matching), detail


# ----- 6: nonsingularity -----

def nonsingular(seed=None):
    detail = {}
    ok = True
    for q in (2, 3):
        for m in (1, 2, 3):
            d = al.n_polynomial(2, q, m).partial(0)
            one = d == al.NPolynomial(2, q, {(0, 0): 1})
            detail[f"dN/dY1 n=2 q={q} m={m}"] = str(d)
            ok = ok and one
    F = make_tower(2, 6).top()
    for m in (1, 2):
        sing = al.singular_points(al.n_polynomial(3, 2, m), F)
        detail[f"singular n=3 q=2 m={m} over F_64"] = sing
        ok = ok and sing == 0
    return ok, detail


# ----- 7: reduced norm -----

def _field_pairs(limit=64):
    out = []
    for n in range(1, 7):
        for q in (2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64):
            if q ** n <= limit:
                out.append((n, q))
    return out


def reduced_norm_checks(seed=DEFAULT_SEED):
    detail = {}
    rng = random.Random(seed)
    tower = make_tower(2, 2)
    L = tower[1]
    bad_mult = 0
    for _ in range(100):
        b1 = TwistedSeries(L, {k: rng.randrange(L.order) for k in range(6)}, 6)
        b2 = TwistedSeries(L, {k: rng.randrange(L.order) for k in range(6)}, 6)
        if not reduced_norm(b1 * b2).agrees_with(reduced_norm(b1) * reduced_norm(b2)):
            bad_mult += 1
    detail["multiplicativity_failures"] = bad_mult
    bad_const = 0
    bad_varpi = 0
    checked = []
    for n, q in _field_pairs():
        tw = make_tower(q, n)
        K, Lf = tw.base(), tw.top()
        down = tw.down_table(tw.index(K), tw.index(Lf))
        want = PiSeries(K, {1: 1 if n % 2 else K.minus_one})
        if reduced_norm(TwistedSeries.varpi(Lf)) != want:
            bad_varpi += 1
        for a in range(1, Lf.order):
            got = reduced_norm(TwistedSeries.const(Lf, a))
            if got != PiSeries(K, {0: down[_norm_code(Lf, a, n)]}):
                bad_const += 1
        checked.append(f"{q}^{n}")
    detail["norm_failures"] = bad_const
    detail["varpi_failures"] = bad_varpi
    detail["fields"] = checked
    return bad_mult == 0 and bad_const == 0 and bad_varpi == 0, detail


def _norm_code(F, a, n):
    """Product of the n Galois conjugates of a."""
    acc = 1
    for i in range(n):
        acc = F.mul(acc, F.frob(a, i))
    return acc


# ----- 8: Drinfeld predicate -----

def drinfeld(seed=None):
    detail = {}
    F2 = make_tower(2, 1).top()
    G0 = standard_law(F2, 2)
    zero_ok = True
    for m in (1, 2, 3):
        ring = SeriesRing(F2, ["e"], nil={"e": 2 ** (2 * m + 2)})
        zero_ok = zero_ok and is_drinfeld_basis(G0, LevelTuple(m, [ring.zero(), ring.zero()]))
    detail["zero_tuple_accepted"] = zero_ok
    H = height_one_law(F2)
    ring = SeriesRing(F2, ["pi"])
    rejected = not is_drinfeld_basis(H, LevelTuple(1, [ring.zero(prec=10)]))
    detail["zero_rejected_height_one"] = rejected
    pair = find_drinfeld_pair()
    detail["pair"] = pair["label"]
    preserved = check_drinfeld_preservation(pair["law"], 1, pair["tuple"])
    detail["mu_1_preserves"] = preserved
    return zero_ok and rejected and preserved, detail


def find_drinfeld_pair(max_exp=8):
    """First Drinfeld pair (e^a, c e^b) for the standard law over F_4[e]/e^16.

    Over F_2 only pairs of valuation 8 (killed in the quotient) qualify, so
    the residue field is F_4.
    """
    k = make_tower(2, 2).top()
    law = standard_law(k, 2)
    ring = SeriesRing(k, ["e"], nil={"e": 16})
    for a in range(1, max_exp + 1):
        for b in range(a, max_exp + 1):
            for c in range(1, k.order):
                tup = LevelTuple(1, [ring.monomial({"e": a}), ring.monomial({"e": b}).scale_code(c)])
                if is_drinfeld_basis(law, tup):
                    return {"law": law, "tuple": tup, "label": f"(e^{a}, [{c}] e^{b})"}
    raise ArithmeticError("no Drinfeld pair found")


# ----- 9: S, U, Jaction, m-independence -----

def s_algebra(seed=None, budget=None):
    detail = {}
    ok = True
    assoc = []
    group = []
    certified = []
    for n, q in _field_pairs():
        if n < 2:
            continue
        for m in (1, 2):
            S = al.SAlgebra(n, q, m, check=False)
            S.check_associative()
            assoc.append(f"{n},{q},{m}")
            try:
                good = al.check_u_group(S, budget=budget)
                group.append(f"{n},{q},{m}")
            except al.BudgetError:
                good = al.augmentation_nilpotent(S)
                certified.append(f"{n},{q},{m}")
            ok = ok and good
    detail["associative"] = assoc
    detail["group_exhaustive"] = group
    detail["group_by_nilpotency"] = certified
    jac = {}
    for n, q, m in ((2, 2, 1), (2, 3, 1), (2, 2, 2), (3, 2, 1), (3, 2, 2)):
        res = jaction_matches(n, q, m)
        jac[f"{n},{q},{m}"] = res
        ok = ok and all(res.values())
    detail["jaction"] = jac
    indep = {}
    for q in (2, 3):
        polys = [al.n_polynomial(3, q, m) for m in (2, 3, 4, 5)]
        indep[f"q={q}"] = all(p == polys[0] for p in polys)
        ok = ok and indep[f"q={q}"]
    detail["m_independent_n3"] = indep
    return ok, detail


def jaction_matches(n, q, m):
    """Exhaustive over F_{q^n}: the displayed formulas against S and N."""
    S = al.SAlgebra(n, q, m, check=False)
    F = S.field
    N = al.ball_polynomial(n, q, m)
    pts = list(itertools.product(range(F.order), repeat=n))
    diag = all(al.conjugate(S, y, a) == al.jaction(S, y, ("diag", a)) for a in range(1, F.order) for y in pts)
    frob = all(N.evaluate(F, al.jaction(S, y, ("frobenius", 1))) == F.frob(N.evaluate(F, y), 1) for y in pts)
    rng = random.Random(0)
    sample = pts if len(pts) <= 64 else rng.sample(pts, 64)
    right = all(N.evaluate(F, al.jaction(S, y, ("u", u))) == F.add(N.evaluate(F, y), N.evaluate(F, u))
                for y in pts for u in sample)
    zero_locus = al.check_jaction_preservation(n, q, m, "ball")["preserved"]
    return {"diag_is_conjugation": diag, "frobenius": frob, "right_translation": right,
            "diag_preserves_zero_locus": zero_locus}


# ----- 10: infrastructure -----

def infrastructure(seed=DEFAULT_SEED, count=60):
    rng = random.Random(seed)
    F = make_tower(3, 2).top()
    ring = SeriesRing(F, ["u", "v"])
    bad = {"ring_axioms": 0, "qth_root": 0, "substitution": 0, "roundtrip": 0}

    def rand(exact=True):
        s = ring.zero()
        for _ in range(rng.randint(0, 4)):
            exps = {"u": rng.choice([0, 1, 2, Fraction(1, 3)]), "v": rng.choice([0, 1, 3])}
            s = s + ring.monomial(exps, F.element(rng.randrange(1, F.order)))
        return s if exact else s.truncate(rng.randint(4, 9))

    for _ in range(count):
        a, b, c = rand(False), rand(False), rand()
        if not ((a + b) * c).agrees_with(a * c + b * c) or not ((a * b) * c).agrees_with(a * (b * c)):
            bad["ring_axioms"] += 1
        if not (a * b).agrees_with(b * a) or not (a - a).is_zero():
            bad["ring_axioms"] += 1
        if a.qth_root().frob(1) != a or a.frob(1).qth_root() != a:
            bad["qth_root"] += 1
        # substitution functoriality
        f1 = {"u": random_point(ring, rng, 2, 1), "v": random_point(ring, rng, 2, 1)}
        f2 = {"u": random_point(ring, rng, 2, 1), "v": random_point(ring, rng, 2, 1)}
        s = rand().truncate(10)
        composed = {nm: img.truncate(10).compose(f2) for nm, img in f1.items()}
        lhs = s.compose(f1).compose(f2)
        rhs = s.compose(composed)
        if not lhs.agrees_with(rhs):
            bad["substitution"] += 1
        if FracSeries.from_json(a.to_json()).to_json() != a.to_json():
            bad["roundtrip"] += 1
    if not roundtrips_exact():
        bad["roundtrip"] += 1
    return all(v == 0 for v in bad.values()), {"samples": count, "failures": bad}


def roundtrips_exact():
    """JSON round trips of every serialized type, compared byte for byte."""
    tower = make_tower(2, 2)
    K, L = tower[0], tower[1]
    F = tower.top()
    objs = [
        (F.to_json(), lambda s: FieldDesc.from_json(s).to_json()),
        (standard(2, K).to_json(), lambda s: Isocrystal.from_dict(json.loads(s)).to_json()),
        (TwistedSeries(L, {0: 1, 1: 2}, 5).to_json(), lambda s: TwistedSeries.from_dict(json.loads(s)).to_json()),
    ]
    law = standard_law(F, 2)
    objs.append((_dump(law.to_dict()), lambda s: _dump(ModuleLaw.from_dict(json.loads(s)).to_dict())))
    g = GLElement.from_lists(K, [[[1], [0, 1]], [[0], [1]]], prec=4)
    objs.append((_dump(g.to_dict()), lambda s: _dump(GLElement.from_dict(json.loads(s)).to_dict())))
    N = al.n_polynomial(3, 2, 1)
    objs.append((_dump(N.to_dict()), lambda s: _dump(al.NPolynomial.from_dict(json.loads(s)).to_dict())))
    return all(back(s) == s for s, back in objs)


def _dump(d):
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


CRITERIA = [
    (1, "closed form of N for n = 2", closed_form_n2),
    (2, "main congruence at (2,2,1) and (2,3,1)", main_congruence),
    (3, "delta is K-alternating", delta_alternating),
    (4, "GL x D commuting square", gb_square),
    (5, "point counts and two-term fit", point_counts),
    (6, "nonsingularity of N = 0", nonsingular),
    (7, "reduced norm", reduced_norm_checks),
    (8, "Drinfeld predicate", drinfeld),
    (9, "S-algebra, U, Jaction, m-independence", s_algebra),
    (10, "series infrastructure and serialization", infrastructure),
]


def run(numbers=None, seed=DEFAULT_SEED):
    """Yield one Result per selected criterion, in order."""
    for number, name, fn in CRITERIA:
        if numbers and number not in numbers:
            continue
        yield _timed(number, name, fn, seed)
