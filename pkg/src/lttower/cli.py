"""Command-line front end.

Every subcommand writes its result to stdout (JSON with sorted keys, CSV, or
plain text) and nothing else, so equal arguments give byte-identical output.
Failures print one JSON error record to stderr and exit nonzero:

    1  a verification ran and did not hold
    2  bad input
    3  a precision, window or budget certificate could not be met
"""

import argparse
import csv
import json
import random
import sys

from . import acceptance
from . import affinoid_lab as al
from .det_map import WindowError, delta_standard, min_window
from .formal_modules import height_one_law, standard_law, universal_law, wedge_law
from .frac_series import INF, FracSeries, PrecisionError, SeriesRing
from .gf_tower import make_tower
from .group_actions import GLElement, TwistedSeries, act_d, act_gl, act_weil

EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_CERT = 3


class VerificationFailed(Exception):
    def __init__(self, record):
        super().__init__(record.get("message", "verification failed"))
        self.record = record


def _emit(obj, out):
    out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _prec(text):
    return INF if text in ("inf", None) else int(text)


def _read_json(path):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


# ----- law -----

def _law(args):
    F = make_tower(args.q, 1).base()
    if args.kind == "standard":
        return standard_law(F, args.n)
    if args.kind == "universal":
        return universal_law(F, args.n)
    if args.kind == "wedge":
        return wedge_law(F, args.n, reduced=args.reduced)
    return height_one_law(F)


def cmd_law(args, out):
    law = _law(args)
    record = {"command": "law " + args.action, "seed": args.seed, "law": law.to_dict()}
    if args.action == "iterate":
        record["m"] = args.m
        record["series"] = law.iterate(args.m, _prec(args.prec)).to_dict()
    _emit(record, out)


# ----- delta -----

def cmd_delta(args, out):
    if args.points:
        data = _read_json(args.points)
        points = [FracSeries.from_dict(d) for d in data]
    else:
        F = make_tower(args.q, 1).base()
        ring = SeriesRing(F, [f"X{i}" for i in range(1, args.n + 1)])
        points = list(ring.gens())
    n = len(points)
    prec = int(args.prec)
    minval = min(x.effective_valuation() for x in points)
    window = args.window if args.window is not None else min_window(n, points[0].ring.q, minval, prec).A
    d = delta_standard(points, window, prec)
    _emit({"command": "delta compute", "seed": args.seed, "n": n, "window": window, "prec": prec,
           "series": d.to_dict()}, out)


# ----- act -----

def cmd_act(args, out):
    s = FracSeries.from_dict(_read_json(args.input))
    applied = []
    if args.gl:
        s = act_gl(GLElement.from_dict(_read_json(args.gl)), s)
        applied.append("gl")
    if args.d:
        s = act_d(TwistedSeries.from_dict(_read_json(args.d)), s)
        applied.append("d")
    if args.weil:
        s = act_weil(args.weil, s)
        applied.append("weil")
    _emit({"command": "act", "seed": args.seed, "applied": applied, "series": s.to_dict()}, out)


# ----- affinoid -----

def cmd_affinoid(args, out):
    if args.action == "npoly":
        fn = {"reversed": al.n_polynomial, "ball": al.ball_polynomial,
              "congruence": al.congruence_polynomial}[args.labeling]
        N = fn(args.n, args.q, args.m)
        if args.json:
            _emit({"command": "affinoid npoly", "labeling": args.labeling, "polynomial": N.to_dict(),
                   "text": str(N)}, out)
        else:
            out.write(str(N) + "\n")
        return
    cm = al.CMData(args.n, args.q, args.m)
    bound = args.q ** args.m * cm.val_t()
    prec = None if args.prec is None else int(args.prec)
    resid = al.verify_congruence(cm, prec=prec, cap=args.cap)
    record = {"command": "affinoid verify", "seed": args.seed, "n": args.n, "q": args.q, "m": args.m,
              "cap": args.cap, "prec": prec if prec is not None else bound + 1,
              "residual_valuation": str(resid), "bound": bound, "holds": resid > bound}
    if not record["holds"]:
        raise VerificationFailed(record)
    _emit(record, out)


# ----- variety -----

def cmd_variety(args, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "q", "m", "r", "count"])
    for r in args.ext:
        count = al.variety_count(args.n, args.q, args.m, r, workers=args.workers)
        writer.writerow([args.n, args.q, args.m, r, count])


# ----- sring -----

def cmd_sring(args, out):
    S = al.SAlgebra(args.n, args.q, args.m)
    names = ["1"] + [f"e_{i}" for i in range(1, args.n + 1)]
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["*"] + names)
    for name, row in zip(names, S.table_rows()):
        writer.writerow([name] + row)


# ----- selftest -----

def cmd_selftest(args, out):
    failed = False
    for res in acceptance.run(args.only, seed=args.seed):
        out.write(res.line() + "\n")
        failed = failed or not res.ok
    # the configured (n, q, m): congruence and a small delta property sample
    cm = al.CMData(args.n, args.q, args.m)
    bound = args.q ** args.m * cm.val_t()
    resid = al.verify_congruence(cm)
    bad = acceptance.alternating_failures(args.n, args.q, 10, 2 * args.q ** args.n, args.seed)
    ok = resid > bound and bad == 0
    detail = {"n": args.n, "q": args.q, "m": args.m, "residual": str(resid), "bound": bound,
              "delta_failures": bad, "seed": args.seed}
    out.write(f"config       {'PASS' if ok else 'FAIL'}  congruence and delta at the given n, q, m  "
              f"{json.dumps(detail, sort_keys=True)}\n")
    if failed or not ok:
        raise VerificationFailed({"message": "selftest failed"})


# ----- parser -----

def build_parser():
    p = argparse.ArgumentParser(prog="lttower", description="Truncated-precision computations on the Lubin-Tate tower.")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED, help="seed for randomized checks")
    sub = p.add_subparsers(dest="command", required=True)

    law = sub.add_parser("law", help="show a module law or iterate its [pi]-series")
    law.add_argument("action", choices=["show", "iterate"])
    law.add_argument("--kind", choices=["standard", "universal", "wedge", "height-one"], default="standard")
    law.add_argument("--n", type=int, default=2)
    law.add_argument("--q", type=int, default=2)
    law.add_argument("--m", type=int, default=1)
    law.add_argument("--prec", default="inf")
    law.add_argument("--reduced", action="store_true", help="wedge law with pi = 0")
    law.set_defaults(func=cmd_law)

    delta = sub.add_parser("delta", help="the alternating map on the standard module")
    delta.add_argument("action", choices=["compute"])
    delta.add_argument("--n", type=int, default=2)
    delta.add_argument("--q", type=int, default=2)
    delta.add_argument("--window", type=int, default=None, help="window A (default: smallest certified)")
    delta.add_argument("--prec", required=True)
    delta.add_argument("--points", help="JSON list of series (default: the variables X1..Xn)")
    delta.set_defaults(func=cmd_delta)

    act = sub.add_parser("act", help="act on a series by GL, D and Weil elements, in that order")
    act.add_argument("--gl", help="GLElement JSON")
    act.add_argument("--d", help="TwistedSeries JSON")
    act.add_argument("--weil", type=int, default=0)
    act.add_argument("--in", dest="input", required=True, help="series JSON ('-' for stdin)")
    act.set_defaults(func=cmd_act)

    aff = sub.add_parser("affinoid", help="the congruence and the polynomial N")
    aff.add_argument("action", choices=["verify", "npoly"])
    aff.add_argument("--n", type=int, required=True)
    aff.add_argument("--q", type=int, required=True)
    aff.add_argument("--m", type=int, required=True)
    aff.add_argument("--prec", default=None)
    aff.add_argument("--cap", type=int, default=None, help="total Y-degree cap for products")
    aff.add_argument("--labeling", choices=["reversed", "ball", "congruence"], default="reversed")
    aff.add_argument("--json", action="store_true")
    aff.set_defaults(func=cmd_affinoid)

    var = sub.add_parser("variety", help="point counts of N = 0")
    var.add_argument("action", choices=["count"])
    var.add_argument("--n", type=int, required=True)
    var.add_argument("--q", type=int, required=True)
    var.add_argument("--m", type=int, default=1)
    var.add_argument("--ext", type=int, nargs="+", required=True, help="r: count over F_(q^(n r))")
    var.add_argument("--workers", type=int, default=1)
    var.set_defaults(func=cmd_variety)

    sr = sub.add_parser("sring", help="multiplication table of S")
    sr.add_argument("action", choices=["table"])
    sr.add_argument("--n", type=int, required=True)
    sr.add_argument("--q", type=int, required=True)
    sr.add_argument("--m", type=int, default=1)
    sr.set_defaults(func=cmd_sring)

    st = sub.add_parser("selftest", help="run the acceptance checks")
    st.add_argument("--n", type=int, default=2)
    st.add_argument("--q", type=int, default=2)
    st.add_argument("--m", type=int, default=1)
    st.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    st.set_defaults(func=cmd_selftest)
    return p


def _error(kind, exc, command, err):
    record = {"error": kind, "type": type(exc).__name__, "message": str(exc), "command": command}
    _emit(record, err)


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    try:
        args.func(args, out)
    except VerificationFailed as exc:
        record = dict(exc.record)
        record.setdefault("error", "verification")
        _emit(record, err)
        return EXIT_FAILED
    except (WindowError, PrecisionError, al.BudgetError) as exc:
        _error("certificate", exc, args.command, err)
        return EXIT_CERT
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        _error("input", exc, args.command, err)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
