import io
import json
import subprocess
import sys

import pytest

from lttower.cli import EXIT_CERT, EXIT_FAILED, EXIT_INPUT, main
from lttower.frac_series import FracSeries, SeriesRing
from lttower.gf_tower import make_tower
from lttower.group_actions import GLElement, TwistedSeries


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_law_show_and_iterate():
    code, out, _ = run("law", "show", "--kind", "wedge", "--n", "3", "--q", "3")
    assert code == 0
    rec = json.loads(out)
    assert rec["law"]["tag"] == "wedge" and rec["seed"] is not None
    code, out, _ = run("law", "iterate", "--n", "2", "--q", "2", "--m", "2")
    series = FracSeries.from_dict(json.loads(out)["series"])
    assert series == series.ring.gen("T") ** 16


def test_delta_compute_default_window_and_errors():
    code, out, _ = run("delta", "compute", "--n", "2", "--q", "2", "--prec", "16")
    assert code == 0
    rec = json.loads(out)
    assert rec["window"] == 1 and rec["prec"] == 16
    code, _, err = run("delta", "compute", "--n", "2", "--q", "2", "--prec", "40", "--window", "0")
    assert code == EXIT_CERT
    assert json.loads(err)["error"] == "certificate"
    code, _, err = run("delta", "compute", "--prec", "abc")
    assert code == EXIT_INPUT


def test_act_roundtrip(tmp_path):
    K, L = make_tower(2, 2)[0], make_tower(2, 2)[1]
    R = SeriesRing(L, ["X1", "X2"])
    s = R.gen("X1") * R.gen("X2")
    g = GLElement.from_lists(K, [[[1], [0, 1]], [[0], [1]]])
    b = TwistedSeries.from_list(L, [1, 2])
    paths = {}
    for name, obj in (("s", s.to_dict()), ("g", g.to_dict()), ("b", b.to_dict())):
        paths[name] = tmp_path / f"{name}.json"
        paths[name].write_text(json.dumps(obj))
    argv = ["act", "--in", str(paths["s"]), "--gl", str(paths["g"]), "--d", str(paths["b"]), "--weil", "1"]
    code, out, _ = run(*argv)
    assert code == 0
    rec = json.loads(out)
    assert rec["applied"] == ["gl", "d", "weil"]
    assert run(*argv)[1] == out  # byte-identical
    code, _, err = run("act", "--in", str(tmp_path / "missing.json"))
    assert code == EXIT_INPUT


def test_affinoid_commands():
    code, out, _ = run("affinoid", "npoly", "--n", "2", "--q", "3", "--m", "5")
    assert code == 0 and out.strip() == "Y_1+Y_1^3-Y_2^4"
    code, out, _ = run("affinoid", "npoly", "--n", "3", "--q", "2", "--m", "1", "--labeling", "ball", "--json")
    assert json.loads(out)["text"] == "Y_3+Y_3^2+Y_3^4+Y_1^4*Y_2+Y_1^2*Y_2^4+Y_1^8*Y_2^2+Y_1^14"
    code, out, _ = run("affinoid", "verify", "--n", "2", "--q", "2", "--m", "1", "--prec", "12", "--cap", "8")
    rec = json.loads(out)
    assert code == 0 and rec["holds"] and rec["bound"] == 6
    code, _, _ = run("affinoid", "verify", "--n", "2", "--q", "2", "--m", "1", "--prec", "5")
    assert code == EXIT_INPUT


def test_variety_count_csv():
    code, out, _ = run("variety", "count", "--n", "2", "--q", "2", "--ext", "1", "2", "3")
    assert code == 0
    assert out.splitlines() == ["n,q,m,r,count", "2,2,1,1,8", "2,2,1,2,8", "2,2,1,3,80"]


def test_variety_budget_exit(monkeypatch):
    monkeypatch.setenv("LTTOWER_BUDGET", "100")
    code, _, err = run("variety", "count", "--n", "3", "--q", "2", "--ext", "2")
    assert code == EXIT_CERT
    assert json.loads(err)["type"] == "BudgetError"


def test_sring_table():
    code, out, _ = run("sring", "table", "--n", "2", "--q", "2", "--m", "1")
    assert out.splitlines() == ["*,1,e_1,e_2", "1,1,e_1,e_2", "e_1,e_1,e_2,0", "e_2,e_2,0,0"]


def test_selftest_subset():
    code, out, _ = run("selftest", "--only", "1", "5")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 3 and all("PASS" in ln for ln in lines)


def test_selftest_failure_exit(monkeypatch):
    from lttower import acceptance
    monkeypatch.setattr(acceptance, "alternating_failures", lambda *a: 1)
    code, out, err = run("selftest", "--only", "1")
    assert code == EXIT_FAILED
    assert "FAIL" in out.splitlines()[-1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lttower", "affinoid", "npoly", "--n", "2", "--q", "2", "--m", "1"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "Y_1+Y_1^2+Y_2^3"


def test_bad_arguments_exit_two():
    with pytest.raises(SystemExit) as exc:
        run("law", "show", "--kind", "nope")
    assert exc.value.code == 2
