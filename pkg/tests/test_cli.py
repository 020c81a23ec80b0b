import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from circlekit.cli import run
from circlekit.decompose import TRACE_COLUMNS
from circlekit.forms import FormDecomposition
from circlekit.kernel import KernelGram
from circlekit.kernelpair import FiniteKernel
from circlekit.measure import CircleMeasure, moments
from circlekit.trigpoly import AnalyticPoly, TrigPoly


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return {
        "m": write("m.json", CircleMeasure.lebesgue().to_json()),
        "twom": write("twom.json", CircleMeasure.lebesgue(2.0).to_json()),
        "mixed": write("mu.json", (0.5 * CircleMeasure.lebesgue() + CircleMeasure.point_mass(np.pi / 2, 0.7)).to_json()),
        "plus": write("plus.json", CircleMeasure.upper_half().to_json()),
        "dir": tmp_path,
        "write": write,
    }


def test_decompose_example(files):
    out = files["dir"] / "rep.json"
    assert run(["decompose", "--mu", files["mixed"], "--lambda", files["m"], "-N", "256", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    ac = CircleMeasure.from_json(rep["mu_ac"])
    s = CircleMeasure.from_json(rep["mu_s"])
    assert abs(ac.mass - 0.5) <= 1e-3 and abs(s.atom_mass - 0.7) <= 1e-3
    assert [t["N"] for t in rep["traces"]] == [64, 128, 256]


def test_decompose_trace_csv(files):
    trace = files["dir"] / "trace.csv"
    out = files["dir"] / "rep.json"
    code = run(["decompose", "--mu", files["plus"], "--lambda", files["m"], "-N", "64",
                "--trace-out", str(trace), "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(trace.open()))
    assert tuple(rows[0]) == TRACE_COLUMNS and len(rows) == 4
    out_csv = files["dir"] / "list.csv"
    assert run(["decompose", "--mu", files["m"], "--lambda", files["m"], "--trace-list", "64", "128",
                "--out", str(out_csv)]) == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert [float(r["ac_mass"]) for r in rows] == pytest.approx([1.0, 1.0])


def test_halfcircle_example(files):
    out = files["dir"] / "hc.csv"
    assert run(["halfcircle", "--order", "16", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 17
    assert max(float(r["abs_diff"]) for r in rows) <= 1e-10
    assert float(rows[0]["moment_re"]) == 0.5


def test_dominate_violation_exits_3(files, capsys):
    code = run(["dominate", "--mu", files["twom"], "--lambda", files["m"], "-t", "1"])
    assert code == 3
    obj = json.loads(capsys.readouterr().out)
    assert obj["verdict"] == "Violated" and len(obj["witness"]) == 64


def test_dominate_success(files, capsys):
    assert run(["dominate", "--mu", files["plus"], "--lambda", files["m"], "-t", "1", "--grid", "16"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "Dominated"


def test_moments_and_herglotz(files, capsys):
    assert run(["moments", "--mu", files["plus"], "-N", "3"]) == 0
    obj = json.loads(capsys.readouterr().out)
    got = np.array([complex(v["re"], v["im"]) for v in obj["moments"]])
    assert np.allclose(got, np.asarray(moments(CircleMeasure.upper_half(), 3)))
    assert run(["herglotz", "--mu", files["m"], "--z", "0.5", "0.1+0.2j"]) == 0
    vals = json.loads(capsys.readouterr().out)["values"]
    assert [v["H"]["re"] for v in vals] == pytest.approx([1.0, 1.0])


def test_herglotz_radial_trace(files):
    trace = files["dir"] / "radial.csv"
    assert run(["herglotz", "--mu", files["m"], "--z", "0", "--grid", "8", "--trace", str(trace)]) == 0
    rows = list(csv.DictReader(trace.open()))
    assert rows and set(rows[0]) == {"theta", "r", "re_H", "fatou_quotient"}


def test_clark_szego_factor(files, capsys):
    assert run(["clark", "--constant", "0.3333333333333333", "--grid", "256"]) == 0
    mu = CircleMeasure.from_json(json.loads(capsys.readouterr().out))
    assert mu.mass == pytest.approx(2.0, abs=1e-8)
    bpath = files["write"]("b.json", AnalyticPoly([0.0, 1.0]).to_json())
    assert run(["clark", "--b", bpath, "--grid", "1024"]) == 0
    mu = CircleMeasure.from_json(json.loads(capsys.readouterr().out))
    assert mu.atom_weights[0] == pytest.approx(1.0, abs=1e-6)
    assert run(["szego", "--mu", files["plus"]]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["distance"] == 0 and obj["extremeness"] == "Extreme"
    ppath = files["write"]("p.json", TrigPoly([2.0, 1.0], real=True).to_json())
    assert run(["factor", "--poly", ppath]) == 0
    g = AnalyticPoly.from_json(json.loads(capsys.readouterr().out))
    assert np.allclose(g.coeffs, [1, 1])


def test_kernel_outputs(files, capsys):
    assert run(["kernel", "--mu", files["m"], "--coeff", "2"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["N"] == 2
    pts = files["write"]("pts.json", [{"re": 0.0, "im": 0.0}, {"re": 0.5, "im": 0.0}])
    assert run(["kernel", "--mu", files["m"], "--points", pts]) == 0
    G = KernelGram.from_json(json.loads(capsys.readouterr().out))
    assert np.allclose(G.entries, [[1, 1], [1, 4 / 3]])


def test_forms_and_kernelpair(files, capsys):
    mat = lambda M: [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in np.asarray(M, complex)]
    pair = files["write"]("pair.json", {"A": mat(np.eye(2)), "B": mat(np.diag([1.0, 0.0]))})
    assert run(["forms", "--pair", pair]) == 0
    d = FormDecomposition.from_json(json.loads(capsys.readouterr().out))
    assert np.allclose(d.A_ac, np.diag([1, 0]), atol=1e-8)
    pd = files["write"]("pd.json", {"A": mat([[3.0]]), "B": mat([[1.0]])})
    assert run(["forms", "--pair", pd, "--resolvent"]) == 0
    assert json.loads(capsys.readouterr().out)["residual"] <= 1e-15
    k = files["write"]("k.json", FiniteKernel(np.ones((2, 2))).to_json())
    K = files["write"]("K.json", FiniteKernel(np.diag([1.0, 0.0])).to_json())
    assert run(["kernelpair", "--k", k, "--K", K]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["check"]["passed"]
    assert np.allclose(FiniteKernel.from_json(obj["k_s"]).entries, np.ones((2, 2)), atol=1e-8)


def test_json_round_trip_is_stable(files):
    # emitted measure JSON reloads and re-serializes to the same text
    out = files["dir"] / "rep.json"
    run(["decompose", "--mu", files["mixed"], "--lambda", files["m"], "-N", "64", "--no-traces", "--out", str(out)])
    rep = json.loads(out.read_text())
    for key in ("mu_ac", "mu_s"):
        again = CircleMeasure.from_json(rep[key]).to_json()
        assert json.dumps(again, sort_keys=True) == json.dumps(rep[key], sort_keys=True)


def test_outputs_are_deterministic(files):
    a, b = files["dir"] / "a.json", files["dir"] / "b.json"
    for p in (a, b):
        assert run(["dominate", "--mu", files["plus"], "--lambda", files["m"], "-t", "1", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_env_changes_default_grid(files, monkeypatch, capsys):
    run(["kernel", "--mu", files["m"], "--grid", "4"])
    first = json.loads(capsys.readouterr().out)["points"]
    monkeypatch.setenv("CIRCLEKIT_SEED", "99")
    run(["kernel", "--mu", files["m"], "--grid", "4"])
    assert json.loads(capsys.readouterr().out)["points"] != first


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nosuch"],
        ["moments"],
        ["moments", "--mu", "/nonexistent.json"],
        ["decompose", "--mu", "M", "--lambda", "M", "-N", "100"],
        ["halfcircle", "--order", "4"],
        ["clark"],
        ["moments", "--mu", "M", "--format", "xml"],
    ],
)
def test_invalid_usage_exits_2(argv, files, capsys):
    argv = [files["m"] if a == "M" else a for a in argv]
    assert run(argv) == 2


def test_invalid_json_and_negative_density(files):
    bad = files["dir"] / "bad.json"
    bad.write_text("{not json")
    assert run(["moments", "--mu", str(bad)]) == 2
    neg = files["write"]("neg.json", {"density": TrigPoly([0.1, 1.0], real=True).to_json(), "atoms": []})
    assert run(["moments", "--mu", neg]) == 2


def test_numerical_failure_exits_3(files):
    mat = lambda M: [[float(v) for v in row] for row in M]
    pair = files["write"]("sing.json", {"A": mat(np.eye(2)), "B": mat(np.diag([1.0, 0.0]))})
    assert run(["forms", "--pair", pair, "--resolvent"]) == 3


def test_threads_flag(files):
    assert run(["moments", "--mu", files["m"], "--threads", "1"]) == 0
    assert run(["moments", "--mu", files["m"], "--threads", "0"]) == 2


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "circlekit", "halfcircle", "--order", "8", "--format", "csv"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("j,moment_re")
