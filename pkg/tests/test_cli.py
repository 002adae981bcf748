import csv
import io
import json
import math
import subprocess
import sys

import pytest

from casimir_roughness import cli
from casimir_roughness.quadrature import QuadratureError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_kv(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            out[k] = v
    return out


def parse_csv(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_energy_perfect(capsys):
    code, out, _ = run(capsys, "energy", "--L", "100", "--lambda-p", "0")
    assert code == 0
    assert float(parse_kv(out)["reduction_factor"]) == pytest.approx(1.0, abs=1e-9)


def test_energy_gold_with_sphere(capsys):
    code, out, _ = run(capsys, "energy", "--L", "200", "--lambda-p", "136", "--R", "1000")
    assert code == 0
    kv = parse_kv(out)
    assert 0 < float(kv["reduction_factor"]) < 1
    assert float(kv["plane_sphere_force_N"]) < 0
    assert "warning:" in out


def test_energy_json_matches_text(capsys):
    args = ("energy", "--L", "200", "--lambda-p", "136")
    _, text, _ = run(capsys, *args)
    _, js, _ = run(capsys, *args, "--json")
    data = json.loads(js)
    for key, value in parse_kv(text).items():
        assert float(value) == data[key]


@pytest.mark.parametrize("argv", [
    ("energy", "--L", "-5", "--lambda-p", "0"),
    ("energy", "--lambda-p", "136"),
    ("energy", "--L", "100"),
    ("rho", "--L", "100", "--lambda-p", "136", "--k-min", "1", "--k-max", "0.1"),
    ("rho", "--L", "100", "--lambda-p", "136", "--points", "1"),
    ("delta", "--L", "100", "--lambda-p", "136", "--spectrum", "gaussian:a=1"),
    ("delta", "--L", "100", "--lambda-p", "136"),
    ("alpha", "--lambda-p", "0"),
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["energy", "--L", "abc"])
    assert info.value.code == 2


def test_numerical_failure_exit_1(capsys, monkeypatch):
    def boom(*a, **k):
        raise QuadratureError("synthetic")
    monkeypatch.setattr(cli, "reduced_energy", boom)
    code, _, err = run(capsys, "energy", "--L", "100", "--lambda-p", "136")
    assert code == 1
    assert "integration failed" in err


def test_rho_perfect_model(capsys):
    code, out, _ = run(capsys, "rho", "--L", "100", "--lambda-p", "0", "--model",
                       "perfect_reflector", "--k-min", "0.1", "--k-max", "0.5", "--points", "3")
    assert code == 0
    assert out.splitlines()[0] == "k_nm_inv,q,rho,model"
    rows = parse_csv(out)
    assert len(rows) == 3
    for r in rows:
        q = float(r["q"])
        if q >= 30:
            assert float(r["rho"]) == pytest.approx(q / 3, rel=0.02)
        assert r["model"] == "perfect_reflector"


def test_rho_stitched(capsys):
    _, out, _ = run(capsys, "rho", "--L", "200", "--lambda-p", "136",
                    "--k-min", "1e-6", "--k-max", "0.02", "--points", "4")
    rows = parse_csv(out)
    assert float(rows[0]["rho"]) == 1.0
    assert float(rows[-1]["k_nm_inv"]) == 0.02
    assert 1.2 <= float(rows[-1]["rho"]) <= 2.0


def test_alpha_sweep(capsys):
    code, out, _ = run(capsys, "alpha", "--lambda-p", "136", "--L-min", "0.01",
                       "--L-max", "1e5", "--points", "15")
    assert code == 0
    assert out.splitlines()[0] == "L_nm,alpha_nm"
    rows = [(float(r["L_nm"]), float(r["alpha_nm"])) for r in parse_csv(out)]
    assert rows[0][1] / rows[0][0] == pytest.approx(0.4492, rel=0.01)
    assert rows[-1][1] == pytest.approx(14 * 136 / (30 * math.pi), rel=0.01)
    alphas = [a for _, a in rows]
    # rises, overshoots the saturation level slightly, then settles onto it
    peak = alphas.index(max(alphas))
    assert all(x < y for x, y in zip(alphas[:peak], alphas[1:peak + 1]))
    assert max(alphas) > rows[-1][1]


def test_delta_pfa(capsys):
    _, js, _ = run(capsys, "delta", "--L", "200", "--lambda-p", "136",
                   "--spectrum", "gaussian:a=5,lc=60", "--model", "pfa", "--json")
    data = json.loads(js)
    assert data["delta"] == pytest.approx(data["curvature_ratio"] * 25 / 200 ** 2, rel=1e-9)
    assert data["model"] == "pfa"


def test_delta_perfect_rough(capsys):
    _, out, _ = run(capsys, "delta", "--L", "1000", "--lambda-p", "0",
                    "--spectrum", "gaussian:a=1,lc=20")
    kv = parse_kv(out)
    assert kv["regime"] == "perfect_rough"
    assert float(kv["delta_over_closed_form"]) == pytest.approx(1.0, rel=0.05)


def test_delta_plasmon_diagnostic(capsys):
    _, out, _ = run(capsys, "delta", "--L", "2000", "--lambda-p", "2e6",
                    "--spectrum", "gaussian:a=1,lc=40")
    kv = parse_kv(out)
    assert kv["regime"] == "plasmon_rough"
    assert "delta_over_closed_form" in kv
    assert "diagnostic" in out


def test_delta_spectrum_file(tmp_path, capsys):
    f = tmp_path / "s.csv"
    f.write_text("k_nm_inv,sigma_nm4\n0,1000\n0.05,500\n0.1,0\n")
    code, out, _ = run(capsys, "delta", "--L", "100", "--lambda-p", "136",
                       "--spectrum-file", str(f), "--model", "pfa")
    assert code == 0
    f.write_text("k_nm_inv,sigma_nm4\n0.1,1\n0.05,2\n")
    code, _, err = run(capsys, "delta", "--L", "100", "--lambda-p", "136",
                       "--spectrum-file", str(f))
    assert code == 2
    assert ":3:" in err


SWEEP = ("sweep", "--axis", "L", "--min", "50", "--max", "1000", "--points", "5",
         "--lambda-p", "136", "--a", "2", "--lc", "60")


def test_sweep_file(tmp_path, capsys, monkeypatch):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("CASIMIR_THREADS", "1")
    assert run(capsys, *SWEEP, "--output", str(p1))[0] == 0
    monkeypatch.setenv("CASIMIR_THREADS", "4")
    assert run(capsys, *SWEEP, "--output", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    text = p1.read_text()
    assert [l for l in text.splitlines() if not l.startswith("#")][0] == \
        "axis_value,delta,model,regime"
    rows = parse_csv(text)
    assert len(rows) == 5
    assert float(rows[0]["axis_value"]) == 50.0 and float(rows[-1]["axis_value"]) == 1000.0


@pytest.mark.parametrize("axis, extra", [
    ("k", ("--L", "200", "--a", "2")),
    ("lc", ("--L", "200", "--a", "2")),
])
def test_sweep_other_axes(capsys, axis, extra):
    code, out, _ = run(capsys, "sweep", "--axis", axis, "--min", "1e-3" if axis == "k" else "5",
                       "--max", "0.5" if axis == "k" else "5000", "--points", "4",
                       "--lambda-p", "136", *extra)
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 4
    assert all(float(r["delta"]) > 0 for r in rows)


def test_sweep_json(capsys):
    code, out, _ = run(capsys, *SWEEP, "--json")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 5


def test_sweep_unwritable(capsys, tmp_path):
    code, _, err = run(capsys, *SWEEP, "--output", str(tmp_path / "missing" / "x.csv"))
    assert code == 2
    assert "cannot write" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nL = 200\nlambda-p = 136\n")
    _, out, _ = run(capsys, "energy", "--config", str(cfg))
    assert parse_kv(out)["L_nm"] == "200"
    _, out, _ = run(capsys, "energy", "--config", str(cfg), "--L", "300")
    assert parse_kv(out)["L_nm"] == "300"
    cfg.write_text("bogus=1\n")
    assert run(capsys, "energy", "--config", str(cfg))[0] == 2


def test_oracle_subcommand_hidden(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    assert "oracle" not in out
    assert "sweep" in out


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    cmd = [sys.executable, "-m", "casimir_roughness", *SWEEP, "--output", str(out)]
    subprocess.run(cmd, check=True)
    first = out.read_bytes()
    subprocess.run(cmd, check=True)
    assert out.read_bytes() == first
