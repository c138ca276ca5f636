import math

import pytest

from giantqed import cli
from giantqed.cli import ConfigError, Sweep, build_config, main, read_csv


def test_sweep_grid_exact():
    vals = Sweep("delta", -1.0, 1.0, 0.04).values()
    assert len(vals) == 51 and 0.36 in vals and -1.0 in vals and 1.0 in vals
    assert Sweep("d", 1, 4, 1).values() == [1, 2, 3, 4]


@pytest.mark.parametrize("bad", [
    {"sweep": "g0:1:0:0.1"},
    {"sweep": "g0:0:1:0"},
    {"sweep": "hopping:0:1:0.1"},
    {"solvers": "rk4"},
    {"dt": "-1"},
    {"colour": "blue"},
    {"d": "1.5"},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        build_config("spectrum", bad)


def test_sweep_mode_requires_range():
    with pytest.raises(ConfigError):
        build_config("sweep", {})


def test_flags_override_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ng0 = 0.5\ndelta = -0.6\nd = 1\n")
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--config", str(cfg), "--g0", "2.7", "--out", str(out)]) == 0
    meta, rows = read_csv(str(out))
    assert meta["params.g0"] == "2.7" and meta["params.delta"] == "-0.6"
    assert len(rows) == 2 and {r["type"] for r in rows} == {"I", "II"}
    assert rows[0]["sweep_value"] == ""


def test_exit_code_config_error(tmp_path, capsys):
    assert main(["spectrum", "--sweep", "q:0:1:1"]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["spectrum", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["figure"]) == 2
    assert main(["figure", "fig9z"]) == 2
    assert main(["nonsense"]) == 2


def test_deterministic_output(tmp_path):
    args = ["spectrum", "--sweep", "g0:0.2:1.0:0.2", "--delta", "0.16", "--d", "3",
            "--n-atoms", "2", "--jobs", "1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_dynamics_columns(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["dynamics", "--n-atoms", "2", "--d", "3", "--z", "3", "--g0", "0.6",
                 "--t-max", "1", "--dt", "0.01", "--solvers", "volterra,ww",
                 "--stride", "5", "--out", str(out)]) == 0
    _, rows = read_csv(str(out))
    assert len(rows) == 21
    cols = list(rows[0])
    assert cols[:4] == ["t", "volterra_c1_re", "volterra_c1_im", "volterra_c1_population"]
    assert "volterra_concurrence" in cols and "ww_c2_population" in cols
    assert float(rows[0]["volterra_c1_population"]) == 1.0


def test_steady_columns(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["steady", "--delta", "-1", "--d", "3", "--g0", "0.8", "--out", str(out)]) == 0
    _, rows = read_csv(str(out))
    r = rows[0]
    lo, mean, hi = (float(r[f"c1_population_{k}"]) for k in ("min", "mean", "max"))
    assert lo < mean < hi
    assert len(r["c1_frequencies"].split(";")) == 1


def test_figure_preset_fig2a(tmp_path, monkeypatch):
    seen = []
    monkeypatch.setattr(cli, "run_dynamics", lambda c: seen.append(c) or 0)
    monkeypatch.setitem(cli.RUNNERS, "dynamics", cli.run_dynamics)
    assert main(["figure", "fig2a", "--out", str(tmp_path)]) == 0
    assert [c.params.g0 for c in seen] == [0.4, 1.2, 2.7]
    assert all(c.params.delta == -0.6 and c.params.d == 1 for c in seen)


def test_figure_preset_fig5_jobs():
    jobs = cli.PRESETS["fig5"]
    assert jobs[0][1] == "spectrum" and jobs[0][3].name == "delta"
    p = jobs[0][2]
    assert (p.g0, p.d, p.z, p.n_atoms) == (0.6, 3, 3, 2)
    assert [j[2].delta for j in jobs[1:]] == [0.36, 1.0, -1.0]


def test_validate_reparses_inputs(tmp_path, monkeypatch):
    from giantqed import validation
    monkeypatch.setattr(validation, "run_all", lambda: [])
    good = tmp_path / "g.csv"
    main(["spectrum", "--out", str(good)])
    bad = tmp_path / "b.csv"
    bad.write_text("x,y\n1,2\n")
    rep = tmp_path / "r.csv"
    assert main(["validate", "--out", str(rep), "--inputs", str(good)]) == 0
    assert main(["validate", "--out", str(rep), "--inputs", str(good), str(bad)]) == 1
    _, rows = read_csv(str(rep))
    assert [r["passed"] for r in rows] == ["true", "false"]
