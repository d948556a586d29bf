import json

import pytest

from perishable_duopoly.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main
from perishable_duopoly.config import ConfigError, manifest_text, parse_config, parse_range


def test_parse_config_defaults():
    cfg = parse_config("", {"temperature": 0.02, "greed": 0.6})
    assert cfg.model.R == pytest.approx(4.0)
    assert cfg.sim.seed == 0 and cfg.output.threads == 1
    assert cfg.meanfield.dt == 0.05


def test_parse_config_requires_point():
    with pytest.raises(ConfigError, match="temperature"):
        parse_config("[model]\ngreed = 0.6\n")
    cfg = parse_config("", require_point=False)
    assert cfg.model.temperature == 0.0


@pytest.mark.parametrize("text,key", [
    ("[model]\nalpha = 1.2\n", "alpha"),
    ("[model]\nn_products = 0\n", "n_products"),
    ("[sim]\nscheduler = bogus\n", "scheduler"),
    ("[model]\ncolour = red\n", "colour"),
    ("[extra]\nx = 1\n", "extra"),
    ("[output]\nthreads = 0\n", "threads"),
    ("[sweep]\nT_range = 0:1\n", "T_range"),
])
def test_parse_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(text + "[model]\ntemperature = 0.1\ngreed = 0.5\n" if "[model]" not in text
                     else text.replace("[model]\n", "[model]\ntemperature = 0.1\ngreed = 0.5\n"))


def test_flags_override_file():
    cfg = parse_config("[model]\ntemperature = 0.1\ngreed = 0.5\n[sim]\nseed = 3\n",
                       {"seed": 9, "temperature": None})
    assert cfg.sim.seed == 9 and cfg.model.temperature == 0.1


def test_parse_range():
    r = parse_range("0.01:0.1:10")
    assert r.count == 10 and r.values()[0] == 0.01 and r.values()[-1] == pytest.approx(0.1)
    assert parse_range("0.3:0.3:1").values() == [0.3]
    with pytest.raises(ConfigError):
        parse_range("0.1:0.0:3")


def test_manifest_round_trip():
    cfg = parse_config("[model]\ntemperature = 0.02\ngreed = 0.6\nalpha = 0.98\n"
                       "[sim]\nupdate_rule = chosen\n[sweep]\ng_range = 0.1:0.9:5\n")
    text = manifest_text(cfg, "simulate")
    assert "[meta]" in text and "command = simulate" in text
    assert parse_config(text) == cfg


def run_cli(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_boundary_command(tmp_path, capsys):
    assert run_cli(tmp_path, "boundary") == EXIT_OK
    summary = (tmp_path / "boundary_summary.txt").read_text()
    values = dict(line.split(" = ") for line in summary.splitlines())
    assert float(values["g_c"]) == pytest.approx(0.4445, abs=1e-4)
    assert float(values["T_c0"]) == pytest.approx(0.22222, abs=1e-5)
    lines = (tmp_path / "boundary.csv").read_text().splitlines()
    assert lines[0] == "g,T_c,tau_star" and len(lines) == 102
    assert "g_c=0.444481484" in capsys.readouterr().out
    assert (tmp_path / "manifest.txt").exists()


def test_simulate_is_byte_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["simulate", "--T", "0.02", "--g", "0.6", "--seed", "42", "--duration", "20"]
    assert main([*args, "--out", str(a)]) == EXIT_OK
    assert main([*args, "--out", str(b)]) == EXIT_OK
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()
    def settings(d):
        return [ln for ln in (d / "manifest.txt").read_text().splitlines() if not ln.startswith("out =")]
    assert settings(a) == settings(b)


def test_svg_and_json_do_not_change_csv(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["simulate", "--T", "0.02", "--g", "0.6", "--seed", "1", "--duration", "10"]
    main([*args, "--out", str(a)])
    main([*args, "--svg", "--json", "--out", str(b)])
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()
    assert (b / "timeseries.svg").read_text().startswith("<svg")
    assert set(json.loads((b / "summary.json").read_text())) >= {"m_a", "m_o", "phase"}


def test_manifest_reproduces_run(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["simulate", "--T", "0.05", "--g", "0.4", "--seed", "5", "--duration", "10", "--out", str(a)])
    manifest = a / "manifest.txt"
    assert main(["simulate", "--config", str(manifest), "--out", str(b)]) == EXIT_OK
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()


def test_meanfield_command(tmp_path):
    assert run_cli(tmp_path, "meanfield", "--T", "0.3", "--g", "0.1", "--duration", "10") == EXIT_OK
    q = (tmp_path / "q_curve.csv").read_text().splitlines()
    assert q[0] == "tau,Q,Q0" and len(q) == 402
    assert (tmp_path / "meanfield.csv").read_text().startswith("t,p1,p2,")


def test_sweep_threads_do_not_change_table(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["sweep", "--T-range", "0.02:0.3:3", "--g-range", "0.2:0.8:3", "--duration", "8",
            "--seed", "2"]
    assert main([*args, "--threads", "1", "--out", str(a)]) == EXIT_OK
    assert main([*args, "--threads", "4", "--out", str(b)]) == EXIT_OK
    table = (a / "sweep.csv").read_text()
    assert table == (b / "sweep.csv").read_text()
    assert len(table.splitlines()) == 10


def test_exit_codes(tmp_path, capsys):
    assert run_cli(tmp_path, "simulate", "--g", "0.6") == EXIT_CONFIG
    assert run_cli(tmp_path, "simulate", "--T", "-1", "--g", "0.6") == EXIT_CONFIG
    assert run_cli(tmp_path, "sweep") == EXIT_CONFIG
    assert main(["boundary", "--config", str(tmp_path / "missing.ini")]) == EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["boundary", "--out", str(blocker / "sub")]) == EXIT_IO
    assert "error" in capsys.readouterr().err
