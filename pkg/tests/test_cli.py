"""Command-line interface, configuration files and CSV output."""

import csv
import io
import subprocess
import sys

import pytest

from mimosec.cli import EXIT_INVALID, EXIT_NUMERICAL, main
from mimosec.experiment import ExperimentSpec, Table, format_value, load_config, parse_values

from oracles import CAPACITY_M2_TSNR0


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def records(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# ---------------------------------------------------------------------------
# analytic
# ---------------------------------------------------------------------------

def test_capacity_golden_row(capsys):
    code, out, _ = run(["analytic", "capacity", "--nt", "4", "--k", "10", "--m", "2", "--alpha2", "0.01",
                        "--eps", "0.05", "--tsnr-db", "0"], capsys)
    assert code == 0
    rows = records(out)
    assert len(rows) == 1
    assert float(rows[0]["rate"]) == pytest.approx(CAPACITY_M2_TSNR0, abs=1e-9)
    assert float(rows[0]["sum_capacity"]) == pytest.approx(2 * CAPACITY_M2_TSNR0, abs=2e-9)


def test_interference_interception(capsys):
    code, out, _ = run(["analytic", "interception", "--regime", "interference", "--k", "10"], capsys)
    assert code == 0
    assert records(out)[0]["interception"] == "0.0909090909091"


def test_outage_at_zero_equals_interception(capsys):
    _, a, _ = run(["analytic", "outage", "--m", "3", "--r", "0"], capsys)
    _, b, _ = run(["analytic", "interception", "--m", "3"], capsys)
    assert records(a)[0]["outage"] == records(b)[0]["interception"]


def test_grid_of_snrs_and_rates(capsys):
    code, out, _ = run(["analytic", "outage", "--m", "2", "--tsnr-db", "-4", "0", "4", "--r", "0.1", "0.5"], capsys)
    rows = records(out)
    assert code == 0 and len(rows) == 6
    assert [r["tsnr_db"] for r in rows] == ["-4", "-4", "0", "0", "4", "4"]


def test_rho_is_linear(capsys):
    _, a, _ = run(["analytic", "outage", "--m", "2", "--r", "0.5", "--rho", "10"], capsys)
    _, b, _ = run(["analytic", "outage", "--m", "2", "--r", "0.5", "--tsnr-db", "10"], capsys)
    assert records(a)[0]["outage"] == records(b)[0]["outage"]


def test_asymptotic_modes(capsys):
    for regime, mode in (("noise", "4"), ("interference", "1"), ("large_k", "4")):
        code, out, _ = run(["analytic", "asymptotic", "--regime", regime, "--m", "2"], capsys)
        assert code == 0 and records(out)[0]["asymptotic_mode"] == mode
    code, _, err = run(["analytic", "asymptotic"], capsys)
    assert code == EXIT_INVALID


def test_numerical_failure_names_regime(capsys, monkeypatch):
    from mimosec import cli
    from mimosec.errors import QuadratureError

    def broken(*a, **kw):
        raise QuadratureError("forced non-convergence", 1e-3)

    monkeypatch.setattr(cli, "outage_probability", broken)
    code, _, err = run(["analytic", "outage", "--m", "3", "--r", "0.5"], capsys)
    assert code == EXIT_NUMERICAL
    assert "numerical failure in the general regime" in err


def test_sweep_cell_failure_keeps_partial_output(capsys, monkeypatch):
    from mimosec import experiment
    from mimosec.errors import QuadratureError

    real = experiment.ams_select

    def flaky(cfg, *a, **kw):
        if cfg.n_users == 10:
            raise QuadratureError("forced", 1e-3)
        return real(cfg, *a, **kw)

    monkeypatch.setattr(experiment, "ams_select", flaky)
    code, out, err = run(["sweep", "--sweep", "k=5,10", "--schemes", "AMS"], capsys)
    rows = records(out)
    assert code == EXIT_NUMERICAL
    assert rows[0]["status"] == "ok" and "numerical failure in the general regime" in rows[1]["status"]
    assert "forced" in err


# ---------------------------------------------------------------------------
# invalid input
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["analytic", "capacity", "--m", "5"],
    ["analytic", "capacity", "--eps", "1.5"],
    ["analytic", "outage", "--r", "-1"],
    ["analytic", "capacity", "--k", "0"],
    ["simulate", "--trials", "10"],
    ["sweep", "--sweep", "colour=1,2"],
    ["sweep", "--sweep", "k"],
    ["analytic", "outage", "--config", "/nonexistent/file.ini"],
])
def test_invalid_input_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == EXIT_INVALID
    assert "error" in err


@pytest.mark.parametrize("argv", [
    ["analytic", "capacity", "--nt", "four"],
    ["analytic", "volume"],
    ["reproduce", "table9"],
    ["analytic", "outage", "--tsnr-db", "0", "--rho", "1"],
])
def test_argparse_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == EXIT_INVALID


def test_zero_trials_points_to_analytic(capsys):
    code, _, err = run(["simulate", "--trials", "0", "--seed", "1"], capsys)
    assert code == EXIT_INVALID
    assert "use analytic" in err


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_byte_identical(capsys, tmp_path):
    argv = ["simulate", "--trials", "20000", "--seed", "42", "--m", "2", "--tsnr-db", "0"]
    main(argv + ["--out", str(tmp_path / "a.csv")])
    main(argv + ["--out", str(tmp_path / "b.csv"), "--workers", "2"])
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    assert b"\r\n" not in a
    assert b"# seed: 42" in a


def test_simulate_agrees_with_analytic(capsys):
    code, out, _ = run(["simulate", "--trials", "200000", "--seed", "3", "--m", "2"], capsys)
    row = records(out)[0]
    assert code == 0
    assert abs(float(row["empirical_outage"]) - float(row["analytic_outage"])) <= 3 * float(row["outage_std_err"])


def test_strict_scheduling_flag(capsys):
    _, out, _ = run(["simulate", "--trials", "2000", "--seed", "1", "--m", "4", "--k", "2", "--strict-scheduling",
                     "--r", "0.1"], capsys)
    row = records(out)[0]
    assert row["scheduling"] == "strict"
    assert int(row["starved_beams"]) == 2 * 2000


# ---------------------------------------------------------------------------
# select, sweep, reproduce
# ---------------------------------------------------------------------------

def test_select_ams_rows(capsys):
    code, out, _ = run(["select", "ams", "--tsnr-db", "-10", "10"], capsys)
    rows = records(out)
    assert code == 0 and len(rows) == 8
    chosen = [r["mode"] for r in rows if r["chosen"] == "1"]
    assert chosen == ["4", "1"]


def test_select_fixed(capsys):
    _, out, _ = run(["select", "ftm2"], capsys)
    rows = records(out)
    assert len(rows) == 1 and rows[0]["mode"] == "4" and rows[0]["scheme"] == "FTM2"


def test_sweep_flags(capsys):
    code, out, _ = run(["sweep", "--sweep", "tsnr_db=-2:2:2", "--sweep", "k=5,10", "--schemes", "ams,ftm1"], capsys)
    rows = records(out)
    assert code == 0 and len(rows) == 12
    assert [r["k"] for r in rows[:4]] == ["5", "5", "10", "10"]
    assert "# sweep: tsnr_db=-2,0,2; k=5,10" in out


def test_config_file_and_override(tmp_path, capsys):
    ini = tmp_path / "exp.ini"
    ini.write_text("[experiment]\nname = demo\nschemes = AMS\n\n[system]\nk = 5\neps = 0.1\ntsnr_db = 4\n\n"
                   "[sweep]\nalpha2 = 0.01, 0.1\n")
    code, out, _ = run(["sweep", "--config", str(ini)], capsys)
    rows = records(out)
    assert code == 0 and len(rows) == 2
    assert {r["k"] for r in rows} == {"5"} and {r["eps"] for r in rows} == {"0.1"}
    assert out.startswith("# mimosec")
    code, out, _ = run(["sweep", "--config", str(ini), "--k", "7"], capsys)
    assert {r["k"] for r in records(out)} == {"7"}


def test_load_config_rejects_unknown_section(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[plot]\ncolour = red\n")
    with pytest.raises(ValueError):
        load_config(ini)


def test_parse_values():
    assert parse_values("tsnr_db", "-10:10:5") == (-10.0, -5.0, 0.0, 5.0, 10.0)
    assert parse_values("k", "5,10,50") == (5, 10, 50)
    assert parse_values("k", "2:6:2") == (2, 4, 6)
    with pytest.raises(ValueError):
        parse_values("eps", "0:1:0")


def test_experiment_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(sweep=(("colour", (1,)),))
    with pytest.raises(ValueError):
        ExperimentSpec(trials=-1)
    with pytest.raises(ValueError):
        ExperimentSpec(seed=2 ** 64)
    with pytest.raises(ValueError):
        ExperimentSpec(schemes=("AMS", "TDMA"))
    assert len(list(ExperimentSpec(sweep=(("k", (5, 10)), ("m", (1, 2, 3)))).points())) == 6


def test_reproduce_table_to_file(tmp_path, capsys):
    path = tmp_path / "t1.csv"
    code = main(["reproduce", "table1", "--out", str(path)])
    text = path.read_text(encoding="utf-8")
    assert code == 0
    assert text.startswith("# mimosec")
    rows = records(text)
    assert len(rows) == 33
    assert {r["row"] for r in rows} == {"AMS", "FTM1", "FTM2"}


def test_reproduce_fig5_short(capsys):
    code, out, _ = run(["reproduce", "fig5", "--trials", "2000", "--seed", "1", "--tsnr-db", "0"], capsys)
    assert code == 0
    assert "empirical_outage" in out.splitlines()[[i for i, ln in enumerate(out.splitlines())
                                                      if not ln.startswith("#")][0]]


# ---------------------------------------------------------------------------
# CSV formatting
# ---------------------------------------------------------------------------

def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value(3) == "3"
    assert format_value(True) == "1"
    assert format_value(None) == ""
    assert format_value(1e-20) == "1e-20"


def test_table_csv_layout():
    t = Table("x", ("a", "b"), [{"a": 1, "b": 0.5}, {"a": 2}], ["comment"])
    assert t.to_csv() == "# comment\na,b\n1,0.5\n2,\n"
    buf = io.StringIO()
    t.write_csv(buf)
    assert buf.getvalue() == t.to_csv()


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "mimosec", "analytic", "interception", "--regime", "interference",
                        "--k", "1"], capture_output=True, text=True)
    assert p.returncode == 0
    assert records(p.stdout)[0]["interception"] == "0.5"
