import io
import math
from pathlib import Path

import pytest

from atsh.bench import (
    CSV_HEADER,
    ConfigError,
    EfficiencyRecord,
    SweepConfig,
    apply_setting,
    default_j_range,
    emit_csv,
    load_config,
    plot_script,
    read_csv,
    report_errors,
    run_sweep,
    write_outputs,
)
from atsh.integrator import integrate
from atsh.methods import ATSH4_ZD, ATSH5_MINERR, ATSH5_PL8, NUMEROV4, MethodId
from atsh.problems import BenchmarkId, make_problem


def small_config(**settings):
    config = SweepConfig()
    for key, value in settings.items():
        apply_setting(config, key.replace("__", "."), value)
    return config


def test_default_j_ranges():
    p1, p2, p3, p4 = (BenchmarkId.parse(f"problem{k}") for k in range(1, 5))
    assert default_j_range(ATSH5_MINERR, p1) == (1, 2, 3, 4, 5)
    assert default_j_range(ATSH5_MINERR.companion(), p1) == (3, 4, 5, 6, 7)
    for m in (NUMEROV4, ATSH4_ZD, ATSH5_MINERR):
        assert default_j_range(m, p2) == (-2, -1, 0, 1, 2)
    assert default_j_range(ATSH5_PL8, p2) == (-1, 0, 1, 2, 3)
    assert default_j_range(NUMEROV4.companion(), p3) == (0, 1, 2, 3, 4)
    assert default_j_range(ATSH5_PL8, p4) == (2, 3, 4, 5, 6)


def test_config_defaults():
    config = SweepConfig()
    assert len(config.methods) == 8
    assert [p.value for p in config.problems] == ["problem1", "problem2", "problem3", "problem4"]
    assert config.base(BenchmarkId.INHOMOGENEOUS) == 1.0
    assert config.base(BenchmarkId.SATELLITE) == pytest.approx(1 - math.pi / 100)


def test_apply_settings():
    config = small_config(methods="atsh5-minerr, classical:numerov4", problems="problem4",
                          count_starter="yes", workers="3")
    apply_setting(config, "j.*.problem4", "2..4")
    assert [m.name for m in config.methods] == ["atsh5-minerr", "classical:numerov4"]
    assert config.count_starter and config.workers == 3
    apply_setting(config, "j.atsh5-minerr.problem4", "5,7")
    assert config.j_range(ATSH5_MINERR, BenchmarkId.FRANCO_SYSTEM) == (5, 7)
    assert config.j_range(NUMEROV4.companion(), BenchmarkId.FRANCO_SYSTEM) == (2, 3, 4)
    apply_setting(config, "base.problem4", "0.5")
    assert [h for *_, h in config.cells()][:2] == [0.5 * 2.0**-5, 0.5 * 2.0**-7]


@pytest.mark.parametrize("key,value", [
    ("methods", "rk4"),
    ("problems", "problem9"),
    ("workers", "0"),
    ("timing", "maybe"),
    ("j.atsh5-minerr.problem1", "a..b"),
    ("colour", "blue"),
    ("starter", "guess"),
])
def test_bad_settings(key, value):
    with pytest.raises(ConfigError):
        apply_setting(SweepConfig(), key, value)


def test_empty_j_range_and_bad_base():
    config = SweepConfig()
    apply_setting(config, "j.atsh5-minerr.problem1", "")
    with pytest.raises(ConfigError):
        config.cells()
    config = SweepConfig()
    config.bases["problem1"] = -1.0
    with pytest.raises(ConfigError):
        config.cells()


def test_load_config(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text("# P4 only\nmethods = atsh4-zd\nproblems = problem4  # Franco\n\nj.*.problem4 = 3..4\n")
    config = load_config(path)
    assert config.cells() == [(ATSH4_ZD, BenchmarkId.FRANCO_SYSTEM, 2.0**-3),
                              (ATSH4_ZD, BenchmarkId.FRANCO_SYSTEM, 2.0**-4)]
    path.write_text("methods = atsh4-zd\njust words\n")
    with pytest.raises(ConfigError, match=":2:"):
        load_config(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


def test_problem1_minerr_sweep():
    config = small_config(methods="atsh5-minerr", problems="problem1")
    records = run_sweep(config)
    assert len(records) == 5
    errs = [r.max_global_error for r in sorted(records, key=lambda r: -r.h)]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    assert [r.h for r in sorted(records, key=lambda r: -r.h)] == [2.0**-j for j in range(1, 6)]


def test_empty_problem_list():
    config = small_config(problems="")
    assert run_sweep(config) == []
    buf = io.StringIO()
    emit_csv([], buf)
    assert buf.getvalue() == ",".join(CSV_HEADER) + "\n"


def test_canonical_order_with_workers():
    serial = run_sweep(small_config(methods="atsh5-pl8,numerov4,classical:atsh4-zd",
                                    problems="problem4,problem2"))
    threaded = run_sweep(small_config(methods="classical:atsh4-zd,atsh5-pl8,numerov4",
                                      problems="problem2,problem4", workers="4"))
    assert serial == threaded
    keys = [(r.method, r.problem, r.h) for r in serial]
    assert keys == sorted(keys)


def test_g_evals_match_integrator():
    records = run_sweep(small_config(methods="atsh5-minerr,classical:numerov4", problems="problem4"))
    prob = make_problem("problem4")
    for r in records:
        res = integrate(MethodId.parse(r.method), prob, r.h)
        assert r.g_evals == res.g_evals and r.steps == res.steps
        assert r.max_global_error == res.max_global_error


def test_count_starter_adds_oracle_cost():
    plain = run_sweep(small_config(methods="numerov4", problems="problem4", starter="oracle"))
    counted = run_sweep(small_config(methods="numerov4", problems="problem4", starter="oracle",
                                     count_starter="1"))
    assert all(b.g_evals > a.g_evals for a, b in zip(plain, counted))


def test_error_rows_do_not_abort():
    # classical Numerov leaves its periodicity interval at h = 1 on problem1 (H^2 = 100)
    config = small_config(methods="classical:numerov4,atsh5-minerr", problems="problem1")
    apply_setting(config, "j.*.problem1", "-7,0,3")
    records = run_sweep(config)
    assert len(records) == 6
    reasons = {(r.method, r.h): r.reason for r in records}
    assert reasons[("classical:numerov4", 128.0)] == "invalid"
    assert reasons[("classical:numerov4", 1.0)] == "blowup"
    assert reasons[("classical:numerov4", 0.125)] == ""
    bad = [r for r in records if not r.ok]
    assert all(math.isnan(r.max_global_error) for r in bad)


def test_error_row_reporting():
    bad = EfficiencyRecord("atsh5-minerr", "problem1", 0.5, 0, 0, math.nan, status="error",
                           reason="blowup")
    good = EfficiencyRecord("atsh5-minerr", "problem1", 0.25, 400, 1200, 1e-5)
    buf = io.StringIO()
    assert report_errors([bad, good], buf) == 1
    assert "reason=blowup" in buf.getvalue()
    out = io.StringIO()
    emit_csv([bad, good], out)
    back = read_csv(io.StringIO(out.getvalue()))
    assert not back[0].ok and back[1].ok


def test_csv_round_trip():
    records = run_sweep(small_config(methods="atsh5-pl8", problems="problem4"))
    buf = io.StringIO()
    emit_csv(records, buf)
    assert buf.getvalue().splitlines()[0] == ",".join(CSV_HEADER)
    assert read_csv(io.StringIO(buf.getvalue())) == records


def test_read_csv_rejects_header():
    with pytest.raises(ValueError):
        read_csv(io.StringIO("a,b\n1,2\n"))


def test_byte_identical_runs(tmp_path):
    config = small_config(methods="atsh5-minerr,classical:atsh5-minerr", problems="problem4,problem1")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_outputs(run_sweep(config), a)
    write_outputs(run_sweep(config), b)
    assert a.read_bytes() == b.read_bytes()


def test_plot_script_refers_to_csv_only(tmp_path):
    records = run_sweep(small_config(methods="numerov4", problems="problem4"))
    paths = write_outputs(records, tmp_path / "curves.csv", with_plot=True)
    script = Path(paths[1]).read_text()
    assert "'curves.csv'" in script and str(tmp_path) not in script
    compile(script, "curves_plot.py", "exec")
    assert plot_script("out/x.csv") == plot_script("x.csv")
    with pytest.raises(ValueError):
        write_outputs([], tmp_path / "empty.csv", with_plot=True)


def test_io_error_has_path(tmp_path):
    with pytest.raises(OSError, match="nowhere"):
        write_outputs([], tmp_path / "nowhere" / "x.csv")


@pytest.mark.parametrize("problem,h", [("problem1", 2.0**-3), ("problem2", 1.0)])
def test_adapted_beats_classical(problem, h):
    records = run_sweep(small_config(methods="atsh5-minerr,classical:atsh5-minerr", problems=problem,
                                     **{f"j__*__{problem}": str(int(-math.log2(h)))}))
    by_method = {r.method: r.max_global_error for r in records}
    assert by_method["atsh5-minerr"] < by_method["classical:atsh5-minerr"]
