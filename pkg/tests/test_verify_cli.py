"""Command line interface tests: parsing, exit codes, formats, determinism."""

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from deformkit.deformation import deformed_product_exact
from deformkit.symbols import (
    DeformationMatrix,
    GridSymbol,
    PlaneWaveSymbol,
    read_symbol_file,
    write_symbol_file,
)
from deformkit.verify_cli import (
    SUITES,
    RunConfig,
    main,
    parse_config,
    parse_theta_sweep,
)
from conftest import gaussian_grid_values

FAST_SUITES = "plancherel,unitization"


def wave_file(path, n, terms, L=6.0):
    sym = PlaneWaveSymbol(n, L, 1, tuple(terms))
    write_symbol_file(sym, str(path))
    return sym


# ---------------------------------------------------------------------------
# Config and sweep parsing


def test_parse_theta_sweep_inclusive_endpoints():
    assert parse_theta_sweep("0:0.25:1") == (0.0, 0.25, 0.5, 0.75, 1.0)


def test_parse_theta_sweep_drops_unreachable_end():
    assert parse_theta_sweep("0:0.3:1") == (0.0, 0.3, 0.6, 0.9)


def test_parse_theta_sweep_single_point():
    assert parse_theta_sweep("0.5:1:0.5") == (0.5,)


@pytest.mark.parametrize("spec", ["0:0.1", "1:-0.1:0", "1:0.1:0", "a:b:c"])
def test_parse_theta_sweep_rejects_malformed(spec):
    with pytest.raises(ValueError):
        parse_theta_sweep(spec)


def test_parse_config_reads_typed_keys(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# geometry\n"
        "n = 1\n"
        "N = 64  # grid\n"
        "L = 4.0\n"
        "theta = 0.5\n"
        "seed = 7\n"
        "suites = plancherel, unitization\n",
        encoding="utf-8",
    )
    cfg = parse_config(str(path))
    assert cfg.n == 1
    assert cfg.N == 64
    assert cfg.L == 4.0
    assert cfg.theta == 0.5
    assert cfg.seed == 7
    assert cfg.suites == ("plancherel", "unitization")


def test_parse_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("volume = 11\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad.cfg:1"):
        parse_config(str(path))


def test_parse_config_rejects_missing_equals(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("n 1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad.cfg:1"):
        parse_config(str(path))


@pytest.mark.parametrize(
    "field,value",
    [("n", 3), ("N", 48), ("N", 0), ("L", -1.0), ("k", 0), ("tol", 0.0),
     ("norm_order", -1), ("workers", 0)],
)
def test_run_config_rejects_invalid_fields(field, value):
    with pytest.raises(ValueError):
        RunConfig(**{field: value})


def test_run_config_deformation_dimension():
    assert RunConfig(n=1).deformation().entries.shape == (1, 1)
    J = RunConfig(n=2, theta=0.5).deformation().entries
    assert_allclose(J, 0.5 * np.array([[0.0, 1.0], [-1.0, 0.0]]))


# ---------------------------------------------------------------------------
# product subcommand


def test_product_plane_wave_matches_exact_law(tmp_path):
    f = wave_file(tmp_path / "f.json", 2, (((1, 0), 1.0), ((0, 1), 0.5j)))
    g = wave_file(tmp_path / "g.json", 2, (((0, 1), 2.0),))
    out = tmp_path / "fg.json"
    code = main(["product", str(tmp_path / "f.json"), str(tmp_path / "g.json"),
                 "--out", str(out)])
    assert code == 0
    got = read_symbol_file(str(out))
    expected = deformed_product_exact(f, g, DeformationMatrix.symplectic(0.25, 2))
    assert dict(got.terms).keys() == dict(expected.terms).keys()
    for m, c in expected.terms:
        assert_allclose(dict(got.terms)[m], c, atol=1e-12)


def test_product_grid_inputs_write_grid_output(tmp_path):
    vals = gaussian_grid_values(1, 32, 6.0, 1.0)
    write_symbol_file(GridSymbol(1, 32, 6.0, vals), str(tmp_path / "a.rsym"))
    write_symbol_file(GridSymbol(1, 32, 6.0, 0.5 * vals), str(tmp_path / "b.rsym"))
    out = tmp_path / "ab.rsym"
    code = main(["product", str(tmp_path / "a.rsym"), str(tmp_path / "b.rsym"),
                 "--out", str(out)])
    assert code == 0
    got = read_symbol_file(str(out))
    assert got.N == 32
    assert np.abs(got.values).max() > 0.0


def test_product_missing_file_exits_2(tmp_path):
    wave_file(tmp_path / "f.json", 1, (((1,), 1.0),))
    code = main(["product", str(tmp_path / "f.json"), str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.json")])
    assert code == 2


def test_product_malformed_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    wave_file(tmp_path / "g.json", 1, (((1,), 1.0),))
    code = main(["product", str(bad), str(tmp_path / "g.json"),
                 "--out", str(tmp_path / "o.json")])
    assert code == 2


def test_product_dimension_mismatch_exits_2(tmp_path):
    wave_file(tmp_path / "f.json", 1, (((1,), 1.0),))
    wave_file(tmp_path / "g.json", 2, (((1, 0), 1.0),))
    code = main(["product", str(tmp_path / "f.json"), str(tmp_path / "g.json"),
                 "--out", str(tmp_path / "o.json")])
    assert code == 2


# ---------------------------------------------------------------------------
# norms subcommand


def test_norms_csv_shape_and_agreement(tmp_path):
    wave_file(tmp_path / "f.json", 1, (((1,), 0.8), ((-2,), 0.3j)), L=4.0)
    out = tmp_path / "norms.csv"
    code = main(["norms", str(tmp_path / "f.json"),
                 "--theta-sweep", "0:0.5:1", "--out", str(out)])
    assert code == 0
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    assert header == ["theta", "sup_norm", "op_norm", "T_0", "T_1", "T_2",
                      "s_0", "s_1", "s_2", "cv_ratio"]
    assert len(lines) == 4
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    assert [r[0] for r in rows] == [0.0, 0.5, 1.0]
    for row in rows:
        sup, op = row[1], row[2]
        assert abs(sup - op) <= 0.02 * sup

    # one dimensional symbols ignore theta, so all rows agree past column 0
    body = {tuple(r[1:]) for r in rows}
    assert len(body) == 1


def test_norms_default_sweep_runs(tmp_path):
    wave_file(tmp_path / "f.json", 1, (((1,), 1.0),), L=4.0)
    out = tmp_path / "norms.csv"
    code = main(["norms", str(tmp_path / "f.json"), "--out", str(out)])
    assert code == 0
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == 12


def test_norms_missing_file_exits_2(tmp_path):
    code = main(["norms", str(tmp_path / "nope.json")])
    assert code == 2


# ---------------------------------------------------------------------------
# verify subcommand


def test_verify_report_schema_and_exit(tmp_path):
    out = tmp_path / "report.json"
    code = main(["verify", "--suites", FAST_SUITES, "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["schema_version"] == 1
    assert report["all_passed"] is True
    names = [s["suite"] for s in report["suites"]]
    assert names == sorted(names) == ["plancherel", "unitization"]
    for suite in report["suites"]:
        ids = [r["claim_id"] for r in suite["records"]]
        assert ids == sorted(ids)
        for rec in suite["records"]:
            assert set(rec) == {"claim_id", "claim", "measured", "bound", "passed"}
            assert rec["passed"] is True
            assert rec["measured"] <= rec["bound"]
    assert report["checks"] == sum(s["checks"] for s in report["suites"])
    assert report["failures"] == 0


def test_verify_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--suites", FAST_SUITES, "--out", str(a)]) == 0
    assert main(["verify", "--suites", FAST_SUITES, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_workers_do_not_change_report(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--suites", FAST_SUITES, "--out", str(a)]) == 0
    assert main(["verify", "--suites", FAST_SUITES, "--workers", "2",
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_unknown_suite_exits_3(tmp_path):
    code = main(["verify", "--suites", "bogus", "--out", str(tmp_path / "r.json")])
    assert code == 3


def test_verify_honors_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 11\nsuites = plancherel\n", encoding="utf-8")
    out = tmp_path / "report.json"
    code = main(["--config", str(cfg), "verify", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert [s["suite"] for s in report["suites"]] == ["plancherel"]


def test_config_unknown_key_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("volume = 11\n", encoding="utf-8")
    code = main(["--config", str(cfg), "info"])
    assert code == 2


# ---------------------------------------------------------------------------
# info and usage


def test_info_lists_suites(capsys):
    assert main(["info"]) == 0
    out = capsys.readouterr().out
    assert "deformkit" in out
    for name in SUITES:
        assert name in out


def test_missing_subcommand_exits_3():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 3


def test_unknown_flag_exits_3():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus"])
    assert exc.value.code == 3
