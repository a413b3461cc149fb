"""End-to-end CLI behavior: exit codes, formats, round trips."""

import csv
import io
import math
import re

import pytest

from fabricmodel import cli
from fabricmodel.collectives import CollectiveSpec, allreduce_time, hierarchical_allreduce_time
from fabricmodel.costmodel import aurora_cpu_params, aurora_gpu_params, xe_link_params
from fabricmodel.topology import entity_census, ingest_topology_csv

SMALL_INI = """
[fabric]
compute_groups = 4
storage_groups = 1
switches_per_group = 4
chassis_per_group = 2
switches_per_chassis = 2
nodes_per_chassis = 2
nics_per_node = 2
intra_chassis_port_budget = 1
global_base_ports = 2
global_extra_ports = 0
storage_endpoints_per_group = 4
"""


@pytest.fixture()
def small_ini(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL_INI)
    return str(path)


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_bytes():
    assert cli.parse_bytes("8") == 8
    assert cli.parse_bytes("512KiB") == 524288
    assert cli.parse_bytes("1GB") == 10**9
    assert cli.parse_bytes(" 2 MiB ") == 2 * 1024**2
    with pytest.raises(Exception):
        cli.parse_bytes("five furlongs")


def test_generate_round_trip(tmp_path, small_ini, capsys):
    out = tmp_path / "links.csv"
    assert cli.main(["generate", "--config", small_ini, "--out", str(out)]) == 0
    census = entity_census(ingest_topology_csv(out.read_text()))
    assert census.groups_by_kind == {"compute": 4, "storage": 1, "service": 1}
    assert census.compute_nodes == 16
    capsys.readouterr()


def test_generate_stdout_is_csv(small_ini, capsys):
    assert cli.main(["generate", "--config", small_ini]) == 0
    out = capsys.readouterr().out
    assert out.startswith("link_id,class,medium,rate_gbps,end_a,end_b\n")
    assert out.endswith("\n")


def test_validate_clean_config(small_ini, capsys):
    assert cli.main(["validate", "--config", small_ini]) == 0
    assert "0 violations" in capsys.readouterr().out


def test_validate_reports_overbudget(tmp_path, capsys):
    path = tmp_path / "tight.ini"
    path.write_text(SMALL_INI + "switch_radix = 8\n")
    assert cli.main(["validate", "--config", str(path), "--format", "csv"]) == 1
    rows = _rows(capsys.readouterr().out)
    assert rows
    assert all(r["kind"] == "port_budget" for r in rows)


def test_metrics_csv_matches_published(capsys):
    assert cli.main(["metrics", "--preset", "aurora", "--format", "csv"]) == 0
    rows = {r["metric"]: r for r in _rows(capsys.readouterr().out)}
    assert math.isclose(float(rows["injection"]["value_bytes_per_s"]), 2.1248e15)
    assert rows["injection"]["convention"] == "unidirectional"
    assert rows["global"]["convention"] == "full_duplex_doubled"
    assert float(rows["bisection"]["relative_error"]) < 0.01


def test_route_minimal(small_ini, capsys):
    code = cli.main(
        ["route", "--config", small_ini, "--format", "csv", "c0.n0.e0", "c1.n0.e0"]
    )
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) >= 2
    assert all(r["kind"] == "minimal" for r in rows)
    assert all(int(r["switch_hops"]) <= 3 for r in rows)
    assert all(">" in r["links"] for r in rows)


def test_route_valiant(small_ini, capsys):
    code = cli.main(
        ["route", "--config", small_ini, "--format", "csv", "c0.n0.e0", "c1.n0.e0", "--valiant", "c2"]
    )
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert [r["kind"] for r in rows] == ["valiant"]


def test_route_error_exits_2(small_ini, capsys):
    assert cli.main(["route", "--config", small_ini, "c0.n0.e0", "c0.n0.e0"]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_collective_single_matches_library(capsys):
    code = cli.main(
        ["collective", "--algo", "ring", "--nodes", "4", "--bytes", "1MiB", "--format", "csv"]
    )
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    spec = CollectiveSpec(algorithm="ring", participants=4, message_bytes=1024**2)
    assert math.isclose(
        float(rows[0]["predicted_seconds"]), allreduce_time(spec, aurora_cpu_params())
    )


def test_collective_dense_node_uses_hierarchy(capsys):
    code = cli.main(
        [
            "collective", "--algo", "direct", "--nodes", "4", "--ranks-per-node", "12",
            "--bytes", "1MiB", "--location", "gpu", "--format", "csv",
        ]
    )
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    spec = CollectiveSpec(
        algorithm="direct", participants=48, message_bytes=1024**2,
        location="gpu", ranks_per_node=12,
    )
    expected = hierarchical_allreduce_time(spec, xe_link_params(), aurora_gpu_params())
    assert math.isclose(float(rows[0]["predicted_seconds"]), expected)


def test_collective_sweep_prints_trend(capsys):
    code = cli.main(
        [
            "collective", "--algo", "rabenseifner", "--sweep", "16:512", "--bytes", "1GB",
            "--ranks-per-node", "12", "--location", "gpu",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "trend: flat" in out


def test_collective_sweep_csv_rows(capsys):
    code = cli.main(
        [
            "collective", "--algo", "ring", "--sweep", "2:16", "--bytes", "64KiB",
            "--format", "csv",
        ]
    )
    assert code == 0
    captured = capsys.readouterr()
    rows = _rows(captured.out)
    assert [r["nodes"] for r in rows] == ["2", "4", "8", "16"]
    assert "trend:" in captured.err


def test_collective_needs_nodes_or_sweep(capsys):
    assert cli.main(["collective", "--algo", "ring", "--bytes", "8"]) == 2
    assert "error:" in capsys.readouterr().err


def test_collective_bad_bytes(capsys):
    assert cli.main(["collective", "--algo", "ring", "--nodes", "2", "--bytes", "much"]) == 2
    capsys.readouterr()


def test_nodespec_lists_peak(capsys):
    assert cli.main(["nodespec"]) == 0
    out = capsys.readouterr().out
    assert "gpu_peak_fp64" in out
    assert "52.4288" in out
    assert "3800" in out


def test_storage_lists_capacities(capsys):
    assert cli.main(["storage"]) == 0
    out = capsys.readouterr().out
    assert "250.6752" in out
    assert "222.8224" in out
    assert "16+2" in out


def test_reproduce_passes_and_is_deterministic(capsys):
    assert cli.main(["reproduce", "--preset", "aurora"]) == 0
    first = capsys.readouterr().out
    match = re.search(r"(\d+)/(\d+) checks passed", first)
    assert match
    assert match.group(1) == match.group(2)
    assert int(match.group(2)) >= 12
    assert cli.main(["reproduce", "--preset", "aurora"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert "FAIL" not in first


def test_reproduce_fails_off_preset(small_ini, capsys):
    assert cli.main(["reproduce", "--config", small_ini]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_diameter_exhaustive_summary(small_ini, capsys):
    assert cli.main(["diameter", "--config", small_ini, "--pairs", "600"]) == 0
    out = capsys.readouterr().out
    assert "max 3 hops over 496 exhaustive pairs" in out


def test_diameter_rejects_bad_seed(small_ini, capsys, monkeypatch):
    monkeypatch.setenv("FABRICMODEL_SEED", "zebra")
    assert cli.main(["diameter", "--config", small_ini, "--pairs", "10"]) == 2
    assert "FABRICMODEL_SEED" in capsys.readouterr().err


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["teleport"])
    assert exc.value.code == 2


def test_unknown_config_key_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[fabric]\nwarp = 9\n")
    assert cli.main(["metrics", "--config", str(path)]) == 2
    assert "unknown key" in capsys.readouterr().err
