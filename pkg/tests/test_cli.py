import json
from importlib import resources

import jsonschema
import pytest

from crnkit import cli, families
from crnkit.dynamics import MassActionSystem, relative_network
from crnkit.io import format_system, parse_system


def run(argv):
    return cli.main(argv)


def schema(name):
    path = resources.files("crnkit").joinpath("schemas", name)
    return json.loads(path.read_text(encoding="utf-8"))


def validate(payload, schema_name):
    jsonschema.validate(payload, schema(schema_name))


@pytest.fixture()
def rep3_files(tmp_path):
    base = tmp_path / "rep3.crn"
    rel = tmp_path / "rep3_rel.crn"
    assert run(["generate", "--family", "rep-recomb", "--n", "3", "-o", str(base)]) == 0
    assert run(["generate", "--family", "rep-recomb", "--n", "3", "--relative", "-o", str(rel)]) == 0
    return base, rel


def test_generate_matches_library(rep3_files):
    base, rel = rep3_files
    expected = MassActionSystem.with_unit_rates(families.rep_recomb(3))
    assert base.read_text() == format_system(expected)
    assert rel.read_text() == format_system(relative_network(expected))


def test_generate_invalid_n_exits_2(capsys):
    assert run(["generate", "--family", "hypercycle", "--n", "1"]) == 2
    assert run(["generate", "--family", "recomb", "--n", "2"]) == 2


def test_analyze_json_report(rep3_files, tmp_path):
    _, rel = rep3_files
    out = tmp_path / "report.json"
    assert run(["analyze", str(rel), "--json", "--seed", "7", "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    validate(report, "analysis_report.schema.json")
    assert report["seed"] == 7
    assert report["flags"]["weakly_reversible"] is False
    assert report["flags"]["bimolecular_autocatalytic"] is False
    assert report["geometry"]["sources_contain_all_vertices"] is True
    assert report["geometry"]["strongly_endotactic"]["value"] is True
    assert report["geometry"]["parallel_sweep"]["refuted"] is False


def test_analyze_refutes_growth(tmp_path):
    f = tmp_path / "grow.crn"
    f.write_text("X1 -> 2X1 ; k=1\n")
    out = tmp_path / "r.json"
    assert run(["analyze", str(f), "--json", "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    validate(report, "analysis_report.schema.json")
    assert report["geometry"]["strongly_endotactic"]["decided"] is False
    assert report["geometry"]["endotactic_sweep"]["refuted"] is True
    direction = [int(x) for x in report["geometry"]["endotactic_sweep"]["witness_direction"]]
    assert direction == [-1]


def test_analyze_hypercycle_not_weakly_reversible(tmp_path):
    f = tmp_path / "hc.crn"
    assert run(["generate", "--family", "hypercycle", "--n", "3", "-o", str(f)]) == 0
    out = tmp_path / "r.json"
    assert run(["analyze", str(f), "--json", "-o", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["flags"]["weakly_reversible"] is False
    assert report["flags"]["bimolecular_autocatalytic"] is True


def test_project_matches_golden(rep3_files, tmp_path):
    base, rel = rep3_files
    out = tmp_path / "projected.crn"
    assert run(["project", str(base), "-o", str(out)]) == 0
    assert out.read_text() == rel.read_text()


def test_project_rejects_non_bimolecular(tmp_path):
    f = tmp_path / "bad.crn"
    f.write_text("A -> B ; k=1\n")
    assert run(["project", str(f)]) == 3


def test_equiv_exit_codes(tmp_path):
    a = tmp_path / "a.crn"
    b = tmp_path / "b.crn"
    c = tmp_path / "c.crn"
    a.write_text("X1 + 2X2 -> X1 + X2 + X3 ; k=1\n")
    b.write_text("X1 + 2X2 -> 2X1 + X2 ; k=1\nX1 + 2X2 -> 2X2 + X3 ; k=1\n")
    c.write_text("X1 + 2X2 -> X1 + X2 + X3 ; k=2\n")
    assert run(["equiv", str(a), str(b)]) == 0
    assert run(["equiv", str(a), str(a)]) == 0
    assert run(["equiv", str(a), str(c)]) == 1
    out = tmp_path / "eq.json"
    assert run(["equiv", str(a), str(c), "--json", "-o", str(out)]) == 1
    payload = json.loads(out.read_text())
    validate(payload, "equivalence_report.schema.json")
    assert payload["equivalent"] is False


def test_wr_realize_cli(tmp_path):
    f = tmp_path / "rel4.crn"
    assert run(["generate", "--family", "recomb", "--n", "4", "--relative", "-o", str(f)]) == 0
    out = tmp_path / "cert.json"
    assert run(["wr-realize", str(f), "-o", str(out)]) == 0
    cert = json.loads(out.read_text())
    validate(cert, "wr_realization.schema.json")
    realized = parse_system("\n".join(
        " + ".join(
            (f"{c}{name}" if c > 1 else name)
            for c, name in zip(rxn["source"], cert["system"]["species"]) if c
        )
        + " -> "
        + " + ".join(
            (f"{c}{name}" if c > 1 else name)
            for c, name in zip(rxn["target"], cert["system"]["species"]) if c
        )
        + f" ; k={rxn['rate']}"
        for rxn in cert["system"]["reactions"]
    ))
    from crnkit.network import is_weakly_reversible, linkage_classes

    assert is_weakly_reversible(realized.network)
    assert len(linkage_classes(realized.network)) == 1


def test_wr_realize_budget_zero_exhausts(tmp_path):
    f = tmp_path / "grow.crn"
    f.write_text("X1 -> 2X1 ; k=1\n")
    assert run(["wr-realize", str(f), "--budget", "0"]) == 4


def test_simulate_blowup_report(tmp_path):
    f = tmp_path / "hc.crn"
    assert run(["generate", "--family", "hypercycle", "--n", "3", "-o", str(f)]) == 0
    csv = tmp_path / "traj.csv"
    rep = tmp_path / "rep.json"
    assert (
        run(
            [
                "simulate", str(f), "--x0", "1,1,1", "--t-max", "2.0",
                "-o", str(csv), "--report", str(rep),
            ]
        )
        == 0
    )
    report = json.loads(rep.read_text())
    validate(report, "simulate_report.schema.json")
    outcome = report["runs"][0]["outcome"]
    assert outcome["kind"] == "blow_up"
    assert abs(outcome["t_detect"] - 1.0) < 0.01
    header = csv.read_text().splitlines()[0]
    assert header == "t,X1,X2,X3"


def test_simulate_bad_x0_dimension(tmp_path):
    f = tmp_path / "hc.crn"
    assert run(["generate", "--family", "hypercycle", "--n", "3", "-o", str(f)]) == 0
    assert run(["simulate", str(f), "--x0", "1,1"]) == 2


def test_simulate_probe_permanence(tmp_path):
    f = tmp_path / "rel3.crn"
    assert run(["generate", "--family", "rep-recomb", "--n", "3", "--relative", "-o", str(f)]) == 0
    rep = tmp_path / "probe.json"
    code = run(
        [
            "simulate", str(f), "--probe-permanence", "--simplex-random", "8",
            "--t-max", "30", "--seed", "5", "--report", str(rep),
        ]
    )
    assert code == 0
    payload = json.loads(rep.read_text())
    validate(payload, "permanence_report.schema.json")
    assert payload["verdict"] == "consistent_with_permanence"
    assert payload["seed"] == 5


def test_seed_env_fallback(tmp_path, monkeypatch):
    f = tmp_path / "rel.crn"
    assert run(["generate", "--family", "rep-recomb", "--n", "3", "--relative", "-o", str(f)]) == 0
    out = tmp_path / "r.json"
    monkeypatch.setenv("CRN_SEED", "123")
    assert run(["analyze", str(f), "--json", "-o", str(out)]) == 0
    assert json.loads(out.read_text())["seed"] == 123


def test_usage_errors(tmp_path):
    assert run(["analyze", str(tmp_path / "missing.crn")]) == 2
    bad = tmp_path / "bad.crn"
    bad.write_text("X1 + -> X2\n")
    assert run(["analyze", str(bad)]) == 2
    assert run(["generate", "--family", "nope", "--n", "3"]) == 2
