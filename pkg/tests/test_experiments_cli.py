import csv
import json
import math

import pytest

from modlab import (
    ExperimentSpec,
    REGISTRY,
    build_graph,
    cycle_graph,
    emit,
    load_edge_list,
    load_partition,
    run_experiment,
    save_edge_list,
)
from modlab.cli import main


# -- spec validation ------------------------------------------------------------


def test_unknown_experiment_lists_registered_names():
    spec = ExperimentSpec("nope", {"n": [4]}, 1, 0)
    with pytest.raises(ValueError) as err:
        run_experiment(spec)
    for name in REGISTRY:
        assert name in str(err.value)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("cycle-arc", {}, 1, 0)
    with pytest.raises(ValueError):
        ExperimentSpec("cycle-arc", {"n": []}, 1, 0)
    with pytest.raises(ValueError):
        ExperimentSpec("cycle-arc", {"n": [4]}, 0, 0)


def test_row_count_and_order():
    spec = ExperimentSpec("cycle-arc", {"n": [16, 100]}, 3, 7)
    records = run_experiment(spec)
    assert len(records) == 6
    assert [(r.grid_index, r.replicate) for r in records] == [
        (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
    ]
    for r in records:
        assert r.metrics["arc_q"] == pytest.approx(1 - 2 / math.sqrt(r.params["n"]), abs=1e-12)


def read_csv_without_walltime(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    drop = header.index("walltime_s")
    return [[c for i, c in enumerate(row) if i != drop] for row in rows]


def test_experiment_determinism_byte_identical_modulo_walltime(tmp_path):
    spec = ExperimentSpec("sbm-planted", {"n": [120], "k": [2, 3], "p": [0.2], "q": [0.05]}, 3, 99)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(run_experiment(spec), "csv", a)
    emit(run_experiment(spec), "csv", b)
    assert read_csv_without_walltime(a) == read_csv_without_walltime(b)


def test_emit_empty_and_json_mirror(tmp_path):
    path = tmp_path / "empty.csv"
    emit([], "csv", path)
    assert path.read_text() == "\n" or path.read_text() == ""  # header-only
    spec = ExperimentSpec("cycle-arc", {"n": [16]}, 2, 1)
    records = run_experiment(spec)
    cpath, jpath = tmp_path / "r.csv", tmp_path / "r.json"
    emit(records, "csv", cpath)
    emit(records, "json", jpath)
    with open(cpath) as fh:
        rows = list(csv.DictReader(fh))
    mirrored = json.loads(jpath.read_text())
    assert len(rows) == len(mirrored) == 2
    for crow, jrow in zip(rows, mirrored):
        assert set(crow) == set(jrow)
        assert float(crow["arc_q"]) == pytest.approx(jrow["arc_q"], abs=1e-9)
        assert int(crow["seed"]) == jrow["seed"]


def test_gnp_dense_certificate_fields():
    spec = ExperimentSpec("gnp-dense", {"n": [200], "c": [0.5]}, 3, 5)
    for record in run_experiment(spec):
        assert record.metrics["missing"] == 200 * 199 // 2 - record.metrics["m"]
        if record.metrics["nearly_complete"]:
            assert record.metrics["certified_zero"]
            assert not record.metrics["positive_bipartition_found"]


def test_resolution_demo_threshold_behaviour():
    spec = ExperimentSpec(
        "resolution-demo",
        {"component_half_size": [2, 3], "filler_triangles": [1]},
        1,
        11,
    )
    by_half = {r.params["component_half_size"]: r.metrics for r in run_experiment(spec)}
    # two K2 halves joined by an edge: 3 edges < sqrt(2m): never split
    assert by_half[2]["below_threshold"] and not by_half[2]["split"]
    # two triangle halves joined by an edge: 7 edges > sqrt(2m): always split
    assert not by_half[3]["below_threshold"] and by_half[3]["split"]


def test_percolation_curve_experiment(tmp_path):
    graph = build_graph(
        12,
        [(i, j) for i in range(4) for j in range(i + 1, 4)]
        + [(4 + i, 4 + j) for i in range(4) for j in range(i + 1, 4)]
        + [(8 + i, 8 + j) for i in range(4) for j in range(i + 1, 4)]
        + [(0, 4), (4, 8)],
    )
    gpath = tmp_path / "g.edges"
    save_edge_list(graph, gpath)
    spec = ExperimentSpec(
        "percolation-curve",
        {"p": [0.4, 0.9]},
        2,
        3,
        params={"graph": str(gpath), "eta": 0.1},
    )
    records = run_experiment(spec)
    assert len(records) == 4
    for r in records:
        assert r.metrics["q_transferred"] <= 1.0
        assert r.metrics["m_observed"] <= graph.m
    with pytest.raises(ValueError, match="params.graph"):
        run_experiment(ExperimentSpec("percolation-curve", {"p": [0.5]}, 1, 0))


# -- CLI ---------------------------------------------------------------------------


def test_cli_gen_score_optimize_roundtrip(tmp_path, capsys):
    out = tmp_path / "sbm.edges"
    planted = tmp_path / "sbm.parts"
    rc = main([
        "gen", "sbm", "--n", "60", "--k", "2", "--p", "0.5", "--q", "0.05",
        "--seed", "42", "--out", str(out), "--planted-out", str(planted),
    ])
    assert rc == 0
    capsys.readouterr()  # drain the status line
    sidecar = json.loads((tmp_path / "sbm.edges.json").read_text())
    assert sidecar["model"] == "sbm" and sidecar["seed"] == 42
    assert len(sidecar["planted"]) == 60

    graph = load_edge_list(out)
    partition = load_partition(planted, n=60)
    assert partition.n == graph.n

    rc = main(["score", "--graph", str(out), "--partition", str(planted)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert "q" in payload and payload["parts"] == partition.k

    found = tmp_path / "found.parts"
    rc = main([
        "optimize", "--graph", str(out), "--method", "local",
        "--seed", "1", "--out", str(found),
    ])
    assert rc == 0
    local_payload = json.loads(capsys.readouterr().out)
    assert local_payload["q"] >= payload["q"] - 0.2
    assert load_partition(found, n=60).n == 60


def test_cli_bound_and_exact(tmp_path, capsys):
    g = cycle_graph(8)
    path = tmp_path / "c8.edges"
    save_edge_list(g, path)
    assert main(["bound", "--graph", str(path), "--kind", "relmod"]) == 0
    relmod = json.loads(capsys.readouterr().out)["bound"]
    assert main(["bound", "--graph", str(path), "--kind", "spectral"]) == 0
    spectral = json.loads(capsys.readouterr().out)["bound"]
    assert main(["bound", "--graph", str(path), "--kind", "subset4"]) == 0
    subset4 = json.loads(capsys.readouterr().out)["bound"]
    assert main(["optimize", "--graph", str(path), "--method", "exact"]) == 0
    qstar = json.loads(capsys.readouterr().out)["q"]
    for bound in (relmod, spectral, subset4):
        assert qstar <= bound + 1e-9


def test_cli_percolation_tools(tmp_path, capsys):
    g = cycle_graph(10)
    path = tmp_path / "c10.edges"
    save_edge_list(g, path)
    out = tmp_path / "perc.edges"
    assert main(["percolate", "--graph", str(path), "--p", "0.5", "--seed", "3", "--out", str(out)]) == 0
    assert load_edge_list(out).n == 10
    sampled = tmp_path / "sampled.edges"
    assert main(["sample-vertices", "--graph", str(path), "--k", "4", "--seed", "3", "--out", str(sampled)]) == 0
    assert load_edge_list(sampled).n == 4
    mapping = json.loads((tmp_path / "sampled.edges.json").read_text())["mapping"]
    assert len(mapping) == 4
    capsys.readouterr()  # drain status lines before parsing JSON output
    assert main(["cutdist", "--graph", str(path), "--other", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["cut_distance"] == 0.0
    blown = tmp_path / "blown.edges"
    assert main(["blowup", "--graph", str(path), "--b", "2", "--out", str(blown)]) == 0
    assert load_edge_list(blown).m == 4 * g.m


def test_cli_experiment_and_validation_exit_codes(tmp_path, capsys):
    specfile = tmp_path / "spec.json"
    specfile.write_text(json.dumps({
        "name": "cycle-arc",
        "grid": {"n": [16, 25]},
        "replicates": 1,
        "seed": 5,
    }))
    out = tmp_path / "rows.csv"
    assert main(["experiment", "--spec", str(specfile), "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "made-up", "grid": {"n": [4]}, "replicates": 1, "seed": 0}))
    assert main(["experiment", "--spec", str(bad), "--out", str(out)]) == 2
    err = capsys.readouterr().err
    assert "registered" in err

    # validation failures exit 2
    assert main(["gen", "gnp", "--n", "5", "--p", "2.0", "--seed", "1", "--out", str(tmp_path / "x.edges")]) == 2
    missing = tmp_path / "missing.edges"
    assert main(["score", "--graph", str(missing), "--partition", str(missing)]) == 2
