import json

import numpy as np
import pytest

from ergmsize import terms as T
from ergmsize.cli import main
from ergmsize.ego import census, write_survey
from ergmsize.network import write_attributes, write_edgelist

from helpers import random_attrs, random_network


@pytest.fixture
def files(tmp_path):
    rng = np.random.default_rng(2)
    attrs = random_attrs(60, rng)
    net = random_network(60, 0.05, rng)
    write_edgelist(net, tmp_path / "edges.csv")
    write_attributes(attrs, tmp_path / "attrs.csv")
    s = census(net, attrs)
    write_survey(s, tmp_path / "survey.csv")
    s.schema.save(tmp_path / "schema.json")
    levels = {"sex": ["F", "M"], "race": ["B", "H", "O", "W"]}
    T.save_model(T.nhsls_model(), tmp_path / "nhsls.json", ["sex", "race"], levels)
    edges = T.ModelSpec([T.edges(), T.same("sex")], theta=[0.5, -0.5], offset=T.OffsetSpec("log_inverse_n"))
    T.save_model(edges, tmp_path / "edges.json", ["sex", "race"], levels)
    return tmp_path, net, attrs


def test_stats_and_ego_stats_agree(files):
    d, net, attrs = files
    assert main(["stats", "--model", str(d / "nhsls.json"), "--edges", str(d / "edges.csv"),
                 "--attrs", str(d / "attrs.csv"), "--out-dir", str(d / "o1")]) == 0
    assert main(["ego-stats", "--model", str(d / "nhsls.json"), "--survey", str(d / "survey.csv"),
                 "--schema", str(d / "schema.json"), "--out-dir", str(d / "o2")]) == 0
    g = json.loads((d / "o1" / "stats.json").read_text())["stats"]
    implied = json.loads((d / "o2" / "implied_stats.json").read_text())
    np.testing.assert_allclose(implied["targets"], g, rtol=1e-12)
    assert implied["n"] == 60


def test_fit_from_network_and_targets(files):
    d, net, attrs = files
    assert main(["fit", "--model", str(d / "edges.json"), "--edges", str(d / "edges.csv"),
                 "--attrs", str(d / "attrs.csv"), "--out-dir", str(d / "f1")]) == 0
    r1 = json.loads((d / "f1" / "fit.json").read_text())
    assert r1["converged"] and r1["method"] == "logistic_dyad_independent"
    main(["ego-stats", "--model", str(d / "edges.json"), "--survey", str(d / "survey.csv"),
          "--schema", str(d / "schema.json"), "--out-dir", str(d / "t")])
    assert main(["fit", "--model", str(d / "edges.json"), "--targets", str(d / "t" / "implied_stats.json"),
                 "--attrs", str(d / "attrs.csv"), "--out-dir", str(d / "f2")]) == 0
    r2 = json.loads((d / "f2" / "fit.json").read_text())
    np.testing.assert_allclose(r1["theta_hat"], r2["theta_hat"], rtol=1e-9)


def test_simulate_writes_networks(files):
    d, _, _ = files
    assert main(["simulate", "--model", str(d / "edges.json"), "--attrs", str(d / "attrs.csv"), "--n-samples", "3",
                 "--seed", "4", "--out-dir", str(d / "sim")]) == 0
    assert len(list((d / "sim").glob("network_*.csv"))) == 3
    assert (d / "sim" / "stats.csv").read_text().startswith("edge_count,same_category_ties.sex")


def test_scaling_study_via_config_file(files, capsys):
    d, _, _ = files
    conf = d / "study.json"
    conf.write_text(json.dumps({"sizes": [1000, 6000, 11000], "replicates": 2, "model": "edges",
                                "survey": str(d / "survey.csv"), "schema": str(d / "schema.json")}))
    assert main(["scaling-study", "--config", str(conf), "--replicates", "1", "--out-dir", str(d / "st")]) == 0
    out = capsys.readouterr().out
    assert "-6.91 (fixed)" in out and "-9.31 (fixed)" in out
    report = json.loads((d / "st" / "study_report.json").read_text())
    assert report["n_ok"] == {"1000": 1, "6000": 1, "11000": 1}


def test_invariance_demo(files, capsys):
    d, _, _ = files
    assert main(["invariance-demo", "--sizes", "30,60", "--no-offset", "--theta", "0", "--n-networks", "20",
                 "--out-dir", str(d / "inv")]) == 0
    rows = json.loads((d / "inv" / "invariance.json").read_text())["rows"]
    assert [r["size"] for r in rows] == [30, 60]


def test_synth_pop_small(files):
    d, _, _ = files
    assert main(["synth-pop", "--n", "150", "--seed", "1", "--out-dir", str(d / "syn")]) == 0
    for f in ("edges.csv", "attributes.csv", "survey.csv", "schema.json"):
        assert (d / "syn" / f).exists()


def test_input_errors_exit_2(files, capsys):
    d, _, _ = files
    assert main(["stats", "--model", str(d / "missing.json"), "--edges", str(d / "edges.csv")]) == 2
    assert main(["stats", "--model", str(d / "nhsls.json")]) == 2
    bad = d / "bad.json"
    bad.write_text("{not json")
    assert main(["stats", "--model", str(bad), "--edges", str(d / "edges.csv")]) == 2


def test_degenerate_fit_exits_3(files):
    d, _, _ = files
    (d / "zero.json").write_text(json.dumps({"n": 50, "targets": [0.0, 0.0], "composition": {}}))
    m = T.ModelSpec([T.edges(), T.degree(1)], offset=T.OffsetSpec("log_inverse_n"))
    T.save_model(m, d / "markov.json")
    assert main(["fit", "--model", str(d / "markov.json"), "--targets", str(d / "zero.json"),
                 "--out-dir", str(d / "z")]) == 3
