import math

import numpy as np
import pytest
from scipy import stats

from ergmsize import terms as T
from ergmsize.ego import (AttributeDecl, EgoRecord, EgoSample, ImpliedStats, SurveySchema, bootstrap_resample,
                          census, implied_actor_stat, implied_edge_stat, implied_stats, read_survey, write_survey)
from ergmsize.errors import InputError
from ergmsize.network import AttributeTable, Network
from ergmsize.synth import SynthSpec, stub_matching, synth_population

from helpers import random_attrs, random_network

SEX = SurveySchema([AttributeDecl("sex", "categorical", ["F", "M"])])
F, M = {"sex": 0}, {"sex": 1}


def test_triangle_census_has_three_edges():
    net = Network(3, [(0, 1), (1, 2), (0, 2)])
    attrs = AttributeTable(3)
    assert implied_edge_stat(census(net, attrs), lambda e, a: 1.0) == 3.0


def test_conflicting_reports_are_averaged():
    s = EgoSample([EgoRecord(M, 1.0, [F]), EgoRecord(F, 1.0, [])], SEX)
    assert implied_edge_stat(s, lambda e, a: float(e["sex"] != a["sex"])) == 0.5
    assert implied_stats(s, T.ModelSpec([T.between("sex", "F", "M")])).targets[0] == 0.5


def test_degree_counts_are_actor_sums():
    recs = [EgoRecord(F, 1.0, [M] * k) for k in (0, 1, 1, 2)]
    s = EgoSample(recs, SEX)
    assert implied_actor_stat(s, lambda e, al: float(len(al) == 1)) == 2
    m = T.ModelSpec([T.degree(d) for d in range(3)])
    t = implied_stats(s, m).targets
    assert list(t) == [1, 2, 1] and t.sum() == len(s)


def test_single_isolated_ego():
    s = EgoSample([EgoRecord(F, 2.5, [])], SEX)
    m = T.ModelSpec([T.edges(), T.activity("sex", "F"), T.degree(0), T.degree(1)])
    np.testing.assert_array_equal(implied_stats(s, m).targets, [0, 0, 1, 0])


def test_uniform_weight_scaling_is_invariant(rng):
    attrs = random_attrs(40, rng)
    net = random_network(40, 0.1, rng)
    m = T.nhsls_model()
    a = implied_stats(census(net, attrs, weights=np.full(40, 1.0)), m)
    b = implied_stats(census(net, attrs, weights=np.full(40, 2.0)), m)
    np.testing.assert_array_equal(a.targets, b.targets)


def test_census_identity_full_model(rng, nhsls):
    for _ in range(10):
        n = int(rng.integers(2, 80))
        attrs = random_attrs(n, rng, integer_ages=bool(rng.integers(2)))
        net = random_network(n, rng.uniform(0, 0.3), rng)
        got = implied_stats(census(net, attrs), nhsls).targets
        want = T.global_stats(net, attrs, nhsls)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_deleting_one_report_changes_count_by_half(rng):
    attrs = random_attrs(20, rng)
    net = random_network(20, 0.2, rng)
    s = census(net, attrs)
    i, j = net.edge_list()[0]
    recs = list(s.records)
    alters = list(recs[i].alters)
    alters.remove({"sex": int(attrs.categorical["sex"][j]), "race": int(attrs.categorical["race"][j]),
                   "age": float(attrs.numeric["age"][j])})
    recs[i] = EgoRecord(recs[i].ego, 1.0, alters)
    m = T.ModelSpec([T.edges()])
    assert implied_stats(s, m).targets[0] - implied_stats(EgoSample(recs, s.schema), m).targets[0] == 0.5


def test_implied_stats_round_trip():
    s = ImpliedStats(10, np.array([1.5, 2.0]), {"sex": {"F": 4.0, "M": 6.0}}, ["a", "b"])
    t = ImpliedStats.from_dict(s.to_dict())
    assert t.n == 10 and list(t.targets) == [1.5, 2.0] and t.composition == s.composition


def test_bootstrap_equal_weights(rng):
    recs = [EgoRecord(F, 1.0, [M] * k) for k in range(50)]
    s = EgoSample(recs, SEX)
    r = bootstrap_resample(s, 50, seed=1)
    assert len(r) == 50 and all(x.weight == 1.0 for x in r.records)
    assert bootstrap_resample(s, 50, seed=1).records == r.records
    assert len(bootstrap_resample(s, 1, seed=2)) == 1


def test_bootstrap_follows_weights():
    s = EgoSample([EgoRecord(F, 2.0, []), EgoRecord(M, 1.0, [])], SEX)
    r = bootstrap_resample(s, 10_000, seed=3)
    k = sum(rec.ego["sex"] == 0 for rec in r.records)
    assert stats.chisquare([k, 10_000 - k], [20_000 / 3, 10_000 / 3]).pvalue > 0.001
    with pytest.raises(InputError):
        bootstrap_resample(s, 0, seed=0)


def test_resampling_law_of_large_numbers(rng):
    attrs = random_attrs(300, rng)
    net = random_network(300, 0.01, rng)
    w = rng.uniform(0.5, 2.0, 300)
    s = census(net, attrs, weights=w)
    m = T.ModelSpec([T.edges(), T.activity("sex", "F"), T.degree(1), T.numeric_difference("age", "scaled")])
    base = implied_stats(s, m).targets / len(s)
    big = implied_stats(bootstrap_resample(s, 100_000, seed=5), m).targets / 100_000
    np.testing.assert_allclose(big, base, rtol=0.01)


def write_csv(path, rows):
    head = "ego_id,weight,ego_sex,ego_age,alter_index,alter_sex,alter_age\n"
    path.write_text(head + "\n".join(",".join(map(str, r)) for r in rows) + "\n")


def test_read_survey_filters_and_recodes(tmp_path):
    schema = SurveySchema(
        [AttributeDecl("sex", "categorical", ["F", "M"], {"female": "F", "male": "M"}), AttributeDecl("age", "numeric")],
        ego_filter={"age": [18, 59]}, alter_filter={"age": [18, 99]},
    )
    p = tmp_path / "s.csv"
    write_csv(p, [
        [1, 1.0, "female", 30, 0, "M", 35],
        [1, 1.0, "female", 30, 1, "M", 16],
        [2, 2.0, "M", 40, "", "", ""],
        [3, 1.0, "M", "", "", "", ""],
        [4, 1.0, "F", 70, 0, "M", 65],
        [5, 0.0, "F", 25, "", "", ""],
        [6, 1.0, "F", 25, 0, "X", 30],
    ])
    s, report = read_survey(p, schema)
    assert len(s) == 2
    assert report == {"egos_read": 6, "dropped_missing": 3, "dropped_ego_filter": 1, "dropped_alters": 1}
    assert s.records[0].ego == {"sex": 0, "age": 30.0} and len(s.records[0].alters) == 1
    assert s.records[1].weight == 2.0


def test_read_survey_needs_columns(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("ego_id,weight\n1,1\n")
    with pytest.raises(InputError):
        read_survey(p, SEX)


def test_survey_round_trip(tmp_path, rng):
    attrs = random_attrs(25, rng, integer_ages=False)
    net = random_network(25, 0.2, rng)
    s = census(net, attrs)
    write_survey(s, tmp_path / "s.csv")
    s.schema.save(tmp_path / "schema.json")
    back, _ = read_survey(tmp_path / "s.csv", SurveySchema.load(tmp_path / "schema.json"))
    m = T.nhsls_model()
    np.testing.assert_array_equal(implied_stats(back, m).targets, implied_stats(s, m).targets)


def test_schema_validation():
    with pytest.raises(InputError):
        AttributeDecl("sex", "categorical")
    with pytest.raises(InputError):
        SurveySchema([AttributeDecl("sex", "categorical", ["F"])], alter_filter={"sex": [0, 1]})
    with pytest.raises(InputError):
        EgoSample([], SEX)
    with pytest.raises(InputError):
        EgoRecord(F, 0.0)


def test_synth_two_actor_degenerate_case():
    spec = SynthSpec(degree={"F": [0, 1], "M": [0, 1]})
    attrs = AttributeTable(2, {"sex": [0, 1], "race": [3, 3]}, {"sex": ["F", "M"], "race": list(spec.race)},
                           {"age": [30.0, 32.0]})
    net, _ = synth_population(spec, 2, seed=0, attrs=attrs)
    assert net.edges == {(0, 1)}


def test_stub_matching_prefers_mixed_pairs(rng):
    spec = SynthSpec(degree={"F": [0, 1], "M": [0, 1]})
    attrs = AttributeTable(6, {"sex": [0, 0, 0, 1, 1, 1], "race": [0] * 6}, {"sex": ["F", "M"], "race": list(spec.race)},
                           {"age": [30.0] * 6})
    net = stub_matching(attrs, spec, rng)
    assert net.n_edges == 3 and all(i < 3 <= j for i, j in net.edges)


@pytest.fixture(scope="module")
def synthetic():
    return synth_population(SynthSpec(), 1500, seed=11)


def test_synth_composition(synthetic):
    _, attrs = synthetic
    n = attrs.n
    frac_f = np.mean(attrs.categorical["sex"] == 0)
    assert abs(frac_f - 0.506) < 3 * math.sqrt(0.25 / n)
    assert attrs.numeric["age"].min() >= 18 and attrs.numeric["age"].max() <= 59


def test_synth_mean_degree(synthetic):
    net, attrs = synthetic
    assert 2 * net.n_edges / net.n == pytest.approx(SynthSpec().mean_degree(), rel=0.05)
    assert SynthSpec().mean_degree() == pytest.approx(0.77, abs=0.01)
