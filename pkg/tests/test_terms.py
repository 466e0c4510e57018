import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergmsize import _kernel
from ergmsize import terms as T
from ergmsize.errors import InputError, InvalidOffsetError, ModelAttributeMismatch
from ergmsize.network import AttributeTable, Network

from helpers import random_attrs, random_network, term_pool


@pytest.mark.parametrize("n,expected", [(1000, -6.91), (6000, -8.70), (11000, -9.31)])
def test_log_inverse_n_offset(n, expected):
    assert round(T.OffsetSpec("log_inverse_n").value(n), 2) == expected


def test_logit_mu_offset():
    off = T.OffsetSpec("logit_mu_over_n_minus_1", mu=2.0)
    assert off.value(101) == pytest.approx(math.log(0.02 / 0.98))
    with pytest.raises(InvalidOffsetError):
        off.value(3)
    with pytest.raises(InvalidOffsetError):
        T.OffsetSpec("logit_mu_over_n_minus_1")
    with pytest.raises(InvalidOffsetError):
        T.OffsetSpec("sqrt_n")


def test_no_offset_is_zero():
    assert T.OffsetSpec().value(500) == 0.0


def test_term_validation():
    with pytest.raises(InputError):
        T.TermSpec("triangles")
    with pytest.raises(InputError):
        T.TermSpec("between_category_ties", "race", ("B",))
    with pytest.raises(InputError):
        T.TermSpec("numeric_difference", "age", power=3)
    with pytest.raises(InputError):
        T.TermSpec("degree_count", d=-1)


def test_locality_flags():
    assert T.degree(1).locality == T.MARKOV
    assert all(t.locality == T.DYAD_INDEPENDENT for t in term_pool() if t.kind != "degree_count")
    assert not T.nhsls_model().dyad_independent


def test_model_round_trip(tmp_path):
    m = T.nhsls_model().with_theta(np.arange(19) / 10)
    p = tmp_path / "m.json"
    T.save_model(m, p, ["sex", "race"], {"sex": ["F", "M"]})
    m2, decl = T.load_model(p)
    assert m2.names == m.names and m2.offset == m.offset
    np.testing.assert_array_equal(m2.theta, m.theta)
    assert decl["categorical"] == ["sex", "race"]


def test_term_aliases():
    t = T.TermSpec.from_dict({"kind": "numeric_activity", "attr": "age", "transform": "scaled",
                              "min_age": 15, "max_age": 65})
    assert (t.lo, t.hi) == (15, 65)
    assert T.TermSpec.from_dict({"kind": "activity_by_category", "attr": "sex", "level": "F"}).levels == ("F",)


def test_nhsls_model_shape():
    m = T.nhsls_model()
    assert len(m.terms) == 19
    assert m.names[:3] == ["activity.F", "activity.M", "same_sex"]
    assert m.markov_mask.sum() == 2


def test_transforms():
    age = T.numeric_activity("age", "scaled")
    np.testing.assert_allclose(T.transform_values(age, [18, 39, 60]), [-0.5, 0, 0.5])
    sq = T.numeric_activity("age", "sqrt_scaled")
    np.testing.assert_allclose(T.transform_values(sq, [18, 60]), [-0.5, 0.5])
    with pytest.raises(ModelAttributeMismatch):
        T.transform_values(sq, [10.0])


def test_hand_computed_statistics():
    attrs = AttributeTable.from_labels({"sex": ["F", "M", "M", "F"]}, {"age": [20, 30, 25, 40]},
                                       {"sex": ["F", "M"]})
    net = Network(4, [(0, 1), (1, 2), (2, 3)])
    m = T.ModelSpec([T.edges(), T.activity("sex", "M"), T.same("sex"), T.degree(1), T.degree(2),
                     T.numeric_difference("age"), T.ordered_asymmetry("sex", "M", "F", "age"),
                     T.between("sex", "F", "M")])
    np.testing.assert_array_equal(T.global_stats(net, attrs, m), [3, 4, 1, 2, 2, 10 + 5 + 15, 1, 2])


def test_missing_column_raises(net30):
    with pytest.raises(ModelAttributeMismatch):
        T.global_stats(net30, AttributeTable(30), T.ModelSpec([T.same("sex")]))


def test_level_must_exist(attrs30, net30):
    with pytest.raises(ModelAttributeMismatch):
        T.global_stats(net30, attrs30, T.ModelSpec([T.activity("race", "X")]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_change_stats_match_recompute(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 15))
    attrs = random_attrs(n, rng, integer_ages=bool(rng.integers(2)))
    net = random_network(n, rng.uniform(0, 0.6), rng)
    m = T.ModelSpec(term_pool())
    i, j = rng.choice(n, 2, replace=False)
    delta = T.change_stats(net, attrs, m, i, j)
    on, off = net.copy(), net.copy()
    if on.has_edge(i, j):
        off.toggle(i, j)
    else:
        on.toggle(i, j)
    np.testing.assert_allclose(delta, T.global_stats(on, attrs, m) - T.global_stats(off, attrs, m), atol=1e-9)


def test_conditional_tie_prob(attrs30, net30):
    m = T.nhsls_model().with_theta(np.linspace(-1, 1, 19))
    eta = m.offset.value(30) + m.theta @ T.change_stats(net30, attrs30, m, 3, 7)
    assert T.conditional_tie_prob(net30, attrs30, m, 3, 7) == pytest.approx(1 / (1 + math.exp(-eta)))


def test_change_stats_rejects_self_loop(attrs30, net30):
    with pytest.raises(InputError):
        T.change_stats(net30, attrs30, T.nhsls_model(), 4, 4)


def test_compiled_routes_agree(rng):
    attrs = random_attrs(80, rng, integer_ages=False)
    net = random_network(80, 0.08, rng)
    m = T.ModelSpec(term_pool())
    cm = T.CompiledModel.for_attrs(m, attrs)
    bits = _kernel.empty_bits(80)
    deg = np.zeros(80, np.int64)
    _kernel.load_edges(bits, deg, net.edge_array())
    ref = T.global_stats(net, attrs, m)
    np.testing.assert_allclose(_kernel.global_stats(bits, deg, 80, cm.kinds, cm.p1, cm.p2, cm.cat, cm.num),
                               ref, rtol=1e-12, atol=1e-9)
    I, J = net.edge_array().T
    pv = T.pair_values(cm, cm.cat[:, I], cm.num[:, I], cm.cat[:, J], cm.num[:, J]).sum(axis=0)
    np.testing.assert_allclose(pv[~cm.markov], ref[~cm.markov], rtol=1e-12, atol=1e-9)


def test_ilogit_logit_inverse():
    x = np.linspace(-15, 15, 13)
    np.testing.assert_allclose(T.logit(T.ilogit(x)), x, atol=1e-8)
