import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neighborwalk.access import ApiSession, NeighborInfo
from neighborwalk.estimators import (
    EstimateError,
    FeatureFn,
    ReweightedAccumulator,
    UnknownFeatureError,
    builtin_features,
    degree_distribution_estimate,
    estimate,
    estimate_all,
    exact_expectation,
    feature_from_name,
    label_rate,
    mean_estimate,
    out_degree,
    out_degree_indicator,
    reweighted_estimate,
)
from neighborwalk.labeling import PropertyMap, assign_labels
from neighborwalk.oracle import random_connected_digraph
from neighborwalk.samplers import SampleSequence, mhrw_walk, proposed_walk, run_walker

from .conftest import N1, N2, N3


def walk(g, alpha=0.5, seed=0, t=2000):
    return proposed_walk(ApiSession(g), 0, alpha, seed, max_records=t)


def test_constant_feature_is_exact(g3):
    seq = walk(g3)
    const = FeatureFn("c", lambda x: 3.25)
    assert reweighted_estimate(seq, const).value == 3.25
    assert mean_estimate(seq, const).value == 3.25


def test_empty_sequence_errors():
    empty = SampleSequence([], bytearray(), {}, 0, "proposed")
    with pytest.raises(EstimateError):
        reweighted_estimate(empty, out_degree)
    with pytest.raises(EstimateError):
        mean_estimate(empty, out_degree)


def test_single_record_mean():
    seq = SampleSequence([4], bytearray([0]), {4: NeighborInfo(4, 7, 1, {})}, 1, "mhrw")
    assert mean_estimate(seq, out_degree).value == 7


def test_weight_sum_and_sample_size(g3):
    seq = walk(g3, t=500)
    est = reweighted_estimate(seq, out_degree)
    expected = sum(1 / r.d_sum for r in seq)
    assert est.sample_size == 500
    assert est.weight_sum == pytest.approx(expected, rel=1e-12)


def test_matches_streaming_accumulator(g3):
    seq = walk(g3, t=3000)
    acc = ReweightedAccumulator()
    for r in seq:
        acc.add(r.d_sum, out_degree(r))
    assert acc.result().value == pytest.approx(reweighted_estimate(seq, out_degree).value, rel=1e-12)


@pytest.mark.parametrize("c", [2.0, 0.5, 8.0, -4.0])
def test_scale_invariance_exact(dba_small, c):
    seq = proposed_walk(ApiSession(dba_small, budget=40), 3, 0.8, 1)
    base = reweighted_estimate(seq, out_degree).value
    assert reweighted_estimate(seq, out_degree.scaled(c)).value == c * base


@given(st.floats(-1e3, 1e3, allow_nan=False).filter(lambda c: c != 0))
@settings(max_examples=50, deadline=None)
def test_scale_invariance(c):
    g = random_connected_digraph(9, 2)
    seq = proposed_walk(ApiSession(g), 0, 0.6, 5, max_records=500)
    base = reweighted_estimate(seq, out_degree).value
    assert reweighted_estimate(seq, out_degree.scaled(c)).value == pytest.approx(c * base, rel=1e-12)


def test_order_invariance(dba_small):
    seq = proposed_walk(ApiSession(dba_small, budget=40), 3, 0.8, 1)
    order = list(range(len(seq)))
    random.Random(0).shuffle(order)
    shuffled = SampleSequence([seq.nodes[i] for i in order], bytearray(seq.kinds[i] for i in order), seq.profiles, seq.queries_used, "proposed")
    assert reweighted_estimate(shuffled, out_degree).value == reweighted_estimate(seq, out_degree).value


def test_exact_expectation(g3):
    assert exact_expectation(g3, [], out_degree) == 1.0
    assert exact_expectation(g3, [], FeatureFn("one", lambda x: 1.0)) == 1.0


def test_exact_expectation_label_rate():
    from neighborwalk.graph import generate_dba

    g = generate_dba(1000, 3, 1.0, seed=0)
    pm = assign_labels(g, "random", 0.10, 1)
    assert exact_expectation(g, [pm], label_rate("random")) == pytest.approx(0.100, abs=1e-15)


def test_builtin_features(g3):
    names = [f.name for f in builtin_features()]
    assert names == ["out_degree", "label:random", "label:high_degree", "label:low_degree"]
    rec = NeighborInfo(0, 4, 2, {"random": 0.0})
    assert out_degree(rec) == 4
    assert label_rate("random")(rec) == 0
    ind = out_degree_indicator(2)
    profiles = ApiSession(g3).table
    assert ind(profiles[N2]) == 1
    assert ind(profiles[N1]) == 0


def test_unknown_label_and_feature():
    with pytest.raises(UnknownFeatureError):
        label_rate("bot")(NeighborInfo(0, 1, 1, {}))
    with pytest.raises(UnknownFeatureError):
        feature_from_name("median_degree")
    assert feature_from_name("out_degree==3").name == "out_degree==3"
    assert feature_from_name("label:bot").name == "label:bot"


def test_reweighted_convergence_on_running_example(g3):
    values = [reweighted_estimate(proposed_walk(ApiSession(g3), N1, 0.5, s, max_records=1_000_000), out_degree).value for s in range(3)]
    assert abs(np.mean(values) - 1.0) <= 0.01


def test_mhrw_mean_on_running_example(g3):
    values = [mean_estimate(mhrw_walk(ApiSession(g3), N1, s, max_records=1_000_000), out_degree).value for s in range(3)]
    assert abs(np.mean(values) - 1.0) <= 0.01


def test_degree_distribution_is_normalized(dba_small):
    seq = proposed_walk(ApiSession(dba_small, budget=60), 0, 0.9, 3)
    dist = degree_distribution_estimate(seq)
    assert sum(dist.values()) <= 1 + 1e-9
    assert all(0 <= p <= 1 for p in dist.values())
    # same numbers as the individual indicator estimates
    for d, p in dist.items():
        assert p == pytest.approx(reweighted_estimate(seq, out_degree_indicator(d)).value, abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("walker", ["proposed", "srw", "nbrw", "mhrw"])
def test_consistency_over_walk_length(walker):
    g = random_connected_digraph(10, seed=7)
    pm = assign_labels(g, "high_degree", 0.3, 1)
    features = [out_degree, label_rate("high_degree")]
    truth = np.array([exact_expectation(g, [pm], f) for f in features])
    short, long = [], []
    for seed in range(10):
        seq = run_walker(walker, ApiSession(g, [pm]), seed % g.n, seed, alpha=0.5, max_records=1_000_000)
        short.append([e.value for e in estimate_all(seq.prefix(1000), features)])
        long.append([e.value for e in estimate_all(seq, features)])
    short_err = np.abs(np.array(short) - truth).mean(axis=0)
    long_err = np.abs(np.array(long) - truth).mean(axis=0)
    assert np.all(long_err < short_err)
    assert np.all(long_err < 0.01 * np.maximum(1.0, np.abs(truth)))
