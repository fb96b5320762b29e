import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from macrof1.macro import supremum_bound
from macrof1.simulation import (
    CELL_COLUMNS,
    ERROR_SKEW,
    LABEL_SKEW,
    TRIAL_COLUMNS,
    AccuracyBiased,
    ExperimentConfig,
    UniformRandom,
    accuracy_biased_classifier,
    accuracy_biased_predictions,
    default_grid,
    pearson,
    prediction_distribution,
    rmsd,
    run_trials,
    sample_gold_labels,
    skewed_label_distribution,
    spearman,
    sweep_grid,
    trial_rng,
    uniform_random_classifier,
    write_sweep_csv,
    write_trials_csv,
)


def test_sample_gold_degenerate():
    assert sample_gold_labels((1.0, 0.0), 5, trial_rng(0)).tolist() == [0] * 5


def test_sample_gold_frequency():
    labels = sample_gold_labels((0.95, 0.05), 10**6, trial_rng(11))
    assert abs(np.mean(labels == 0) - 0.95) < 0.002


def test_sample_gold_deterministic():
    a = sample_gold_labels((0.5, 0.5), 1000, trial_rng(5))
    b = sample_gold_labels((0.5, 0.5), 1000, trial_rng(5))
    assert np.array_equal(a, b)


@pytest.mark.parametrize("dist", [(0.5, 0.6), (-0.1, 1.1), (), (float("nan"), 1.0)])
def test_sample_gold_rejects_bad_distribution(dist):
    with pytest.raises(ValueError):
        sample_gold_labels(dist, 3, trial_rng(0))


def test_uniform_classifier():
    gold = np.zeros(10**6, dtype=int)
    assert uniform_random_classifier(gold[:20], 1, trial_rng(0)).tolist() == [0] * 20
    pred = uniform_random_classifier(gold, 2, trial_rng(2))
    assert abs(np.mean(pred == 0) - 0.5) < 0.002
    again = uniform_random_classifier(gold, 2, trial_rng(2))
    assert np.array_equal(pred, again)


def test_skewed_label_distribution_examples():
    assert skewed_label_distribution(4, 0) == pytest.approx([0.25] * 4, abs=1e-15)
    assert skewed_label_distribution(4, 1) == pytest.approx([0.1, 0.2, 0.3, 0.4], abs=1e-15)
    assert skewed_label_distribution(4, 0.5) == pytest.approx([0.175, 0.225, 0.275, 0.325], abs=1e-15)
    with pytest.raises(ValueError):
        skewed_label_distribution(4, 1.5)


@pytest.mark.parametrize("n", range(2, 14))
def test_skewed_label_distribution_sums_to_one(n):
    for y in np.linspace(0, 1, 11):
        assert abs(skewed_label_distribution(n, y).sum() - 1) <= 1e-12


def test_prediction_distribution_examples():
    assert prediction_distribution(0, 4, 0.4, 0.0) == pytest.approx([0.4, 0.2, 0.2, 0.2], abs=1e-15)
    assert prediction_distribution(1, 4, 0.4, 1.0) == pytest.approx([0.075, 0.4, 0.225, 0.3], abs=1e-15)
    assert prediction_distribution(2, 4, 1.0, 0.7) == pytest.approx([0, 0, 1, 0], abs=1e-15)


@settings(max_examples=200)
@given(st.integers(2, 13), st.data())
def test_prediction_distribution_normalised(n, data):
    gold = data.draw(st.integers(0, n - 1))
    x = data.draw(st.floats(1 / n, 1))
    y = data.draw(st.floats(0, 1))
    probs = prediction_distribution(gold, n, x, y)
    assert probs.min() >= 0
    assert probs[gold] == x
    # errors carry exactly 1 - x at every skew
    assert abs((probs.sum() - x) - (1 - x)) <= 1e-12


@pytest.mark.parametrize("gold,x,y", [(0, 0.5, 1.5), (0, 0.1, 1.0), (0, 1.2, 0.0), (4, 0.5, 0.0)])
def test_prediction_distribution_rejects_bad_params(gold, x, y):
    with pytest.raises(ValueError):
        prediction_distribution(gold, 4, x, y)


def test_accuracy_biased_perfect():
    gold = np.arange(4).repeat(50)
    for y in (0.0, 0.3, 1.0):
        assert np.array_equal(accuracy_biased_predictions(gold, 4, 1.0, y, trial_rng(1)), gold)
        assert accuracy_biased_classifier(3, 4, 1.0, y, trial_rng(1)) == 3


@pytest.mark.parametrize("n,gold,x,y", [(4, 0, 0.4, 0.0), (4, 1, 0.4, 1.0), (13, 5, 0.3, 0.6), (2, 1, 0.5, 1.0)])
def test_accuracy_biased_frequencies(n, gold, x, y):
    draws = 10**6
    pred = accuracy_biased_predictions(np.full(draws, gold), n, x, y, trial_rng(99, n, gold))
    freq = np.bincount(pred, minlength=n) / draws
    assert np.max(np.abs(freq - prediction_distribution(gold, n, x, y))) < 0.005


def test_scalar_classifier_frequencies():
    rng = trial_rng(4)
    draws = 20_000
    counts = np.bincount([accuracy_biased_classifier(1, 4, 0.4, 1.0, rng) for _ in range(draws)], minlength=4)
    assert np.max(np.abs(counts / draws - [0.075, 0.4, 0.225, 0.3])) < 0.015


def test_rmsd_examples():
    assert rmsd([(1, 1), (2, 2)]) == 0
    assert rmsd([(0, 1)]) == 1
    assert rmsd([(0.5, 0.4), (0.3, 0.35)]) == pytest.approx(math.sqrt((0.01 + 0.0025) / 2), abs=1e-15)
    with pytest.raises(ValueError):
        rmsd([])


def test_correlation_examples():
    assert pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert spearman([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-15)


def test_correlation_undefined_for_constant_input():
    assert math.isnan(pearson([1, 1, 1], [1, 2, 3]))
    assert math.isnan(spearman([1, 2, 3], [5, 5, 5]))
    with pytest.raises(ValueError):
        pearson([1], [1])


def test_correlations_against_scipy():
    rng = np.random.default_rng(8)
    a = rng.normal(size=300)
    b = a + rng.normal(size=300)
    b[:40] = np.round(b[:40])  # introduce ties
    assert pearson(a, b) == pytest.approx(sps.pearsonr(a, b)[0], abs=1e-12)
    assert spearman(a, b) == pytest.approx(sps.spearmanr(a, b)[0], abs=1e-12)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=3, max_size=40))
def test_spearman_is_pearson_on_ranks(rows):
    a = np.array([r[0] for r in rows], dtype=float)
    b = np.array([r[1] for r in rows], dtype=float)
    s = spearman(a, b)
    p = pearson(sps.rankdata(a), sps.rankdata(b))
    if math.isnan(p):
        assert math.isnan(s)
    else:
        assert abs(s - p) <= 1e-12
        assert -1 <= s <= 1


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(2, 10, 1, (0.5, 0.4))
    with pytest.raises(ValueError):
        ExperimentConfig(3, 10, 1, (0.5, 0.5))
    with pytest.raises(ValueError):
        ExperimentConfig(4, 10, 1, (0.25,) * 4, AccuracyBiased(0.1, 0.0))
    with pytest.raises(ValueError):
        ExperimentConfig(2, 10, 0, (0.5, 0.5))


def test_run_trials_perfect_single_class():
    cfg = ExperimentConfig(2, 50, 1, (1.0, 0.0), AccuracyBiased(1.0, 0.0), seed=3)
    stats = run_trials(cfg)
    (rep,) = stats.reports
    assert rep.averaged_f1 == rep.f1_of_averages == 0.5
    assert rep.delta_direct == 0.0
    assert stats.rmsd == 0.0
    assert math.isnan(stats.pearson)


def test_run_trials_deterministic_across_workers():
    cfg = ExperimentConfig(3, 200, 40, (0.6, 0.3, 0.1), UniformRandom(), seed=123)
    a = run_trials(cfg)
    b = run_trials(cfg, workers=4)
    assert a == b
    buf_a, buf_b = io.StringIO(), io.StringIO()
    write_trials_csv(a, buf_a)
    write_trials_csv(b, buf_b)
    assert buf_a.getvalue() == buf_b.getvalue()
    assert run_trials(ExperimentConfig(3, 200, 40, (0.6, 0.3, 0.1), seed=124)).reports != a.reports


def test_run_trials_bounds():
    cfg = ExperimentConfig(5, 100, 100, skewed_label_distribution(5, 1.0), AccuracyBiased(0.4, 1.0), seed=9)
    d = run_trials(cfg).deltas
    assert np.all(d >= -1e-12)
    assert np.all(d < supremum_bound(5))


def test_trials_csv_format():
    cfg = ExperimentConfig(2, 30, 3, (0.9, 0.1), seed=1)
    stats = run_trials(cfg)
    buf = io.StringIO()
    write_trials_csv(stats, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(TRIAL_COLUMNS)
    assert len(lines) == 4
    for k, line in enumerate(lines[1:]):
        tid, small, big, delta = line.split(",")
        assert int(tid) == k
        rep = stats.reports[k]
        assert (float(small), float(big), float(delta)) == (rep.averaged_f1, rep.f1_of_averages, rep.delta_direct)


def test_sweep_grid_small():
    xs, ys = default_grid(4, 5)
    res = sweep_grid(4, 300, xs, ys, ERROR_SKEW, trials_per_cell=2, seed=5)
    assert res.mean_delta.shape == (5, 5)
    assert np.all(res.mean_delta[-1] == 0.0)
    assert np.all(res.mean_averaged_f1[-1] == 1.0)
    assert np.all(res.mean_delta >= 0)
    again = sweep_grid(4, 300, xs, ys, ERROR_SKEW, trials_per_cell=2, seed=5, workers=3)
    assert np.array_equal(res.mean_delta, again.mean_delta)
    buf = io.StringIO()
    write_sweep_csv(res, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CELL_COLUMNS)
    assert len(lines) == 26


def test_sweep_grid_label_mode_perfect_column():
    xs = np.array([0.5, 1.0])
    ys = np.array([0.0, 1.0])
    res = sweep_grid(3, 500, xs, ys, LABEL_SKEW, trials_per_cell=3, seed=0)
    assert np.all(res.mean_delta[1] == 0.0)
    assert res.max_delta_off_perfect() == res.mean_delta[0].max()


@pytest.mark.parametrize("kwargs", [dict(x_grid=[0.1]), dict(y_grid=[1.2]), dict(mode="bogus"), dict(x_grid=[])])
def test_sweep_grid_rejects_bad_grid(kwargs):
    args = dict(n=4, dataset_size=10, x_grid=[0.5], y_grid=[0.0], mode=ERROR_SKEW, trials_per_cell=1)
    args.update(kwargs)
    with pytest.raises(ValueError):
        sweep_grid(**args)
