import math

import numpy as np
import pytest
from pydantic import ValidationError

from plancherel.commands import VerifyBooArgs
from plancherel.errors import ParameterError
from plancherel.experiments import (
    PatternFrequencySpec,
    bernoulli_stderr,
    default_decay_pairs,
    hook_frequency_target,
    pattern_target,
    run_boo_correlations,
    run_correlation_decay,
    run_edge_statistics,
    run_entropy_convergence,
    run_hook_frequencies,
    run_limit_shape,
    run_pattern_frequency,
    run_sampler_fit,
    run_sine_limit_rate,
    run_vk_decomposition,
    run_vk_on_diagrams,
    summarize,
    z_score,
)
from plancherel.kernels.determinantal import MAX_PATTERN
from plancherel.sampler import sample_many
from plancherel.young import YoungDiagram, from_rows


def test_reductions():
    mean, se, std = summarize([1.0, 2.0, 3.0, 4.0])
    assert mean == 2.5
    assert std == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    assert se == pytest.approx(std / 2)
    assert math.isnan(summarize([])[0])
    # a zero standard error is floored at half a count
    assert z_score(0.3, 0.2, 0.0, 10) == pytest.approx(2.0)
    assert bernoulli_stderr(0.5, 100) == pytest.approx(0.05)


def test_hook_targets():
    assert hook_frequency_target(1) == pytest.approx(32 / (3 * math.pi**2))
    assert hook_frequency_target(2) == pytest.approx(128 / (15 * math.pi**2))


def test_hook_frequencies_report():
    report = run_hook_frequencies([1, 2], 400, 20, seed=1)
    stat = report.get("h_1/sqrt(n)")
    assert stat.count == 20
    assert stat.meta["target"] == pytest.approx(hook_frequency_target(1))
    assert abs(stat.meta["z"]) < 6
    assert report.get("hook_total_equals_n").estimate == 1.0
    records = report.to_records()
    assert records[0]["kind"] == "header"
    assert "numpy" in records[0]["environment"]
    with pytest.raises(ParameterError):
        run_hook_frequencies([1], 100, 5, seed=1)


def test_reports_do_not_depend_on_workers():
    serial = run_limit_shape(400, 4, seed=5)
    parallel = run_limit_shape(400, 4, seed=5, workers=2)
    assert serial.statistics == parallel.statistics


def test_single_site_pattern_target():
    # ∫ ρ(a) da over (−2, 2) is 2
    assert pattern_target(PatternFrequencySpec((0,))) == pytest.approx(2.0, abs=1e-8)


def test_pattern_frequency_report():
    spec = PatternFrequencySpec((0, 1))
    report = run_pattern_frequency(spec, 400, 10, seed=2)
    stat = report.get("pattern_average")
    assert 0 < stat.estimate < 2
    assert stat.meta["target"] == pytest.approx(pattern_target(spec))
    with pytest.raises(ParameterError):
        PatternFrequencySpec((0,), nodes=(-3.0, 2.0))
    with pytest.raises(ParameterError):
        PatternFrequencySpec((0, 0))


def test_boo_correlations():
    report = run_boo_correlations(5.0, (-3, 3), 1, 3000, seed=3)
    assert report.get("fraction_within_3se").estimate >= 0.7
    assert report.get("max_abs_z").estimate < 6
    with pytest.raises(ParameterError):
        run_boo_correlations(5.0, (-40, 3), 1, 10, seed=3)
    with pytest.raises(ParameterError):
        run_boo_correlations(5.0, (-3, 3), 9, 10, seed=3)


def test_boo_correlations_beyond_pairs():
    report = run_boo_correlations(5.0, (-1, 1), 3, 2000, seed=4)
    triple = [s for s in report.statistics if s.statistic.startswith("rho_3")]
    assert len(triple) == 1
    assert triple[0].estimate == pytest.approx(triple[0].meta["target"], abs=5 * triple[0].stderr + 1e-3)
    assert report.get("max_abs_z").count == 3 + 3 + 1
    with pytest.raises(ValidationError):
        VerifyBooArgs(max_order=MAX_PATTERN + 1)
    assert VerifyBooArgs(max_order=3).max_order == 3


def test_correlation_decay():
    pairs = default_decay_pairs(400, 10)
    assert pairs[0][0] == pairs[0][1]
    assert len(pairs) == 11
    report = run_correlation_decay(400, 40, pairs, seed=6, split_at=5)
    c_hat = report.get("C_hat").estimate
    assert c_hat == max(report.get("C_hat_sep<=5").estimate, report.get("C_hat_sep>5").estimate)
    assert c_hat >= 0
    with pytest.raises(ParameterError):
        run_correlation_decay(400, 10, [(0, 100)], seed=6)


def test_edge_statistics():
    report = run_edge_statistics(400, 50, [0.3, 0.5], seed=4)
    loose = report.get("exceed[delta=0.5]").estimate
    tight = report.get("exceed[delta=0.3]").estimate
    assert 0.0 <= loose <= tight <= 1.0
    with pytest.raises(ParameterError):
        run_edge_statistics(400, 50, [0.1], seed=4)


def test_entropy_convergence_report():
    report = run_entropy_convergence([400], 10, seed=7)
    stat = report.get("neg_log_pl_over_sqrt_n", 400)
    assert 0 < stat.estimate < stat.meta["range_bound"]
    assert stat.meta["min"] <= stat.estimate <= stat.meta["max"]
    with pytest.raises(ParameterError):
        run_entropy_convergence([400], 5, seed=7)


def test_vk_reports():
    report = run_vk_decomposition(100, 2, seed=8, quad_tol=1e-3, h0=5.0)
    assert len(report.records) == 2
    for rec in report.records:
        assert rec["kind"] == "vk"
        assert rec["seminorm_tail"] >= 0
        assert rec["first_row"] >= 1
    assert report.get("median_abs_residual").count == 2

    from_input = run_vk_on_diagrams([from_rows([2, 1]), from_rows([1])], quad_tol=1e-3, h0=2.0)
    assert [r["n"] for r in from_input.records] == [3, 1]


def test_vk_keeps_empty_and_failed_samples():
    diagrams = sample_many(None, 20, seed=0, experiment_id="sample", theta=0.5)
    assert any(d.n == 0 for d in diagrams)
    report = run_vk_on_diagrams(diagrams, quad_tol=1e-3, h0=2.0)
    statuses = [r["status"] for r in report.records]
    assert len(statuses) == 20
    assert report.get("empty_count").estimate == statuses.count("empty") > 0
    assert report.get("ok_count").estimate == statuses.count("ok")
    assert all(r["n"] == 0 for r in report.records if r["status"] == "empty")

    failing = run_vk_on_diagrams([from_rows([3, 2]), YoungDiagram(())], quad_tol=1e-15, h0=2.0)
    first, second = failing.records
    assert first["status"] == "failed"
    assert first["error"] == "BudgetNotMet"
    assert second["status"] == "empty"
    assert failing.get("failed_count").estimate == 1
    with pytest.raises(KeyError):
        failing.get("median_abs_residual")


def test_sampler_fit():
    report = run_sampler_fit(4, 5000, seed=11)
    stat = report.get("chi_square")
    assert stat.meta["dof"] == 4
    assert stat.meta["pvalue"] > 1e-4


def test_sine_limit_rate():
    report = run_sine_limit_rate([100, 400, 1600], max_lag=2)
    assert report.get("log_log_slope").estimate < 0
