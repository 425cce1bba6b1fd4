import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from plancherel.config import EntropyConfig
from plancherel.entropy import (
    W1,
    entropy_constant,
    entropy_integral,
    entropy_series,
    exact_lag_coefficients,
    h_panels,
    hook_series_weight,
    hook_series_weights,
    integrated_variance,
    local_variance_integrand,
    node_lag_coefficients,
    slope_weights,
)
from plancherel.errors import BudgetNotMet, ParameterError
from plancherel.kernels import PatternVector, SineKernel, SineKernelParams, det_expectation

SMALL = dict(h_max=50.0, a_nodes=16, s_nodes=16, h_nodes=64, k_max=50, dense_h=8)


def _direct_weight(k: int, terms: int = 100_000) -> float:
    return math.fsum(1.0 / (l * (l + 1) * (2 * l + 1) * float(k) ** (2 * l)) for l in range(1, terms + 1)
                     if float(k) ** (2 * l) < 1e300)


def test_weight_of_one_is_closed_form():
    assert hook_series_weight(1) == pytest.approx(3 - 4 * math.log(2), abs=1e-15)
    assert W1 == pytest.approx(_direct_weight(1), abs=1e-9)


@pytest.mark.parametrize("k", [2, 3, 7, 40])
def test_weight_matches_direct_sum(k):
    assert hook_series_weight(k) == pytest.approx(_direct_weight(k, 60), rel=1e-14)


def test_vector_weights_agree_with_scalar():
    ks = np.arange(1, 51)
    values, bounds = hook_series_weights(ks)
    assert np.allclose(values, [hook_series_weight(int(k)) for k in ks], rtol=1e-14, atol=0)
    assert np.all(bounds >= 0)
    with pytest.raises(ParameterError):
        hook_series_weight(0)
    with pytest.raises(ParameterError):
        hook_series_weights(np.array([0, 1]))


def test_vector_weights_raise_no_warning_at_k_one():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        values, bounds = hook_series_weights(np.array([1, 2, 3]))
    assert values[0] == pytest.approx(W1)
    assert bounds[0] == 0.0
    assert np.all(np.isfinite(bounds))


def test_series_tail_bound_covers_truncation():
    coarse, fine = entropy_series(200), entropy_series(2000)
    assert abs(coarse.value - fine.value) <= coarse.k_tail + fine.k_tail + 1e-12
    assert coarse.k_tail > fine.k_tail > 0
    with pytest.raises(ParameterError):
        entropy_series(9)


def test_series_matches_double_sum_in_swapped_order():
    # Σ_l c_l Σ_k k^{2−2l}/(4k²−1) with k = 1 split off and the l = 1 column telescoped
    ks = np.arange(2, 100_001, dtype=np.float64)
    ls = np.arange(1, 200_001, dtype=np.float64)
    first_row = math.fsum(1.0 / (ls * (ls + 1) * (2 * ls + 1))) / 3.0
    total = first_row + (1.0 / 6.0) * (0.5 - 1.0 / 3.0)
    for l in range(2, 61):
        column = float(np.sum(ks ** (2 - 2 * l) / (4 * ks * ks - 1)))
        total += column / (l * (l + 1) * (2 * l + 1))
    direct = 32.0 / math.pi**2 * total
    est = entropy_series(200)
    assert est.value == pytest.approx(direct, abs=est.k_tail + est.l_tail + 1e-10)


def test_slope_weights():
    assert slope_weights(0.0, 1.0).weights.tolist() == [1.0]
    assert np.allclose(slope_weights(0.5, 1.0).weights, [0.5, 0.5])
    assert slope_weights(0.25, 2.0).as_dict() == {0: 0.375, 1: 0.5, 2: 0.125}
    with pytest.raises(ParameterError):
        slope_weights(1.0, 1.0)
    with pytest.raises(ParameterError):
        slope_weights(0.0, 0.0)


@given(st.floats(min_value=0.0, max_value=0.999), st.floats(min_value=0.01, max_value=300.0))
def test_slope_weights_sum_to_one(s, h):
    assert slope_weights(s, h).weights.sum() == pytest.approx(1.0)


def test_local_variance_at_center():
    assert local_variance_integrand(0.0, 0.0, 1.0) == pytest.approx(1.0)
    assert local_variance_integrand(0.0, 0.0, 2.0) == pytest.approx(0.5 - 2 / math.pi**2)


@settings(max_examples=40)
@given(
    st.floats(min_value=-1.99, max_value=1.99),
    st.floats(min_value=0.01, max_value=0.99),
    st.integers(min_value=1, max_value=60),
)
def test_particle_hole_symmetry(a, s, h):
    left = local_variance_integrand(a, s, float(h))
    right = local_variance_integrand(-a, 1.0 - s, float(h))
    assert left == pytest.approx(right, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("s,h", [(0.3, 2.7), (0.0, 1.0), (0.8, 11.2)])
def test_closed_form_a_integral(s, h):
    value, _ = quad(lambda a: local_variance_integrand(a, s, h), -2.0, 2.0, epsabs=1e-12, limit=200)
    assert integrated_variance(s, h) == pytest.approx(value, rel=1e-7)


def _occupation_law(kernel, sites):
    """P(ω = c) for every 0/1 vector c on ``sites`` by inclusion–exclusion."""
    corr = {}
    for r in range(sites + 1):
        for subset in itertools.combinations(range(sites), r):
            corr[subset] = det_expectation(kernel, PatternVector(subset))
    law = {}
    for config in itertools.product((0, 1), repeat=sites):
        occupied = {i for i, c in enumerate(config) if c}
        law[config] = math.fsum(
            (-1) ** (len(t) - len(occupied)) * v for t, v in corr.items() if occupied <= set(t)
        )
    return law


@pytest.mark.parametrize("a,s,h", [(0.0, 0.25, 2.0), (0.7, 0.5, 3.5), (-1.2, 0.1, 1.3), (1.5, 0.9, 4.0)])
def test_local_variance_is_variance_of_weighted_occupation(a, s, h):
    w = slope_weights(s, h).weights
    law = _occupation_law(SineKernel(SineKernelParams(a=a)), len(w))
    assert math.fsum(law.values()) == pytest.approx(1.0, abs=1e-12)
    mean = math.fsum(p * float(np.dot(w, c)) for c, p in law.items())
    second = math.fsum(p * float(np.dot(w, c)) ** 2 for c, p in law.items())
    assert local_variance_integrand(a, s, h) == pytest.approx(4.0 * (second - mean**2), abs=1e-12)


def test_node_coefficients_converge_to_exact():
    assert np.allclose(node_lag_coefficients(20, 128), exact_lag_coefficients(20), atol=1e-10)
    assert exact_lag_coefficients(0)[0] == pytest.approx(32 / math.pi**2)


def test_h_panels():
    edges = h_panels(0.25, 120.0, 8)
    assert edges[0] == 0.0
    assert edges[-1] == 120.0
    assert np.all(np.diff(edges) > 0)
    for k in range(1, 9):
        assert k - 0.25 in edges


def test_integral_parameter_checks():
    with pytest.raises(ParameterError):
        entropy_integral(h_max=40.0)
    with pytest.raises(ParameterError):
        entropy_integral(s_nodes=8)
    with pytest.raises(ParameterError):
        entropy_integral(a_rule="simpson")


def test_entropy_constant_small_grid():
    est = entropy_constant(EntropyConfig(tol=1.0, **SMALL))
    assert 0.0 < est.value < 2 * math.pi / math.sqrt(6) + 1
    assert est.value == pytest.approx(est.integral + est.series)
    assert est.series > 0 and est.integral > 0
    rec = est.to_record()
    assert rec["kind"] == "entropy"
    assert set(rec["budget"]) == {"a_grid", "s_grid", "h_cutoff", "h_grid", "series_k_tail", "series_l_tail"}
    assert all(v >= 0 for v in rec["budget"].values())
    assert rec["total_budget"] == pytest.approx(sum(rec["budget"].values()))
    assert rec["config"]["h_max"] == 50.0


def test_node_rule_reports_a_grid_error():
    est = entropy_integral(a_rule="nodes", a_nodes=32, h_max=50.0, s_nodes=16, h_nodes=64, dense_h=8)
    assert est.a_grid > 0


def test_budget_not_met():
    with pytest.raises(BudgetNotMet):
        entropy_constant(EntropyConfig(tol=1e-12, **SMALL))
