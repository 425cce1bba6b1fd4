import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid
from scipy.special import gammaln

from helpers import count_standard_tableaux, partition_strategy
from plancherel.errors import EmptyDiagram, NonMonotoneRows, NonPositiveRow, ParameterError, WindowTooNarrow
from plancherel.young import (
    ProfileWindow,
    YoungDiagram,
    conjugate,
    deviation,
    deviation_function,
    diagram_from_profile,
    diagrams_from_records,
    dimension,
    from_record,
    from_rows,
    hook_count,
    hook_count_via_profile,
    hook_histogram,
    hook_lengths,
    limit_shape,
    log_dim,
    log_factorial,
    log_plancherel,
    partitions,
    phi,
    profile,
    to_record,
)


def test_diagram_basics():
    d = from_rows([2, 1])
    assert d.n == 3
    assert d.length == 2
    assert d.first_row == 2
    assert sorted(hook_lengths(d).tolist()) == [1, 1, 3]
    assert dimension(d) == 2
    assert log_plancherel(d) == pytest.approx(math.log(2 / 3), abs=1e-14)


def test_rejects_bad_rows():
    with pytest.raises(NonMonotoneRows):
        from_rows([1, 2])
    with pytest.raises(NonPositiveRow):
        from_rows([2, 0])


def test_empty_diagram():
    d = YoungDiagram(())
    assert d.n == 0
    assert d.first_row == 0
    with pytest.raises(EmptyDiagram):
        log_plancherel(d)
    with pytest.raises(EmptyDiagram):
        deviation(d, 0.0)


def test_conjugate():
    assert conjugate(from_rows([3, 1])).rows == (2, 1, 1)
    assert conjugate(from_rows([1])).rows == (1,)


@given(partition_strategy())
def test_conjugate_is_involution(rows):
    d = from_rows(rows)
    assert conjugate(conjugate(d)) == d
    assert sorted(hook_lengths(conjugate(d)).tolist()) == sorted(hook_lengths(d).tolist())


@given(partition_strategy(max_n=9))
def test_hook_formula_counts_tableaux(rows):
    assert dimension(from_rows(rows)) == count_standard_tableaux(rows)


@pytest.mark.parametrize("n", range(1, 11))
def test_dimensions_square_to_factorial(n):
    assert sum(dimension(d) ** 2 for d in partitions(n)) == math.factorial(n)
    assert math.fsum(math.exp(log_plancherel(d)) for d in partitions(n)) == pytest.approx(1.0, abs=1e-12)


def test_partitions_order():
    parts = [d.rows for d in partitions(4)]
    assert parts == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    with pytest.raises(ParameterError):
        list(partitions(-1))


def test_log_dim_matches_exact_dimension():
    d = from_rows([5, 3, 2])
    assert log_dim(d) == pytest.approx(math.log(dimension(d)), rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 10, 256, 257, 1000, 10**6])
def test_log_factorial(n):
    assert log_factorial(n) == pytest.approx(float(gammaln(n + 1)), rel=1e-13, abs=1e-13)


def test_log_factorial_negative():
    with pytest.raises(ParameterError):
        log_factorial(-1)


def test_hook_count():
    d = from_rows([2, 1])
    assert hook_count(d, 1) == 2
    assert hook_count(d, 2) == 0
    assert hook_count(d, 3) == 1
    with pytest.raises(ParameterError):
        hook_count(d, 0)


@given(partition_strategy(max_n=15))
def test_hook_histogram_sums_to_n(rows):
    d = from_rows(rows)
    hist = hook_histogram(d)
    assert hist[0] == 0
    assert hist.sum() == d.n


def test_profile_of_single_cell():
    p = profile(from_rows([1]), -3, 3)
    assert p.bits == (1, 1, 0, 1, 0, 0, 0)
    assert p.c(-10) == 1 and p.c(10) == 0
    assert p.c_array(np.array([-10, -1, 0, 10])).tolist() == [1, 0, 1, 0]


def test_profile_window_checks():
    d = from_rows([3, 1])
    with pytest.raises(WindowTooNarrow):
        profile(d, -2, 5)
    with pytest.raises(WindowTooNarrow):
        profile(d, -5, 2)
    with pytest.raises(ParameterError):
        ProfileWindow(-1, 1, (1, 1, 1))


def test_hook_count_via_profile_needs_settled_window():
    p = ProfileWindow(-1, 0, (0, 1))
    with pytest.raises(WindowTooNarrow):
        hook_count_via_profile(p, 1)


@settings(max_examples=1000, deadline=None)
@given(partition_strategy(max_n=40))
def test_profile_round_trip_and_hooks(rows):
    d = from_rows(rows)
    p = profile(d)
    assert diagram_from_profile(p) == d
    for k in range(1, d.n + 1):
        assert hook_count_via_profile(p, k) == hook_count(d, k)


def test_limit_shape_values():
    assert limit_shape(0.0) == pytest.approx(4 / math.pi)
    assert limit_shape(2.0) == pytest.approx(2.0)
    assert limit_shape(-2.5) == 2.5
    t = np.linspace(-3, 3, 61)
    out = limit_shape(t)
    assert np.all(out >= np.abs(t) - 1e-12)
    assert np.allclose(out, out[::-1])


def test_single_cell_boundary():
    d = from_rows([1])
    assert phi(d, 0.0) == 2.0
    assert phi(d, 1.0) == 1.0
    assert phi(d, -3.5) == 3.5
    assert deviation(d, 0.0) == pytest.approx(2.0 - 4.0 / math.pi)
    dev = deviation_function(d)
    assert dev.minima.tolist() == [-1.0, 1.0]
    assert dev.maxima.tolist() == [0.0]


@given(partition_strategy(max_n=20))
def test_boundary_area_and_interlacing(rows):
    d = from_rows(rows)
    dev = deviation_function(d)
    # rotated cells have area 2
    assert trapezoid(dev.values - np.abs(dev.knots), dev.knots) == pytest.approx(2.0 * d.n)
    assert len(dev.minima) == len(dev.maxima) + 1
    assert dev.minima.sum() == pytest.approx(dev.maxima.sum())


@settings(max_examples=30)
@given(partition_strategy(max_n=20), st.floats(min_value=-30, max_value=30))
def test_deviation_reflects_under_conjugation(rows, t):
    d = from_rows(rows)
    assert deviation(conjugate(d), -t) == pytest.approx(deviation(d, t), abs=1e-9)


def test_deviation_vanishes_outside_support():
    d = from_rows([4, 2, 1])
    lo, hi = deviation_function(d).support
    assert deviation(d, lo - 0.5) == pytest.approx(0.0, abs=1e-12)
    assert deviation(d, hi + 3.0) == pytest.approx(0.0, abs=1e-12)


def test_records():
    d = from_rows([3, 1])
    rec = to_record(d)
    assert rec == {"kind": "diagram", "rows": [3, 1]}
    assert from_record(rec) == d
    mixed = [{"kind": "header", "seed": 1}, rec, {"rows": [1]}]
    assert diagrams_from_records(mixed) == [d, from_rows([1])]
    with pytest.raises(ParameterError):
        from_record({"kind": "diagram"})


@settings(max_examples=30)
@given(partition_strategy(max_n=25), st.floats(-15, 15), st.floats(-15, 15))
def test_deviation_is_two_lipschitz(rows, s, t):
    d = from_rows(rows)
    assert abs(deviation(d, t) - deviation(d, s)) <= 2.0 * abs(t - s) + 1e-9
