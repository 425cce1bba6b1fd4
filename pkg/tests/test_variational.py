import math
import re

import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.integrate import quad

from plancherel.config import QuadratureConfig
from plancherel.entropy import W1
from plancherel.errors import BudgetNotMet, EmptyDiagram, ParameterError
from plancherel.sampler import SeededRng, sample_plancherel
from plancherel.variational import (
    arccosh_tail_term,
    discretized_seminorm_tail,
    hook_term,
    seminorm_half,
    seminorm_profile,
    seminorm_split,
    vk_decompose,
)
from plancherel.young import YoungDiagram, conjugate, from_rows


def test_hook_term_single_cell():
    assert hook_term(from_rows([1])) == pytest.approx(W1)
    with pytest.raises(EmptyDiagram):
        hook_term(YoungDiagram(()))


def test_hook_term_is_conjugation_invariant():
    d = from_rows([5, 3, 3, 1])
    assert hook_term(d) == pytest.approx(hook_term(conjugate(d)), rel=1e-14)


def test_arccosh_term_vanishes_inside_edge():
    # λ₁ = 1 ≤ 2√n: the integrand is zero on |t| ≥ 2
    assert arccosh_tail_term(from_rows([1])) == 0.0
    assert arccosh_tail_term(from_rows([2, 1])) == 0.0


def test_arccosh_term_for_a_long_row():
    d = from_rows([10])
    edge = 2 * math.sqrt(10)

    def f(t):
        # Φ = t + 2 up to t = 9, then 20 − t; |t| is subtracted beyond the edge
        boundary = t + 2.0 if t <= 9.0 else 20.0 - t
        return (boundary - t) * math.acosh(t / edge)

    expected = (quad(f, edge, 9.0)[0] + quad(f, 9.0, 10.0)[0]) / math.sqrt(10)
    assert arccosh_tail_term(d) == pytest.approx(expected, rel=1e-9)
    assert arccosh_tail_term(conjugate(d)) == pytest.approx(expected, rel=1e-9)


def test_seminorm_is_positive_and_converges():
    d = from_rows([1])
    value = seminorm_half(d, quad_tol=1e-5)
    assert value > 0
    assert seminorm_half(d, quad_tol=1e-3) == pytest.approx(value, rel=2e-3)


def test_seminorm_of_single_cell_matches_dense_grid():
    # frozen from a dense q = 512 grid
    assert seminorm_half(from_rows([1]), quad_tol=1e-5) == pytest.approx(6.1807, rel=2e-4)


@pytest.mark.parametrize("index", [24, 32])
def test_default_tolerance_is_reached_on_typical_samples(index):
    # these two n = 400 samples need q = 256 before the error estimate settles
    d = sample_plancherel(400, SeededRng.for_task(0, "vk", index))
    vk = vk_decompose(d)
    assert vk.seminorm_error <= 1e-4 * vk.seminorm_term


def test_budget_message_reports_relative_error():
    d = from_rows([3, 2])
    with pytest.raises(BudgetNotMet, match="relative error") as info:
        seminorm_half(d, config=QuadratureConfig(quad_tol=1e-15, max_refinements=4))
    reported = float(re.search(r"relative error (\S+) >", str(info.value)).group(1))
    assert 0 < reported < 5e-2


@pytest.mark.parametrize("rows", [[3, 1], [4, 2, 2, 1], [6, 1, 1]])
def test_seminorm_is_conjugation_invariant(rows):
    d = from_rows(rows)
    assert seminorm_half(d, 1e-5) == pytest.approx(seminorm_half(conjugate(d), 1e-5), rel=1e-4)


def test_seminorm_profile_checks():
    with pytest.raises(ParameterError):
        seminorm_profile(from_rows([2]), 0)
    prof = seminorm_profile(from_rows([2, 1]), 4)
    assert prof.h[0] == 0.0
    assert prof.h[1] == pytest.approx(0.25)
    assert (prof.values >= 0).all()


def test_seminorm_split_adds_up():
    d = from_rows([4, 3, 1])
    total = seminorm_half(d, 1e-5)
    local, tail = seminorm_split(d, 2.0, 1e-5)
    assert local > 0 and tail > 0
    assert local + tail == pytest.approx(total, rel=1e-4)
    far_local, far_tail = seminorm_split(d, 1e3, 1e-5)
    assert far_tail < tail
    with pytest.raises(ParameterError):
        seminorm_split(d, 0.0)


def test_seminorm_budget_not_met():
    with pytest.raises(BudgetNotMet):
        seminorm_half(from_rows([3, 2]), config=QuadratureConfig(quad_tol=1e-15, max_refinements=1))


def test_vk_identity_holds_exactly():
    d = sample_plancherel(150, SeededRng(2, 1))
    vk = vk_decompose(d, quad_tol=1e-4)
    total = vk.hook_term + vk.seminorm_term + vk.arccosh_term + vk.residual
    assert vk.lhs == pytest.approx(total, rel=1e-12, abs=1e-12)
    assert vk.epsilon == -vk.residual
    assert vk.seminorm_error >= 0
    rec = vk.to_record()
    assert rec["kind"] == "vk"
    assert rec["n"] == 150
    assert "meta" not in rec


def test_vk_single_cell():
    vk = vk_decompose(from_rows([1]))
    assert vk.lhs == 0.0
    assert vk.hook_term == pytest.approx(W1)
    assert vk.arccosh_term == 0.0
    assert vk.residual < 0


def test_vk_terms_are_conjugation_invariant():
    d = sample_plancherel(80, SeededRng(4, 9))
    a, b = vk_decompose(d, 1e-5), vk_decompose(conjugate(d), 1e-5)
    assert a.lhs == pytest.approx(b.lhs, rel=1e-12)
    assert a.hook_term == pytest.approx(b.hook_term, rel=1e-12)
    assert a.arccosh_term == pytest.approx(b.arccosh_term, rel=1e-9, abs=1e-12)
    assert a.seminorm_term == pytest.approx(b.seminorm_term, rel=1e-4)


def test_discretized_tail():
    d = sample_plancherel(400, SeededRng(8, 3))
    tail = discretized_seminorm_tail(d, h0=10.0, L=1.0, delta=0.2)
    assert tail.value >= 0
    assert tail.cut_radius == pytest.approx(40 - 400**0.2)
    wider = discretized_seminorm_tail(d, h0=30.0, L=1.0, delta=0.2)
    assert wider.value <= tail.value
    assert discretized_seminorm_tail(from_rows([1]), 2.0, 0.0, 0.1).in_regular_set
    assert not discretized_seminorm_tail(from_rows([20]), 2.0, 0.0, 0.1).in_regular_set
    with pytest.raises(ParameterError):
        discretized_seminorm_tail(d, 10.0, 1.0, 0.3)
    with pytest.raises(ParameterError):
        discretized_seminorm_tail(d, 1.0, 1.0, 0.2)


@settings(max_examples=20, deadline=None)
@given(st.integers(50, 400), st.integers(0, 2**32 - 1), st.sampled_from([3.0, 6.5, 12.0, 40.0]))
def test_discrete_tail_majorizes_continuous_tail(n, seed, h0):
    d = sample_plancherel(n, SeededRng(seed))
    root = math.sqrt(n)
    # inside the edge the cut at 2√n (L = 0) leaves F unchanged at the integers
    assume(d.first_row <= 2 * root and d.length <= 2 * root)
    _, tail = seminorm_split(d, h0, quad_tol=1e-3)
    continuous = tail / (2 * root)
    majorant = discretized_seminorm_tail(d, h0, L=0.0, delta=0.2)
    assert majorant.in_regular_set
    assert continuous <= majorant.value + 40 * (1 / (h0 - 1) + 1 / (h0 - 1) ** 2)
    assert continuous <= majorant.value
