import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nnthreshold.threshold import (
    PHI_TOLERANCE_DEG,
    AboveThresholdError,
    DomainError,
    accessible_length,
    accuracy_threshold_deg,
    error_from_phase,
    explain_level,
    log10_accessible_length,
    logical_error,
    p_threshold,
    phase_from_error,
    round_sig,
    sufficient_level,
    table_report,
)

probs = st.floats(1e-12, 1e-2)
levels = st.integers(0, 6)


def test_p_threshold():
    assert p_threshold(77) == 2 / 77**2
    with pytest.raises(DomainError):
        p_threshold(1)


def test_logical_error_examples():
    assert logical_error(1e-7, 0, 1e-6) == 1e-7
    assert logical_error(1e-7, 1, 1e-6) == pytest.approx(1e-8, rel=1e-12)
    assert logical_error(1e-7, 3, 1e-6) == pytest.approx(1e-14, rel=1e-9)
    assert logical_error(0.0, 3, 1e-6) == 0.0
    # above threshold the bound is clamped rather than rejected
    assert logical_error(1e-3, 10, 1e-6) == 1.0


@settings(max_examples=300, deadline=None)
@given(probs, probs, levels)
def test_reciprocity(eps, p, L):
    assume(eps < p * 0.999)
    T = accessible_length(eps, L, p)
    assume(math.isfinite(T) and T < 1e300)
    P = logical_error(eps, L, p)
    assume(P > 1e-300)
    assert T * P == pytest.approx(1.0, rel=1e-9)


@settings(max_examples=300, deadline=None)
@given(probs, probs, st.integers(1, 5))
def test_recursion(eps, p, L):
    prev = logical_error(eps, L - 1, p)
    expected = p * (prev / p) ** 2
    assume(expected < 1.0 and expected > 1e-290)
    assert logical_error(eps, L, p) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(probs, probs)
def test_monotone_in_level(eps, p):
    assume(abs(eps / p - 1) > 1e-3)
    seq = [logical_error(eps, L, p) for L in range(1, 5)]
    seq = [v for v in seq if 1e-300 < v < 1.0]
    if eps < p:
        assert all(a > b for a, b in zip(seq, seq[1:]))
    else:
        assert all(a < b for a, b in zip(seq, seq[1:]))


def test_depth_example():
    assert math.isclose(log10_accessible_length(1e-7, 3, 1e-6), 14.0, rel_tol=1e-9)
    assert accessible_length(1e-7, 3, 1e-6) == pytest.approx(1e14, rel=1e-9)
    assert sufficient_level(1e14, 1e-7, 1e-6) == 3
    assert sufficient_level(1e15, 1e-7, 1e-6) == 4


@settings(max_examples=300, deadline=None)
@given(st.floats(1.0, 300.0), st.floats(1e-10, 1e-3), st.floats(1.01, 1e4))
def test_sufficient_level_is_exact_inverse(log_t, p, ratio):
    eps = p / ratio
    T = 10.0**log_t
    L = sufficient_level(T, eps, p)
    tol = 1e-9 * log_t
    assert log10_accessible_length(eps, L, p) >= log_t - tol
    if L > 0:
        assert log10_accessible_length(eps, L - 1, p) < log_t - tol


def test_short_computation_needs_no_encoding():
    level, note = explain_level(10.0, 1e-7, 1e-6)
    assert level == 0 and note


def test_domain_errors():
    with pytest.raises(AboveThresholdError):
        sufficient_level(1e10, 1e-5, 1e-6)
    with pytest.raises(AboveThresholdError):
        accessible_length(1e-6, 2, 1e-6)
    with pytest.raises(DomainError):
        logical_error(-0.1, 1, 1e-6)
    with pytest.raises(DomainError):
        logical_error(1e-7, -1, 1e-6)
    with pytest.raises(DomainError):
        error_from_phase(4.0)
    with pytest.raises(DomainError):
        sufficient_level(-5, 1e-7, 1e-6)


def test_accessible_length_overflow_is_inf():
    assert accessible_length(1e-9, 12, 1e-6) == math.inf
    assert log10_accessible_length(1e-9, 12, 1e-6) > 308


def test_phase_examples():
    assert error_from_phase(0.0) == 0.0
    assert error_from_phase(math.pi) == pytest.approx(1.0)
    assert error_from_phase(2 * math.sqrt(1e-7)) == pytest.approx(1e-7, abs=1e-10)
    assert accuracy_threshold_deg(2 / 77**2) == pytest.approx(2.105, abs=1e-3)
    assert accuracy_threshold_deg(2 / 273**2) == pytest.approx(0.594, abs=1e-3)
    assert accuracy_threshold_deg(1.0) == pytest.approx(114.59, abs=1e-2)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-12, 1e-2))
def test_phase_inverse_pair(eps):
    assert error_from_phase(phase_from_error(eps)) == pytest.approx(eps, rel=1e-9)
    # the small-angle form 2 sqrt(eps) gives sin^2(sqrt(eps)), low by about eps^2 / 3
    small = math.radians(accuracy_threshold_deg(eps))
    assert abs(error_from_phase(small) / eps - 1) <= eps / 3 + 1e-12


def test_round_sig_half_even():
    assert str(round_sig(3.373e-4)) == "0.00034"
    assert round_sig(0.125, 2) == round_sig(0.12, 2)
    assert round_sig(0.0) == 0


def test_table_report():
    rows = table_report()
    assert len(rows) == 6
    for r in rows:
        assert r.p_th_matches, (r.model, r.variant, r.p_th_rounded, r.published_p_th)
        assert abs(r.phi_delta_deg) <= PHI_TOLERANCE_DEG
    noted = [r for r in rows if r.note]
    assert len(noted) == 1
    assert noted[0].phi_th_deg == pytest.approx(0.0396, abs=1e-4)
