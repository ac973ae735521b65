"""
Tests for the Diophantine scans, transference and the constructive word selector.

For alpha = sqrt2 - 1 the margin q * dist(q alpha, Z) is smallest at q = 2,
where it equals 6 - 4 sqrt2 = 0.343146...
"""
import math
from fractions import Fraction

import pytest

from multibrjuno.dioph import (
    _dist_bounds,
    _q_candidates,
    appendix_envelope,
    dc_check,
    dc_estimate,
    dc_scan,
    dual_form_check,
    select_word_appendix,
    transference,
)
from multibrjuno.exceptions import DomainError, InvalidInputError, SelectorFailed
from multibrjuno.gauss import gauss_orbit
from multibrjuno.numeric import RealScalar
from multibrjuno.types import DiophParams, RotationVector


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

SQRT2M1 = RotationVector.parse("sqrt2m1")
PAIR = RotationVector.parse("sqrt2m1,sqrt3m1")
MIN_MARGIN = 6 - 4 * math.sqrt(2)


def brute_force_margin(alphas, tau, Q):
    """min over q of q**tau * max_j dist(q alpha_j, Z) in floating point"""
    best = None
    for q in range(1, Q + 1):
        margin = q ** tau * max(abs(q * a - round(q * a)) for a in alphas)
        if best is None or margin < best[0]:
            best = (margin, q)
    return best


# ---------------------------------------------------------------------------
# Integer-scaled distance bounds
# ---------------------------------------------------------------------------

class TestDistBounds:
    def test_interior_enclosure(self):
        # x in [5.25, 5.375], scaled by 2**3
        assert _dist_bounds(42, 43, 3) == (2, 3, 5)

    def test_straddling_half(self):
        lower, upper, _ = _dist_bounds(3, 5, 3)   # [0.375, 0.625]
        assert (lower, upper) == (3, 4)

    def test_touching_an_integer(self):
        assert _dist_bounds(8, 9, 3) is None
        assert _dist_bounds(7, 8, 3) is None

    def test_q_candidates_within_box(self):
        assert _q_candidates(Fraction(-5, 12), Fraction(-5, 12), 1, 1) == [-1, 0, 1]
        assert all(abs(q) <= 3 for q in _q_candidates(Fraction(7, 2), Fraction(15, 4), 2, 3))


# ---------------------------------------------------------------------------
# Simultaneous approximation
# ---------------------------------------------------------------------------

class TestDCCheck:
    def test_fails_with_witness(self):
        result = dc_check(SQRT2M1, Fraction(35, 100), 1, 10)
        assert not result.holds
        assert result.q == 2
        assert result.p == (1,)
        assert result.failures == 1
        assert abs(float(result.margin) - MIN_MARGIN) < 1e-15

    def test_holds_below_the_minimum(self):
        result = dc_check(SQRT2M1, Fraction(3, 10), 1, 2000)
        assert result.holds
        assert result.failures == 0
        assert result.C == Fraction(3, 10)

    @pytest.mark.slow
    def test_holds_over_long_range(self):
        assert dc_check(SQRT2M1, Fraction(3, 10), 1, 100000).holds

    def test_two_variables_consistent_with_estimate(self):
        tau = Fraction(1, 2)
        estimate = dc_estimate(PAIR, tau, 500)
        assert estimate.lo > 0
        assert dc_check(PAIR, estimate.lo / 2, tau, 500).holds
        assert not dc_check(PAIR, estimate.hi * 2, tau, 500).holds

    def test_matches_brute_force(self):
        alphas = [math.sqrt(2) - 1, math.sqrt(3) - 1]
        margin, q = brute_force_margin(alphas, 0.5, 300)
        result = dc_scan(PAIR, Fraction(1, 2), 300)
        assert result.q == q
        assert abs(float(result.margin) - margin) < 1e-9

    def test_independent_of_threads(self):
        serial = dc_scan(PAIR, 1, 400, threads=1)
        parallel = dc_scan(PAIR, 1, 400, threads=4)
        assert (parallel.q, parallel.p) == (serial.q, serial.p)
        assert parallel.margin.lo == serial.margin.lo

    @pytest.mark.parametrize("kwargs", [
        {"tau": 0, "Q_max": 10},
        {"tau": 1, "Q_max": 0},
        {"tau": 1, "Q_max": 10, "C": -1},
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(InvalidInputError):
            dc_scan(SQRT2M1, **kwargs)


class TestDCEstimate:
    def test_sqrt2(self):
        estimate = dc_estimate(SQRT2M1, 1, 1000)
        assert Fraction(343, 1000) <= estimate.lo and estimate.hi <= Fraction(344, 1000)
        assert abs(float(estimate) - MIN_MARGIN) < 1e-12

    @pytest.mark.slow
    def test_sqrt2_long_range(self):
        estimate = dc_estimate(SQRT2M1, 1, 100000)
        assert 0.343 <= float(estimate) <= 0.344

    def test_irrational_exponent_path(self):
        estimate = dc_estimate(SQRT2M1, Fraction(3, 2), 50)
        margin, _ = brute_force_margin([math.sqrt(2) - 1], 1.5, 50)
        assert abs(float(estimate) - margin) < 1e-9

    @pytest.mark.parametrize("w", [1, 2])
    def test_image_keeps_a_scaled_constant(self, w):
        # both images carry a coordinate with bounded partial quotients:
        # sqrt2 - 1 for w = 1 and (sqrt3 - 1) / 2 for w = 2
        tau_prime = transference(2, 1)
        (step,) = gauss_orbit(PAIR, (w,))
        C = dc_estimate(PAIR, 1, 100)
        C_image = dc_estimate(step.image, 1, 100)
        assert float(C_image) >= float(C) * float(step.pivot) ** float(tau_prime - 1)

    def test_fixed_point_keeps_its_constant(self):
        (step,) = gauss_orbit(SQRT2M1, (1,))
        assert float(dc_estimate(step.image, 1, 500)) == pytest.approx(MIN_MARGIN, abs=1e-12)
        assert transference(1, 1) == 1


# ---------------------------------------------------------------------------
# Transference and the dual form
# ---------------------------------------------------------------------------

class TestTransference:
    def test_forward(self):
        assert transference(2, 1) == 3
        assert transference(3, Fraction(1, 2)) == Fraction(7, 2)
        assert transference(1, 2) == 2

    def test_inverse(self):
        assert transference(2, 3, "inverse") == 1
        assert transference(3, Fraction(7, 2), "inverse") == Fraction(1, 2)

    def test_float_input_gives_float(self):
        result = transference(2, 1.5)
        assert isinstance(result, float) and result == 4.0

    def test_errors(self):
        with pytest.raises(InvalidInputError):
            transference(0, 1)
        with pytest.raises(InvalidInputError):
            transference(2, 1, "sideways")
        with pytest.raises(DomainError):
            transference(2, 0)
        with pytest.raises(DomainError):
            transference(3, 1, "inverse")

    def test_params_derive_tau_prime(self):
        params = DiophParams(N=2, C=Fraction(1, 10), tau=1)
        assert params.tau_prime == 3
        with pytest.raises(InvalidInputError):
            DiophParams(N=2, C=0, tau=1)


class TestDualForm:
    def test_one_variable_box(self):
        result = dual_form_check(SQRT2M1, Fraction(1, 10), 1, 1)
        assert result.holds
        assert (result.p, result.q) == ((1,), 0)
        assert abs(float(result.value) - (math.sqrt(2) - 1)) < 1e-15
        assert result.vectors_scanned == 4

    def test_fails_above_the_minimum(self):
        result = dual_form_check(SQRT2M1, Fraction(1, 2), 1, 1)
        assert not result.holds

    def test_two_variables(self):
        result = dual_form_check(PAIR, Fraction(1, 100), 3, 4)
        assert result.holds
        assert result.p != (0, 0)
        p = result.p
        value = abs(p[0] * (math.sqrt(2) - 1) + p[1] * (math.sqrt(3) - 1) + result.q)
        assert abs(float(result.value) - value) < 1e-12
        assert result.margin.lo >= Fraction(1, 100)

    def test_independent_of_threads(self):
        serial = dual_form_check(PAIR, Fraction(1, 100), 3, 3, threads=1)
        parallel = dual_form_check(PAIR, Fraction(1, 100), 3, 3, threads=3)
        assert (parallel.p, parallel.q) == (serial.p, serial.q)
        assert parallel.vectors_scanned == serial.vectors_scanned

    def test_rejects_bad_parameters(self):
        with pytest.raises(InvalidInputError):
            dual_form_check(SQRT2M1, 0, 1, 1)
        with pytest.raises(InvalidInputError):
            dual_form_check(SQRT2M1, 1, 1, 0)


# ---------------------------------------------------------------------------
# Constructive word selection
# ---------------------------------------------------------------------------

class TestSelectWordAppendix:
    def test_single_variable_is_forced(self):
        trace = select_word_appendix(SQRT2M1, Fraction(1, 10), 1, 5)
        assert trace.word == (1,) * 5
        assert {s.test for s in trace.steps} == {"forced"}
        assert trace.tau_prime == 1

    def test_proof_mode(self):
        C = dc_estimate(PAIR, 1, 200).lo / 2
        trace = select_word_appendix(PAIR, C, 1, 6)
        assert len(trace.word) == 6
        assert trace.tau_prime == 3
        assert {s.test for s in trace.steps} <= {"direct", "threshold", "fallback"}
        for step, next_step in zip(trace.steps, trace.steps[1:]):
            assert next_step.w == step.j
        assert trace.kappa is not None and float(trace.kappa) > 0

    def test_running_constant_shrinks(self):
        C = dc_estimate(PAIR, 1, 200).lo / 2
        trace = select_word_appendix(PAIR, C, 1, 4)
        values = [float(s.C_n) for s in trace.steps]
        assert values[0] == pytest.approx(float(C))
        assert values == sorted(values, reverse=True)

    def test_envelope_holds_with_fitted_constant(self):
        C = dc_estimate(PAIR, 1, 200).lo / 2
        trace = select_word_appendix(PAIR, C, 1, 6)
        assert trace.k_fit is not None and float(trace.k_fit) > 0
        assert len(trace.envelope) == 5
        assert trace.within_envelope

    def test_greedy_takes_largest_image(self):
        trace = select_word_appendix(PAIR, 1, 1, 5, mode="greedy")
        assert {s.test for s in trace.steps} == {"greedy"}
        assert len(trace.word) == 5

    def test_selector_failure(self):
        with pytest.raises(SelectorFailed) as info:
            select_word_appendix(PAIR, 100, 1, 3)
        assert info.value.depth == 0

    def test_start_pivot(self):
        trace = select_word_appendix(PAIR, 1, 1, 2, mode="greedy", start=2)
        assert trace.word[0] == 2

    @pytest.mark.parametrize("kwargs", [
        {"depth": 0},
        {"depth": 2, "mode": "lazy"},
        {"depth": 2, "start": 3},
    ])
    def test_rejects_bad_arguments(self, kwargs):
        with pytest.raises(InvalidInputError):
            select_word_appendix(PAIR, 1, 1, **kwargs)

    def test_envelope_rows_directly(self):
        pivots = [RealScalar.exact("golden")] + [RealScalar.exact("(3-1*sqrt(5))/2")] * 4
        k_fit, rows = appendix_envelope(pivots, Fraction(1, 10), 1, 1)
        assert k_fit is not None
        assert [r.depth for r in rows] == [1, 2, 3, 4]
        assert all(r.within for r in rows)
        assert appendix_envelope(pivots[:1], Fraction(1, 10), 1, 1) == (None, [])


class TestAcceptance:
    @pytest.mark.parametrize("N", [1, 2, 3, 5])
    @pytest.mark.parametrize("tau", [Fraction(1, 2), 1, 2])
    def test_transference_round_trip(self, N, tau):
        assert transference(N, transference(N, tau), "inverse") == tau

    @pytest.mark.slow
    def test_appendix_selector_depth_20(self):
        C = dc_estimate(PAIR, 1, 1000).lo / 2
        trace = select_word_appendix(PAIR, C, 1, 20)
        assert len(trace.word) == 20
        assert trace.within_envelope
        for step in gauss_orbit(PAIR, trace.word):
            assert all(0 < x.lo and x.hi < Fraction(1, 2) for x in step.image)
