import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmdt.errors import QuantizerOverflowError
from dmdt.quantize import QuantizedPyramid, QuantizerParams, dequantize, quantize
from dmdt.transform import DecompositionPlan, SubbandPyramid, decompose


def make_pyramid(x, divisors):
    plan = DecompositionPlan(divisors, len(x))
    return decompose(np.asarray(x, dtype=np.float64), plan), plan


class TestFactors:
    def test_average_factor_two_levels(self):
        plan = DecompositionPlan((32, 16), 512)
        params = QuantizerParams(theta=5.0, plan=plan)
        assert params.average_factor() == pytest.approx(
            1.0 / (5.0 * math.sqrt(512)), rel=1e-15)

    def test_detail_factors(self):
        plan = DecompositionPlan((2, 4), 64)
        params = QuantizerParams(theta=1.0, plan=plan)
        assert params.detail_factor(1) == pytest.approx(math.sqrt(2) / math.sqrt(2))
        assert params.detail_factor(2) == pytest.approx(math.sqrt(2) / math.sqrt(8))

    def test_rejects_nonpositive_theta(self):
        plan = DecompositionPlan((2,), 4)
        with pytest.raises(ValueError):
            QuantizerParams(theta=0.0, plan=plan)


class TestQuantize:
    def test_hand_computed_average(self):
        # v2 = 10.0 at theta=5, d=(32,16): floor(10/(5*sqrt(512)) + 0.5) = 0
        plan = DecompositionPlan((32, 16), 512)
        p = SubbandPyramid(
            deepest_average=np.array([10.0]),
            details=[[np.zeros(16) for _ in range(31)],
                     [np.zeros(1) for _ in range(15)]],
            plan=plan)
        q = quantize(p, QuantizerParams(theta=5.0, plan=plan))
        assert q.deepest_average[0] == 0

    def test_hand_computed_detail(self):
        # w1 = 7.2 at theta=1, d1=2: factor sqrt(2)/sqrt(2) = 1 -> floor(7.7) = 7
        plan = DecompositionPlan((2, 2), 8)
        p = SubbandPyramid(
            deepest_average=np.zeros(2),
            details=[[np.array([7.2, 0.0, 0.0, 0.0])], [np.zeros(2)]],
            plan=plan)
        q = quantize(p, QuantizerParams(theta=1.0, plan=plan))
        assert q.details[0][0][0] == 7

    def test_zero_coefficients_stay_zero(self, rng):
        p, plan = make_pyramid(np.zeros(64), (4, 4))
        for theta in (0.01, 1.0, 250.0):
            q = quantize(p, QuantizerParams(theta=theta, plan=plan))
            assert np.all(q.serialize() == 0)

    def test_negative_rounding_is_floor_of_half_up(self):
        # floor(c*f + 0.5) applied literally: -2.5 -> -2, not -3
        plan = DecompositionPlan((2,), 4)
        p = SubbandPyramid(
            deepest_average=np.array([-2.5 * math.sqrt(2), 2.5 * math.sqrt(2)]),
            details=[[np.zeros(2)]], plan=plan)
        q = quantize(p, QuantizerParams(theta=1.0, plan=plan))
        assert q.deepest_average[0] == -2
        assert q.deepest_average[1] == 3

    def test_mean_subtraction(self, rng):
        x = rng.uniform(100, 200, size=64)
        p, plan = make_pyramid(x, (4, 4))
        params = QuantizerParams(theta=0.5, plan=plan)
        q = quantize(p, params, subtract_mean=True)
        expected_mean = math.floor(float(np.mean(p.deepest_average)) + 0.5)
        assert q.mean_offset == expected_mean
        q_no = quantize(p, params, subtract_mean=False)
        assert q_no.mean_offset is None
        # round trip restores the mean exactly
        np.testing.assert_allclose(
            dequantize(q).deepest_average, dequantize(q_no).deepest_average,
            atol=0.5 / params.average_factor() + 1e-9)

    def test_plan_mismatch_rejected(self, rng):
        p, _ = make_pyramid(rng.standard_normal(64), (4, 4))
        other = DecompositionPlan((2, 2), 64)
        with pytest.raises(ValueError):
            quantize(p, QuantizerParams(theta=1.0, plan=other))

    def test_overflow_detected(self):
        plan = DecompositionPlan((2,), 4)
        p = SubbandPyramid(deepest_average=np.array([1e12, 0.0]),
                           details=[[np.zeros(2)]], plan=plan)
        with pytest.raises(QuantizerOverflowError):
            quantize(p, QuantizerParams(theta=1e-4, plan=plan))

    def test_determinism(self, rng):
        x = rng.standard_normal(128) * 1000
        p, plan = make_pyramid(x, (8, 4))
        params = QuantizerParams(theta=0.37, plan=plan)
        a = quantize(p, params, subtract_mean=True)
        b = quantize(p, params, subtract_mean=True)
        np.testing.assert_array_equal(a.serialize(), b.serialize())
        assert a.mean_offset == b.mean_offset


class TestDequantize:
    def test_reciprocal_of_detail_factor(self):
        plan = DecompositionPlan((2, 2), 8)
        params = QuantizerParams(theta=1.0, plan=plan)
        q = QuantizedPyramid(
            deepest_average=np.zeros(2, dtype=np.int32),
            details=[[np.array([7, 0, 0, 0], dtype=np.int32)],
                     [np.zeros(2, dtype=np.int32)]],
            mean_offset=None, params=params)
        p = dequantize(q)
        assert p.details[0][0][0] == pytest.approx(7.0)

    def test_all_zero(self):
        plan = DecompositionPlan((4,), 16)
        params = QuantizerParams(theta=2.0, plan=plan)
        q = QuantizedPyramid(
            deepest_average=np.zeros(4, dtype=np.int32),
            details=[[np.zeros(4, dtype=np.int32) for _ in range(3)]],
            mean_offset=None, params=params)
        assert np.all(dequantize(q).serialize() == 0.0)

    def test_half_step_bound_per_coefficient(self, rng):
        x = rng.standard_normal(256) * 300
        p, plan = make_pyramid(x, (8, 4))
        for theta in (0.01, 0.1, 1.0, 10.0):
            params = QuantizerParams(theta=theta, plan=plan)
            back = dequantize(quantize(p, params))
            assert np.max(np.abs(back.deepest_average - p.deepest_average)) \
                <= 0.5 / params.average_factor() + 1e-12
            for j in range(2):
                f = params.detail_factor(j + 1)
                for w, wq in zip(p.details[j], back.details[j]):
                    assert np.max(np.abs(w - wq)) <= 0.5 / f + 1e-12

    def test_serialize_round_trip(self, rng):
        p, plan = make_pyramid(rng.standard_normal(96) * 10, (3, 4))
        params = QuantizerParams(theta=0.2, plan=plan)
        q = quantize(p, params, subtract_mean=True)
        flat = q.serialize()
        assert flat.dtype == np.int32
        q2 = QuantizedPyramid.from_serialized(flat, params, q.mean_offset)
        np.testing.assert_array_equal(q2.serialize(), flat)
        np.testing.assert_allclose(dequantize(q2).serialize(),
                                   dequantize(q).serialize())


def test_monotone_coarseness_on_bundled_corpus():
    from dmdt.harness import bundled_corpus

    plan = DecompositionPlan((32, 16), 512)
    for kind in ("ppg", "ecg", "accel"):
        x = bundled_corpus(kind, records=1, length=512)[0].samples
        p = decompose(x, plan)
        prev = None
        for theta in (5.0, 10.0, 15.0, 20.0, 30.0):
            q = quantize(p, QuantizerParams(theta=theta, plan=plan)).serialize()
            if prev is not None:
                assert np.all(np.abs(q) <= np.abs(prev) + 1)
                assert np.count_nonzero(q) <= np.count_nonzero(prev)
            prev = q


@given(theta_big=st.floats(min_value=0.01, max_value=100),
       scale=st.floats(min_value=1.01, max_value=10),
       seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_property_monotone_coarseness(theta_big, scale, seed):
    # larger theta never grows a quantized magnitude by more than one step
    # and never increases the nonzero count
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(64) * 100
    plan = DecompositionPlan((4, 4), 64)
    p = decompose(x, plan)
    q1 = quantize(p, QuantizerParams(theta=theta_big, plan=plan)).serialize()
    q2 = quantize(p, QuantizerParams(theta=theta_big * scale, plan=plan)).serialize()
    assert np.all(np.abs(q2) <= np.abs(q1) + 1)
    assert np.count_nonzero(q2) <= np.count_nonzero(q1)


@given(seed=st.integers(min_value=0, max_value=2**32 - 1),
       theta=st.sampled_from([0.01, 0.1, 1.0]))
@settings(max_examples=30, deadline=None)
def test_property_l2_error_bound(seed, theta):
    # orthonormal-frame argument: each coefficient moves at most theta/2,
    # so the signal-domain l2 error is at most (theta/2)*sqrt(N)
    from dmdt.transform import reconstruct

    rng = np.random.default_rng(seed)
    n = 128
    x = rng.standard_normal(n) * 40
    plan = DecompositionPlan((8, 4), n)
    params = QuantizerParams(theta=theta, plan=plan)
    xhat = reconstruct(dequantize(quantize(decompose(x, plan), params)))
    assert np.linalg.norm(x - xhat) <= (theta / 2) * math.sqrt(n) + 1e-9
