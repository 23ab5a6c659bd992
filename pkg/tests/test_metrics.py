import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dmdt.metrics import cr, evaluate, max_deviation, prd, qs, snr


class TestPrd:
    def test_identical_signals(self):
        assert prd([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_full_energy_error(self):
        assert prd([1.0, 0.0], [0.0, 0.0]) == pytest.approx(100.0)

    def test_hand_computed(self):
        assert prd([3.0, 4.0], [3.0, 4.5]) == pytest.approx(10.0)

    def test_zero_energy_reference_rejected(self):
        with pytest.raises(ValueError):
            prd([0.0, 0.0], [1.0, 0.0])

    def test_scale_invariance(self, rng):
        x = rng.standard_normal(100)
        xh = x + rng.standard_normal(100) * 0.1
        assert prd(7.5 * x, 7.5 * xh) == pytest.approx(prd(x, xh), rel=1e-12)


class TestSnr:
    def test_twenty_db(self):
        x = np.zeros(100)
        x[0] = 1.0
        e = np.zeros(100)
        e[1] = 0.1  # error energy = signal energy / 100
        assert snr(x, x + e) == pytest.approx(20.0)

    def test_zero_error_is_infinite(self):
        assert math.isinf(snr([1.0, 2.0], [1.0, 2.0]))

    def test_doubling_error_costs_six_db(self, rng):
        x = rng.standard_normal(256)
        e = rng.standard_normal(256) * 0.01
        assert snr(x, x + e) - snr(x, x + 2 * e) == pytest.approx(
            20 * math.log10(2), abs=1e-9)

    def test_duality_with_prd(self, rng):
        for _ in range(20):
            x = rng.standard_normal(128) * 10
            xh = x + rng.standard_normal(128) * 0.3
            p = prd(x, xh)
            assert snr(x, xh) == pytest.approx(40 - 20 * math.log10(p), abs=1e-9)


class TestCr:
    def test_benchmark_style_ratio(self):
        # 512 samples at 11 bits against a 1224-bit container
        assert cr(512 * 11, 1224) == pytest.approx(4.60, abs=0.005)

    def test_equal_sizes(self):
        assert cr(1000, 1000) == 1.0

    def test_expansion_not_clamped(self):
        assert cr(100, 200) == 0.5

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            cr(0, 10)
        with pytest.raises(ValueError):
            cr(10, 0)


class TestQs:
    def test_reference_qs_consistency(self):
        # unrounded CR/PRD of the published theta=5 point land near its QS
        assert qs(4.60, 0.13) == pytest.approx(35.4, abs=0.05)

    def test_simple_ratio(self):
        assert qs(10.0, 2.0) == 5.0

    def test_linear_in_cr(self):
        assert qs(20.0, 2.0) == 2 * qs(10.0, 2.0)

    def test_zero_prd_undefined(self):
        with pytest.raises(ValueError):
            qs(10.0, 0.0)


class TestMaxDeviation:
    def test_identical(self):
        assert max_deviation([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_hand_computed(self):
        assert max_deviation([0.0, 0.0, 0.0], [0.0, 0.05, -0.1]) == pytest.approx(0.1)

    def test_order_independence(self, rng):
        x = rng.standard_normal(50)
        xh = x + rng.standard_normal(50) * 0.2
        idx = rng.permutation(50)
        assert max_deviation(x, xh) == max_deviation(x[idx], xh[idx])


class TestEvaluate:
    def test_report_fields(self, rng):
        x = rng.standard_normal(128) * 5
        xh = x + rng.standard_normal(128) * 0.05
        rep = evaluate(x, xh, original_bits=128 * 16, compressed_bits=256,
                       theta=2.0)
        assert rep.n == 128 and rep.theta == 2.0
        assert rep.cr == pytest.approx(8.0)
        assert rep.qs == pytest.approx(rep.cr / rep.prd)
        assert rep.max_dev > 0
        d = rep.as_dict()
        assert set(d) == {"prd", "cr", "qs", "snr_db", "max_dev", "n", "theta"}

    def test_lossless_pair_flags_qs_undefined(self):
        rep = evaluate([1.0, 2.0], [1.0, 2.0], 32, 16, theta=0.0)
        assert rep.prd == 0.0 and rep.qs is None and math.isinf(rep.snr_db)


@given(seed=st.integers(min_value=0, max_value=2**32 - 1),
       scale=st.floats(min_value=0.001, max_value=1000))
@settings(max_examples=50, deadline=None)
def test_property_snr_prd_duality_and_scale_invariance(seed, scale):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(64) + 3
    xh = x + rng.standard_normal(64) * 0.2
    p = prd(x, xh)
    assert snr(x, xh) == pytest.approx(40 - 20 * math.log10(p), abs=1e-9)
    assert prd(scale * x, scale * xh) == pytest.approx(p, rel=1e-9)
