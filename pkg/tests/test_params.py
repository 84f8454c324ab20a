"""Parameter mapping: spot values, validity errors, range warnings."""
import math

import pytest

from plicancel.params import (
    AltParams,
    RECOMMENDED_RANGES,
    bandwidth_to_pole,
    clamp_harmonic_count,
    gamma_from_cutoff,
    map_params,
    settling_to_lambda,
)


class TestSettlingToLambda:
    def test_definition_is_exact(self):
        # lambda**(t*fs + 1) = 0.05 by construction
        for t, fs in ((0.1, 1000.0), (2.0, 1000.0), (1.0, 250.0), (5.0, 40000.0)):
            lam = settling_to_lambda(t, fs)
            assert lam ** (t * fs + 1.0) == pytest.approx(0.05, abs=1e-12)

    def test_spot_values(self):
        assert settling_to_lambda(0.1, 1000.0) == pytest.approx(0.9707748464609609, abs=1e-15)
        assert settling_to_lambda(2.0, 1000.0) == pytest.approx(0.9985040025434789, abs=1e-15)
        assert settling_to_lambda(1.0, 1000.0) == pytest.approx(0.9970117342468728, abs=1e-15)

    def test_weighted_sum_settles_to_95_percent(self):
        t, fs = 0.5, 1000.0
        lam = settling_to_lambda(t, fs)
        n = int(t * fs) + 1
        # partial geometric sum / asymptote == 1 - lam**n
        assert 1.0 - lam**n == pytest.approx(0.95, abs=1e-6)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            settling_to_lambda(0.0, 1000.0)
        with pytest.raises(ValueError):
            settling_to_lambda(-1.0, 1000.0)


class TestBandwidthToPole:
    def test_spot_values(self):
        assert bandwidth_to_pole(50.0, 1000.0) == pytest.approx(0.726542528005361, abs=1e-15)
        assert bandwidth_to_pole(0.1, 1000.0) == pytest.approx(0.9993718787787191, abs=1e-15)

    def test_quarter_rate_maps_to_zero(self):
        assert bandwidth_to_pole(250.0, 1000.0) == pytest.approx(0.0, abs=1e-15)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            bandwidth_to_pole(0.0, 1000.0)
        with pytest.raises(ValueError):
            bandwidth_to_pole(500.0, 1000.0)


class TestGammaFromCutoff:
    def test_spot_values(self):
        assert gamma_from_cutoff(90.0, 1000.0) == pytest.approx(0.5497546521927701, abs=1e-15)

    def test_disabled_at_quarter_rate(self):
        assert gamma_from_cutoff(90.0, 250.0) == 0.0
        assert gamma_from_cutoff(62.5, 250.0) == 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gamma_from_cutoff(0.0, 1000.0)


class TestMapParams:
    def test_default_mapping_spot_values(self):
        a = map_params(AltParams(fs=1000.0))
        assert a.alpha_0 == pytest.approx(0.726542528005361, abs=1e-12)
        assert a.alpha_inf == pytest.approx(0.9993718787787191, abs=1e-12)
        assert a.alpha_st == pytest.approx(0.9970117342468728, abs=1e-12)
        assert a.lambda_0 == pytest.approx(0.9707748464609609, abs=1e-12)
        assert a.lambda_inf == pytest.approx(0.9985040025434789, abs=1e-12)
        assert a.lambda_st == pytest.approx(0.9970117342468728, abs=1e-12)
        assert a.gamma == pytest.approx(0.5497546521927701, abs=1e-12)
        assert a.m_prime == 3

    def test_amplitude_memory_spot_value(self):
        a = map_params(AltParams(fs=1000.0, w=1.0))
        assert a.lambda_a == pytest.approx(0.997012, abs=1e-6)

    def test_error_names_offending_field(self):
        with pytest.raises(ValueError, match="b0"):
            map_params(AltParams(fs=1000.0, b0=-5.0))
        with pytest.raises(ValueError, match="w"):
            map_params(AltParams(fs=1000.0, w=0.0))
        with pytest.raises(ValueError, match="m_prime"):
            map_params(AltParams(fs=1000.0, m_prime=0))
        with pytest.raises(ValueError, match="fs"):
            map_params(AltParams(fs=-1000.0))
        with pytest.raises(ValueError, match="band_lo"):
            map_params(AltParams(fs=1000.0, band_lo=80.0, band_hi=70.0))

    def test_bandwidth_at_quarter_rate_rejected(self):
        # the pole mapping leaves (0, 1) at fs/4
        with pytest.raises(ValueError, match="b0"):
            map_params(AltParams(fs=200.0, b0=50.0, band_lo=40.0, band_hi=70.0))

    def test_out_of_recommended_range_warns_but_maps(self):
        with pytest.warns(UserWarning, match="b0"):
            a = map_params(AltParams(fs=1000.0, b0=60.0))
        assert 0.0 < a.alpha_0 < 1.0

    def test_all_recommended_range_bounds_map_cleanly(self):
        import warnings

        for name, (lo, hi) in RECOMMENDED_RANGES.items():
            for v in (lo, hi):
                with warnings.catch_warnings():
                    warnings.simplefilter("error")
                    map_params(AltParams(fs=1000.0, **{name: v}))


class TestClampHarmonicCount:
    def test_spot_examples(self):
        k60 = math.cos(2.0 * math.pi * 60.0 / 1000.0)
        assert clamp_harmonic_count(k60, 10) == 8
        assert clamp_harmonic_count(math.cos(1.50796), 3) == 2

    def test_request_below_limit_passes_through(self):
        k60 = math.cos(2.0 * math.pi * 60.0 / 1000.0)
        assert clamp_harmonic_count(k60, 3) == 3

    def test_at_least_one_harmonic(self):
        assert clamp_harmonic_count(-0.9, 5) == 1

    def test_dc_estimate_warns_and_passes_through(self):
        with pytest.warns(UserWarning):
            assert clamp_harmonic_count(1.0, 7) == 7

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            clamp_harmonic_count(1.5, 3)
        with pytest.raises(ValueError):
            clamp_harmonic_count(0.5, 0)
