"""sklearn-style transformer wrapper around the canceller."""
import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

from plicancel.canceller import Canceller
from plicancel.estimator import PowerLineCanceller
from plicancel.params import AltParams
from plicancel.siggen import InterferenceSpec, gen_interference, gen_pink_noise, mix_at_snr

FS = 1000.0


def two_channel_block(duration_s: float = 2.0):
    n = int(duration_s * FS)
    cols = []
    for seed in (31, 32):
        carrier = gen_pink_noise(n, 2.0, seed)
        spec = InterferenceSpec(f0=60.0, amplitudes=(1.0, 1.0, 1.0))
        mixed, _ = mix_at_snr(carrier, gen_interference(spec, n, FS), 0.0)
        cols.append(mixed)
    return np.stack(cols, axis=1)


class TestSklearnProtocol:
    def test_get_set_params_round_trip(self):
        est = PowerLineCanceller(fs=FS, w=0.5, m_prime=2)
        params = est.get_params()
        assert params["fs"] == FS
        assert params["w"] == 0.5
        est.set_params(m_prime=4, dc_block=True)
        assert est.get_params()["m_prime"] == 4
        assert est.get_params()["dc_block"] is True

    def test_clone_preserves_settings(self):
        est = PowerLineCanceller(fs=500.0, band_lo=45.0, band_hi=65.0)
        twin = clone(est)
        assert twin.get_params() == est.get_params()

    def test_transform_before_fit_rejected(self):
        with pytest.raises(NotFittedError):
            PowerLineCanceller(fs=FS).transform(two_channel_block())

    def test_fit_records_channel_count(self):
        X = two_channel_block()
        est = PowerLineCanceller(fs=FS).fit(X)
        assert est.n_features_in_ == 2

    def test_channel_count_mismatch_rejected(self):
        X = two_channel_block()
        est = PowerLineCanceller(fs=FS).fit(X)
        with pytest.raises(ValueError, match="channels"):
            est.transform(X[:, :1])

    def test_invalid_parameters_surface_at_fit(self):
        with pytest.raises(ValueError, match="w"):
            PowerLineCanceller(fs=FS, w=-1.0).fit(two_channel_block())


class TestTransformBehavior:
    def test_matches_canceller_per_column(self):
        X = two_channel_block()
        est = PowerLineCanceller(fs=FS)
        out = est.fit_transform(X)
        params = AltParams(fs=FS)
        for c in range(2):
            ref, _ = Canceller(params).process(np.ascontiguousarray(X[:, c]))
            assert np.array_equal(out[:, c], ref)

    def test_one_dimensional_input_keeps_shape(self):
        x = two_channel_block()[:, 0]
        est = PowerLineCanceller(fs=FS).fit(x)
        out = est.transform(x)
        assert out.shape == x.shape
        ref, _ = Canceller(AltParams(fs=FS)).process(x)
        assert np.array_equal(out, ref)

    def test_transform_is_stateless_across_calls(self):
        X = two_channel_block()
        est = PowerLineCanceller(fs=FS).fit(X)
        first = est.transform(X)
        second = est.transform(X)
        assert np.array_equal(first, second)

    def test_works_inside_a_pipeline(self):
        X = two_channel_block()
        pipe = Pipeline([("pli", PowerLineCanceller(fs=FS))])
        out = pipe.fit_transform(X)
        assert out.shape == X.shape
        # Interference actually removed: 60 Hz band power drops.
        spec_in = np.abs(np.fft.rfft(X[:, 0]))
        spec_out = np.abs(np.fft.rfft(out[:, 0]))
        k60 = int(round(60.0 * X.shape[0] / FS))
        assert spec_out[k60] < 0.1 * spec_in[k60]
