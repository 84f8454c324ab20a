"""Estimator-style wrapper so the canceller drops into sklearn pipelines.

transform() is stateless across calls by design: every call processes
each column as a fresh stream (the canceller itself is causal and
adaptive, so "training" in the sklearn sense does not apply; fit only
validates parameters and records the input width).
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .canceller import Canceller
from .params import AltParams, map_params


class PowerLineCanceller(TransformerMixin, BaseEstimator):
    """Remove power-line interference from column-wise signals.

    Parameters mirror AltParams; X is (n_samples, n_channels) with
    channels processed independently.

    Examples
    --------
    >>> est = PowerLineCanceller(fs=1000.0)
    >>> cleaned = est.fit_transform(X)
    """

    def __init__(
        self,
        fs: float = 1000.0,
        b0: float = 50.0,
        b_inf: float = 0.1,
        b_st: float = 1.0,
        p0: float = 0.1,
        p_inf: float = 2.0,
        p_st: float = 1.0,
        w: float = 2.0,
        m_prime: int = 3,
        band_lo: float = 40.0,
        band_hi: float = 70.0,
        gamma_cutoff: float = 90.0,
        dc_block: bool = False,
        second_harmonic_mode: bool = False,
    ):
        self.fs = fs
        self.b0 = b0
        self.b_inf = b_inf
        self.b_st = b_st
        self.p0 = p0
        self.p_inf = p_inf
        self.p_st = p_st
        self.w = w
        self.m_prime = m_prime
        self.band_lo = band_lo
        self.band_hi = band_hi
        self.gamma_cutoff = gamma_cutoff
        self.dc_block = dc_block
        self.second_harmonic_mode = second_harmonic_mode

    def _alt_params(self) -> AltParams:
        return AltParams(
            fs=self.fs,
            b0=self.b0,
            b_inf=self.b_inf,
            b_st=self.b_st,
            p0=self.p0,
            p_inf=self.p_inf,
            p_st=self.p_st,
            w=self.w,
            m_prime=self.m_prime,
            band_lo=self.band_lo,
            band_hi=self.band_hi,
            gamma_cutoff=self.gamma_cutoff,
            dc_block=self.dc_block,
            second_harmonic_mode=self.second_harmonic_mode,
        )

    def fit(self, X, y=None):
        """Validate parameters and input shape; no estimation happens."""
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        params = self._alt_params()
        self.actual_params_ = map_params(params)
        self.n_features_in_ = 1 if X.ndim == 1 else X.shape[1]
        return self

    def transform(self, X):
        """Cancel interference in each column as an independent stream."""
        check_is_fitted(self, "actual_params_")
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        one_d = X.ndim == 1
        if one_d:
            X = X[:, None]
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} channels, fit saw {self.n_features_in_}"
            )
        params = self._alt_params()
        out = np.empty_like(X)
        for c in range(X.shape[1]):
            cleaned, _ = Canceller(params).process(np.ascontiguousarray(X[:, c]))
            out[:, c] = cleaned
        return out[:, 0] if one_d else out
