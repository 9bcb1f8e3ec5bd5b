"""Channel-reciprocity metrics, wavelet reconstruction and key generation."""

from ._core import (
    AuthPolicy,
    CoherenceMap,
    Error,
    Scalogram,
    SessionConfig,
    adapt_thresholds,
    apply_pipeline,
    auth_trials,
    ber,
    cdf_thresholds,
    coherent_gap_width,
    cwt,
    fft_reconstruct,
    golay_filter,
    gray_encode,
    jeffrey_divergence,
    make_keys,
    pearson,
    preset_names,
    quantize,
    read_magnitudes,
    simulate,
    synchronize,
    wasserstein_1d,
    wavelet_coherence,
    wpt_denoise,
    write_simulated_csv,
    wskg_session,
    xcorr_lag,
)

__version__ = "0.1.0"
