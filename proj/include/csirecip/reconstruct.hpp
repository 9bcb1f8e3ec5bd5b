#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "csirecip/wavelet.hpp"

namespace csirecip {

/// Frequency bins chosen for reconstruction and the thresholds that chose them.
struct ReciprocalBand {
  std::vector<std::size_t> f_rec;  // bin indices into `freqs`, ascending index
  std::vector<double> freqs;       // grid the indices refer to (descending Hz)
  double f_lo = 0.0;
  double f_hi = 0.0;
  double alpha = 1.0;
  std::size_t beta = 1;
  std::size_t L = 1;
  std::size_t iterations = 0;  // adapt_thresholds passes, 0 for a direct selection
};

struct SyncResult {
  int lag = 0;
  double peak_corr = 0.0;
  std::vector<double> x_aligned;
  std::vector<double> y_aligned;
  std::size_t discarded = 0;
};

/// Savitzky-Golay smoothing. The first and last half-windows are evaluated on
/// the polynomial fitted to the first and last full window.
std::vector<double> golay_filter(std::span<const double> x, std::size_t window = 11,
                                 std::size_t order = 3);

/// Keeps the lowest-frequency FFT bins that hold `power_keep` of the
/// non-DC power and transforms back.
std::vector<double> fft_reconstruct(std::span<const double> x, double power_keep = 0.98);

/// Periodised orthonormal wavelet packet transform (db4, 8 taps) to `depth`,
/// leaves concatenated in natural order. x.size() must be a multiple of 2^depth.
std::vector<double> wpt_analyze(std::span<const double> x, std::size_t depth);
std::vector<double> wpt_synthesize(std::span<const double> coeffs, std::size_t depth);

/// Packet-transform denoising: zero every leaf coefficient whose magnitude is
/// below the median magnitude. Input is symmetrically padded to a multiple of
/// 2^depth and cropped back. With `threshold` false this is a round trip.
std::vector<double> wpt_denoise(std::span<const double> x, std::size_t depth = 4,
                                bool threshold = true);

/// Bins with at least `beta` time samples of coherence >= alpha.
ReciprocalBand select_reciprocal_freqs(const CoherenceMap& map, double alpha, std::size_t beta);

/// Starts at alpha = max(wc), beta = L and relaxes (beta to ceil(L/3), alpha
/// by 5% per pass) until at least half the bins are selected or alpha < 0.05.
ReciprocalBand adapt_thresholds(const CoherenceMap& map, std::size_t L);

/// Upper bound on adapt_thresholds passes.
std::size_t adapt_max_iterations();

/// cwt -> band-limited icwt, mean restored. With `strict` only the bins in
/// band.f_rec are used instead of the closed interval [f_lo, f_hi].
std::vector<double> wt_reconstruct(std::span<const double> x, const ReciprocalBand& band,
                                   const CwtParams& params, bool strict = false);

/// Aligns y to x using the cross-correlation peak and trims both to the overlap.
SyncResult synchronize(std::span<const double> x, std::span<const double> y,
                       std::size_t max_lag);

/// Applies a known lag the same way synchronize would.
SyncResult apply_lag(std::span<const double> x, std::span<const double> y, int lag);

}  // namespace csirecip
