#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace csirecip {

using BitVector = std::vector<std::uint8_t>;  // one 0/1 entry per bit

/// Result of a time-lagged cross-correlation scan. Positive `lag` means the
/// second series lags the first: y[k + lag] lines up with x[k].
struct LagEstimate {
  int lag = 0;
  double peak_corr = 0.0;
  int max_lag = 0;
  std::vector<double> curve;  // index lag + max_lag; NaN where a window is degenerate

  double corr_at(int l) const { return curve.at(static_cast<std::size_t>(l + max_lag)); }
};

struct DivergenceConfig {
  std::size_t bins = 32;
  double epsilon = 1e-9;
};

double pearson(std::span<const double> x, std::span<const double> y);

/// Symmetrised KL divergence (natural log) of epsilon-smoothed histograms that
/// share equal-width bins over the pooled range of both inputs.
double jeffrey_divergence(std::span<const double> x, std::span<const double> y,
                          const DivergenceConfig& cfg = {});

/// Order-1 Wasserstein distance between the two empirical distributions.
double wasserstein_1d(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of the overlapping windows at every lag in
/// [-max_lag, max_lag]. Ties go to the smallest |lag|, then the negative one.
LagEstimate xcorr_lag(std::span<const double> x, std::span<const double> y, std::size_t max_lag);

double ber(const BitVector& a, const BitVector& b);

}  // namespace csirecip
