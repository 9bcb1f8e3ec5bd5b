#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace csirecip {

enum class Wavelet { analytic_morlet };

struct CwtParams {
  Wavelet wavelet = Wavelet::analytic_morlet;
  double omega0 = 6.0;
  int voices_per_octave = 12;
  double min_freq = 0.0;
  double max_freq = 0.0;
  double sample_rate = 0.0;

  void validate() const;

  /// Frequencies of the analysis grid in Hz, highest first, spaced
  /// voices_per_octave per octave starting at max_freq.
  std::vector<double> frequency_grid() const;

  /// Grid spanning [1 / (0.25 * T), sample_rate / 2] for a series of n samples.
  static CwtParams for_length(std::size_t n, double sample_rate, double omega0 = 6.0,
                              int voices_per_octave = 12);
};

/// Wavelet scale (seconds) whose Fourier period matches `freq`.
double morlet_scale_for(double freq, double omega0);

struct Scalogram {
  Eigen::ArrayXXcd coeffs;  // (frequency bin, time index)
  std::vector<double> freqs;
  std::vector<double> scales;
  std::vector<int> coi;  // per time index: largest bin index free of edge effects, -1 if none
  CwtParams params;
  double mean = 0.0;  // removed before the transform

  std::size_t bins() const noexcept { return freqs.size(); }
  std::size_t length() const noexcept { return static_cast<std::size_t>(coeffs.cols()); }
};

struct CoherenceMap {
  Eigen::ArrayXXd wc;     // in [0, 1]
  Eigen::ArrayXXd phase;  // radians in (-pi, pi]
  std::vector<double> freqs;
  std::vector<double> times;
  std::vector<int> coi;

  std::size_t bins() const noexcept { return freqs.size(); }
  std::size_t length() const noexcept { return times.size(); }
  bool inside_coi(std::size_t bin, std::size_t t) const {
    return static_cast<int>(bin) <= coi.at(t);
  }
};

struct GapInterval {
  double start_time = 0.0;  // seconds from the first sample
  double width = 0.0;       // seconds
};

/// Analytic Morlet CWT of a gap-free series (mean removed, zero padded).
Scalogram cwt(std::span<const double> x, const CwtParams& params);

/// Single-integral inverse using only bins whose frequency lies in [f_lo, f_hi].
std::vector<double> icwt(const Scalogram& sg, double f_lo, double f_hi);

/// Inverse over an explicit set of bins (mask.size() == sg.bins()).
std::vector<double> icwt_bins(const Scalogram& sg, const std::vector<bool>& mask);

/// Smoothed wavelet coherence: Gaussian in time matched to each scale and a
/// 0.6-octave boxcar across scales.
CoherenceMap wavelet_coherence(std::span<const double> x, std::span<const double> y,
                               const CwtParams& params);

/// Rows at each end of the frequency grid whose scale smoothing window is
/// cut short by the grid edge (their coherence is biased upward).
std::size_t scale_edge_rows(int voices_per_octave);

/// Per-time mean coherence over the bins inside [f_lo, f_hi].
std::vector<double> band_average(const CoherenceMap& map, double f_lo, double f_hi);

/// Intervals where band-averaged coherence drops below wc_floor. An interval
/// opens below the floor and only closes once the average rises above
/// wc_floor + hysteresis.
std::vector<GapInterval> coherent_gap_width(const CoherenceMap& map, double f_lo, double f_hi,
                                            double wc_floor, double hysteresis = 0.1);

/// Coherence grid as CSV: header row of times, then one row per frequency.
void write_coherence_csv(std::ostream& out, const CoherenceMap& map);

/// Band means, gap list and grid shape for plotting tools.
nlohmann::json coherence_summary(const CoherenceMap& map, double f_lo, double f_hi,
                                 double wc_floor, double sample_rate);

}  // namespace csirecip
