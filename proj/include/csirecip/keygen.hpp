#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csirecip/csi_model.hpp"
#include "csirecip/metrics.hpp"

namespace csirecip {

struct QuantizerSpec {
  std::size_t levels = 4;
  std::vector<double> thresholds;  // levels - 1 ascending boundaries
};

/// Empirical quantiles at k/levels (linear interpolation between order statistics).
QuantizerSpec cdf_thresholds(std::span<const double> block, std::size_t levels = 4);

/// Level k covers (thresholds[k-1], thresholds[k]]; a value on a boundary
/// takes the lower level.
std::vector<int> quantize(std::span<const double> block, const QuantizerSpec& spec);

/// Binary-reflected Gray code, most significant bit first.
BitVector gray_encode(const std::vector<int>& levels, std::size_t levels_count);

std::size_t bits_per_level(std::size_t levels_count);

struct KeyBlock {
  std::size_t start = 0;  // index of the block's first sample
  std::vector<int> levels;
  BitVector bits;
};

enum class ThresholdScope { per_block, whole_series };

struct KeyList {
  std::vector<KeyBlock> blocks;
  std::size_t skipped = 0;  // degenerate blocks, left out of `blocks`
};

/// Consecutive, non-overlapping blocks; a trailing partial block is dropped.
/// `offset` is added to every block's start index.
KeyList make_keys(std::span<const double> x, std::size_t block_len = 100, std::size_t levels = 4,
                  ThresholdScope scope = ThresholdScope::per_block, std::size_t offset = 0);

struct ThresholdResult {
  int error_threshold = 0;  // bits
  double kgr = 0.0;         // accepted key bits per packet
  std::optional<double> mean_ber;  // over accepted keys; empty when none accepted
  std::size_t accepted = 0;
  std::size_t attempted = 0;
};

struct SessionReport {
  std::vector<ThresholdResult> thresholds;
  std::optional<double> overall_ber;  // over all paired blocks
  std::size_t total_packets = 0;
  std::size_t key_bits = 0;
  int lag = 0;
  double alpha = 0.0;
  std::size_t beta = 0;
  std::optional<double> band_lo_hz;
  std::optional<double> band_hi_hz;
  std::size_t agreements = 0;    // threshold agreements run (first one included)
  std::size_t probe_samples = 0; // samples spent on agreement, never keyed
  std::size_t skipped_blocks = 0;
  std::optional<double> pearson_raw;
  std::optional<double> pearson_processed;

  const ThresholdResult& at(int theta) const;
};

/// Scores blocks paired by position. Block lists must have equal length.
SessionReport evaluate(const std::vector<KeyBlock>& a, const std::vector<KeyBlock>& b,
                       std::size_t total_packets, const std::vector<int>& thresholds);

/// Keeps only blocks whose start index appears in both lists, in order.
std::pair<std::vector<KeyBlock>, std::vector<KeyBlock>> match_blocks(const KeyList& a,
                                                                     const KeyList& b);

enum class Pipeline { raw, golay, fft, wpt, wt };
std::string_view to_string(Pipeline p);
Pipeline pipeline_from_string(std::string_view name);
std::vector<Pipeline> all_pipelines();

/// Where each device's reconstruction band comes from in the wt pipeline.
enum class BandSource {
  per_device,  // each side selects bins from its own series with the shared thresholds
  shared_map,  // one selection from the cross-device coherence map, used by both
};

struct SessionConfig {
  Pipeline pipeline = Pipeline::wt;
  bool sync = true;
  std::size_t probe_len = 500;   // threshold-agreement window, samples
  std::size_t round_len = 3000;  // samples keyed between trigger checks
  std::size_t max_lag = 50;
  std::size_t block_len = 100;
  std::size_t levels = 4;
  ThresholdScope scope = ThresholdScope::per_block;
  std::vector<int> thresholds{5, 15, 20};
  std::size_t golay_window = 11;
  std::size_t golay_order = 3;
  double power_keep = 0.98;
  std::size_t wpt_depth = 4;
  double omega0 = 6.0;
  int voices_per_octave = 12;
  BandSource band_source = BandSource::per_device;
  bool strict_band = false;

  void validate() const;
};

/// Threshold agreement, per-device reconstruction, optional sync, then keys.
SessionReport wskg_session(std::span<const double> ap, std::span<const double> sta,
                           const SessionConfig& cfg, double rate_hz = 1.0);
SessionReport wskg_session(const MagnitudeSeries& ap, const MagnitudeSeries& sta,
                           const SessionConfig& cfg);

/// Applies one pipeline to a single series outside a session. The wt
/// pipeline picks its band from the series' lag-1 self-coherence.
std::vector<double> apply_pipeline(std::span<const double> x, const SessionConfig& cfg,
                                   double rate_hz = 1.0);

nlohmann::json to_json(const SessionReport& r);
nlohmann::json to_json(const SessionConfig& c);

/// Header and rows of the comparison table (one row per threshold).
std::string report_csv_header();
std::string report_csv_rows(const SessionReport& r, std::string_view pipeline, bool sync,
                            std::string_view scenario, std::uint64_t seed);

}  // namespace csirecip
