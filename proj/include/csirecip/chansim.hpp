#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csirecip/csi_model.hpp"

namespace csirecip {

enum class Side { ap, sta, both };

/// `count` consecutive packets lost on `side`, starting `start_s` seconds in.
struct LossEvent {
  Side side = Side::sta;
  double start_s = 0.0;
  std::size_t count = 0;
};

struct ChannelConfig {
  double duration_s = 600.0;
  double rate_hz = 10.0;
  double f_lo = 0.05;  // shared fading band, Hz
  double f_hi = 0.5;
  double snr_db = 15.0;  // +inf disables the per-device noise
  int lag_samples = 0;   // STA sees the shared process this many samples late
  std::vector<LossEvent> loss;
  double coherence_time_s = 30.0;
  // Slow shared modulation of the fading depth: standard deviation of the
  // fading power in dB (0 keeps the channel stationary) and its correlation time.
  double activity_db = 0.0;
  double activity_time_s = 120.0;
  std::uint64_t seed = 1;
  std::size_t subcarriers = 64;

  void validate() const;
  std::size_t samples() const;
};

struct GroundTruth {
  int lag = 0;
  std::vector<std::int64_t> dropped_ap;
  std::vector<std::int64_t> dropped_sta;
};

struct ChannelPair {
  CsiTrace ap;
  CsiTrace sta;
  GroundTruth truth;
};

enum class AttackerMode { independent, delayed_replay };

/// Unit-variance shared fading path: a mixture of narrowband complex
/// Ornstein-Uhlenbeck oscillators spread evenly over [f_lo, f_hi], each with
/// correlation time coherence_time_s. Its autocorrelation is
/// exp(-tau / coherence_time_s) times the band's mean cosine. The first n
/// samples do not depend on how many are requested.
std::vector<double> fading_path(const ChannelConfig& cfg, std::size_t n, std::uint64_t stream);

/// Multiplicative depth envelope exp(a*u - a^2) with u a unit-variance
/// Ornstein-Uhlenbeck process, so its mean square is 1. All ones when
/// cfg.activity_db is 0. Prefix-consistent like fading_path.
std::vector<double> activity_envelope(const ChannelConfig& cfg, std::size_t n);

ChannelPair gen_pair(const ChannelConfig& cfg);

/// Trace an AP would measure from the attacker: either through a fresh,
/// independent channel, or through the legitimate channel `gap_s` later.
CsiTrace gen_attacker(const ChannelConfig& cfg, AttackerMode mode, double gap_s = 0.0);

/// Removes `count` consecutive packets starting with the first one captured
/// at or after `start_s`. Throws InvalidConfig when the trace ends first.
CsiTrace drop_packets(const CsiTrace& trace, double start_s, std::size_t count);

/// Calibrated analogs of the measured deployments: "los-short",
/// "nlos-short", "nlos-long", plus "reciprocal" (5 dB, lag 5, 1% loss).
ChannelConfig preset(std::string_view name, std::uint64_t seed, double duration_s = 1800.0);
std::vector<std::string> preset_names();

nlohmann::json to_json(const ChannelConfig& cfg);
nlohmann::json to_json(const GroundTruth& truth);
std::string_view to_string(Side side);
Side side_from_string(std::string_view name);

/// Mean magnitude and fading depth of subcarrier k.
double subcarrier_mean(std::size_t k);
double subcarrier_depth(std::size_t k);

}  // namespace csirecip
