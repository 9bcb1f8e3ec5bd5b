#include "csirecip/chansim.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>

#include "csirecip/error.hpp"

namespace csirecip {

namespace {

enum Stream : std::uint64_t {
  kLegitPath = 1,
  kApNoise = 2,
  kStaNoise = 3,
  kApPhase = 4,
  kStaPhase = 5,
  kAttackerPath = 6,
  kAttackerNoise = 7,
  kAttackerPhase = 8,
  kPresetLoss = 9,
  kActivity = 10,
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

std::size_t start_index(const LossEvent& e, double rate) {
  return static_cast<std::size_t>(std::llround(e.start_s * rate));
}

}  // namespace

double subcarrier_mean(std::size_t k) {
  return 20.0 * (1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / 16.0));
}

double subcarrier_depth(std::size_t k) { return 0.15 * subcarrier_mean(k); }

void ChannelConfig::validate() const {
  if (!(rate_hz > 0.0)) throw Error(ErrorCode::InvalidConfig, "rate_hz must be positive");
  if (!(duration_s > 0.0)) throw Error(ErrorCode::InvalidConfig, "duration_s must be positive");
  if (!(f_lo >= 0.0) || !(f_hi >= f_lo) || f_hi > rate_hz / 2.0)
    throw Error(ErrorCode::InvalidBand, "need 0 <= f_lo <= f_hi <= rate_hz / 2");
  if (!(coherence_time_s > 0.0))
    throw Error(ErrorCode::InvalidConfig, "coherence_time_s must be positive");
  if (std::isnan(snr_db)) throw Error(ErrorCode::InvalidConfig, "snr_db is NaN");
  if (!(activity_db >= 0.0) || !(activity_time_s > 0.0))
    throw Error(ErrorCode::InvalidConfig, "activity_db must be >= 0 and activity_time_s > 0");
  if (subcarriers == 0) throw Error(ErrorCode::InvalidConfig, "need at least one subcarrier");
  const auto n = samples();
  if (static_cast<std::size_t>(std::abs(lag_samples)) >= n)
    throw Error(ErrorCode::InvalidConfig, "lag exceeds trace length");
  std::vector<std::pair<std::size_t, std::size_t>> ap_spans, sta_spans;
  for (const auto& e : loss) {
    if (!(e.start_s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "loss start must be >= 0");
    const auto s = start_index(e, rate_hz);
    if (s + e.count > n) throw Error(ErrorCode::InvalidConfig, "loss event runs past the trace");
    if (e.side != Side::sta) ap_spans.emplace_back(s, s + e.count);
    if (e.side != Side::ap) sta_spans.emplace_back(s, s + e.count);
  }
  for (auto* spans : {&ap_spans, &sta_spans}) {
    std::sort(spans->begin(), spans->end());
    for (std::size_t k = 1; k < spans->size(); ++k)
      if ((*spans)[k].first < (*spans)[k - 1].second)
        throw Error(ErrorCode::InvalidConfig, "overlapping loss events on one side");
  }
}

std::size_t ChannelConfig::samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * rate_hz));
}

std::vector<double> fading_path(const ChannelConfig& cfg, std::size_t n, std::uint64_t stream) {
  const double dt = 1.0 / cfg.rate_hz;
  const double bw = cfg.f_hi - cfg.f_lo;
  // One oscillator per Lorentzian linewidth keeps the mixture spectrum flat.
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(bw * 2.0 * std::numbers::pi * cfg.coherence_time_s)));
  const double rho = std::exp(-dt / cfg.coherence_time_s);
  const double drive = std::sqrt(1.0 - rho * rho);
  std::vector<Complex> step(k), z(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double f = k == 1 ? 0.5 * (cfg.f_lo + cfg.f_hi)
                            : cfg.f_lo + (static_cast<double>(j) + 0.5) * bw / static_cast<double>(k);
    step[j] = std::polar(rho, 2.0 * std::numbers::pi * f * dt);
  }
  auto rng = make_rng(cfg.seed, stream);
  std::normal_distribution<double> normal;
  for (auto& v : z) v = {normal(rng), normal(rng)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      acc += z[j].real();
      const double a = normal(rng), b = normal(rng);
      z[j] = step[j] * z[j] + drive * Complex(a, b);
    }
    out[t] = acc * scale;
  }
  return out;
}

std::vector<double> activity_envelope(const ChannelConfig& cfg, std::size_t n) {
  std::vector<double> g(n, 1.0);
  if (cfg.activity_db == 0.0) return g;
  const double a = cfg.activity_db * std::log(10.0) / 20.0;
  const double rho = std::exp(-1.0 / (cfg.rate_hz * cfg.activity_time_s));
  const double drive = std::sqrt(1.0 - rho * rho);
  auto rng = make_rng(cfg.seed, kActivity);
  std::normal_distribution<double> normal;
  double u = normal(rng);
  for (std::size_t t = 0; t < n; ++t) {
    g[t] = std::exp(a * u - a * a);
    u = rho * u + drive * normal(rng);
  }
  return g;
}

namespace {

// Shared channel seen by the devices: fading path times the activity envelope.
std::vector<double> channel_path(const ChannelConfig& cfg, std::size_t n, std::uint64_t stream) {
  auto path = fading_path(cfg, n, stream);
  if (cfg.activity_db > 0.0) {
    // The attacker's independent channel gets its own envelope.
    ChannelConfig c = cfg;
    if (stream != kLegitPath) c.seed = cfg.seed ^ 0xa77ac4e5ULL;
    const auto g = activity_envelope(c, n);
    for (std::size_t t = 0; t < n; ++t) path[t] *= g[t];
  }
  return path;
}

// Builds one device's trace from its view of the shared path.
CsiTrace render(const ChannelConfig& cfg, std::string device, const std::vector<double>& path,
                std::size_t offset, const std::vector<bool>& dropped, std::uint64_t noise_stream,
                std::uint64_t phase_stream) {
  const auto n = cfg.samples();
  const bool noisy = std::isfinite(cfg.snr_db);
  const double noise_ratio = noisy ? std::pow(10.0, -cfg.snr_db / 20.0) : 0.0;
  auto noise_rng = make_rng(cfg.seed, noise_stream);
  auto phase_rng = make_rng(cfg.seed, phase_stream);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<CsiSample> samples;
  samples.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    // Draw for every packet, lost or not, so loss never shifts the noise.
    const double phase = uniform(phase_rng);
    CsiSample s;
    s.seq = static_cast<std::int64_t>(t);
    s.t = static_cast<double>(t) / cfg.rate_hz;
    s.iq.resize(cfg.subcarriers);
    for (std::size_t k = 0; k < cfg.subcarriers; ++k) {
      const double depth = subcarrier_depth(k);
      double mag = subcarrier_mean(k) + depth * path[t + offset];
      if (noisy) mag += depth * noise_ratio * normal(noise_rng);
      s.iq[k] = std::polar(mag, phase + 0.1 * static_cast<double>(k));
    }
    if (!dropped[t]) samples.push_back(std::move(s));
  }
  return CsiTrace(std::move(device), cfg.subcarriers, cfg.rate_hz, std::move(samples));
}

}  // namespace

ChannelPair gen_pair(const ChannelConfig& cfg) {
  cfg.validate();
  const auto n = cfg.samples();
  const auto lag = cfg.lag_samples;
  const auto span = static_cast<std::size_t>(std::abs(lag));
  const auto path = channel_path(cfg, n + span, kLegitPath);
  const std::size_t ap_off = lag > 0 ? span : 0;
  const std::size_t sta_off = lag > 0 ? 0 : span;  // sta[t] = path[t + ap_off - lag]

  std::vector<bool> drop_ap(n, false), drop_sta(n, false);
  for (const auto& e : cfg.loss) {
    const auto s = start_index(e, cfg.rate_hz);
    for (std::size_t t = s; t < s + e.count; ++t) {
      if (e.side != Side::sta) drop_ap[t] = true;
      if (e.side != Side::ap) drop_sta[t] = true;
    }
  }
  GroundTruth truth;
  truth.lag = lag;
  for (std::size_t t = 0; t < n; ++t) {
    if (drop_ap[t]) truth.dropped_ap.push_back(static_cast<std::int64_t>(t));
    if (drop_sta[t]) truth.dropped_sta.push_back(static_cast<std::int64_t>(t));
  }
  return ChannelPair{render(cfg, "ap", path, ap_off, drop_ap, kApNoise, kApPhase),
                     render(cfg, "sta", path, sta_off, drop_sta, kStaNoise, kStaPhase),
                     std::move(truth)};
}

CsiTrace gen_attacker(const ChannelConfig& cfg, AttackerMode mode, double gap_s) {
  cfg.validate();
  if (!(gap_s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "gap_s must be >= 0");
  const auto n = cfg.samples();
  const std::vector<bool> none(n, false);
  if (mode == AttackerMode::independent) {
    const auto path = channel_path(cfg, n, kAttackerPath);
    return render(cfg, "attacker", path, 0, none, kAttackerNoise, kAttackerPhase);
  }
  // Same path the AP sees in gen_pair, evaluated gap_s later.
  const auto span = static_cast<std::size_t>(std::abs(cfg.lag_samples));
  const auto gap = static_cast<std::size_t>(std::llround(gap_s * cfg.rate_hz));
  const auto path = channel_path(cfg, n + span + gap, kLegitPath);
  const std::size_t ap_off = cfg.lag_samples > 0 ? span : 0;
  return render(cfg, "attacker", path, ap_off + gap, none, kAttackerNoise, kAttackerPhase);
}

CsiTrace drop_packets(const CsiTrace& trace, double start_s, std::size_t count) {
  const auto& in = trace.samples();
  const auto first = std::find_if(in.begin(), in.end(), [&](const CsiSample& s) { return s.t >= start_s; });
  if (static_cast<std::size_t>(in.end() - first) < count)
    throw Error(ErrorCode::InvalidConfig, "drop runs past the end of the trace");
  std::vector<CsiSample> out(in.begin(), first);
  out.insert(out.end(), first + static_cast<std::ptrdiff_t>(count), in.end());
  return CsiTrace(trace.device_id(), trace.subcarriers(), trace.rate_hz(), std::move(out));
}

namespace {

// Non-overlapping bursts of up to 10 packets per side, totalling `fraction`.
void add_random_loss(ChannelConfig& cfg, Side side, double fraction) {
  const auto n = cfg.samples();
  auto total = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (total == 0) return;
  auto rng = make_rng(cfg.seed, kPresetLoss + (side == Side::ap ? 0 : 100));
  std::uniform_int_distribution<std::size_t> burst_len(1, 10);
  std::uniform_int_distribution<std::size_t> pos(0, n - 11);
  std::vector<bool> used(n, false);
  std::size_t attempts = 0;
  while (total > 0 && attempts++ < 100000) {
    const auto len = std::min(total, burst_len(rng));
    const auto s = pos(rng);
    // keep one free packet on either side so bursts never merge
    bool clash = false;
    for (std::size_t t = (s == 0 ? 0 : s - 1); t < std::min(n, s + len + 1) && !clash; ++t)
      clash = used[t];
    if (clash) continue;
    for (std::size_t t = s; t < s + len; ++t) used[t] = true;
    cfg.loss.push_back({side, static_cast<double>(s) / cfg.rate_hz, len});
    total -= len;
  }
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"los-short", "nlos-short", "nlos-long", "reciprocal"};
}

ChannelConfig preset(std::string_view name, std::uint64_t seed, double duration_s) {
  ChannelConfig cfg;
  cfg.seed = seed;
  cfg.duration_s = duration_s;
  cfg.rate_hz = 10.0;
  cfg.f_lo = 0.02;
  cfg.f_hi = 0.2;
  cfg.coherence_time_s = 30.0;
  double loss = 0.0;
  if (name == "los-short") {
    cfg.snr_db = 20.0;
    cfg.lag_samples = 0;
  } else if (name == "nlos-short") {
    cfg.snr_db = 18.0;
    cfg.lag_samples = 1;
    loss = 0.005;
  } else if (name == "nlos-long") {
    cfg.snr_db = 17.0;
    cfg.lag_samples = 2;
    loss = 0.02;
  } else if (name == "reciprocal") {
    // Faster fading: golay's window no longer averages out the noise.
    cfg.f_lo = 0.05;
    cfg.f_hi = 0.5;
    cfg.snr_db = 5.0;
    cfg.lag_samples = 5;
    loss = 0.01;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown preset " + std::string(name));
  }
  add_random_loss(cfg, Side::ap, loss);
  add_random_loss(cfg, Side::sta, loss);
  return cfg;
}

std::string_view to_string(Side side) {
  switch (side) {
    case Side::ap: return "ap";
    case Side::sta: return "sta";
    case Side::both: return "both";
  }
  return "?";
}

Side side_from_string(std::string_view name) {
  for (auto s : {Side::ap, Side::sta, Side::both})
    if (to_string(s) == name) return s;
  throw Error(ErrorCode::InvalidConfig, "unknown side '" + std::string(name) + "'");
}

nlohmann::json to_json(const ChannelConfig& cfg) {
  nlohmann::json loss = nlohmann::json::array();
  for (const auto& e : cfg.loss)
    loss.push_back({{"side", std::string(to_string(e.side))}, {"start_s", e.start_s}, {"count", e.count}});
  nlohmann::json snr = std::isfinite(cfg.snr_db) ? nlohmann::json(cfg.snr_db) : nlohmann::json(nullptr);
  return {{"duration_s", cfg.duration_s},
          {"rate_hz", cfg.rate_hz},
          {"band_hz", {cfg.f_lo, cfg.f_hi}},
          {"snr_db", snr},
          {"lag_samples", cfg.lag_samples},
          {"coherence_time_s", cfg.coherence_time_s},
          {"activity_db", cfg.activity_db},
          {"activity_time_s", cfg.activity_time_s},
          {"seed", cfg.seed},
          {"subcarriers", cfg.subcarriers},
          {"loss", loss}};
}

nlohmann::json to_json(const GroundTruth& truth) {
  return {{"lag_samples", truth.lag},
          {"dropped_ap", truth.dropped_ap},
          {"dropped_sta", truth.dropped_sta}};
}

}  // namespace csirecip
