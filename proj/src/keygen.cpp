#include "csirecip/keygen.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "csirecip/error.hpp"
#include "csirecip/text.hpp"

namespace csirecip {

namespace {

bool power_of_two(std::size_t v) { return v >= 2 && (v & (v - 1)) == 0; }

}  // namespace

std::size_t bits_per_level(std::size_t levels_count) {
  if (!power_of_two(levels_count))
    throw Error(ErrorCode::InvalidParams, "levels must be a power of two >= 2");
  std::size_t b = 0;
  while ((std::size_t{1} << b) < levels_count) ++b;
  return b;
}

QuantizerSpec cdf_thresholds(std::span<const double> block, std::size_t levels) {
  bits_per_level(levels);
  if (block.size() < levels) throw Error(ErrorCode::TooShort, "block shorter than level count");
  std::vector<double> sorted(block.begin(), block.end());
  std::sort(sorted.begin(), sorted.end());
  const auto distinct = static_cast<std::size_t>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  if (distinct < levels) throw Error(ErrorCode::DegenerateBlock, "fewer distinct values than levels");
  sorted.assign(block.begin(), block.end());
  std::sort(sorted.begin(), sorted.end());

  QuantizerSpec spec;
  spec.levels = levels;
  const double last = static_cast<double>(sorted.size() - 1);
  for (std::size_t k = 1; k < levels; ++k) {
    const double h = last * static_cast<double>(k) / static_cast<double>(levels);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double q = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    if (!spec.thresholds.empty() && !(q > spec.thresholds.back()))
      throw Error(ErrorCode::DegenerateBlock, "quantile thresholds are not strictly increasing");
    spec.thresholds.push_back(q);
  }
  return spec;
}

std::vector<int> quantize(std::span<const double> block, const QuantizerSpec& spec) {
  std::vector<int> out(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) {
    const auto it = std::lower_bound(spec.thresholds.begin(), spec.thresholds.end(), block[i]);
    out[i] = static_cast<int>(it - spec.thresholds.begin());
  }
  return out;
}

BitVector gray_encode(const std::vector<int>& levels, std::size_t levels_count) {
  const auto width = bits_per_level(levels_count);
  BitVector bits;
  bits.reserve(levels.size() * width);
  for (int level : levels) {
    if (level < 0 || static_cast<std::size_t>(level) >= levels_count)
      throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level) + " out of range");
    const auto g = static_cast<unsigned>(level) ^ (static_cast<unsigned>(level) >> 1);
    for (std::size_t b = width; b-- > 0;) bits.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
  }
  return bits;
}

KeyList make_keys(std::span<const double> x, std::size_t block_len, std::size_t levels,
                  ThresholdScope scope, std::size_t offset) {
  if (block_len == 0) throw Error(ErrorCode::InvalidParams, "block_len must be positive");
  if (x.size() < block_len) throw Error(ErrorCode::TooShort, "series shorter than one key block");
  std::optional<QuantizerSpec> shared;
  KeyList keys;
  if (scope == ThresholdScope::whole_series) {
    try {
      shared = cdf_thresholds(x, levels);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBlock) throw;
      keys.skipped = x.size() / block_len;
      return keys;
    }
  }
  for (std::size_t start = 0; start + block_len <= x.size(); start += block_len) {
    const auto block = x.subspan(start, block_len);
    try {
      const auto spec = shared ? *shared : cdf_thresholds(block, levels);
      KeyBlock kb;
      kb.start = start + offset;
      kb.levels = quantize(block, spec);
      kb.bits = gray_encode(kb.levels, levels);
      keys.blocks.push_back(std::move(kb));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBlock) throw;
      ++keys.skipped;
    }
  }
  return keys;
}

const ThresholdResult& SessionReport::at(int theta) const {
  for (const auto& t : thresholds)
    if (t.error_threshold == theta) return t;
  throw Error(ErrorCode::InvalidParams, "threshold " + std::to_string(theta) + " not evaluated");
}

SessionReport evaluate(const std::vector<KeyBlock>& a, const std::vector<KeyBlock>& b,
                       std::size_t total_packets, const std::vector<int>& thresholds) {
  if (a.size() != b.size()) throw Error(ErrorCode::ListMismatch, "block lists differ in length");
  std::vector<std::size_t> dist(a.size());
  std::size_t key_bits = a.empty() ? 0 : a.front().bits.size();
  std::size_t all_errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].bits.size() != b[i].bits.size() || a[i].bits.size() != key_bits)
      throw Error(ErrorCode::LengthMismatch, "key blocks differ in bit length");
    std::size_t d = 0;
    for (std::size_t j = 0; j < key_bits; ++j) d += (a[i].bits[j] != b[i].bits[j]) ? 1 : 0;
    dist[i] = d;
    all_errors += d;
  }
  SessionReport r;
  r.total_packets = total_packets;
  r.key_bits = key_bits;
  if (!a.empty() && key_bits > 0)
    r.overall_ber = static_cast<double>(all_errors) / static_cast<double>(a.size() * key_bits);
  for (int theta : thresholds) {
    ThresholdResult t;
    t.error_threshold = theta;
    t.attempted = a.size();
    std::size_t errors = 0;
    for (auto d : dist)
      if (static_cast<long>(d) <= theta) {
        ++t.accepted;
        errors += d;
      }
    if (total_packets > 0)
      t.kgr = static_cast<double>(t.accepted * key_bits) / static_cast<double>(total_packets);
    if (t.accepted > 0 && key_bits > 0)
      t.mean_ber = static_cast<double>(errors) / static_cast<double>(t.accepted * key_bits);
    r.thresholds.push_back(t);
  }
  return r;
}

std::pair<std::vector<KeyBlock>, std::vector<KeyBlock>> match_blocks(const KeyList& a,
                                                                     const KeyList& b) {
  std::pair<std::vector<KeyBlock>, std::vector<KeyBlock>> out;
  std::size_t i = 0, j = 0;
  while (i < a.blocks.size() && j < b.blocks.size()) {
    if (a.blocks[i].start < b.blocks[j].start) {
      ++i;
    } else if (b.blocks[j].start < a.blocks[i].start) {
      ++j;
    } else {
      out.first.push_back(a.blocks[i++]);
      out.second.push_back(b.blocks[j++]);
    }
  }
  return out;
}

std::string_view to_string(Pipeline p) {
  switch (p) {
    case Pipeline::raw: return "raw";
    case Pipeline::golay: return "golay";
    case Pipeline::fft: return "fft";
    case Pipeline::wpt: return "wpt";
    case Pipeline::wt: return "wt";
  }
  return "?";
}

Pipeline pipeline_from_string(std::string_view name) {
  for (auto p : all_pipelines())
    if (to_string(p) == name) return p;
  throw Error(ErrorCode::InvalidConfig, "unknown pipeline '" + std::string(name) + "'");
}

std::vector<Pipeline> all_pipelines() {
  return {Pipeline::raw, Pipeline::golay, Pipeline::fft, Pipeline::wpt, Pipeline::wt};
}

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string opt_csv(const std::optional<double>& v) { return v ? text::shortest(*v) : ""; }

}  // namespace

nlohmann::json to_json(const SessionReport& r) {
  nlohmann::json th = nlohmann::json::array();
  for (const auto& t : r.thresholds)
    th.push_back({{"error_threshold_bits", t.error_threshold},
                  {"kgr_bits_per_packet", t.kgr},
                  {"mean_ber", opt(t.mean_ber)},
                  {"accepted", t.accepted},
                  {"attempted", t.attempted}});
  return {{"thresholds", th},
          {"overall_ber", opt(r.overall_ber)},
          {"total_packets", r.total_packets},
          {"key_bits", r.key_bits},
          {"lag_samples", r.lag},
          {"alpha", r.alpha},
          {"beta_samples", r.beta},
          {"band_hz", {opt(r.band_lo_hz), opt(r.band_hi_hz)}},
          {"agreements", r.agreements},
          {"probe_samples", r.probe_samples},
          {"skipped_blocks", r.skipped_blocks},
          {"pearson_raw", opt(r.pearson_raw)},
          {"pearson_processed", opt(r.pearson_processed)}};
}

nlohmann::json to_json(const SessionConfig& c) {
  return {{"pipeline", std::string(to_string(c.pipeline))},
          {"sync", c.sync},
          {"probe_len", c.probe_len},
          {"round_len", c.round_len},
          {"max_lag", c.max_lag},
          {"block_len", c.block_len},
          {"levels", c.levels},
          {"threshold_scope", c.scope == ThresholdScope::per_block ? "per_block" : "whole_series"},
          {"thresholds", c.thresholds},
          {"golay_window", c.golay_window},
          {"golay_order", c.golay_order},
          {"power_keep", c.power_keep},
          {"wpt_depth", c.wpt_depth},
          {"omega0", c.omega0},
          {"voices_per_octave", c.voices_per_octave},
          {"band_source", c.band_source == BandSource::per_device ? "per_device" : "shared_map"},
          {"strict_band", c.strict_band}};
}

std::string report_csv_header() {
  return "pipeline,sync,scenario,seed,theta_bits,kgr_bits_per_packet,mean_ber,overall_ber,"
         "accepted,attempted,lag_samples\n";
}

std::string report_csv_rows(const SessionReport& r, std::string_view pipeline, bool sync,
                            std::string_view scenario, std::uint64_t seed) {
  std::ostringstream out;
  for (const auto& t : r.thresholds)
    out << pipeline << ',' << (sync ? "on" : "off") << ',' << scenario << ',' << seed << ','
        << t.error_threshold << ',' << text::shortest(t.kgr) << ',' << opt_csv(t.mean_ber) << ','
        << opt_csv(r.overall_ber) << ',' << t.accepted << ',' << t.attempted << ',' << r.lag << '\n';
  return out.str();
}

}  // namespace csirecip
