#include <algorithm>
#include <cmath>
#include <optional>

#include "csirecip/error.hpp"
#include "csirecip/keygen.hpp"
#include "csirecip/reconstruct.hpp"
#include "csirecip/wavelet.hpp"

namespace csirecip {

void SessionConfig::validate() const {
  if (probe_len < 64) throw Error(ErrorCode::InvalidConfig, "probe_len must be at least 64");
  if (block_len == 0) throw Error(ErrorCode::InvalidConfig, "block_len must be positive");
  if (round_len < block_len) throw Error(ErrorCode::InvalidConfig, "round_len must cover a block");
  bits_per_level(levels);
  if (thresholds.empty() || !std::is_sorted(thresholds.begin(), thresholds.end()) ||
      thresholds.front() < 0)
    throw Error(ErrorCode::InvalidConfig, "thresholds must be non-empty, ascending and >= 0");
  if (!(power_keep > 0.0 && power_keep <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "power_keep must be in (0, 1]");
}

namespace {

using Vec = std::vector<double>;

std::span<const double> slice(std::span<const double> x, std::size_t from, std::size_t to) {
  return x.subspan(from, to - from);
}

Vec process_plain(std::span<const double> x, const SessionConfig& cfg) {
  switch (cfg.pipeline) {
    case Pipeline::raw: return Vec(x.begin(), x.end());
    case Pipeline::golay: return golay_filter(x, cfg.golay_window, cfg.golay_order);
    case Pipeline::fft: return fft_reconstruct(x, cfg.power_keep);
    case Pipeline::wpt: return wpt_denoise(x, cfg.wpt_depth);
    case Pipeline::wt: break;
  }
  throw Error(ErrorCode::InvalidConfig, "wt pipeline needs a band");
}

CwtParams params_for(std::size_t n, double rate, const SessionConfig& cfg) {
  return CwtParams::for_length(n, rate, cfg.omega0, cfg.voices_per_octave);
}

// Selection ignores the highest bins, where the truncated scale smoothing
// inflates coherence; one stray bin there would stretch the band closure up
// to the Nyquist frequency.
CoherenceMap trim_top(CoherenceMap map, int voices_per_octave) {
  const auto k = static_cast<Eigen::Index>(
      std::min(scale_edge_rows(voices_per_octave), map.bins() > 1 ? map.bins() - 1 : 0));
  if (k == 0) return map;
  const auto rows = map.wc.rows() - k;
  map.wc = map.wc.bottomRows(rows).eval();
  map.phase = map.phase.bottomRows(rows).eval();
  map.freqs.erase(map.freqs.begin(), map.freqs.begin() + k);
  for (auto& c : map.coi) c = std::max(-1, c - static_cast<int>(k));
  return map;
}

// Coherence between the even and odd packets of one series. The two halves
// share the slowly varying channel but none of the per-packet noise, so a
// device can rank bins without seeing its peer's measurements.
CoherenceMap split_coherence(std::span<const double> x, double rate, const SessionConfig& cfg) {
  const std::size_t m = x.size() / 2;
  std::vector<double> even(m), odd(m);
  for (std::size_t k = 0; k < m; ++k) {
    even[k] = x[2 * k];
    odd[k] = x[2 * k + 1];
  }
  return trim_top(wavelet_coherence(even, odd, params_for(m, rate / 2.0, cfg)),
                  cfg.voices_per_octave);
}

std::optional<ReciprocalBand> try_select(const CoherenceMap& map, double alpha, std::size_t beta) {
  try {
    return select_reciprocal_freqs(map, alpha, std::clamp<std::size_t>(beta, 1, map.length()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoFrequencySelected) throw;
    return std::nullopt;
  }
}

bool enough(const std::optional<ReciprocalBand>& b, const CoherenceMap& map) {
  return b && b->f_rec.size() >= (map.bins() + 1) / 2;
}

struct Agreement {
  ReciprocalBand band;  // wt only
  int lag = 0;
};

void append(Vec& dst, const Vec& src) { dst.insert(dst.end(), src.begin(), src.end()); }

}  // namespace

std::vector<double> apply_pipeline(std::span<const double> x, const SessionConfig& cfg,
                                   double rate_hz) {
  if (cfg.pipeline != Pipeline::wt) return process_plain(x, cfg);
  const auto map = split_coherence(x, rate_hz, cfg);
  const auto band = adapt_thresholds(map, map.length());
  return wt_reconstruct(x, band, params_for(x.size(), rate_hz, cfg));
}

SessionReport wskg_session(std::span<const double> ap, std::span<const double> sta,
                           const SessionConfig& cfg, double rate_hz) {
  cfg.validate();
  if (ap.size() != sta.size()) throw Error(ErrorCode::LengthMismatch, "series lengths differ");
  for (std::size_t i = 0; i < ap.size(); ++i)
    if (!std::isfinite(ap[i]) || !std::isfinite(sta[i]))
      throw Error(ErrorCode::GapsPresent, "session input must be gap-free");
  const std::size_t n = ap.size();
  const std::size_t L = cfg.probe_len;
  const bool wt = cfg.pipeline == Pipeline::wt;

  KeyList keys_a, keys_b;
  Vec proc_a, proc_b;
  std::optional<Agreement> first;
  std::size_t agreements = 0, probe_samples = 0;

  std::size_t pos = 0;
  while (pos + L + cfg.block_len <= n) {
    // Threshold agreement on public probe samples.
    const auto pa = slice(ap, pos, pos + L), pb = slice(sta, pos, pos + L);
    Agreement ag;
    Vec qa, qb;
    if (wt) {
      const auto p = params_for(L, rate_hz, cfg);
      ag.band = adapt_thresholds(trim_top(wavelet_coherence(pa, pb, p), cfg.voices_per_octave), L);
      qa = wt_reconstruct(pa, ag.band, p);
      qb = wt_reconstruct(pb, ag.band, p);
    } else {
      qa = process_plain(pa, cfg);
      qb = process_plain(pb, cfg);
    }
    if (cfg.sync) {
      const auto max_lag = std::min(cfg.max_lag, (L - 1) / 2);
      try {
        ag.lag = xcorr_lag(qa, qb, max_lag).lag;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSeries) throw;
      }
    }
    ++agreements;
    probe_samples += L;
    if (!first) first = ag;
    pos += L;

    // Key material up to the end of the series or the next update trigger.
    const std::size_t seg_start = pos;
    Vec seg_a, seg_b;
    if (!wt) {
      seg_a = process_plain(slice(ap, pos, n), cfg);
      seg_b = process_plain(slice(sta, pos, n), cfg);
      pos = n;
    } else {
      std::optional<ReciprocalBand> last_a, last_b;
      while (pos < n) {
        std::size_t end = std::min(pos + cfg.round_len, n);
        if (n - end < cfg.block_len) end = n;
        if (end - pos < cfg.block_len) {
          pos = n;
          break;
        }
        const auto ra = slice(ap, pos, end), rb = slice(sta, pos, end);
        const auto p = params_for(end - pos, rate_hz, cfg);
        // beta is agreed as a count over L samples; rescale to each map's length.
        const auto beta = [&](const CoherenceMap& m) {
          return static_cast<std::size_t>(std::ceil(static_cast<double>(ag.band.beta) *
                                                    static_cast<double>(m.length()) /
                                                    static_cast<double>(L)));
        };
        std::optional<ReciprocalBand> ba, bb;
        bool trigger = false;
        if (cfg.band_source == BandSource::shared_map) {
          const auto map = trim_top(wavelet_coherence(ra, rb, p), cfg.voices_per_octave);
          ba = bb = try_select(map, ag.band.alpha, beta(map));
          trigger = !enough(ba, map);
        } else {
          const auto ma = split_coherence(ra, rate_hz, cfg), mb = split_coherence(rb, rate_hz, cfg);
          ba = try_select(ma, ag.band.alpha, beta(ma));
          bb = try_select(mb, ag.band.alpha, beta(mb));
          trigger = !enough(ba, ma) || !enough(bb, mb);
        }
        // An empty selection falls back to the last band that side used.
        if (!ba) ba = last_a ? *last_a : ag.band;
        if (!bb) bb = last_b ? *last_b : ag.band;
        last_a = ba;
        last_b = bb;
        // The strict mask only applies to bands selected on this round's grid.
        const auto grid = p.frequency_grid();
        append(seg_a, wt_reconstruct(ra, *ba, p, cfg.strict_band && ba->freqs == grid));
        append(seg_b, wt_reconstruct(rb, *bb, p, cfg.strict_band && bb->freqs == grid));
        pos = end;
        if (trigger) break;
      }
    }
    if (seg_a.size() <= static_cast<std::size_t>(std::abs(ag.lag))) continue;
    auto aligned = apply_lag(seg_a, seg_b, ag.lag);
    if (aligned.x_aligned.size() >= cfg.block_len) {
      auto ka = make_keys(aligned.x_aligned, cfg.block_len, cfg.levels, cfg.scope, seg_start);
      auto kb = make_keys(aligned.y_aligned, cfg.block_len, cfg.levels, cfg.scope, seg_start);
      keys_a.skipped += ka.skipped;
      keys_b.skipped += kb.skipped;
      for (auto& blk : ka.blocks) keys_a.blocks.push_back(std::move(blk));
      for (auto& blk : kb.blocks) keys_b.blocks.push_back(std::move(blk));
    }
    append(proc_a, aligned.x_aligned);
    append(proc_b, aligned.y_aligned);
  }

  const auto [ma, mb] = match_blocks(keys_a, keys_b);
  auto report = evaluate(ma, mb, n, cfg.thresholds);
  if (report.key_bits == 0) report.key_bits = cfg.block_len * bits_per_level(cfg.levels);
  report.skipped_blocks = keys_a.blocks.size() + keys_a.skipped - ma.size();
  report.agreements = agreements;
  report.probe_samples = probe_samples;
  if (first) {
    report.lag = first->lag;
    if (wt) {
      report.alpha = first->band.alpha;
      report.beta = first->band.beta;
      report.band_lo_hz = first->band.f_lo;
      report.band_hi_hz = first->band.f_hi;
    }
  }
  try {
    report.pearson_raw = pearson(ap, sta);
  } catch (const Error&) {
  }
  try {
    if (proc_a.size() >= 2) report.pearson_processed = pearson(proc_a, proc_b);
  } catch (const Error&) {
  }
  return report;
}

SessionReport wskg_session(const MagnitudeSeries& ap, const MagnitudeSeries& sta,
                           const SessionConfig& cfg) {
  if (ap.seqs != sta.seqs) throw Error(ErrorCode::LengthMismatch, "series are not paired");
  return wskg_session(ap.values, sta.values, cfg, ap.rate_hz);
}

}  // namespace csirecip
