// Seeded end-to-end checks. One PASS/FAIL line per criterion; the exit code
// is the number of failures. Pass criterion numbers as arguments to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "../unit/fixtures.hpp"
#include "csirecip/authsim.hpp"
#include "csirecip/chansim.hpp"
#include "csirecip/keygen.hpp"
#include "csirecip/metrics.hpp"
#include "csirecip/reconstruct.hpp"
#include "csirecip/wavelet.hpp"

using namespace csirecip;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

std::pair<MagnitudeSeries, MagnitudeSeries> paired(const ChannelConfig& cfg) {
  const auto p = gen_pair(cfg);
  return pair_traces(p.ap, p.sta, 6, GapPolicy::interpolate_linear);
}

SessionReport session(const std::pair<MagnitudeSeries, MagnitudeSeries>& ab, Pipeline p, bool sync) {
  SessionConfig c;
  c.pipeline = p;
  c.sync = sync;
  return wskg_session(ab.first, ab.second, c);
}

// Fixture i of 100: sizes, scales and offsets vary with i.
std::pair<fx::Vec, fx::Vec> fixture(int i) {
  const auto n = static_cast<std::size_t>(50 + 37 * i);
  auto x = fx::ar1(n, static_cast<std::uint64_t>(1000 + i), 0.5 + 0.0049 * i);
  auto y = fx::add(x, fx::white(n, static_cast<std::uint64_t>(2000 + i)), 0.1 + 0.02 * i);
  for (auto& v : x) v = v * (1.0 + i) + 0.5 * i;
  for (auto& v : y) v = v * 3.0 - i;
  return {x, y};
}

Outcome ac1() {
  double worst_p = 0, worst_j = 0, worst_w = 0, worst_x = 0, worst_b = 0;
  int lag_miss = 0;
  for (int i = 0; i < 100; ++i) {
    const auto [x, y] = fixture(i);
    worst_p = std::max(worst_p, std::abs(pearson(x, y) - fx::pearson(x, y)));
    worst_j = std::max(worst_j, std::abs(jeffrey_divergence(x, y) - fx::jeffrey(x, y, 32, 1e-9)));
    worst_w = std::max(worst_w, std::abs(wasserstein_1d(x, y) - fx::wasserstein(x, y)));
    const int max_lag = 5 + i % 20;
    const auto got = xcorr_lag(x, y, static_cast<std::size_t>(max_lag));
    const auto want = fx::xcorr(x, y, max_lag);
    lag_miss += got.lag != want.lag;
    worst_x = std::max(worst_x, std::abs(got.peak_corr - want.peak));
    BitVector a(static_cast<std::size_t>(64 + i)), b(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      a[k] = x[k] > 0.5 * i;
      b[k] = y[k] > -static_cast<double>(i);
    }
    worst_b = std::max(worst_b, std::abs(ber(a, b) - fx::ber(a, b)));
  }
  Outcome o;
  o.pass = worst_p <= 1e-12 && worst_b <= 1e-12 && worst_j <= 1e-9 && worst_w <= 1e-9 && worst_x <= 1e-9 &&
           lag_miss == 0;
  o.detail = fmt("max err pearson %.1e jeffrey %.1e wasserstein %.1e xcorr %.1e ber %.1e, lag misses %d",
                 worst_p, worst_j, worst_w, worst_x, worst_b, lag_miss);
  return o;
}

Outcome ac2() {
  int hits = 0;
  const int trials = 500;
  const double noise_sd = std::pow(10.0, -20.0 / 20.0);  // 20 dB on a unit-variance process
  for (int i = 0; i < trials; ++i) {
    const int k = -50 + i % 101;
    const auto src = fx::ar1(1200, static_cast<std::uint64_t>(7000 + i), 0.95);
    // y[t] = x[t - k]
    const auto x = fx::add(fx::delayed(src, 1000, 0, 100), fx::white(1000, static_cast<std::uint64_t>(8000 + i)), noise_sd);
    fx::Vec y(1000);
    for (std::size_t t = 0; t < 1000; ++t) y[t] = src[static_cast<std::size_t>(100 + static_cast<long>(t) - k)];
    y = fx::add(y, fx::white(1000, static_cast<std::uint64_t>(9000 + i)), noise_sd);
    hits += xcorr_lag(x, y, 100).lag == k;
  }
  return {hits == trials, fmt("%d/%d shifts recovered exactly", hits, trials)};
}

Outcome ac3() {
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double rate = 10.0;
    const auto n = static_cast<std::size_t>(1024 + 61 * i);
    auto x = fx::tones(n, rate, 0.1, 2.5, static_cast<std::uint64_t>(300 + i), 4 + i % 6);
    for (auto& v : x) v += 2.0;
    const auto sg = cwt(x, CwtParams::for_length(n, rate));
    auto y = icwt(sg, sg.freqs.back(), sg.freqs.front());
    for (auto& v : y) v += sg.mean;
    worst = std::max(worst, fx::rel_l2(y, x));
  }
  return {worst <= 0.05, fmt("worst relative L2 error %.4f over 50 fixtures", worst)};
}

std::vector<GapInterval> gaps_for(std::vector<LossEvent> loss, std::uint64_t seed) {
  ChannelConfig cfg;
  cfg.rate_hz = 5.0;
  cfg.duration_s = 1500.0;
  cfg.f_lo = 0.05;
  cfg.f_hi = 1.0;
  cfg.snr_db = 15.0;
  cfg.seed = seed;
  cfg.loss = std::move(loss);
  const auto [a, b] = paired(cfg);
  const auto m = wavelet_coherence(a.values, b.values, CwtParams::for_length(a.size(), cfg.rate_hz));
  return coherent_gap_width(m, 0.06, 1.5, 0.3, 0.1);
}

Outcome ac4() {
  bool ok = true;
  std::string d;
  const int seeds = 5;
  for (std::size_t n : {300, 900, 1500}) {
    double lo = 1e9, hi = 0;
    for (int s = 1; s <= seeds; ++s) {
      double total = 0;
      for (const auto& g : gaps_for({{Side::sta, 600.0, n}}, static_cast<std::uint64_t>(s))) total += g.width;
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
    const double want = static_cast<double>(n) / 5.0;
    ok = ok && lo >= 0.8 * want && hi <= 1.2 * want;
    d += fmt("N=%zu width %.0f-%.0f s (expect %.0f); ", n, lo, hi, want);
  }
  int two = 0;
  double worst_ratio = 1.0;
  for (int s = 1; s <= seeds; ++s) {
    const auto g = gaps_for({{Side::sta, 300.0, 600}, {Side::sta, 840.0, 600}}, static_cast<std::uint64_t>(s));
    if (g.size() != 2) continue;
    ++two;
    worst_ratio = std::min(worst_ratio, std::min(g[0].width, g[1].width) / std::max(g[0].width, g[1].width));
  }
  ok = ok && two == seeds && worst_ratio >= 0.8;
  d += fmt("two drops: %d/%d runs with two gaps, width ratio >= %.2f", two, seeds, worst_ratio);
  return {ok, d};
}

Outcome ac5() {
  const int seeds = 100;
  int beat_raw = 0, beat_golay = 0, beat_fft = 0;
  for (int s = 1; s <= seeds; ++s) {
    const auto ab = paired(preset("reciprocal", static_cast<std::uint64_t>(s)));
    const auto wt = session(ab, Pipeline::wt, true);
    const double w = wt.pearson_processed.value_or(-1.0);
    beat_raw += w > wt.pearson_raw.value_or(1.0);
    beat_golay += w > session(ab, Pipeline::golay, true).pearson_processed.value_or(1.0);
    beat_fft += w > session(ab, Pipeline::fft, true).pearson_processed.value_or(1.0);
  }
  return {beat_raw >= 95 && beat_golay >= 80 && beat_fft >= 80,
          fmt("wt+sync pearson beats raw %d/%d, golay %d/%d, fft %d/%d", beat_raw, seeds, beat_golay, seeds,
              beat_fft, seeds)};
}

Outcome ac6() {
  const int seeds = 50;
  bool ok = true;
  std::string d;
  for (const char* name : {"los-short", "nlos-short", "nlos-long"}) {
    int good = 0;
    double kw = 0, kg = 0, bw = 0, bg = 0;
    int nbw = 0, nbg = 0;
    for (int s = 1; s <= seeds; ++s) {
      const auto ab = paired(preset(name, static_cast<std::uint64_t>(s)));
      const auto w = session(ab, Pipeline::wt, true).at(15);
      const auto g = session(ab, Pipeline::golay, true).at(15);
      const auto r = session(ab, Pipeline::raw, false).at(15);
      const bool ber_ok = w.mean_ber && r.mean_ber && *w.mean_ber < *r.mean_ber;
      good += w.kgr > g.kgr && g.kgr > r.kgr && ber_ok;
      kw += w.kgr;
      kg += g.kgr;
      if (w.mean_ber) bw += *w.mean_ber, ++nbw;
      if (g.mean_ber) bg += *g.mean_ber, ++nbg;
    }
    ok = ok && good * 10 >= seeds * 9;
    d += fmt("%s %d/%d (wt/golay kgr %.2fx, ber %.1e vs %.1e); ", name, good, seeds, kg > 0 ? kw / kg : 0.0,
             nbw ? bw / nbw : 0.0, nbg ? bg / nbg : 0.0);
  }
  return {ok, d};
}

Outcome ac7() {
  // level histogram on own-block thresholds
  int worst_dev = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto x = fx::ar1(100, s, 0.9);
    const auto lv = quantize(x, cdf_thresholds(x, 4));
    int h[4] = {0, 0, 0, 0};
    for (int l : lv) ++h[l];
    for (int c : h) worst_dev = std::max(worst_dev, std::abs(c - 25));
  }
  // Gray adjacency
  bool gray_ok = true;
  for (std::size_t levels : {2, 4, 8, 16}) {
    std::vector<int> lv(levels);
    for (std::size_t k = 0; k < levels; ++k) lv[k] = static_cast<int>(k);
    const auto bits = gray_encode(lv, levels);
    const auto w = bits_per_level(levels);
    for (std::size_t k = 0; k + 1 < levels; ++k) {
      std::size_t diff = 0;
      for (std::size_t b = 0; b < w; ++b) diff += bits[k * w + b] != bits[(k + 1) * w + b];
      gray_ok = gray_ok && diff == 1;
    }
  }
  // monotone KGR
  bool mono = true;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    SessionConfig c;
    c.thresholds = {0, 2, 5, 10, 15, 20, 30, 50, 100, 200};
    const auto ab = paired(preset("nlos-long", s, 900.0));
    const auto r = wskg_session(ab.first, ab.second, c);
    for (std::size_t i = 1; i < r.thresholds.size(); ++i) mono = mono && r.thresholds[i].kgr >= r.thresholds[i - 1].kgr;
  }
  // independent inputs
  SessionConfig c;
  c.pipeline = Pipeline::raw;
  c.sync = false;
  const auto r = wskg_session(fx::ar1(20000, 11, 0.98), fx::ar1(20000, 12, 0.98), c);
  const auto blocks = r.at(5).attempted;
  const double b = r.overall_ber.value_or(0.0);
  return {worst_dev <= 1 && gray_ok && mono && blocks >= 20 && std::abs(b - 0.5) <= 0.05,
          fmt("histogram dev %d, gray %s, kgr monotone %s, independent ber %.3f over %zu blocks", worst_dev,
              gray_ok ? "ok" : "BAD", mono ? "yes" : "no", b, blocks)};
}

Outcome ac8() {
  const int seeds = 20;
  bool ok = true;
  std::string d;
  for (const char* name : {"nlos-short", "nlos-long", "reciprocal"}) {
    const auto pipes = all_pipelines();
    std::vector<int> good(pipes.size(), 0);
    for (int s = 1; s <= seeds; ++s) {
      const auto ab = paired(preset(name, static_cast<std::uint64_t>(s)));
      for (std::size_t i = 0; i < pipes.size(); ++i)
        good[i] += session(ab, pipes[i], true).at(15).kgr >= session(ab, pipes[i], false).at(15).kgr;
    }
    d += std::string(name) + ":";
    for (std::size_t i = 0; i < pipes.size(); ++i) {
      ok = ok && good[i] * 10 >= seeds * 9;
      d += fmt(" %s %d", std::string(to_string(pipes[i])).c_str(), good[i]);
    }
    d += fmt("/%d; ", seeds);
  }
  return {ok, d};
}

Outcome ac9() {
  const AuthPolicy pol;
  std::vector<AuthTrial> trials;
  double cl = 0, cr = 0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    trials.push_back(legit_trial(pol, s));
    cl += trials.back().decision.corr;
  }
  for (std::uint64_t s = 1001; s <= 1200; ++s) {
    trials.push_back(replay_trial(pol, s));
    cr += trials.back().decision.corr;
  }
  const auto c = tally(trials);
  cl /= 200;
  cr /= 200;
  return {c.false_accept == 0 && c.false_reject <= 2 && cl >= 0.6 && cr <= 0.2,
          fmt("false accepts %zu, false rejects %zu, mean corr legit %.3f replay %.3f", c.false_accept,
              c.false_reject, cl, cr)};
}

std::string csv_of(const CsiTrace& t) {
  std::ostringstream out;
  write_csi_csv(out, t);
  return out.str();
}

bool same_samples(const CsiTrace& a, const CsiTrace& b) {
  if (a.size() != b.size() || a.subcarriers() != b.subcarriers() || a.device_id() != b.device_id()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto &x = a.samples()[i], &y = b.samples()[i];
    if (x.seq != y.seq || x.t != y.t || x.iq != y.iq) return false;
  }
  return true;
}

Outcome ac10() {
  int identical = 0, lossless = 0, runs = 0;
  for (const auto& name : preset_names())
    for (std::uint64_t s : {1, 2}) {
      ++runs;
      const auto cfg = preset(name, s, 300.0);
      const auto p1 = gen_pair(cfg), p2 = gen_pair(cfg);
      identical += csv_of(p1.ap) == csv_of(p2.ap) && csv_of(p1.sta) == csv_of(p2.sta);
      bool ok = true;
      for (const auto* t : {&p1.ap, &p1.sta}) {
        std::istringstream in(csv_of(*t));
        ok = ok && same_samples(parse_csi_csv(in, cfg.rate_hz).trace, *t);
      }
      lossless += ok;
    }
  // Damaged rows are rejected; the rows that survive still round-trip.
  const auto t = gen_pair(preset("nlos-long", 3, 120.0)).sta;
  auto text = csv_of(t);
  std::vector<std::string> lines;
  std::istringstream ls(text);
  for (std::string l; std::getline(ls, l);) lines.push_back(l);
  lines[5] = "5,bad,sta";
  lines[9] += ",1.0";
  std::string damaged;
  for (const auto& l : lines) damaged += l + '\n';
  std::istringstream din(damaged);
  const auto parsed = parse_csi_csv(din, 10.0);
  std::istringstream again(csv_of(parsed.trace));
  const bool kept = same_samples(parse_csi_csv(again, 10.0).trace, parsed.trace) &&
                    parsed.report.rejected_rows.size() == 2 && parsed.trace.size() == t.size() - 2;
  return {identical == runs && lossless == runs && kept,
          fmt("%d/%d byte-identical, %d/%d lossless round trips, damaged-file check %s", identical, runs, lossless,
              runs, kept ? "ok" : "FAILED")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric oracles", ac1},        {"lag recovery", ac2},          {"cwt round trip", ac3},
      {"packet-loss gap width", ac4}, {"reciprocity enhancement", ac5}, {"key generation ordering", ac6},
      {"quantizer invariants", ac7},  {"sync benefit", ac8},          {"replay detection", ac9},
      {"determinism and round trip", ac10},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("AC%-2d %s  %-28s %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed;
}
