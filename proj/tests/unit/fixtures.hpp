#pragma once

// Seeded generators and brute-force reference implementations. The oracles
// are written independently of the library code: long double accumulation,
// explicit loops, no shared helpers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "csirecip/csi_model.hpp"
#include "csirecip/error.hpp"

namespace fx {

using Vec = std::vector<double>;

inline Vec white(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  Vec v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// AR(1) / discretised OU with unit stationary variance.
inline Vec ar1(std::size_t n, std::uint64_t seed, double phi = 0.95) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(n);
  double x = g(rng);
  const double s = std::sqrt(1.0 - phi * phi);
  for (auto& out : v) {
    out = x;
    x = phi * x + s * g(rng);
  }
  return v;
}

// Sum of random tones between f_lo and f_hi (Hz) sampled at `rate`.
inline Vec tones(std::size_t n, double rate, double f_lo, double f_hi, std::uint64_t seed,
                 int count = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uf(f_lo, f_hi), up(0.0, 2.0 * std::numbers::pi);
  Vec v(n, 0.0);
  for (int c = 0; c < count; ++c) {
    const double f = uf(rng), p = up(rng);
    for (std::size_t k = 0; k < n; ++k)
      v[k] += std::sin(2.0 * std::numbers::pi * f * static_cast<double>(k) / rate + p);
  }
  return v;
}

inline Vec add(const Vec& a, const Vec& b, double scale = 1.0) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + scale * b[i];
  return out;
}

// y[k] = x[k - s]; the first s entries come from `pre`.
inline Vec delayed(const Vec& full, std::size_t n, std::size_t s, std::size_t base) {
  return Vec(full.begin() + static_cast<std::ptrdiff_t>(base - s),
             full.begin() + static_cast<std::ptrdiff_t>(base - s + n));
}

inline double rel_l2(const Vec& a, const Vec& b) {
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (long double)(a[i] - b[i]) * (a[i] - b[i]);
    den += (long double)b[i] * b[i];
  }
  return static_cast<double>(std::sqrt(num / den));
}

// ---- oracles ----

inline double pearson(const Vec& x, const Vec& y) {
  const std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline double jeffrey(const Vec& x, const Vec& y, std::size_t bins, double eps) {
  double lo = x[0], hi = x[0];
  for (double v : x) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : y) lo = std::min(lo, v), hi = std::max(hi, v);
  auto hist = [&](const Vec& v) {
    std::vector<long double> h(bins, 0.0L);
    for (double s : v) {
      std::size_t b = 0;
      // linear scan over edges; the last bin is closed on the right
      while (b + 1 < bins && s >= lo + (hi - lo) * static_cast<double>(b + 1) / static_cast<double>(bins)) ++b;
      h[b] += 1;
    }
    long double tot = 0;
    for (auto& c : h) {
      c = c / v.size() + eps;
      tot += c;
    }
    for (auto& c : h) c /= tot;
    return h;
  };
  const auto p = hist(x), q = hist(y);
  long double kl_pq = 0, kl_qp = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    kl_pq += p[b] * std::log(p[b] / q[b]);
    kl_qp += q[b] * std::log(q[b] / p[b]);
  }
  return static_cast<double>((kl_pq + kl_qp) / 2);
}

// Area between the two empirical CDFs.
inline double wasserstein(Vec x, Vec y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  Vec pts = x;
  pts.insert(pts.end(), y.begin(), y.end());
  std::sort(pts.begin(), pts.end());
  auto cdf = [](const Vec& s, double t) {
    return static_cast<long double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) / s.size();
  };
  long double area = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    area += std::fabs(cdf(x, pts[i]) - cdf(y, pts[i])) * (pts[i + 1] - pts[i]);
  return static_cast<double>(area);
}

struct Lag {
  int lag;
  double peak;
};

// Per-lag Pearson of the overlap, ties to smaller |lag| then negative.
inline Lag xcorr(const Vec& x, const Vec& y, int max_lag) {
  Lag best{0, -2.0};
  for (int a = 0; a <= max_lag; ++a)
    for (int l : {-a, a}) {
      if (a == 0 && l != 0) continue;
      Vec xs, ys;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const long j = static_cast<long>(k) + l;
        if (j < 0 || j >= static_cast<long>(y.size())) continue;
        xs.push_back(x[k]);
        ys.push_back(y[static_cast<std::size_t>(j)]);
      }
      const double c = pearson(xs, ys);
      if (c > best.peak) best = {l, c};
      if (a == 0) break;
    }
  return best;
}

inline double ber(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += __builtin_popcount(a[i] ^ b[i]);
  return static_cast<double>(d) / static_cast<double>(a.size());
}

// Code of the csirecip::Error thrown by f, empty if nothing was thrown.
template <class F>
std::optional<csirecip::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const csirecip::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// ---- traces ----

inline csirecip::CsiTrace trace_from(const std::vector<std::int64_t>& seqs, const Vec& mags,
                                     std::size_t subcarriers = 8, double rate = 10.0,
                                     const char* dev = "ap") {
  std::vector<csirecip::CsiSample> s;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    csirecip::CsiSample c;
    c.seq = seqs[i];
    c.t = static_cast<double>(seqs[i]) / rate;
    c.iq.assign(subcarriers, std::complex<double>(mags[i], 0.0));
    s.push_back(c);
  }
  return csirecip::CsiTrace(dev, subcarriers, rate, std::move(s));
}

}  // namespace fx
