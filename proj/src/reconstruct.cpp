#include "csirecip/reconstruct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "csirecip/error.hpp"
#include "csirecip/metrics.hpp"
#include "fft.hpp"

namespace csirecip {

namespace {

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Rows of the least-squares hat matrix for a window of `w` points: row i gives
// the weights that evaluate the fitted polynomial at window position i.
Eigen::MatrixXd golay_hat(std::size_t w, std::size_t order) {
  const double half = static_cast<double>(w - 1) / 2.0;
  Eigen::MatrixXd V(w, order + 1);
  for (std::size_t i = 0; i < w; ++i) {
    const double u = (static_cast<double>(i) - half) / std::max(half, 1.0);
    double p = 1.0;
    for (std::size_t j = 0; j <= order; ++j, p *= u) V(i, j) = p;
  }
  const Eigen::MatrixXd pinv = V.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(w, w));
  return V * pinv;
}

}  // namespace

std::vector<double> golay_filter(std::span<const double> x, std::size_t window, std::size_t order) {
  if (window % 2 == 0 || window <= order || window > x.size())
    throw Error(ErrorCode::BadWindow, "need odd window with order < window <= length");
  const auto H = golay_hat(window, order);
  const std::size_t h = window / 2, n = x.size();
  std::vector<double> out(n);
  auto apply = [&](std::size_t row, std::size_t first) {
    double acc = 0.0;
    for (std::size_t j = 0; j < window; ++j) acc += H(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) * x[first + j];
    return acc;
  };
  for (std::size_t i = 0; i < h; ++i) out[i] = apply(i, 0);
  for (std::size_t i = h; i + h < n; ++i) out[i] = apply(h, i - h);
  for (std::size_t i = n - h; i < n; ++i) out[i] = apply(i - (n - window), n - window);
  return out;
}

std::vector<double> fft_reconstruct(std::span<const double> x, double power_keep) {
  const std::size_t n = x.size();
  if (n < 8) throw Error(ErrorCode::TooShort, "fft_reconstruct needs at least 8 samples");
  if (!(power_keep > 0.0)) throw Error(ErrorCode::InvalidParams, "power_keep must be in (0, 1]");
  std::vector<double> out(x.begin(), x.end());
  if (power_keep >= 1.0) return out;
  const double mu = mean_of(x);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = x[i] - mu;
  auto X = detail::fft_real(centred, n);
  const std::size_t half = n / 2;
  std::vector<double> power(half + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double weight = (2 * k == n) ? 1.0 : 2.0;
    power[k] = weight * std::norm(X[k]);
    total += power[k];
  }
  if (total <= 0.0) return out;
  std::size_t keep = half;
  double cum = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    cum += power[k];
    if (cum >= power_keep * total) {
      keep = k;
      break;
    }
  }
  X[0] = 0.0;
  for (std::size_t k = keep + 1; k + keep < n; ++k) X[k] = 0.0;
  const auto y = detail::ifft(X);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i].real() / static_cast<double>(n) + mu;
  return out;
}

namespace {

// db4 reconstruction low-pass; the analysis pair is its time reverse.
constexpr std::array<double, 8> kLo = {
    0.23037781330885523,  0.7148465705525415,  0.6308807679295904,  -0.02798376941698385,
    -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278};

double hi_tap(std::size_t i) {
  const double v = kLo[kLo.size() - 1 - i];
  return (i % 2 == 0) ? v : -v;
}

void split(std::span<const double> in, std::span<double> lo, std::span<double> hi) {
  const std::size_t n = in.size(), m = n / 2;
  for (std::size_t k = 0; k < m; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t i = 0; i < kLo.size(); ++i) {
      const double v = in[(2 * k + i) % n];
      a += kLo[i] * v;
      d += hi_tap(i) * v;
    }
    lo[k] = a;
    hi[k] = d;
  }
}

void merge(std::span<const double> lo, std::span<const double> hi, std::span<double> out) {
  const std::size_t n = out.size(), m = n / 2;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < kLo.size(); ++i) out[(2 * k + i) % n] += kLo[i] * lo[k] + hi_tap(i) * hi[k];
}

void check_wpt(std::size_t n, std::size_t depth) {
  if (depth == 0 || depth > 20) throw Error(ErrorCode::InvalidParams, "wpt depth must be in [1, 20]");
  const std::size_t block = std::size_t{1} << depth;
  if (n < block || n % block != 0)
    throw Error(ErrorCode::TooShort, "wpt input length must be a positive multiple of 2^depth");
}

}  // namespace

std::vector<double> wpt_analyze(std::span<const double> x, std::size_t depth) {
  check_wpt(x.size(), depth);
  std::vector<double> cur(x.begin(), x.end()), next(x.size());
  for (std::size_t level = 0; level < depth; ++level) {
    const std::size_t nodes = std::size_t{1} << level, len = x.size() / nodes;
    for (std::size_t node = 0; node < nodes; ++node) {
      std::span<const double> in(cur.data() + node * len, len);
      std::span<double> out(next.data() + node * len, len);
      split(in, out.first(len / 2), out.last(len / 2));
    }
    std::swap(cur, next);
  }
  return cur;
}

std::vector<double> wpt_synthesize(std::span<const double> coeffs, std::size_t depth) {
  check_wpt(coeffs.size(), depth);
  std::vector<double> cur(coeffs.begin(), coeffs.end()), next(coeffs.size());
  for (std::size_t level = depth; level-- > 0;) {
    const std::size_t nodes = std::size_t{1} << level, len = coeffs.size() / nodes;
    for (std::size_t node = 0; node < nodes; ++node) {
      std::span<const double> in(cur.data() + node * len, len);
      merge(in.first(len / 2), in.last(len / 2), std::span<double>(next.data() + node * len, len));
    }
    std::swap(cur, next);
  }
  return cur;
}

std::vector<double> wpt_denoise(std::span<const double> x, std::size_t depth, bool threshold) {
  const std::size_t n = x.size();
  if (depth == 0 || depth > 20) throw Error(ErrorCode::InvalidParams, "wpt depth must be in [1, 20]");
  const std::size_t block = std::size_t{1} << depth;
  if (n < block) throw Error(ErrorCode::TooShort, "wpt input shorter than 2^depth");
  const std::size_t padded = (n + block - 1) / block * block;
  std::vector<double> buf(padded);
  for (std::size_t i = 0; i < padded; ++i) {
    // whole-sample symmetric extension: ..., x[n-2], x[n-1] | x[n-1], x[n-2], ...
    std::size_t j = i;
    while (j >= n) j = (j < 2 * n) ? 2 * n - 1 - j : j - 2 * n;
    buf[i] = x[j];
  }
  auto c = wpt_analyze(buf, depth);
  if (threshold) {
    std::vector<double> mags(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) mags[i] = std::abs(c[i]);
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    double med = *mid;
    if (mags.size() % 2 == 0) med = 0.5 * (med + *std::max_element(mags.begin(), mid));
    for (auto& v : c)
      if (std::abs(v) < med) v = 0.0;
  }
  auto y = wpt_synthesize(c, depth);
  y.resize(n);
  return y;
}

ReciprocalBand select_reciprocal_freqs(const CoherenceMap& map, double alpha, std::size_t beta) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidParams, "alpha must be in (0, 1]");
  const std::size_t T = map.length();
  if (beta < 1 || beta > T) throw Error(ErrorCode::InvalidParams, "beta must be in [1, map length]");
  ReciprocalBand band;
  band.freqs = map.freqs;
  band.alpha = alpha;
  band.beta = beta;
  band.L = T;
  for (std::size_t f = 0; f < map.bins(); ++f) {
    const auto count = (map.wc.row(static_cast<Eigen::Index>(f)) >= alpha).count();
    if (static_cast<std::size_t>(count) >= beta) band.f_rec.push_back(f);
  }
  if (band.f_rec.empty())
    throw Error(ErrorCode::NoFrequencySelected, "no bin reaches the coherence thresholds");
  band.f_lo = map.freqs[band.f_rec.back()];
  band.f_hi = map.freqs[band.f_rec.front()];
  return band;
}

std::size_t adapt_max_iterations() {
  return static_cast<std::size_t>(std::ceil(std::log(0.05) / std::log(0.95))) + 1;
}

ReciprocalBand adapt_thresholds(const CoherenceMap& map, std::size_t L) {
  if (map.bins() == 0 || map.length() == 0) throw Error(ErrorCode::EmptyInput, "empty coherence map");
  const double top = map.wc.maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorCode::UnusableCoherence, "coherence map is zero everywhere");
  L = std::clamp<std::size_t>(L, 1, map.length());
  const std::size_t want = (map.bins() + 1) / 2;
  double alpha = std::max(top - 1e-6, top * 0.5);
  std::size_t beta = L;
  std::optional<ReciprocalBand> best;
  std::size_t iter = 0;
  auto attempt = [&] {
    ++iter;
    try {
      auto band = select_reciprocal_freqs(map, alpha, beta);
      band.L = L;
      band.iterations = iter;
      if (!best || band.f_rec.size() > best->f_rec.size()) best = band;
      return band.f_rec.size() >= want;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoFrequencySelected) throw;
      return false;
    }
  };
  if (attempt()) return *best;
  beta = std::max<std::size_t>(1, (L + 2) / 3);
  while (true) {
    if (attempt()) return *best;
    alpha *= 0.95;
    if (alpha < 0.05) break;
  }
  if (!best) throw Error(ErrorCode::NoFrequencySelected, "thresholds relaxed to the floor without a selection");
  best->iterations = iter;
  return *best;
}

std::vector<double> wt_reconstruct(std::span<const double> x, const ReciprocalBand& band,
                                   const CwtParams& params, bool strict) {
  const auto sg = cwt(x, params);
  std::vector<double> y;
  if (strict) {
    std::vector<bool> mask(sg.bins(), false);
    bool any = false;
    for (auto idx : band.f_rec) {
      const double f = band.freqs.at(idx);
      for (std::size_t j = 0; j < sg.bins(); ++j)
        if (std::abs(sg.freqs[j] - f) <= 1e-9 * f) mask[j] = any = true;
    }
    if (!any) throw Error(ErrorCode::EmptyBand, "selected bins are not on the analysis grid");
    y = icwt_bins(sg, mask);
  } else {
    y = icwt(sg, band.f_lo, band.f_hi);
  }
  for (auto& v : y) v += sg.mean;
  return y;
}

SyncResult apply_lag(std::span<const double> x, std::span<const double> y, int lag) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "series lengths differ");
  const auto shift = static_cast<std::size_t>(std::abs(lag));
  if (shift >= x.size()) throw Error(ErrorCode::SeriesTooShort, "lag exceeds series length");
  const std::size_t m = x.size() - shift;
  SyncResult r;
  r.lag = lag;
  r.discarded = shift;
  const std::size_t xo = lag < 0 ? shift : 0, yo = lag > 0 ? shift : 0;
  r.x_aligned.assign(x.begin() + static_cast<std::ptrdiff_t>(xo), x.begin() + static_cast<std::ptrdiff_t>(xo + m));
  r.y_aligned.assign(y.begin() + static_cast<std::ptrdiff_t>(yo), y.begin() + static_cast<std::ptrdiff_t>(yo + m));
  return r;
}

SyncResult synchronize(std::span<const double> x, std::span<const double> y, std::size_t max_lag) {
  const auto est = xcorr_lag(x, y, max_lag);
  auto r = apply_lag(x, y, est.lag);
  r.peak_corr = est.peak_corr;
  return r;
}

}  // namespace csirecip
