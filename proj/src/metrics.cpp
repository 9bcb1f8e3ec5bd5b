#include "csirecip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csirecip/error.hpp"

namespace csirecip {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.size() < 2) throw Error(ErrorCode::SeriesTooShort, "pearson needs at least 2 samples");
  // Single-pass co-moment accumulation (Welford).
  double mx = 0.0, my = 0.0, cxx = 0.0, cyy = 0.0, cxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    mx += dx / n;
    my += dy / n;
    cxx += dx * (x[k] - mx);
    cyy += dy * (y[k] - my);
    cxy += dx * (y[k] - my);
  }
  if (!(cxx > 0.0) || !(cyy > 0.0)) throw Error(ErrorCode::DegenerateSeries, "zero variance");
  return std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0);
}

double jeffrey_divergence(std::span<const double> x, std::span<const double> y,
                          const DivergenceConfig& cfg) {
  if (cfg.bins < 2 || !(cfg.epsilon > 0.0))
    throw Error(ErrorCode::InvalidParams, "need bins >= 2 and epsilon > 0");
  if (x.size() < cfg.bins || y.size() < cfg.bins)
    throw Error(ErrorCode::SeriesTooShort, "each series needs at least `bins` samples");
  auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  const double lo = std::min(*xlo, *ylo);
  const double hi = std::max(*xhi, *yhi);
  if (!(hi > lo)) throw Error(ErrorCode::ConstantPooledRange, "all values identical");

  auto histogram = [&](std::span<const double> v) {
    std::vector<double> h(cfg.bins, 0.0);
    const double scale = static_cast<double>(cfg.bins) / (hi - lo);
    for (double e : v) {
      auto b = static_cast<std::size_t>((e - lo) * scale);
      h[std::min(b, cfg.bins - 1)] += 1.0;
    }
    const double n = static_cast<double>(v.size());
    const double norm = 1.0 + static_cast<double>(cfg.bins) * cfg.epsilon;
    for (auto& c : h) c = (c / n + cfg.epsilon) / norm;
    return h;
  };
  const auto p = histogram(x);
  const auto q = histogram(y);
  // (KL(p||q) + KL(q||p)) / 2 collapses to a single sum of (p - q) log(p / q).
  double d = 0.0;
  for (std::size_t b = 0; b < cfg.bins; ++b) d += (p[b] - q[b]) * std::log(p[b] / q[b]);
  return std::max(0.0, 0.5 * d);
}

double wasserstein_1d(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error(ErrorCode::EmptyInput, "wasserstein needs samples");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  // Integrate |Qx(u) - Qy(u)| over u in [0, 1]; both quantile functions are
  // piecewise constant with breakpoints at i/n and j/m.
  const auto n = xs.size(), m = ys.size();
  std::size_t i = 0, j = 0;
  double u = 0.0, area = 0.0;
  while (i < n && j < m) {
    const auto ni = (i + 1) * m;  // compare (i+1)/n with (j+1)/m exactly
    const auto nj = (j + 1) * n;
    const double next = ni <= nj ? static_cast<double>(i + 1) / static_cast<double>(n)
                                 : static_cast<double>(j + 1) / static_cast<double>(m);
    area += (next - u) * std::abs(xs[i] - ys[j]);
    u = next;
    if (ni <= nj) ++i;
    if (nj <= ni) ++j;
  }
  return area;
}

LagEstimate xcorr_lag(std::span<const double> x, std::span<const double> y, std::size_t max_lag) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "xcorr needs equal lengths");
  if (x.size() <= 2 * max_lag)
    throw Error(ErrorCode::SeriesTooShort, "length must exceed 2 * max_lag");
  const auto n = x.size();
  const int L = static_cast<int>(max_lag);
  LagEstimate est;
  est.max_lag = L;
  est.curve.assign(2 * max_lag + 1, std::numeric_limits<double>::quiet_NaN());
  for (int l = -L; l <= L; ++l) {
    const auto shift = static_cast<std::size_t>(std::abs(l));
    const auto len = n - shift;
    auto xs = l >= 0 ? x.subspan(0, len) : x.subspan(shift, len);
    auto ys = l >= 0 ? y.subspan(shift, len) : y.subspan(0, len);
    try {
      est.curve[static_cast<std::size_t>(l + L)] = pearson(xs, ys);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSeries) throw;
    }
  }
  bool found = false;
  for (int mag = 0; mag <= L; ++mag) {
    for (int l : {-mag, mag}) {
      const double c = est.corr_at(l);
      if (std::isnan(c)) continue;
      if (!found || c > est.peak_corr) {
        est.lag = l;
        est.peak_corr = c;
        found = true;
      }
      if (mag == 0) break;
    }
  }
  if (!found) throw Error(ErrorCode::DegenerateSeries, "every lag window has zero variance");
  return est;
}

double ber(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "keys differ in length");
  if (a.empty()) throw Error(ErrorCode::EmptyInput, "empty keys");
  std::size_t diff = 0;
  for (std::size_t k = 0; k < a.size(); ++k) diff += (a[k] != b[k]) ? 1 : 0;
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

}  // namespace csirecip
