#include "csirecip/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "csirecip/error.hpp"
#include "csirecip/text.hpp"
#include "fft.hpp"

namespace csirecip {

using detail::cvec;
using detail::FftPlan;

void CwtParams::validate() const {
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::InvalidParams, "sample_rate must be positive");
  if (!(min_freq > 0.0) || !(min_freq < max_freq))
    throw Error(ErrorCode::InvalidParams, "need 0 < min_freq < max_freq");
  if (max_freq > sample_rate / 2.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidParams, "max_freq above Nyquist");
  if (voices_per_octave < 4) throw Error(ErrorCode::InvalidParams, "voices_per_octave < 4");
  if (omega0 < 5.0) throw Error(ErrorCode::InvalidParams, "omega0 < 5");
}

std::vector<double> CwtParams::frequency_grid() const {
  validate();
  const double octaves = std::log2(max_freq / min_freq);
  const auto count = static_cast<std::size_t>(std::floor(octaves * voices_per_octave + 1e-9)) + 1;
  std::vector<double> f(count);
  for (std::size_t j = 0; j < count; ++j)
    f[j] = max_freq * std::exp2(-static_cast<double>(j) / voices_per_octave);
  return f;
}

CwtParams CwtParams::for_length(std::size_t n, double sample_rate, double omega0,
                                int voices_per_octave) {
  CwtParams p;
  p.omega0 = omega0;
  p.voices_per_octave = voices_per_octave;
  p.sample_rate = sample_rate;
  const double duration = static_cast<double>(n) / sample_rate;
  p.min_freq = 1.0 / (0.25 * duration);
  p.max_freq = sample_rate / 2.0;
  return p;
}

double morlet_scale_for(double freq, double omega0) {
  return (omega0 + std::sqrt(2.0 + omega0 * omega0)) / (4.0 * std::numbers::pi * freq);
}

namespace {

const double kQuarterPi = std::pow(std::numbers::pi, -0.25);

double morlet_hat(double w, double omega0) {
  if (w <= 0.0) return 0.0;
  const double d = w - omega0;
  return kQuarterPi * std::exp(-0.5 * d * d);
}

// Integral of psi_hat(w) / w over w > 0, by composite Simpson.
double admissibility_integral(double omega0) {
  const double lo = omega0 / 100.0, hi = omega0 + 14.0;
  const int steps = 20000;
  const double h = (hi - lo) / steps;
  double acc = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double w = lo + k * h;
    const double v = morlet_hat(w, omega0) / w;
    acc += v * ((k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0));
  }
  return acc * h / 3.0;
}

std::vector<int> cone_of_influence(const std::vector<double>& scales, std::size_t n, double dt) {
  std::vector<int> coi(n, -1);
  for (std::size_t t = 0; t < n; ++t) {
    const double edge = static_cast<double>(std::min(t + 1, n - t)) * dt;
    int best = -1;
    for (std::size_t j = 0; j < scales.size(); ++j)
      if (std::sqrt(2.0) * scales[j] <= edge) best = static_cast<int>(j);
    coi[t] = best;
  }
  return coi;
}

}  // namespace

Scalogram cwt(std::span<const double> x, const CwtParams& params) {
  params.validate();
  if (x.size() < 32) throw Error(ErrorCode::TooShort, "cwt needs at least 32 samples");
  if (std::any_of(x.begin(), x.end(), [](double v) { return !std::isfinite(v); }))
    throw Error(ErrorCode::GapsPresent, "interpolate gaps before the transform");

  const std::size_t n = x.size();
  const double dt = 1.0 / params.sample_rate;
  Scalogram sg;
  sg.params = params;
  sg.freqs = params.frequency_grid();
  sg.scales.resize(sg.freqs.size());
  for (std::size_t j = 0; j < sg.freqs.size(); ++j)
    sg.scales[j] = morlet_scale_for(sg.freqs[j], params.omega0);

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  sg.mean = mean;
  std::vector<double> centred(n);
  for (std::size_t k = 0; k < n; ++k) centred[k] = x[k] - mean;

  const std::size_t npad = detail::next_pow2(2 * n);
  const cvec X = detail::fft_real(centred, npad);
  std::vector<double> omega(npad);
  for (std::size_t k = 0; k < npad; ++k) {
    const double kk = k <= npad / 2 ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(npad);
    omega[k] = 2.0 * std::numbers::pi * kk / (static_cast<double>(npad) * dt);
  }

  sg.coeffs.resize(static_cast<Eigen::Index>(sg.freqs.size()), static_cast<Eigen::Index>(n));
  FftPlan inverse(npad, false);
  cvec prod(npad), out;
  for (std::size_t j = 0; j < sg.scales.size(); ++j) {
    const double s = sg.scales[j];
    const double norm = std::sqrt(2.0 * std::numbers::pi * s / dt) / static_cast<double>(npad);
    for (std::size_t k = 0; k < npad; ++k) prod[k] = X[k] * (norm * morlet_hat(s * omega[k], params.omega0));
    inverse.execute(prod, out);
    for (std::size_t t = 0; t < n; ++t)
      sg.coeffs(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t)) = out[t];
  }
  sg.coi = cone_of_influence(sg.scales, n, dt);
  return sg;
}

std::vector<double> icwt_bins(const Scalogram& sg, const std::vector<bool>& mask) {
  if (mask.size() != sg.bins()) throw Error(ErrorCode::InvalidParams, "mask size mismatch");
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
    throw Error(ErrorCode::EmptyBand, "no bins selected");
  const double dt = 1.0 / sg.params.sample_rate;
  const double dj = 1.0 / sg.params.voices_per_octave;
  // Sum over log-spaced scales of psi_hat(s w) approximates
  // integral(psi_hat(u)/u du) / (dj ln 2) for any w inside the grid.
  const double gain = admissibility_integral(sg.params.omega0) / (dj * std::numbers::ln2);
  const double factor = 2.0 / (std::sqrt(2.0 * std::numbers::pi / dt) * gain);
  std::vector<double> out(sg.length(), 0.0);
  for (std::size_t j = 0; j < sg.bins(); ++j) {
    if (!mask[j]) continue;
    const double w = factor / std::sqrt(sg.scales[j]);
    const auto row = sg.coeffs.row(static_cast<Eigen::Index>(j));
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * row(static_cast<Eigen::Index>(t)).real();
  }
  return out;
}

std::vector<double> icwt(const Scalogram& sg, double f_lo, double f_hi) {
  if (f_lo > f_hi) throw Error(ErrorCode::EmptyBand, "f_lo > f_hi");
  std::vector<bool> mask(sg.bins());
  const double tol = 1e-9;
  for (std::size_t j = 0; j < sg.bins(); ++j)
    mask[j] = sg.freqs[j] >= f_lo * (1.0 - tol) && sg.freqs[j] <= f_hi * (1.0 + tol);
  return icwt_bins(sg, mask);
}

namespace {

// Grinsted-style scale smoothing weights: a boxcar 0.6 octaves wide with
// fractional end taps.
std::vector<double> scale_kernel(int voices_per_octave) {
  const double steps = 0.6 * voices_per_octave / 2.0;
  const auto full = static_cast<int>(std::lround(steps));
  const double frac = std::fmod(steps, 1.0);
  std::vector<double> k;
  k.push_back(frac);
  for (int i = 0; i < 2 * full - 1; ++i) k.push_back(1.0);
  k.push_back(frac);
  double sum = 0.0;
  for (double v : k) sum += v;
  for (auto& v : k) v /= sum;
  return k;
}

}  // namespace

std::size_t scale_edge_rows(int voices_per_octave) {
  return static_cast<std::size_t>(std::lround(0.3 * voices_per_octave));
}

namespace {

// Gaussian time smoothing of one row (std `sigma` samples) via FFT.
void smooth_time(cvec& row, double sigma, const FftPlan& fwd, const FftPlan& inv) {
  const std::size_t npad = fwd.size();
  const std::size_t n = row.size();
  cvec buf(npad, 0.0), spec;
  std::copy(row.begin(), row.end(), buf.begin());
  fwd.execute(buf, spec);
  for (std::size_t k = 0; k < npad; ++k) {
    const double kk = k <= npad / 2 ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(npad);
    const double w = 2.0 * std::numbers::pi * kk / static_cast<double>(npad);
    spec[k] *= std::exp(-0.5 * sigma * sigma * w * w) / static_cast<double>(npad);
  }
  inv.execute(spec, buf);
  std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n), row.begin());
}

}  // namespace

CoherenceMap wavelet_coherence(std::span<const double> x, std::span<const double> y,
                               const CwtParams& params) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "coherence needs equal lengths");
  const Scalogram wx = cwt(x, params);
  const Scalogram wy = cwt(y, params);
  const auto bins = wx.bins();
  const auto n = wx.length();
  const double dt = 1.0 / params.sample_rate;

  // Time-smoothed, 1/s-weighted cross and auto spectra.
  const std::size_t npad = detail::next_pow2(2 * n);
  FftPlan fwd(npad, true), inv(npad, false);
  std::vector<cvec> cross(bins, cvec(n)), power(bins, cvec(n));
  for (std::size_t j = 0; j < bins; ++j) {
    const double sinv = 1.0 / wx.scales[j];
    const auto J = static_cast<Eigen::Index>(j);
    for (std::size_t t = 0; t < n; ++t) {
      const auto T = static_cast<Eigen::Index>(t);
      const auto a = wx.coeffs(J, T), b = wy.coeffs(J, T);
      cross[j][t] = a * std::conj(b) * sinv;
      power[j][t] = {std::norm(a) * sinv, std::norm(b) * sinv};
    }
    const double sigma = wx.scales[j] / dt;
    smooth_time(cross[j], sigma, fwd, inv);
    smooth_time(power[j], sigma, fwd, inv);
  }

  const auto kernel = scale_kernel(params.voices_per_octave);
  const int half = static_cast<int>(kernel.size() / 2);
  auto smooth_scale = [&](const std::vector<cvec>& in) {
    std::vector<cvec> out(bins, cvec(n, 0.0));
    for (int j = 0; j < static_cast<int>(bins); ++j) {
      for (int k = 0; k < static_cast<int>(kernel.size()); ++k) {
        const int src = j + k - half;
        if (src < 0 || src >= static_cast<int>(bins)) continue;
        const double w = kernel[static_cast<std::size_t>(k)];
        auto& dst = out[static_cast<std::size_t>(j)];
        const auto& s = in[static_cast<std::size_t>(src)];
        for (std::size_t t = 0; t < n; ++t) dst[t] += w * s[t];
      }
    }
    return out;
  };
  const auto scross = smooth_scale(cross);
  const auto spower = smooth_scale(power);

  CoherenceMap map;
  map.freqs = wx.freqs;
  map.coi = wx.coi;
  map.times.resize(n);
  for (std::size_t t = 0; t < n; ++t) map.times[t] = static_cast<double>(t) * dt;
  map.wc.setZero(static_cast<Eigen::Index>(bins), static_cast<Eigen::Index>(n));
  map.phase.setZero(static_cast<Eigen::Index>(bins), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < bins; ++j) {
    double px_max = 0.0, py_max = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      px_max = std::max(px_max, spower[j][t].real());
      py_max = std::max(py_max, spower[j][t].imag());
    }
    // Rows (or stretches) with no power on one side carry no coherence.
    const double px_floor = 1e-10 * px_max, py_floor = 1e-10 * py_max;
    for (std::size_t t = 0; t < n; ++t) {
      const double px = spower[j][t].real(), py = spower[j][t].imag();
      if (!(px > px_floor) || !(py > py_floor)) continue;
      const auto J = static_cast<Eigen::Index>(j), T = static_cast<Eigen::Index>(t);
      map.wc(J, T) = std::clamp(std::norm(scross[j][t]) / (px * py), 0.0, 1.0);
      double ph = std::arg(scross[j][t]);
      if (ph <= -std::numbers::pi) ph = std::numbers::pi;
      map.phase(J, T) = ph;
    }
  }
  return map;
}

std::vector<double> band_average(const CoherenceMap& map, double f_lo, double f_hi) {
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < map.bins(); ++j)
    if (map.freqs[j] >= f_lo && map.freqs[j] <= f_hi) rows.push_back(j);
  if (rows.empty()) throw Error(ErrorCode::EmptyBand, "no coherence bins inside the band");
  std::vector<double> avg(map.length(), 0.0);
  for (auto j : rows)
    for (std::size_t t = 0; t < avg.size(); ++t)
      avg[t] += map.wc(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t));
  for (auto& v : avg) v /= static_cast<double>(rows.size());
  return avg;
}

std::vector<GapInterval> coherent_gap_width(const CoherenceMap& map, double f_lo, double f_hi,
                                            double wc_floor, double hysteresis) {
  const auto avg = band_average(map, f_lo, f_hi);
  const double dt = map.times.size() > 1 ? map.times[1] - map.times[0] : 0.0;
  std::vector<GapInterval> gaps;
  bool inside = false;
  std::size_t start = 0;
  for (std::size_t t = 0; t < avg.size(); ++t) {
    if (!inside && avg[t] < wc_floor) {
      inside = true;
      start = t;
    } else if (inside && avg[t] > wc_floor + hysteresis) {
      inside = false;
      gaps.push_back({map.times[start], static_cast<double>(t - start) * dt});
    }
  }
  if (inside) gaps.push_back({map.times[start], static_cast<double>(avg.size() - start) * dt});
  return gaps;
}

void write_coherence_csv(std::ostream& out, const CoherenceMap& map) {
  out << "freq_hz";
  for (double t : map.times) out << ',' << text::shortest(t);
  out << '\n';
  for (std::size_t j = 0; j < map.bins(); ++j) {
    out << text::shortest(map.freqs[j]);
    for (std::size_t t = 0; t < map.length(); ++t)
      out << ',' << text::shortest(map.wc(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t)));
    out << '\n';
  }
}

nlohmann::json coherence_summary(const CoherenceMap& map, double f_lo, double f_hi,
                                 double wc_floor, double sample_rate) {
  nlohmann::json j;
  j["bins"] = map.bins();
  j["samples"] = map.length();
  j["freq_hz"] = {{"min", map.freqs.back()}, {"max", map.freqs.front()}};
  j["band_hz"] = {f_lo, f_hi};
  j["wc_floor"] = wc_floor;
  const auto avg = band_average(map, f_lo, f_hi);
  double mean = 0.0;
  for (double v : avg) mean += v;
  j["band_mean_wc"] = avg.empty() ? 0.0 : mean / static_cast<double>(avg.size());
  double overall = map.wc.size() ? map.wc.mean() : 0.0;
  j["overall_mean_wc"] = overall;
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& g : coherent_gap_width(map, f_lo, f_hi, wc_floor))
    gaps.push_back({{"start_s", g.start_time},
                    {"width_s", g.width},
                    {"lost_packets_est", g.width * sample_rate}});
  j["gaps"] = gaps;
  return j;
}

}  // namespace csirecip
