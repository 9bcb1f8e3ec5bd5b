#include "csirecip/csi_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "csirecip/error.hpp"
#include "csirecip/text.hpp"

namespace csirecip {

CsiTrace::CsiTrace(std::string device_id, std::size_t subcarriers, double rate_hz,
                   std::vector<CsiSample> samples)
    : device_id_(std::move(device_id)),
      subcarriers_(subcarriers),
      rate_hz_(rate_hz),
      samples_(std::move(samples)) {
  if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_))
    throw Error(ErrorCode::InvalidConfig, "rate_hz must be positive");
  if (subcarriers_ == 0) throw Error(ErrorCode::InvalidConfig, "subcarrier count must be positive");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const auto& s = samples_[k];
    if (s.iq.size() != subcarriers_)
      throw Error(ErrorCode::InvalidConfig, "sample " + std::to_string(k) + " has " +
                                                std::to_string(s.iq.size()) + " subcarriers");
    if (!std::isfinite(s.t))
      throw Error(ErrorCode::InvalidConfig, "sample " + std::to_string(k) + " has non-finite time");
    if (k > 0 && s.seq <= samples_[k - 1].seq)
      throw Error(ErrorCode::InvalidConfig, "sequence numbers must be strictly increasing");
  }
}

std::vector<std::int64_t> CsiTrace::missing_seqs() const {
  std::vector<std::int64_t> out;
  for (std::size_t k = 1; k < samples_.size(); ++k)
    for (auto s = samples_[k - 1].seq + 1; s < samples_[k].seq; ++s) out.push_back(s);
  return out;
}

bool MagnitudeSeries::is_gap(double v) noexcept { return std::isnan(v); }

bool MagnitudeSeries::has_gaps() const noexcept {
  return std::any_of(values.begin(), values.end(), [](double v) { return is_gap(v); });
}

namespace {

std::size_t check_header(std::string_view header) {
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  auto cols = text::split(header, ',');
  if (cols.size() < 5 || (cols.size() - 3) % 2 != 0 || cols[0] != "seq" || cols[1] != "t" ||
      cols[2] != "dev")
    throw Error(ErrorCode::MalformedHeader, "expected seq,t,dev,i0,q0,...");
  const std::size_t n = (cols.size() - 3) / 2;
  for (std::size_t k = 0; k < n; ++k) {
    if (cols[3 + 2 * k] != "i" + std::to_string(k) || cols[4 + 2 * k] != "q" + std::to_string(k))
      throw Error(ErrorCode::MalformedHeader, "unexpected column name at subcarrier " +
                                                  std::to_string(k));
  }
  return n;
}

}  // namespace

ParsedTrace parse_csi_csv(std::istream& in, std::optional<double> rate_hz) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, "missing header row");
  const std::size_t n = check_header(line);

  ParseReport report;
  std::vector<CsiSample> samples;
  std::string device;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view row(line);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.empty()) continue;
    auto cols = text::split(row, ',');
    if (cols.size() != 3 + 2 * n) {
      report.rejected_rows.push_back(lineno);
      continue;
    }
    auto seq = text::parse_int(cols[0]);
    auto t = text::parse_double(cols[1]);
    if (!seq || !t || !std::isfinite(*t) || (!device.empty() && cols[2] != device)) {
      report.rejected_rows.push_back(lineno);
      continue;
    }
    CsiSample s;
    s.seq = *seq;
    s.t = *t;
    s.iq.reserve(n);
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      auto i = text::parse_double(cols[3 + 2 * k]);
      auto q = text::parse_double(cols[4 + 2 * k]);
      ok = i && q && std::isfinite(*i) && std::isfinite(*q);
      if (ok) s.iq.emplace_back(*i, *q);
    }
    if (!ok) {
      report.rejected_rows.push_back(lineno);
      continue;
    }
    if (!samples.empty()) {
      if (s.seq == samples.back().seq) {
        ++report.duplicates;
        continue;
      }
      if (s.seq < samples.back().seq) {
        ++report.out_of_order;
        continue;
      }
    }
    if (device.empty()) device = std::string(cols[2]);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw Error(ErrorCode::EmptyTrace, "no valid CSI rows");

  double rate = 10.0;
  if (rate_hz) {
    rate = *rate_hz;
  } else if (samples.size() >= 2) {
    const double span_t = samples.back().t - samples.front().t;
    const double span_seq = static_cast<double>(samples.back().seq - samples.front().seq);
    if (span_t > 0.0) rate = span_seq / span_t;
  }
  return ParsedTrace{CsiTrace(device, n, rate, std::move(samples)), std::move(report)};
}

ParsedTrace read_csi_csv(const std::string& path, std::optional<double> rate_hz) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_csi_csv(in, rate_hz);
}

void write_csi_csv(std::ostream& out, const CsiTrace& trace) {
  out << "seq,t,dev";
  for (std::size_t k = 0; k < trace.subcarriers(); ++k) out << ",i" << k << ",q" << k;
  out << '\n';
  for (const auto& s : trace.samples()) {
    out << s.seq << ',' << text::shortest(s.t) << ',' << trace.device_id();
    for (const auto& c : s.iq) out << ',' << text::shortest(c.real()) << ',' << text::shortest(c.imag());
    out << '\n';
  }
}

void write_csi_csv(const std::string& path, const CsiTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_csi_csv(out, trace);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

MagnitudeSeries magnitude_series(const CsiTrace& trace, std::size_t subcarrier) {
  if (subcarrier >= trace.subcarriers())
    throw Error(ErrorCode::SubcarrierOutOfRange,
                std::to_string(subcarrier) + " >= " + std::to_string(trace.subcarriers()));
  MagnitudeSeries out;
  out.subcarrier = subcarrier;
  out.rate_hz = trace.rate_hz();
  if (trace.empty()) return out;
  const auto first = trace.samples().front().seq;
  const auto last = trace.samples().back().seq;
  const auto span = static_cast<std::size_t>(last - first + 1);
  out.values.assign(span, std::numeric_limits<double>::quiet_NaN());
  out.seqs.resize(span);
  for (std::size_t k = 0; k < span; ++k) out.seqs[k] = first + static_cast<std::int64_t>(k);
  for (const auto& s : trace.samples())
    out.values[static_cast<std::size_t>(s.seq - first)] = std::abs(s.iq[subcarrier]);
  return out;
}

namespace {

struct Valid {
  std::vector<std::int64_t> seqs;
  std::vector<double> values;
};

Valid valid_points(const MagnitudeSeries& s) {
  Valid v;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (MagnitudeSeries::is_gap(s.values[k])) continue;
    if (!v.seqs.empty() && s.seqs[k] <= v.seqs.back())
      throw Error(ErrorCode::InvalidConfig, "series sequence numbers must increase");
    v.seqs.push_back(s.seqs[k]);
    v.values.push_back(s.values[k]);
  }
  return v;
}

// Linear interpolation of `v` on the contiguous range [lo, hi].
std::vector<double> fill_range(const Valid& v, std::int64_t lo, std::int64_t hi) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  auto it = std::lower_bound(v.seqs.begin(), v.seqs.end(), lo);
  auto k = static_cast<std::size_t>(it - v.seqs.begin());
  for (auto s = lo; s <= hi; ++s) {
    while (k < v.seqs.size() && v.seqs[k] < s) ++k;
    if (v.seqs[k] == s) {
      out.push_back(v.values[k]);
    } else {
      const double s0 = static_cast<double>(v.seqs[k - 1]);
      const double s1 = static_cast<double>(v.seqs[k]);
      const double w = (static_cast<double>(s) - s0) / (s1 - s0);
      out.push_back(v.values[k - 1] + w * (v.values[k] - v.values[k - 1]));
    }
  }
  return out;
}

}  // namespace

std::pair<MagnitudeSeries, MagnitudeSeries> pair_series(const MagnitudeSeries& ap,
                                                        const MagnitudeSeries& sta,
                                                        GapPolicy policy) {
  const Valid a = valid_points(ap);
  const Valid b = valid_points(sta);
  if (a.seqs.empty() || b.seqs.empty()) throw Error(ErrorCode::EmptyTrace, "nothing to pair");
  const auto lo = std::max(a.seqs.front(), b.seqs.front());
  const auto hi = std::min(a.seqs.back(), b.seqs.back());
  if (lo > hi) throw Error(ErrorCode::NoOverlap, "sequence ranges do not intersect");

  MagnitudeSeries pa{ap.subcarrier, {}, {}, ap.rate_hz};
  MagnitudeSeries pb{sta.subcarrier, {}, {}, sta.rate_hz};
  if (policy == GapPolicy::drop_both) {
    std::size_t i = 0, j = 0;
    while (i < a.seqs.size() && j < b.seqs.size()) {
      if (a.seqs[i] < b.seqs[j]) {
        ++i;
      } else if (b.seqs[j] < a.seqs[i]) {
        ++j;
      } else {
        pa.seqs.push_back(a.seqs[i]);
        pb.seqs.push_back(a.seqs[i]);
        pa.values.push_back(a.values[i++]);
        pb.values.push_back(b.values[j++]);
      }
    }
    if (pa.values.empty()) throw Error(ErrorCode::NoOverlap, "no common sequence numbers");
    return {std::move(pa), std::move(pb)};
  }

  pa.values = fill_range(a, lo, hi);
  pb.values = fill_range(b, lo, hi);
  pa.seqs.resize(pa.values.size());
  for (std::size_t k = 0; k < pa.seqs.size(); ++k) pa.seqs[k] = lo + static_cast<std::int64_t>(k);
  pb.seqs = pa.seqs;
  return {std::move(pa), std::move(pb)};
}

std::pair<MagnitudeSeries, MagnitudeSeries> pair_traces(const CsiTrace& ap, const CsiTrace& sta,
                                                        std::size_t subcarrier, GapPolicy policy) {
  if (ap.empty() || sta.empty()) throw Error(ErrorCode::EmptyTrace, "cannot pair an empty trace");
  if (ap.subcarriers() != sta.subcarriers())
    throw Error(ErrorCode::InvalidConfig, "traces have different subcarrier counts");
  return pair_series(magnitude_series(ap, subcarrier), magnitude_series(sta, subcarrier), policy);
}

}  // namespace csirecip
