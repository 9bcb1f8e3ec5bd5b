#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace csirecip {

using Complex = std::complex<double>;

/// One received packet: its sequence number, capture time and per-subcarrier IQ.
struct CsiSample {
  std::int64_t seq = 0;
  double t = 0.0;
  std::vector<Complex> iq;
};

/// Sequence-ordered CSI capture of a single device. Missing sequence numbers
/// encode packet loss; the constructor rejects anything that violates the
/// ordering or width invariants, so a constructed trace is always well formed.
class CsiTrace {
 public:
  CsiTrace(std::string device_id, std::size_t subcarriers, double rate_hz,
           std::vector<CsiSample> samples);

  const std::string& device_id() const noexcept { return device_id_; }
  std::size_t subcarriers() const noexcept { return subcarriers_; }
  double rate_hz() const noexcept { return rate_hz_; }
  const std::vector<CsiSample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  /// Sequence numbers absent between the first and last sample.
  std::vector<std::int64_t> missing_seqs() const;

 private:
  std::string device_id_;
  std::size_t subcarriers_;
  double rate_hz_;
  std::vector<CsiSample> samples_;
};

/// Magnitudes of one subcarrier. Gaps are NaN entries.
struct MagnitudeSeries {
  std::size_t subcarrier = 0;
  std::vector<double> values;
  std::vector<std::int64_t> seqs;
  double rate_hz = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  bool has_gaps() const noexcept;
  static bool is_gap(double v) noexcept;
};

enum class GapPolicy { drop_both, interpolate_linear };

struct ParseReport {
  std::vector<std::size_t> rejected_rows;  // 1-based line numbers
  std::size_t duplicates = 0;
  std::size_t out_of_order = 0;
};

struct ParsedTrace {
  CsiTrace trace;
  ParseReport report;
};

/// Reads the `seq,t,dev,i0,q0,...` format. When `rate_hz` is not given it is
/// inferred from the sequence/time span of the accepted rows.
ParsedTrace parse_csi_csv(std::istream& in, std::optional<double> rate_hz = std::nullopt);
ParsedTrace read_csi_csv(const std::string& path, std::optional<double> rate_hz = std::nullopt);

/// Writes a trace in the format `parse_csi_csv` accepts; doubles are emitted in
/// shortest round-trip form, so parse(write(trace)) is lossless.
void write_csi_csv(std::ostream& out, const CsiTrace& trace);
void write_csi_csv(const std::string& path, const CsiTrace& trace);

/// |iq[subcarrier]| over the trace's full sequence span, NaN at missing seqs.
MagnitudeSeries magnitude_series(const CsiTrace& trace, std::size_t subcarrier);

std::pair<MagnitudeSeries, MagnitudeSeries> pair_traces(const CsiTrace& ap, const CsiTrace& sta,
                                                        std::size_t subcarrier,
                                                        GapPolicy policy = GapPolicy::drop_both);

/// Same as pair_traces but on series that were already extracted.
std::pair<MagnitudeSeries, MagnitudeSeries> pair_series(const MagnitudeSeries& ap,
                                                        const MagnitudeSeries& sta,
                                                        GapPolicy policy);

}  // namespace csirecip
