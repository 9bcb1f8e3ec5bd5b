#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "csirecip/authsim.hpp"
#include "csirecip/chansim.hpp"
#include "csirecip/csi_model.hpp"
#include "csirecip/error.hpp"
#include "csirecip/keygen.hpp"
#include "csirecip/metrics.hpp"
#include "csirecip/reconstruct.hpp"
#include "csirecip/wavelet.hpp"

namespace py = pybind11;
using namespace csirecip;

namespace {

using Vec = std::vector<double>;

py::array_t<double> arr(const Vec& v) { return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data()); }

// Reports cross as JSON text so Python sees exactly what the CLI writes.
py::object pyjson(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::dict series_dict(const MagnitudeSeries& s) {
  py::dict d;
  d["values"] = arr(s.values);
  d["seqs"] = s.seqs;
  d["rate_hz"] = s.rate_hz;
  d["subcarrier"] = s.subcarrier;
  return d;
}

py::dict band_dict(const ReciprocalBand& b) {
  py::dict d;
  d["f_rec"] = b.f_rec;
  d["f_lo"] = b.f_lo;
  d["f_hi"] = b.f_hi;
  d["alpha"] = b.alpha;
  d["beta"] = b.beta;
  d["iterations"] = b.iterations;
  return d;
}

py::dict sync_dict(const SyncResult& r) {
  py::dict d;
  d["lag"] = r.lag;
  d["peak_corr"] = r.peak_corr;
  d["x"] = arr(r.x_aligned);
  d["y"] = arr(r.y_aligned);
  d["discarded"] = r.discarded;
  return d;
}

ChannelConfig channel(const std::string& preset_name, std::uint64_t seed, double duration_s) {
  return preset_name.empty() ? [&] {
    ChannelConfig c;
    c.seed = seed;
    c.duration_s = duration_s;
    return c;
  }() : preset(preset_name, seed, duration_s);
}

py::dict simulate(const std::string& preset_name, std::uint64_t seed, double duration_s,
                  std::size_t subcarrier, const std::string& gap_policy) {
  const auto cfg = channel(preset_name, seed, duration_s);
  const auto pair = gen_pair(cfg);
  const auto policy = gap_policy == "drop_both" ? GapPolicy::drop_both : GapPolicy::interpolate_linear;
  const auto [a, b] = pair_traces(pair.ap, pair.sta, subcarrier, policy);
  py::dict d;
  d["ap"] = series_dict(a);
  d["sta"] = series_dict(b);
  d["truth"] = pyjson(to_json(pair.truth));
  d["config"] = pyjson(to_json(cfg));
  return d;
}

py::dict auth_run(std::size_t legit, std::size_t replay, std::uint64_t seed, const AuthPolicy& policy) {
  std::vector<AuthTrial> trials;
  for (std::size_t i = 0; i < legit; ++i) trials.push_back(legit_trial(policy, seed + i));
  for (std::size_t i = 0; i < replay; ++i) trials.push_back(replay_trial(policy, seed + legit + i));
  nlohmann::json tj = nlohmann::json::array();
  for (const auto& t : trials) tj.push_back(to_json(t));
  py::dict d;
  d["trials"] = pyjson(tj);
  d["confusion"] = pyjson(to_json(tally(trials)));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Channel-reciprocity metrics, wavelet reconstruction and key generation.";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  // metrics
  m.def("pearson", [](const Vec& x, const Vec& y) { return pearson(x, y); }, py::arg("x"), py::arg("y"));
  m.def("jeffrey_divergence",
        [](const Vec& x, const Vec& y, std::size_t bins, double eps) {
          return jeffrey_divergence(x, y, {bins, eps});
        },
        py::arg("x"), py::arg("y"), py::arg("bins") = 32, py::arg("epsilon") = 1e-9);
  m.def("wasserstein_1d", [](const Vec& x, const Vec& y) { return wasserstein_1d(x, y); });
  m.def("xcorr_lag",
        [](const Vec& x, const Vec& y, std::size_t max_lag) {
          const auto e = xcorr_lag(x, y, max_lag);
          py::dict d;
          d["lag"] = e.lag;
          d["peak_corr"] = e.peak_corr;
          d["curve"] = arr(e.curve);
          return d;
        },
        py::arg("x"), py::arg("y"), py::arg("max_lag"));
  m.def("ber", [](const BitVector& a, const BitVector& b) { return ber(a, b); });

  // wavelet
  py::class_<Scalogram>(m, "Scalogram")
      .def_readonly("coeffs", &Scalogram::coeffs)
      .def_readonly("freqs", &Scalogram::freqs)
      .def_readonly("coi", &Scalogram::coi)
      .def_readonly("mean", &Scalogram::mean)
      .def("icwt", [](const Scalogram& sg, double lo, double hi) { return arr(icwt(sg, lo, hi)); });
  m.def("cwt",
        [](const Vec& x, double rate, double omega0, int voices) {
          return cwt(x, CwtParams::for_length(x.size(), rate, omega0, voices));
        },
        py::arg("x"), py::arg("sample_rate"), py::arg("omega0") = 6.0, py::arg("voices_per_octave") = 12);

  py::class_<CoherenceMap>(m, "CoherenceMap")
      .def_readonly("wc", &CoherenceMap::wc)
      .def_readonly("phase", &CoherenceMap::phase)
      .def_readonly("freqs", &CoherenceMap::freqs)
      .def_readonly("times", &CoherenceMap::times)
      .def_readonly("coi", &CoherenceMap::coi);
  m.def("wavelet_coherence",
        [](const Vec& x, const Vec& y, double rate, double omega0, int voices) {
          return wavelet_coherence(x, y, CwtParams::for_length(x.size(), rate, omega0, voices));
        },
        py::arg("x"), py::arg("y"), py::arg("sample_rate"), py::arg("omega0") = 6.0,
        py::arg("voices_per_octave") = 12);
  m.def("coherent_gap_width",
        [](const CoherenceMap& map, double lo, double hi, double floor, double hyst) {
          std::vector<std::pair<double, double>> out;
          for (const auto& g : coherent_gap_width(map, lo, hi, floor, hyst)) out.emplace_back(g.start_time, g.width);
          return out;
        },
        py::arg("map"), py::arg("f_lo"), py::arg("f_hi"), py::arg("wc_floor"), py::arg("hysteresis") = 0.1);

  // reconstruct
  m.def("golay_filter", [](const Vec& x, std::size_t w, std::size_t o) { return arr(golay_filter(x, w, o)); },
        py::arg("x"), py::arg("window") = 11, py::arg("order") = 3);
  m.def("fft_reconstruct", [](const Vec& x, double keep) { return arr(fft_reconstruct(x, keep)); },
        py::arg("x"), py::arg("power_keep") = 0.98);
  m.def("wpt_denoise", [](const Vec& x, std::size_t depth) { return arr(wpt_denoise(x, depth)); },
        py::arg("x"), py::arg("depth") = 4);
  m.def("adapt_thresholds", [](const CoherenceMap& map, std::size_t L) { return band_dict(adapt_thresholds(map, L)); },
        py::arg("map"), py::arg("L"));
  m.def("synchronize", [](const Vec& x, const Vec& y, std::size_t max_lag) { return sync_dict(synchronize(x, y, max_lag)); },
        py::arg("x"), py::arg("y"), py::arg("max_lag"));

  // keygen
  py::class_<SessionConfig>(m, "SessionConfig")
      .def(py::init<>())
      .def_property(
          "pipeline", [](const SessionConfig& c) { return std::string(to_string(c.pipeline)); },
          [](SessionConfig& c, const std::string& s) { c.pipeline = pipeline_from_string(s); })
      .def_readwrite("sync", &SessionConfig::sync)
      .def_readwrite("probe_len", &SessionConfig::probe_len)
      .def_readwrite("round_len", &SessionConfig::round_len)
      .def_readwrite("max_lag", &SessionConfig::max_lag)
      .def_readwrite("block_len", &SessionConfig::block_len)
      .def_readwrite("levels", &SessionConfig::levels)
      .def_readwrite("thresholds", &SessionConfig::thresholds)
      .def_readwrite("strict_band", &SessionConfig::strict_band)
      .def("to_dict", [](const SessionConfig& c) { return pyjson(to_json(c)); });
  m.def("cdf_thresholds", [](const Vec& x, std::size_t levels) { return cdf_thresholds(x, levels).thresholds; },
        py::arg("block"), py::arg("levels") = 4);
  m.def("quantize",
        [](const Vec& x, const Vec& thresholds) {
          QuantizerSpec s;
          s.levels = thresholds.size() + 1;
          s.thresholds = thresholds;
          return quantize(x, s);
        },
        py::arg("block"), py::arg("thresholds"));
  m.def("gray_encode", &gray_encode, py::arg("levels"), py::arg("levels_count") = 4);
  m.def("make_keys",
        [](const Vec& x, std::size_t block_len, std::size_t levels) {
          py::list out;
          for (const auto& b : make_keys(x, block_len, levels).blocks) {
            py::dict d;
            d["start"] = b.start;
            d["levels"] = b.levels;
            d["bits"] = b.bits;
            out.append(d);
          }
          return out;
        },
        py::arg("x"), py::arg("block_len") = 100, py::arg("levels") = 4);
  m.def("apply_pipeline", [](const Vec& x, const SessionConfig& c, double rate) { return arr(apply_pipeline(x, c, rate)); },
        py::arg("x"), py::arg("config"), py::arg("rate_hz") = 1.0);
  m.def("wskg_session",
        [](const Vec& ap, const Vec& sta, const SessionConfig& c, double rate) {
          return pyjson(to_json(wskg_session(ap, sta, c, rate)));
        },
        py::arg("ap"), py::arg("sta"), py::arg("config") = SessionConfig{}, py::arg("rate_hz") = 1.0);

  // simulation and authentication
  m.def("preset_names", &preset_names);
  m.def("simulate", &simulate, py::arg("preset") = "", py::arg("seed") = 1, py::arg("duration_s") = 1800.0,
        py::arg("subcarrier") = 6, py::arg("gap_policy") = "interpolate_linear");
  m.def("write_simulated_csv",
        [](const std::string& preset_name, std::uint64_t seed, double duration_s, const std::string& ap_path,
           const std::string& sta_path) {
          const auto pair = gen_pair(channel(preset_name, seed, duration_s));
          write_csi_csv(ap_path, pair.ap);
          write_csi_csv(sta_path, pair.sta);
        },
        py::arg("preset"), py::arg("seed"), py::arg("duration_s"), py::arg("ap_path"), py::arg("sta_path"));
  m.def("read_magnitudes",
        [](const std::string& path, std::size_t subcarrier) {
          return series_dict(magnitude_series(read_csi_csv(path).trace, subcarrier));
        },
        py::arg("path"), py::arg("subcarrier") = 6);

  py::class_<AuthPolicy>(m, "AuthPolicy")
      .def(py::init<>())
      .def_readwrite("min_corr", &AuthPolicy::min_corr)
      .def_readwrite("max_shift", &AuthPolicy::max_shift)
      .def_readwrite("probe_len", &AuthPolicy::probe_len);
  m.def("auth_trials", &auth_run, py::arg("legit") = 12, py::arg("replay") = 12, py::arg("seed") = 1,
        py::arg("policy") = AuthPolicy{});
}
