// csirecip command-line front end.
//
//   csirecip simulate --preset nlos-long --seed 3 --out runs/a
//   csirecip metrics  --ap runs/a/ap.csv --sta runs/a/sta.csv
//   csirecip keygen   --preset reciprocal --seeds 5
//   csirecip auth     --legit 12 --replay 12
//   csirecip report   --input runs/a/comparison.csv
//
// Every option can also come from an INI file given with --config; a section
// named after a subcommand feeds that subcommand, and flags on the command
// line win over the file.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csirecip/authsim.hpp"
#include "csirecip/chansim.hpp"
#include "csirecip/csi_model.hpp"
#include "csirecip/error.hpp"
#include "csirecip/keygen.hpp"
#include "csirecip/metrics.hpp"
#include "csirecip/reconstruct.hpp"
#include "csirecip/text.hpp"
#include "csirecip/wavelet.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace csirecip;

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;

// Bad option values found after parsing; reported with exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out() {
  const char* env = std::getenv("CSIRECIP_OUT");
  return env && *env ? env : ".";
}

struct ChannelOpts {
  std::string preset;
  std::uint64_t seed = 1;
  double duration_s = 1800.0;
  std::optional<double> rate_hz, f_lo, f_hi, snr_db, coherence_time_s, activity_db;
  std::optional<int> lag;
  std::vector<std::string> loss;  // side:start_s:count

  void add(CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--preset", preset, "Channel preset")
        ->check(CLI::IsMember(preset_names()));
    if (with_seed) cmd->add_option("--seed", seed, "Simulation seed");
    cmd->add_option("--duration", duration_s, "Trace length in seconds")->capture_default_str();
    cmd->add_option("--rate", rate_hz, "Packets per second");
    cmd->add_option("--f-lo", f_lo, "Lower edge of the fading band, Hz");
    cmd->add_option("--f-hi", f_hi, "Upper edge of the fading band, Hz");
    cmd->add_option("--snr", snr_db, "Per-device SNR in dB");
    cmd->add_option("--lag", lag, "STA lag in samples");
    cmd->add_option("--coherence-time", coherence_time_s, "Channel coherence time, s");
    cmd->add_option("--activity-db", activity_db, "Fading power variation, dB");
    cmd->add_option("--loss", loss, "Loss event side:start_s:count (repeatable)");
  }

  ChannelConfig resolve(std::uint64_t s) const {
    ChannelConfig cfg = preset.empty() ? ChannelConfig{} : csirecip::preset(preset, s, duration_s);
    cfg.seed = s;
    cfg.duration_s = duration_s;
    if (rate_hz) cfg.rate_hz = *rate_hz;
    if (f_lo) cfg.f_lo = *f_lo;
    if (f_hi) cfg.f_hi = *f_hi;
    if (snr_db) cfg.snr_db = *snr_db;
    if (lag) cfg.lag_samples = *lag;
    if (coherence_time_s) cfg.coherence_time_s = *coherence_time_s;
    if (activity_db) cfg.activity_db = *activity_db;
    for (const auto& spec : loss) {
      const auto parts = text::split(spec, ':');
      const auto start = parts.size() == 3 ? text::parse_double(parts[1]) : std::nullopt;
      const auto count = parts.size() == 3 ? text::parse_int(parts[2]) : std::nullopt;
      if (!start || !count || *count < 0) throw UsageError("bad --loss '" + spec + "'");
      cfg.loss.push_back({side_from_string(parts[0]), *start, static_cast<std::size_t>(*count)});
    }
    return cfg;
  }

  std::string scenario() const { return preset.empty() ? "custom" : preset; }
};

// Either two CSV captures or a simulated pair.
struct InputOpts {
  std::string ap_path, sta_path;
  std::optional<double> csv_rate;
  std::size_t subcarrier = 6;
  ChannelOpts channel;

  void add(CLI::App* cmd) {
    cmd->add_option("--ap", ap_path, "AP capture (CSI CSV)");
    cmd->add_option("--sta", sta_path, "STA capture (CSI CSV)");
    cmd->add_option("--csv-rate", csv_rate, "Packet rate of the captures (inferred if absent)");
    cmd->add_option("--subcarrier", subcarrier, "Subcarrier index")->capture_default_str();
    channel.add(cmd);
  }

  bool from_files() const { return !ap_path.empty() || !sta_path.empty(); }

  std::pair<CsiTrace, CsiTrace> load() const {
    if (from_files()) {
      if (ap_path.empty() || sta_path.empty()) throw UsageError("--ap and --sta go together");
      return {read_csi_csv(ap_path, csv_rate).trace, read_csi_csv(sta_path, csv_rate).trace};
    }
    auto pair = gen_pair(channel.resolve(channel.seed));
    return {std::move(pair.ap), std::move(pair.sta)};
  }

  json describe() const {
    if (from_files())
      return {{"dataset", {{"ap", ap_path}, {"sta", sta_path}}}, {"subcarrier", subcarrier}};
    return {{"simulate", to_json(channel.resolve(channel.seed))},
            {"scenario", channel.scenario()},
            {"subcarrier", subcarrier}};
  }
};

struct SessionOpts {
  SessionConfig cfg;
  std::string scope = "per_block", band_source = "per_device";

  void add(CLI::App* cmd) {
    cmd->add_option("--probe-len", cfg.probe_len, "Threshold-agreement window, samples")
        ->capture_default_str();
    cmd->add_option("--round-len", cfg.round_len, "Samples keyed between trigger checks")
        ->capture_default_str();
    cmd->add_option("--max-lag", cfg.max_lag, "Lag search range, samples")->capture_default_str();
    cmd->add_option("--block-len", cfg.block_len, "Samples per key block")->capture_default_str();
    cmd->add_option("--levels", cfg.levels, "Quantizer levels")->capture_default_str();
    cmd->add_option("--thresholds", cfg.thresholds, "Error thresholds, bits")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--scope", scope, "Quantizer thresholds per block or whole series")
        ->check(CLI::IsMember({"per_block", "whole_series"}))
        ->capture_default_str();
    cmd->add_option("--band-source", band_source, "wt band selection")
        ->check(CLI::IsMember({"per_device", "shared_map"}))
        ->capture_default_str();
    cmd->add_flag("--strict-band", cfg.strict_band, "Reconstruct from the selected bins only");
    cmd->add_option("--golay-window", cfg.golay_window)->capture_default_str();
    cmd->add_option("--golay-order", cfg.golay_order)->capture_default_str();
    cmd->add_option("--power-keep", cfg.power_keep)->capture_default_str();
    cmd->add_option("--wpt-depth", cfg.wpt_depth)->capture_default_str();
  }

  SessionConfig resolve() const {
    auto c = cfg;
    c.scope = scope == "per_block" ? ThresholdScope::per_block : ThresholdScope::whole_series;
    c.band_source = band_source == "per_device" ? BandSource::per_device : BandSource::shared_map;
    c.validate();
    return c;
  }
};

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
  return p;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << body;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

// ---- simulate ----

int cmd_simulate(const ChannelOpts& ch, const std::string& out_dir) {
  const auto cfg = ch.resolve(ch.seed);
  const auto pair = gen_pair(cfg);
  const auto out = prepare_out(out_dir);
  write_csi_csv((out / "ap.csv").string(), pair.ap);
  write_csi_csv((out / "sta.csv").string(), pair.sta);
  auto truth = to_json(pair.truth);
  truth["config"] = to_json(cfg);
  truth["scenario"] = ch.scenario();
  write_json(out / "truth.json", truth);
  std::cout << "wrote " << (out / "ap.csv").string() << ", " << (out / "sta.csv").string() << ", "
            << (out / "truth.json").string() << " (" << pair.ap.size() << "/" << pair.sta.size()
            << " packets, lag " << cfg.lag_samples << ")\n";
  return 0;
}

// ---- metrics ----

struct MetricsOpts {
  std::size_t max_lag = 50;
  std::size_t bins = 32;
  double wc_floor = 0.3;
  std::vector<double> band{0.06, 1.5};
};

int cmd_metrics(const InputOpts& in, const MetricsOpts& m, const std::string& out_dir) {
  if (m.band.size() != 2 || !(m.band[0] < m.band[1])) throw UsageError("--band needs lo < hi");
  const auto [ap, sta] = in.load();
  const auto [a, b] = pair_traces(ap, sta, in.subcarrier, GapPolicy::drop_both);
  const auto max_lag = std::min(m.max_lag, a.size() > 2 ? (a.size() - 1) / 2 : 0);
  const auto lag = xcorr_lag(a.values, b.values, max_lag);

  // Coherence needs uniform sampling, so it runs on the interpolated pair.
  const auto [ia, ib] = pair_traces(ap, sta, in.subcarrier, GapPolicy::interpolate_linear);
  const auto params = CwtParams::for_length(ia.size(), ia.rate_hz);
  const auto map = wavelet_coherence(ia.values, ib.values, params);
  const auto grid = params.frequency_grid();
  const double lo = std::max(m.band[0], grid.back()), hi = std::min(m.band[1], grid.front());
  if (!(lo <= hi)) throw UsageError("--band lies outside the coherence grid");

  json j = {{"config", {{"input", in.describe()},
                        {"max_lag_samples", max_lag},
                        {"histogram_bins", m.bins},
                        {"wc_floor", m.wc_floor},
                        {"band_hz", {lo, hi}}}},
            {"samples", a.size()},
            {"pearson", pearson(a.values, b.values)},
            {"jeffrey_divergence_nats", jeffrey_divergence(a.values, b.values, {m.bins, 1e-9})},
            {"wasserstein", wasserstein_1d(a.values, b.values)},
            {"lag_estimate", {{"lag_samples", lag.lag},
                              {"lag_s", lag.lag / ia.rate_hz},
                              {"peak_corr", lag.peak_corr}}},
            {"wc_summary", coherence_summary(map, lo, hi, m.wc_floor, ia.rate_hz)}};
  const auto out = prepare_out(out_dir);
  write_json(out / "metrics.json", j);
  std::cout << "pearson " << fmt(j["pearson"]) << "  jeffrey " << fmt(j["jeffrey_divergence_nats"])
            << "  wasserstein " << fmt(j["wasserstein"]) << "  lag " << lag.lag << " samples\n";
  return 0;
}

// ---- reconstruct ----

int cmd_reconstruct(const InputOpts& in, const SessionOpts& so, const std::string& pipeline,
                    bool sync, const std::string& out_dir) {
  auto cfg = so.resolve();
  cfg.pipeline = pipeline_from_string(pipeline);
  const auto [ap, sta] = in.load();
  const auto [a, b] = pair_traces(ap, sta, in.subcarrier, GapPolicy::interpolate_linear);
  const auto pa = apply_pipeline(a.values, cfg, a.rate_hz);
  const auto pb = apply_pipeline(b.values, cfg, b.rate_hz);
  auto res = sync ? synchronize(pa, pb, std::min(cfg.max_lag, (pa.size() - 1) / 2))
                  : apply_lag(pa, pb, 0);

  // Rows follow the aligned AP index; the STA column is shifted by the lag.
  std::ostringstream csv;
  csv << "seq,ap,sta\n";
  const std::size_t a0 = res.lag < 0 ? static_cast<std::size_t>(-res.lag) : 0;
  for (std::size_t i = 0; i < res.x_aligned.size(); ++i)
    csv << a.seqs[a0 + i] << ',' << text::shortest(res.x_aligned[i]) << ','
        << text::shortest(res.y_aligned[i]) << '\n';
  const auto out = prepare_out(out_dir);
  write_text(out / "reconstructed.csv", csv.str());
  json j = {{"config", {{"input", in.describe()}, {"pipeline", pipeline}, {"sync", sync},
                        {"session", to_json(cfg)}}},
            {"samples_in", a.size()},
            {"samples_out", res.x_aligned.size()},
            {"lag_samples", res.lag},
            {"pearson_raw", pearson(a.values, b.values)},
            {"pearson_processed", pearson(res.x_aligned, res.y_aligned)}};
  write_json(out / "reconstruct.json", j);
  std::cout << pipeline << (sync ? "+sync" : "") << ": pearson " << fmt(j["pearson_raw"]) << " -> "
            << fmt(j["pearson_processed"]) << ", lag " << res.lag << "\n";
  return 0;
}

// ---- keygen ----

struct KeygenOpts {
  std::vector<std::string> pipelines{"raw", "golay", "fft", "wpt", "wt"};
  std::string sync = "both";
  std::size_t seeds = 1;
};

int cmd_keygen(const InputOpts& in, const SessionOpts& so, const KeygenOpts& k,
               const std::string& out_dir) {
  auto base = so.resolve();
  std::vector<bool> syncs;
  if (k.sync != "on") syncs.push_back(false);
  if (k.sync != "off") syncs.push_back(true);
  std::vector<Pipeline> pipes;
  for (const auto& p : k.pipelines) pipes.push_back(pipeline_from_string(p));
  if (pipes.empty()) throw UsageError("at least one pipeline is required");
  if (in.from_files() && k.seeds != 1) throw UsageError("--seeds only applies to simulated input");

  const auto out = prepare_out(out_dir);
  const auto reports = out / "reports";
  prepare_out(reports.string());
  std::string csv = report_csv_header();
  const std::string scenario = in.from_files() ? "dataset" : in.channel.scenario();
  for (std::size_t i = 0; i < k.seeds; ++i) {
    const auto seed = in.channel.seed + i;
    InputOpts cell = in;
    cell.channel.seed = seed;
    const auto [ap, sta] = cell.load();
    const auto [a, b] = pair_traces(ap, sta, in.subcarrier, GapPolicy::interpolate_linear);
    for (auto p : pipes)
      for (bool s : syncs) {
        auto cfg = base;
        cfg.pipeline = p;
        cfg.sync = s;
        const auto r = wskg_session(a, b, cfg);
        const std::string name = std::string(to_string(p)) + (s ? "+sync" : "");
        auto j = to_json(r);
        j["config"] = {{"input", cell.describe()}, {"session", to_json(cfg)}};
        j["scenario"] = scenario;
        j["seed"] = seed;
        write_json(reports / (scenario + "_" + std::to_string(seed) + "_" + std::string(to_string(p)) +
                              (s ? "_sync" : "_nosync") + ".json"),
                   j);
        csv += report_csv_rows(r, to_string(p), s, scenario, seed);
        std::cout << scenario << " seed " << seed << "  " << name;
        for (const auto& t : r.thresholds)
          std::cout << "  kgr@" << t.error_threshold << " " << fmt(t.kgr);
        std::cout << "\n";
      }
  }
  write_text(out / "comparison.csv", csv);
  std::cout << "wrote " << (out / "comparison.csv").string() << "\n";
  return 0;
}

// ---- auth ----

struct AuthOpts {
  AuthPolicy policy;
  std::size_t legit = 12, replay = 12;
  std::uint64_t seed = 1;
  double replay_gap_s = 600.0;
};

int cmd_auth(const AuthOpts& o, const std::string& out_dir) {
  o.policy.validate();
  if (!(o.replay_gap_s >= 0.0)) throw UsageError("--replay-gap must be >= 0");
  std::vector<AuthTrial> trials;
  for (std::size_t i = 0; i < o.legit; ++i) trials.push_back(legit_trial(o.policy, o.seed + i));
  for (std::size_t i = 0; i < o.replay; ++i)
    trials.push_back(replay_trial(o.policy, o.seed + o.legit + i, o.replay_gap_s));
  json tj = json::array();
  for (const auto& t : trials) tj.push_back(to_json(t));
  const auto c = tally(trials);
  json j = {{"config", {{"min_corr", o.policy.min_corr},
                        {"max_shift_samples", o.policy.max_shift},
                        {"probe_len_samples", o.policy.probe_len},
                        {"legit_trials", o.legit},
                        {"replay_trials", o.replay},
                        {"seed", o.seed},
                        {"replay_gap_s", o.replay_gap_s}}},
            {"trials", tj},
            {"confusion", to_json(c)}};
  const auto out = prepare_out(out_dir);
  write_json(out / "auth.json", j);
  std::cout << "              accepted  rejected\n"
            << "legitimate    " << std::setw(8) << c.true_accept << "  " << std::setw(8)
            << c.false_reject << "\n"
            << "replay        " << std::setw(8) << c.false_accept << "  " << std::setw(8)
            << c.true_reject << "\n";
  return 0;
}

// ---- report ----

struct Cell {
  std::size_t sessions = 0, accepted = 0, attempted = 0, ber_n = 0;
  double kgr = 0.0, ber = 0.0;
};

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
  const std::string header = report_csv_header();
  std::map<std::tuple<std::string, std::string, std::string, int>, Cell> cells;
  for (const auto& path : inputs) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
    std::string line;
    std::getline(f, line);
    if (line + "\n" != header) throw Error(ErrorCode::MalformedHeader, path + " is not a comparison table");
    std::size_t row = 1;
    while (std::getline(f, line)) {
      ++row;
      if (line.empty()) continue;
      const auto c = text::split(line, ',');
      const auto theta = c.size() == 11 ? text::parse_int(c[4]) : std::nullopt;
      const auto kgr = c.size() == 11 ? text::parse_double(c[5]) : std::nullopt;
      const auto acc = c.size() == 11 ? text::parse_int(c[8]) : std::nullopt;
      const auto att = c.size() == 11 ? text::parse_int(c[9]) : std::nullopt;
      if (!theta || !kgr || !acc || !att)
        throw Error(ErrorCode::MalformedHeader, path + ":" + std::to_string(row) + ": bad row");
      auto& cell = cells[{std::string(c[2]), std::string(c[0]), std::string(c[1]), static_cast<int>(*theta)}];
      ++cell.sessions;
      cell.kgr += *kgr;
      cell.accepted += static_cast<std::size_t>(*acc);
      cell.attempted += static_cast<std::size_t>(*att);
      if (const auto b = text::parse_double(c[6])) {
        cell.ber += *b;
        ++cell.ber_n;
      }
    }
  }
  std::string csv =
      "scenario,pipeline,sync,theta_bits,sessions,mean_kgr_bits_per_packet,mean_ber,accepted,attempted\n";
  std::cout << "scenario      pipeline sync theta   kgr      mean_ber  accepted\n";
  for (const auto& [key, c] : cells) {
    const auto& [scenario, pipe, sync, theta] = key;
    const double kgr = c.kgr / static_cast<double>(c.sessions);
    const std::string ber = c.ber_n ? text::shortest(c.ber / static_cast<double>(c.ber_n)) : "";
    csv += scenario + "," + pipe + "," + sync + "," + std::to_string(theta) + "," +
           std::to_string(c.sessions) + "," + text::shortest(kgr) + "," + ber + "," +
           std::to_string(c.accepted) + "," + std::to_string(c.attempted) + "\n";
    std::cout << std::left << std::setw(14) << scenario << std::setw(9) << pipe << std::setw(5)
              << sync << std::right << std::setw(5) << theta << "  " << fmt(kgr) << "  "
              << (c.ber_n ? fmt(c.ber / static_cast<double>(c.ber_n)) : std::string("   -  "))
              << "  " << c.accepted << "/" << c.attempted << "\n";
  }
  const auto out = prepare_out(out_dir);
  write_text(out / "summary.csv", csv);
  return 0;
}

bool usage_code(ErrorCode c) {
  return c == ErrorCode::InvalidConfig || c == ErrorCode::InvalidParams || c == ErrorCode::InvalidBand;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Channel-reciprocity experiments: simulation, metrics, reconstruction, keys, auth"};
  app.set_config("--config", "", "INI file; [subcommand] sections feed each subcommand");
  app.require_subcommand(1);
  app.fallthrough();  // --out and --config also work after the subcommand
  std::string out_dir = default_out();
  app.add_option("--out", out_dir, "Output directory (default $CSIRECIP_OUT or .)");

  ChannelOpts sim_ch;
  auto* sim = app.add_subcommand("simulate", "Write a simulated AP/STA capture pair and its truth");
  sim_ch.add(sim);

  InputOpts met_in;
  MetricsOpts met;
  auto* metrics = app.add_subcommand("metrics", "Reciprocity metrics of one capture pair");
  met_in.add(metrics);
  metrics->add_option("--max-lag", met.max_lag, "Lag search range, samples")->capture_default_str();
  metrics->add_option("--bins", met.bins, "Histogram bins for the divergence")->capture_default_str();
  metrics->add_option("--wc-floor", met.wc_floor, "Coherence floor for gap detection")
      ->capture_default_str();
  metrics->add_option("--band", met.band, "Coherence band lo,hi in Hz")->delimiter(',')->expected(2);

  InputOpts rec_in;
  SessionOpts rec_so;
  std::string rec_pipe = "wt";
  bool rec_sync = true;
  auto* rec = app.add_subcommand("reconstruct", "Apply one pipeline to both series");
  rec_in.add(rec);
  rec_so.add(rec);
  rec->add_option("--pipeline", rec_pipe)->check(CLI::IsMember({"raw", "golay", "fft", "wpt", "wt"}))
      ->capture_default_str();
  rec->add_option("--sync", rec_sync, "Align the processed series")->capture_default_str();

  InputOpts kg_in;
  SessionOpts kg_so;
  KeygenOpts kg;
  auto* keygen = app.add_subcommand("keygen", "Key-generation sessions and the comparison table");
  kg_in.add(keygen);
  kg_so.add(keygen);
  keygen->add_option("--pipelines", kg.pipelines)->delimiter(',')
      ->check(CLI::IsMember({"raw", "golay", "fft", "wpt", "wt"}))->capture_default_str();
  keygen->add_option("--sync", kg.sync)->check(CLI::IsMember({"on", "off", "both"}))
      ->capture_default_str();
  keygen->add_option("--seeds", kg.seeds, "Consecutive seeds starting at --seed")
      ->check(CLI::PositiveNumber)->capture_default_str();

  AuthOpts au;
  auto* auth = app.add_subcommand("auth", "Seeded legitimate and replay handshakes");
  auth->add_option("--legit", au.legit)->capture_default_str();
  auth->add_option("--replay", au.replay)->capture_default_str();
  auth->add_option("--seed", au.seed)->capture_default_str();
  auth->add_option("--min-corr", au.policy.min_corr)->capture_default_str();
  auth->add_option("--max-shift", au.policy.max_shift, "samples")->capture_default_str();
  auth->add_option("--probe-len", au.policy.probe_len, "samples")->capture_default_str();
  auth->add_option("--replay-gap", au.replay_gap_s, "seconds")->capture_default_str();

  std::vector<std::string> rep_in;
  auto* report = app.add_subcommand("report", "Aggregate comparison tables");
  report->add_option("--input", rep_in, "comparison.csv files (default <out>/comparison.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(sim_ch, out_dir);
    if (*metrics) return cmd_metrics(met_in, met, out_dir);
    if (*rec) return cmd_reconstruct(rec_in, rec_so, rec_pipe, rec_sync, out_dir);
    if (*keygen) return cmd_keygen(kg_in, kg_so, kg, out_dir);
    if (*auth) return cmd_auth(au, out_dir);
    if (*report) {
      if (rep_in.empty()) rep_in.push_back((fs::path(out_dir) / "comparison.csv").string());
      return cmd_report(rep_in, out_dir);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage_code(e.code()) ? kUsage : kDataError;
  }
  return kUsage;
}
