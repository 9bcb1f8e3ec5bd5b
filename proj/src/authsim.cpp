#include "csirecip/authsim.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>
#include <random>

#include "csirecip/error.hpp"
#include "csirecip/metrics.hpp"

namespace csirecip {

namespace {

constexpr std::size_t kAuthSubcarrier = 6;

std::vector<double> magnitudes(const CsiTrace& trace) {
  return magnitude_series(trace, kAuthSubcarrier).values;
}

}  // namespace

void AuthPolicy::validate() const {
  if (!(min_corr > 0.0 && min_corr < 1.0)) throw Error(ErrorCode::InvalidParams, "min_corr must be in (0, 1)");
  if (probe_len < 8) throw Error(ErrorCode::InvalidParams, "probe_len must be at least 8");
}

std::string_view to_string(AuthReason r) {
  switch (r) {
    case AuthReason::ok: return "ok";
    case AuthReason::bad_signature: return "bad_signature";
    case AuthReason::low_corr: return "low_corr";
    case AuthReason::high_shift: return "high_shift";
  }
  return "?";
}

AuthTag sign_csi(std::span<const double> payload, const IdentityKey& key) {
  std::vector<unsigned char> bytes;
  bytes.reserve(payload.size() * 8);
  for (double v : payload) {
    auto u = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b, u >>= 8) bytes.push_back(static_cast<unsigned char>(u & 0xffu));
  }
  AuthTag tag{};
  unsigned int len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), bytes.data(), bytes.size(),
            tag.data(), &len) ||
      len != tag.size())
    throw Error(ErrorCode::InvalidParams, "HMAC computation failed");
  return tag;
}

AuthMessage make_s3(std::span<const double> csi, const IdentityKey& key, double sent_at) {
  AuthMessage m;
  m.kind = MessageKind::s3_signed;
  m.payload_csi.assign(csi.begin(), csi.end());
  m.tag = sign_csi(csi, key);
  m.sent_at = sent_at;
  return m;
}

bool verify(const AuthMessage& s3, const IdentityKey& key) {
  if (s3.kind != MessageKind::s3_signed) return false;
  const auto expect = sign_csi(s3.payload_csi, key);
  return CRYPTO_memcmp(expect.data(), s3.tag.data(), expect.size()) == 0;
}

AuthDecision decide(std::span<const double> ap_csi, const AuthMessage& s3, const AuthPolicy& policy,
                    const IdentityKey& key) {
  AuthDecision d;
  d.accepted = false;
  if (!verify(s3, key)) {
    d.reason = AuthReason::bad_signature;
    return d;
  }
  const auto& sta = s3.payload_csi;
  const std::size_t n = std::min({ap_csi.size(), sta.size(), policy.probe_len});
  const auto a = ap_csi.first(n);
  const auto b = std::span<const double>(sta).first(n);
  d.reason = AuthReason::low_corr;
  try {
    d.corr = pearson(a, b);
    const auto max_lag = std::min(policy.max_lag(), n > 2 ? (n - 1) / 2 : 0);
    d.shift = std::abs(xcorr_lag(a, b, max_lag).lag);
  } catch (const Error&) {
    // Frozen or truncated channels fail closed.
    return d;
  }
  if (!(d.corr >= policy.min_corr)) return d;
  if (static_cast<std::size_t>(d.shift) > policy.max_shift) {
    d.reason = AuthReason::high_shift;
    return d;
  }
  d.reason = AuthReason::ok;
  d.accepted = true;
  return d;
}

AuthDecision run_handshake(std::span<const double> ap_csi, std::span<const double> sta_csi,
                           const AuthPolicy& policy, const IdentityKey& key) {
  // S1 and S2 are the probes both sides measure; only S3 carries data.
  return decide(ap_csi, make_s3(sta_csi, key), policy, key);
}

AuthDecision replay_attack(std::span<const double> recorded_s1, const AuthMessage& recorded_s3,
                           std::span<const double> ap_now, const AuthPolicy& policy,
                           const IdentityKey& key) {
  // Replaying S1 only makes the AP probe again; what it measures is ap_now.
  (void)recorded_s1;
  return decide(ap_now, recorded_s3, policy, key);
}

std::vector<DecorrelationPoint> temporal_decorrelation_curve(const ChannelConfig& cfg,
                                                             const std::vector<double>& gaps,
                                                             std::size_t max_lag) {
  if (gaps.empty() || gaps.front() != 0.0 || !std::is_sorted(gaps.begin(), gaps.end()))
    throw Error(ErrorCode::InvalidParams, "gaps must be ascending and start at 0");
  ChannelConfig base = cfg;
  base.loss.clear();
  const auto ap = magnitudes(gen_pair(base).ap);
  std::vector<DecorrelationPoint> out;
  for (double gap : gaps) {
    const auto later = magnitudes(gen_attacker(base, AttackerMode::delayed_replay, gap));
    DecorrelationPoint p;
    p.gap_s = gap;
    p.corr = pearson(ap, later);
    p.shift = std::abs(xcorr_lag(ap, later, max_lag).lag);
    out.push_back(p);
  }
  return out;
}

ChannelConfig auth_channel(const AuthPolicy& policy, std::uint64_t seed) {
  ChannelConfig cfg;
  cfg.rate_hz = 10.0;
  cfg.duration_s = static_cast<double>(policy.probe_len) / cfg.rate_hz;
  cfg.f_lo = 0.05;
  cfg.f_hi = 1.0;
  cfg.snr_db = 15.0;
  cfg.lag_samples = 1;
  cfg.coherence_time_s = 30.0;
  cfg.seed = seed;
  cfg.subcarriers = 64;
  return cfg;
}

IdentityKey identity_key(std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5ca1ab1e0ddba11ULL);
  IdentityKey key(32);
  for (auto& b : key) b = static_cast<std::uint8_t>(rng() & 0xffu);
  return key;
}

AuthTrial legit_trial(const AuthPolicy& policy, std::uint64_t seed) {
  const auto cfg = auth_channel(policy, seed);
  const auto pair = gen_pair(cfg);
  AuthTrial t;
  t.seed = seed;
  t.legitimate = true;
  t.decision = run_handshake(magnitudes(pair.ap), magnitudes(pair.sta), policy, identity_key(seed));
  return t;
}

AuthTrial replay_trial(const AuthPolicy& policy, std::uint64_t seed, double replay_gap_s) {
  const auto cfg = auth_channel(policy, seed);
  const auto key = identity_key(seed);
  const auto recorded = gen_pair(cfg);
  const auto s1 = magnitudes(recorded.ap);
  const auto s3 = make_s3(magnitudes(recorded.sta), key, 0.0);
  AuthTrial t;
  t.seed = seed;
  t.legitimate = false;
  t.mode = (seed % 2 == 0) ? AttackerMode::independent : AttackerMode::delayed_replay;
  const auto now = gen_attacker(cfg, t.mode, t.mode == AttackerMode::independent ? 0.0 : replay_gap_s);
  t.decision = replay_attack(s1, s3, magnitudes(now), policy, key);
  return t;
}

Confusion tally(const std::vector<AuthTrial>& trials) {
  Confusion c;
  for (const auto& t : trials) {
    if (t.legitimate)
      ++(t.decision.accepted ? c.true_accept : c.false_reject);
    else
      ++(t.decision.accepted ? c.false_accept : c.true_reject);
  }
  return c;
}

nlohmann::json to_json(const AuthTrial& t) {
  nlohmann::json j = {{"seed", t.seed},
                      {"legitimate", t.legitimate},
                      {"accepted", t.decision.accepted},
                      {"corr", t.decision.corr},
                      {"shift_samples", t.decision.shift},
                      {"reason", std::string(to_string(t.decision.reason))}};
  if (!t.legitimate)
    j["attacker"] = t.mode == AttackerMode::independent ? "independent" : "delayed_replay";
  return j;
}

nlohmann::json to_json(const Confusion& c) {
  return {{"true_accept", c.true_accept},
          {"false_reject", c.false_reject},
          {"false_accept", c.false_accept},
          {"true_reject", c.true_reject}};
}

}  // namespace csirecip
