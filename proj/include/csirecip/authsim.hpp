#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csirecip/chansim.hpp"

namespace csirecip {

struct AuthPolicy {
  double min_corr = 0.4;
  std::size_t max_shift = 50;  // samples
  std::size_t probe_len = 600;

  void validate() const;
  /// Lag search range used when estimating the shift.
  std::size_t max_lag() const { return probe_len / 3; }
};

using IdentityKey = std::vector<std::uint8_t>;
using AuthTag = std::array<std::uint8_t, 32>;

enum class MessageKind { s1_probe, s2_probe, s3_signed };

struct AuthMessage {
  MessageKind kind = MessageKind::s1_probe;
  std::vector<double> payload_csi;  // S3 only
  AuthTag tag{};                    // S3 only
  double sent_at = 0.0;
};

enum class AuthReason { ok, bad_signature, low_corr, high_shift };
std::string_view to_string(AuthReason r);

struct AuthDecision {
  bool accepted = false;
  double corr = 0.0;
  int shift = 0;  // |estimated lag|, samples
  AuthReason reason = AuthReason::low_corr;
};

/// HMAC-SHA256 over the little-endian IEEE-754 bytes of the payload.
AuthTag sign_csi(std::span<const double> payload, const IdentityKey& key);
AuthMessage make_s3(std::span<const double> csi, const IdentityKey& key, double sent_at = 0.0);
bool verify(const AuthMessage& s3, const IdentityKey& key);

/// AP side of the third message: tag first, then correlation, then shift.
AuthDecision decide(std::span<const double> ap_csi, const AuthMessage& s3, const AuthPolicy& policy,
                    const IdentityKey& key);

/// Full S1/S2/S3 exchange with an honest STA holding `key`.
AuthDecision run_handshake(std::span<const double> ap_csi, std::span<const double> sta_csi,
                           const AuthPolicy& policy, const IdentityKey& key);

/// The attacker replays S1 and the recorded S3; the AP measures `ap_now`
/// through whatever channel the replay actually arrives on.
AuthDecision replay_attack(std::span<const double> recorded_s1, const AuthMessage& recorded_s3,
                           std::span<const double> ap_now, const AuthPolicy& policy,
                           const IdentityKey& key);

struct DecorrelationPoint {
  double gap_s = 0.0;
  double corr = 0.0;
  int shift = 0;
};

/// Correlation and shift between the AP's window and the same channel
/// observed `gap` seconds later, for each gap. cfg.duration_s sets the window.
std::vector<DecorrelationPoint> temporal_decorrelation_curve(const ChannelConfig& cfg,
                                                             const std::vector<double>& gaps,
                                                             std::size_t max_lag);

/// Channel used for simulated handshakes: one probe burst at 10 packets/s.
ChannelConfig auth_channel(const AuthPolicy& policy, std::uint64_t seed);
IdentityKey identity_key(std::uint64_t seed);

struct AuthTrial {
  std::uint64_t seed = 0;
  bool legitimate = true;
  AttackerMode mode = AttackerMode::independent;  // replay trials only
  AuthDecision decision;
};

/// Legitimate trial: concurrent AP/STA probes, honest signature.
AuthTrial legit_trial(const AuthPolicy& policy, std::uint64_t seed);
/// Replay trial: even seeds replay through an independent attacker channel,
/// odd seeds replay the recording `replay_gap_s` later on the same channel.
AuthTrial replay_trial(const AuthPolicy& policy, std::uint64_t seed, double replay_gap_s = 600.0);

struct Confusion {
  std::size_t true_accept = 0;
  std::size_t false_reject = 0;
  std::size_t false_accept = 0;
  std::size_t true_reject = 0;
};

Confusion tally(const std::vector<AuthTrial>& trials);

nlohmann::json to_json(const AuthTrial& t);
nlohmann::json to_json(const Confusion& c);

}  // namespace csirecip
