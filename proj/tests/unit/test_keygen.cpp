#include <doctest.h>

#include <nlohmann/json.hpp>

#include "csirecip/chansim.hpp"
#include "csirecip/error.hpp"
#include "csirecip/keygen.hpp"
#include "fixtures.hpp"

using namespace csirecip;

namespace {

std::vector<double> ramp(std::size_t n, double from = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = from + static_cast<double>(i);
  return v;
}

KeyBlock block_with_errors(std::size_t bits, std::size_t errors, bool flip) {
  KeyBlock b;
  b.bits.assign(bits, 0);
  if (flip)
    for (std::size_t i = 0; i < errors; ++i) b.bits[i * 7 % bits] = 1;
  return b;
}

std::vector<double> channel_series(std::uint64_t seed, double snr_db, std::size_t n_seconds, bool sta = false) {
  ChannelConfig c;
  c.duration_s = static_cast<double>(n_seconds);
  c.snr_db = snr_db;
  c.seed = seed;
  const auto pair = gen_pair(c);
  return magnitude_series(sta ? pair.sta : pair.ap, 6).values;
}

}  // namespace

TEST_CASE("cdf thresholds are interpolated quantiles") {
  const auto q = cdf_thresholds(ramp(100), 4);
  REQUIRE(q.thresholds.size() == 3);
  CHECK(q.thresholds[0] == doctest::Approx(25.75));
  CHECK(q.thresholds[1] == doctest::Approx(50.5));
  CHECK(q.thresholds[2] == doctest::Approx(75.25));
  CHECK(fx::error_of([] { cdf_thresholds(std::vector<double>(100, 2.0)); }) == ErrorCode::DegenerateBlock);
  CHECK(fx::error_of([] { cdf_thresholds(std::vector<double>{1.0, 1.0, 2.0, 2.0, 2.0}); }) == ErrorCode::DegenerateBlock);
  CHECK(fx::error_of([] { cdf_thresholds(std::vector<double>{1.0, 2.0}); }) == ErrorCode::TooShort);
  CHECK(fx::error_of([] { cdf_thresholds(ramp(10), 3); }) == ErrorCode::InvalidParams);
}

TEST_CASE("quantizer levels") {
  QuantizerSpec s{4, {1.0, 2.0, 3.0}};
  CHECK(quantize(std::vector<double>{0.5, 1.0, 1.0001, 2.0, 2.5, 3.0, 9.0}, s) ==
        std::vector<int>{0, 0, 1, 1, 2, 2, 3});

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = fx::white(100, seed);
    const auto lv = quantize(x, cdf_thresholds(x, 4));
    int hist[4] = {0, 0, 0, 0};
    for (int l : lv) ++hist[l];
    for (int h : hist) CHECK(std::abs(h - 25) <= 1);
  }
}

TEST_CASE("gray coding") {
  CHECK(gray_encode({0, 1, 2, 3}, 4) == BitVector{0, 0, 0, 1, 1, 1, 1, 0});
  std::vector<int> lv(8);
  for (int i = 0; i < 8; ++i) lv[static_cast<std::size_t>(i)] = i;
  const auto bits = gray_encode(lv, 8);
  REQUIRE(bits.size() == 24);
  for (int k = 0; k < 8; ++k) {
    const int g = k ^ (k >> 1);
    for (int b = 0; b < 3; ++b) CHECK(bits[static_cast<std::size_t>(3 * k + b)] == ((g >> (2 - b)) & 1));
  }
  // neighbouring levels differ in exactly one bit
  for (int k = 0; k + 1 < 8; ++k) {
    int d = 0;
    for (int b = 0; b < 3; ++b) d += bits[static_cast<std::size_t>(3 * k + b)] != bits[static_cast<std::size_t>(3 * (k + 1) + b)];
    CHECK(d == 1);
  }
  CHECK(bits_per_level(16) == 4);
  CHECK(fx::error_of([] { gray_encode({4}, 4); }) == ErrorCode::LevelOutOfRange);
}

TEST_CASE("key blocks") {
  const auto keys = make_keys(fx::white(250, 3), 100, 4);
  REQUIRE(keys.blocks.size() == 2);
  CHECK(keys.blocks[0].start == 0);
  CHECK(keys.blocks[1].start == 100);
  for (const auto& b : keys.blocks) CHECK(b.bits.size() == 200);

  auto x = fx::white(300, 4);
  std::fill(x.begin() + 100, x.begin() + 200, 1.0);
  const auto gapped = make_keys(x, 100, 4, ThresholdScope::per_block, 1000);
  CHECK(gapped.skipped == 1);
  REQUIRE(gapped.blocks.size() == 2);
  CHECK(gapped.blocks[1].start == 1200);
  CHECK(fx::error_of([] { make_keys(fx::white(50, 1), 100); }) == ErrorCode::TooShort);
}

TEST_CASE("threshold evaluation") {
  std::vector<KeyBlock> a, b;
  for (std::size_t e : {3, 10, 25}) {
    a.push_back(block_with_errors(200, e, false));
    b.push_back(block_with_errors(200, e, true));
  }
  const auto r = evaluate(a, b, 1000, {5, 15, 30});
  CHECK(r.key_bits == 200);
  CHECK(r.overall_ber.value() == doctest::Approx(38.0 / 600.0));
  const auto& t15 = r.at(15);
  CHECK(t15.accepted == 2);
  CHECK(t15.attempted == 3);
  CHECK(t15.kgr == doctest::Approx(0.4));
  CHECK(t15.mean_ber.value() == doctest::Approx(13.0 / 400.0));
  CHECK(r.at(5).accepted == 1);
  CHECK(r.at(30).accepted == 3);
  CHECK_FALSE(evaluate(a, b, 1000, {1}).at(1).mean_ber.has_value());
  CHECK(fx::error_of([&] { r.at(7); }) == ErrorCode::InvalidParams);
  a.pop_back();
  CHECK(fx::error_of([&] { evaluate(a, b, 1000, {5}); }) == ErrorCode::ListMismatch);
}

TEST_CASE("block matching keeps common starts") {
  KeyList a, b;
  for (std::size_t s : {0, 100, 300}) a.blocks.push_back(KeyBlock{s, {}, {}});
  for (std::size_t s : {100, 200, 300}) b.blocks.push_back(KeyBlock{s, {}, {}});
  const auto [ma, mb] = match_blocks(a, b);
  REQUIRE(ma.size() == 2);
  CHECK(ma[0].start == 100);
  CHECK(mb[1].start == 300);
}

TEST_CASE("session on identical series agrees everywhere") {
  const auto x = channel_series(5, 20.0, 900);
  for (auto pipe : all_pipelines()) {
    SessionConfig cfg;
    cfg.pipeline = pipe;
    const auto r = wskg_session(x, x, cfg, 10.0);
    INFO(to_string(pipe));
    CHECK(r.overall_ber.value() == 0.0);
    CHECK(r.lag == 0);
    CHECK(r.at(5).accepted == r.at(5).attempted);
    CHECK(r.at(5).attempted > 0);
    CHECK(r.pearson_processed.value() == doctest::Approx(1.0));
  }
}

TEST_CASE("acceptance grows with the error threshold") {
  SessionConfig cfg;
  cfg.thresholds = {0, 5, 10, 15, 20, 40, 80};
  const auto a = channel_series(6, 10.0, 1200), b = channel_series(6, 10.0, 1200, true);
  const auto r = wskg_session(a, b, cfg, 10.0);
  for (std::size_t i = 1; i < r.thresholds.size(); ++i) {
    CHECK(r.thresholds[i].accepted >= r.thresholds[i - 1].accepted);
    CHECK(r.thresholds[i].kgr >= r.thresholds[i - 1].kgr);
  }
}

TEST_CASE("independent inputs give coin-flip keys") {
  for (auto pipe : {Pipeline::raw, Pipeline::golay, Pipeline::wt}) {
    SessionConfig cfg;
    cfg.pipeline = pipe;
    cfg.sync = false;
    const auto r = wskg_session(fx::ar1(20000, 7, 0.98), fx::ar1(20000, 8, 0.98), cfg, 10.0);
    INFO(to_string(pipe));
    CHECK(r.overall_ber.value() == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("sessions are deterministic and validate their config") {
  const auto a = channel_series(9, 10.0, 600), b = channel_series(9, 10.0, 600, true);
  SessionConfig cfg;
  CHECK(to_json(wskg_session(a, b, cfg, 10.0)).dump() == to_json(wskg_session(a, b, cfg, 10.0)).dump());

  auto gappy = a;
  gappy[100] = std::numeric_limits<double>::quiet_NaN();
  CHECK(fx::error_of([&] { wskg_session(gappy, b, cfg, 10.0); }) == ErrorCode::GapsPresent);
  CHECK(fx::error_of([&] { wskg_session(a, std::vector<double>(b.begin(), b.end() - 1), cfg, 10.0); }) ==
        ErrorCode::LengthMismatch);
  cfg.levels = 3;
  CHECK(fx::error_of([&] { wskg_session(a, b, cfg, 10.0); }).has_value());
  cfg = {};
  cfg.thresholds = {20, 5};
  CHECK(fx::error_of([&] { wskg_session(a, b, cfg, 10.0); }) == ErrorCode::InvalidConfig);
  CHECK(fx::error_of([] { pipeline_from_string("nope"); }) == ErrorCode::InvalidConfig);
  for (auto p : all_pipelines()) CHECK(pipeline_from_string(to_string(p)) == p);
}
