#include "doctest.h"
#include "fpsim/bus/bus.hpp"
#include "fpsim/core/image.hpp"
#include "fpsim/core/profiles.hpp"

using namespace fpsim;
using namespace fpsim::bus;

namespace {

core::RawFingerprintImage sensor_image(const core::DeviceProfile& p,
                                       std::uint64_t identity) {
  core::RawFingerprintImage img;
  img.width = p.spi.width_px;
  img.height = p.spi.height_px;
  img.bpp = p.spi.bpp;
  core::fill_scene(img, identity, 0);
  img.identity_id = identity;
  img.token_bits = 0x12345678;
  img.style.quality = core::AlignmentQuality::Native;
  img.style.source_sensor = core::fnv32(p.sensor_tag);
  img.style.aligned_to = core::fnv32(p.name);
  core::embed_tag(img);
  return img;
}

const core::DeviceProfile& oneplus() {
  static const auto catalog = core::load_fixture_catalog();
  return core::find_profile(catalog, "OnePlus 7 Pro");
}

const core::DeviceProfile& iphone() {
  static const auto catalog = core::load_fixture_catalog();
  return core::find_profile(catalog, "Apple iPhone SE");
}

}  // namespace

TEST_SUITE_BEGIN("bus");

TEST_CASE("switch pairs map to the four interceptor modes") {
  CHECK(spdt_state(SpdtMode::Listen) == SpdtState{0, 0});
  CHECK(spdt_state(SpdtMode::Eavesdrop) == SpdtState{1, 0});
  CHECK(spdt_state(SpdtMode::Replace) == SpdtState{1, 1});
  CHECK(spdt_state(SpdtMode::Glitch) == SpdtState{0, 1});
}

TEST_CASE("pass-through delivery is byte-identical to the sensor output") {
  const auto& p = oneplus();
  BusSession bus(p, false);
  const auto img = sensor_image(p, 77);
  const auto res = bus.run_fda(1, 1000, [&]() -> const auto& { return img; });
  CHECK(!res.injected);
  CHECK(!res.glitched);
  const auto direct = codec::encode_sample(img, p, 1);
  CHECK(res.delivered.command == direct.command);
  REQUIRE(res.delivered.frames.size() == direct.frames.size());
  for (std::size_t i = 0; i < direct.frames.size(); ++i) {
    CHECK(res.delivered.frames[i].index == direct.frames[i].index);
    CHECK(res.delivered.frames[i].chunk == direct.frames[i].chunk);
  }
  CHECK(res.data_end == res.data_start + p.timing.t1_mean_us);
}

TEST_CASE("plans require attached hardware") {
  BusSession bus(oneplus(), false);
  CHECK_THROWS_AS(bus.set_plan(AttackPlan{}, 0), core::SimError);
  CHECK_THROWS_AS(bus.set_mode(SpdtMode::Eavesdrop, 0), core::SimError);
}

TEST_CASE("switching into the transfer window is too slow") {
  const auto& p = oneplus();
  const auto img = sensor_image(p, 5);
  BusSession bus(p, true);
  AttackPlan plan;
  plan.glitch_at = 1;
  bus.set_plan(plan, 10'000);
  CHECK_THROWS_AS(
      (void)bus.run_fda(1, 10'000 + kSwitchBudgetUs - 1,
                        [&]() -> const auto& { return img; }),
      core::SimError);
  const auto ok = bus.run_fda(1, 10'000 + kSwitchBudgetUs,
                              [&]() -> const auto& { return img; });
  CHECK(ok.glitched);
}

TEST_CASE("glitch kills the transfer at data start") {
  const auto& p = oneplus();
  const auto img = sensor_image(p, 5);
  BusSession bus(p, true);
  AttackPlan plan;
  plan.glitch_at = 2;
  bus.set_plan(plan, 0);

  const auto s1 = bus.run_fda(1, 100'000, [&]() -> const auto& { return img; });
  CHECK(!s1.glitched);
  CHECK(s1.delivered.frames.size() == 4);

  const auto s2 = bus.run_fda(2, 200'000, [&]() -> const auto& { return img; });
  CHECK(s2.glitched);
  CHECK(s2.delivered.frames.empty());
  CHECK(s2.data_end == s2.data_start);
  bool saw_glitch_event = false;
  for (const BusEvent& e : bus.events())
    if (e.line == BusLine::Glitch) saw_glitch_event = true;
  CHECK(saw_glitch_event);
}

TEST_CASE("injection replaces the master's view and eavesdrop keeps the sensor's") {
  const auto& p = oneplus();
  const auto native = sensor_image(p, 1);
  const auto forged = sensor_image(p, 999);
  BusSession bus(p, true);
  AttackPlan plan;
  plan.eavesdrop = true;
  plan.inject[1] = forged;
  bus.set_plan(plan, 0);
  CHECK(bus.state() == spdt_state(SpdtMode::Replace));

  const auto res =
      bus.run_fda(1, 50'000, [&]() -> const auto& { return native; });
  CHECK(res.injected);
  auto dr = codec::decode_sample(res.delivered, p);
  REQUIRE(dr.ok());
  CHECK(dr.image->pixels == forged.pixels);

  REQUIRE(bus.eavesdropped().size() == 1);
  CHECK(bus.eavesdropped()[0].pixels == native.pixels);
  CHECK(bus.eavesdrop_count() == 1);
}

TEST_CASE("crc rewrite corrupts the stream tail without touching timing") {
  const auto& p = oneplus();
  const auto img = sensor_image(p, 3);
  BusSession bus(p, true);
  AttackPlan plan;
  plan.corrupt_crc_at = 1;
  bus.set_plan(plan, 0);
  const auto res = bus.run_fda(1, 50'000, [&]() -> const auto& { return img; });
  CHECK(res.crc_rewritten);
  CHECK(res.data_end == res.data_start + p.timing.t1_mean_us);
  auto dr = codec::decode_sample(res.delivered, p);
  REQUIRE(!dr.ok());
  CHECK(dr.error == core::Errc::CrcMismatch);
  CHECK(dr.error_line == p.spi.height_px - 1);
}

TEST_CASE("sealed channels cannot be forged but can be glitched") {
  const auto& ip = iphone();
  const auto img = sensor_image(ip, 1);
  BusSession bus(ip, true);

  AttackPlan inject;
  inject.inject[1] = img;
  bus.set_plan(inject, 0);
  CHECK_THROWS_AS(
      (void)bus.run_fda(1, 10'000, [&]() -> const auto& { return img; }),
      core::SimError);

  AttackPlan crc;
  crc.corrupt_crc_at = 1;
  bus.set_plan(crc, 20'000);
  CHECK_THROWS_AS(
      (void)bus.run_fda(1, 30'000, [&]() -> const auto& { return img; }),
      core::SimError);

  AttackPlan glitch;
  glitch.glitch_at = 1;
  bus.set_plan(glitch, 40'000);
  const auto res =
      bus.run_fda(1, 50'000, [&]() -> const auto& { return img; });
  CHECK(res.glitched);
}

TEST_CASE("transaction duration covers transfer plus inter-sample gap") {
  const auto& p = oneplus();
  CHECK(transaction_duration(p, 0) == 0);
  CHECK(transaction_duration(p, 1) ==
        p.timing.t1_mean_us + p.timing.t2_mean_us);
  CHECK(transaction_duration(p, 3) ==
        3 * (p.timing.t1_mean_us + p.timing.t2_mean_us));
}

TEST_SUITE_END();
