// End-to-end acceptance gate. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails. Tolerances are pinned here.
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fpsim/analytics/analytics.hpp"
#include "fpsim/attacks/campaigns.hpp"
#include "fpsim/attacks/dictionary.hpp"
#include "fpsim/codec/codec.hpp"
#include "fpsim/core/image.hpp"
#include "fpsim/core/profiles.hpp"
#include "fpsim/engine/device_sim.hpp"

using namespace fpsim;
using engine::DeviceSim;

namespace {

constexpr double kAnchorTol = 1e-4;    // closed-form acceptance probability
constexpr double kMonteCarloTol = 0.015;  // |p_hat - analytic|, 10^4 runs
constexpr double kExpectedTimeTol = 0.01;  // relative, unlock-time endpoints
constexpr double kSpoofRateTol = 0.03;     // pooled epoch-80 acceptance rate

const std::vector<core::DeviceProfile>& catalog() {
  static const auto c = core::load_fixture_catalog();
  return c;
}

std::vector<const core::DeviceProfile*> cancel_fixtures() {
  std::vector<const core::DeviceProfile*> out;
  for (const auto& p : catalog())
    if (p.error_cancel_supported && !p.encrypted_channel) out.push_back(&p);
  return out;
}

std::vector<const core::DeviceProfile*> decodable_fixtures() {
  std::vector<const core::DeviceProfile*> out;
  for (const auto& p : catalog())
    if (!p.encrypted_channel) out.push_back(&p);
  return out;
}

struct Failure {
  std::string detail;
};

#define REQUIRE_MSG(cond, msg)                        \
  do {                                                \
    if (!(cond)) {                                    \
      std::ostringstream os__;                        \
      os__ << msg;                                    \
      throw Failure{os__.str()};                      \
    }                                                 \
  } while (0)

core::RawFingerprintImage random_image(const core::DeviceProfile& p,
                                       std::mt19937& gen) {
  core::RawFingerprintImage img;
  img.width = p.spi.width_px;
  img.height = p.spi.height_px;
  img.bpp = p.spi.bpp;
  const std::uint32_t maxv = (1u << p.spi.bpp) - 1u;
  img.pixels.resize(img.pixel_count());
  for (auto& px : img.pixels)
    px = static_cast<std::uint16_t>(gen() & maxv);
  return img;
}

attacks::CampaignReport survey_campaign(const core::DeviceProfile& p,
                                        bool mitigation) {
  DeviceSim::Config dc;
  dc.seed = 101;
  dc.adversary_attached = true;
  dc.mitigation = mitigation;
  DeviceSim dev(p, dc);
  dev.enroll(1);

  attacks::SyntheticConfig scfg;
  scfg.count = 4096;  // impostor-only, wraps as needed
  scfg.quality = core::AlignmentQuality::Epoch80;
  scfg.source_tag = "survey-lab";
  attacks::SyntheticDictionary dict(p, scfg, core::SeedSource(101));

  attacks::CamfConfig cfg;
  cfg.inject_per_attempt = 1;
  cfg.continue_after_unlock = true;
  cfg.budget.max_attempts = 10000;
  cfg.log_cap = 4;
  return attacks::run_camf_bruteforce(dev, dict, cfg);
}

// 1. Canceled attempts never reach the fail accounting, at scale.
std::string check_unlimited_bypass() {
  const auto fixtures = cancel_fixtures();
  REQUIRE_MSG(fixtures.size() == 6,
              "expected 6 cancel-capable fixtures, found " << fixtures.size());
  std::uint64_t total = 0;
  for (const auto* p : fixtures) {
    const auto r = survey_campaign(*p, false);
    REQUIRE_MSG(r.attempts == 10000,
                p->name << ": ran " << r.attempts << " of 10000 attempts");
    REQUIRE_MSG(r.failed_attempts == 0,
                p->name << ": " << r.failed_attempts << " counted failures");
    REQUIRE_MSG(r.lockout_mode == "none",
                p->name << ": lockout mode " << r.lockout_mode);
    REQUIRE_MSG(r.rejected == 0, p->name << ": " << r.rejected
                                         << " rejected presses");
    total += r.attempts;
  }
  std::ostringstream os;
  os << total << " attempts over " << fixtures.size()
     << " devices, 0 counted failures, lockout never engaged";
  return os.str();
}

// 2. Honest failures walk the documented lockout cadence exactly.
std::string check_lockout_cadence() {
  for (const auto& p : catalog()) {
    REQUIRE_MSG(p.timed_lockout_us == 30'000'000,
                p.name << ": timed lockout is not 30s");
    const int limit = static_cast<int>(*p.screenlock.attempt_limit);
    const int x = static_cast<int>(*p.screenlock.lockout_periods);

    DeviceSim dev(p, DeviceSim::Config{});
    dev.enroll(1);
    core::Micros now = 0;
    for (int period = 1; period <= x; ++period) {
      core::Micros last_end = 0;
      for (int i = 0; i < limit; ++i) {
        const auto rec = dev.attempt_blank(core::AppId::ScreenLock, now);
        REQUIRE_MSG(rec.evaluated && !rec.pseudo,
                    p.name << ": press not admitted at t=" << now);
        REQUIRE_MSG(rec.outcome.kind == engine::AttemptKind::Failed,
                    p.name << ": blank press did not count as a failure");
        last_end = rec.outcome.end_at;
        now = last_end;
      }
      const auto& c = dev.lockout().counter(core::AppId::ScreenLock);
      REQUIRE_MSG(c.mode == policy::LockoutMode::Timed,
                  p.name << ": period " << period << " did not enter timed");
      REQUIRE_MSG(c.timed_until == last_end + 30'000'000,
                  p.name << ": window is " << (c.timed_until - last_end)
                         << "us, not 30s");
      REQUIRE_MSG(c.failed_attempts == period * limit,
                  p.name << ": counter " << c.failed_attempts);
      REQUIRE_MSG(c.escalate_on_expiry == (period == x),
                  p.name << ": escalation armed at period " << period);

      // Inside the window nothing is plainly admitted.
      const auto probe = dev.attempt_blank(core::AppId::ScreenLock,
                                           c.timed_until - 1);
      REQUIRE_MSG(probe.rejected || probe.pseudo,
                  p.name << ": in-window press was plainly admitted");
      now = dev.lockout().counter(core::AppId::ScreenLock).timed_until;
    }
    const auto final_rec = dev.attempt_blank(core::AppId::ScreenLock, now);
    REQUIRE_MSG(final_rec.rejected &&
                    final_rec.mode_after == policy::LockoutMode::Permanent,
                p.name << ": no permanent lockout after " << x << " periods");
  }
  std::ostringstream os;
  os << catalog().size()
     << " devices: 30s windows exact, permanent after their period budget";
  return os.str();
}

// 3. Inference-during-lockout attempt arithmetic on the no-cancel fixture.
std::string check_lockout_inference_arithmetic() {
  const auto& p = core::find_profile(catalog(), "Huawei Mate30 Pro 5G");
  DeviceSim::Config dc;
  dc.seed = 1;
  dc.adversary_attached = true;
  DeviceSim dev(p, dc);
  dev.enroll(1);
  attacks::SyntheticConfig scfg;
  scfg.count = 64;
  scfg.quality = core::AlignmentQuality::Epoch80;
  scfg.source_tag = "lab-optical";
  attacks::SyntheticDictionary dict(p, scfg, core::SeedSource(1));
  attacks::MalConfig cfg;
  cfg.budget.horizon_us = 200'000'000;
  const auto r = attacks::run_mal_inference(dev, dict, cfg);

  REQUIRE_MSG(r.valid_inference_attempts == 90,
              r.valid_inference_attempts << " in-window attempts, wanted 90");
  REQUIRE_MSG(r.available_attempts >= 110 && r.available_attempts == 110,
              r.available_attempts << " available attempts, wanted 110");
  REQUIRE_MSG(r.images_injected >= 220 && r.images_injected == 220,
              r.images_injected << " images submitted, wanted 220");
  REQUIRE_MSG(r.outcome == "blocked" && r.blocked_reason == "lockout_permanent",
              "campaign ended " << r.outcome << "/" << r.blocked_reason);
  std::ostringstream os;
  os << "90 in-window inference attempts, 110 total admitted, 220 images, "
        "then permanent lockout";
  return os.str();
}

// 4. Home-button semantics and the sealed channel.
std::string check_touchid_and_sealed_channel() {
  const auto& se = core::find_profile(catalog(), "Apple iPhone SE");

  // Probe cadence: exactly 15 submissions reach the sensor before the
  // passcode wall (5 counted fails, 10 canceled probes in between).
  {
    DeviceSim dev(se, DeviceSim::Config{});
    dev.enroll(1);
    attacks::TouchIdConfig cfg;
    cfg.probes = {9001};
    cfg.camf_per_cycle = 2;
    cfg.budget.max_attempts = 100;
    const auto r = attacks::run_touchid_sequence(dev, cfg);
    REQUIRE_MSG(r.outcome == "blocked" &&
                    r.blocked_reason == "passcode_required",
                "probe run ended " << r.outcome << "/" << r.blocked_reason);
    REQUIRE_MSG(r.probes_submitted == 15,
                r.probes_submitted << " probes submitted, wanted 15");
    REQUIRE_MSG(r.counted_fails == 5, r.counted_fails << " counted fails");
  }

  // Lazy threshold: the third consecutive cancel parks the sensor, a waking
  // press clears it without evaluating.
  {
    policy::TouchIdState st;
    policy::TouchIdPress cancel;
    cancel.glitched = true;
    cancel.sleeping = true;
    for (int i = 1; i <= 2; ++i) {
      const auto out = policy::touchid_record(st, cancel);
      REQUIRE_MSG(out.canceled && !st.lazy, "lazy tripped at cancel " << i);
    }
    const auto third = policy::touchid_record(st, cancel);
    REQUIRE_MSG(third.canceled && st.lazy, "third cancel did not park sensor");
    const auto ignored = policy::touchid_record(st, cancel);
    REQUIRE_MSG(!ignored.evaluated, "lazy sensor still evaluated a press");
    policy::TouchIdPress wake;
    wake.wake = true;
    const auto woke = policy::touchid_record(st, wake);
    REQUIRE_MSG(woke.woke_sensor && !woke.evaluated && !st.lazy,
                "waking press did not clear lazy status");
  }

  // Sealed channel: the wire payload is opaque to both hijack and decode.
  for (const char* name : {"Apple iPhone SE", "Apple iPhone 7"}) {
    const auto& p = core::find_profile(catalog(), name);
    core::RawFingerprintImage img;
    img.width = p.spi.width_px;
    img.height = p.spi.height_px;
    img.bpp = p.spi.bpp;
    core::fill_scene(img, 5, 0);
    const auto tx = codec::encode_sample(img, p, 1);
    const auto dr = codec::decode_sample(tx, p);
    REQUIRE_MSG(!dr.ok() && dr.error == core::Errc::ChannelOpaque,
                name << ": eavesdropped decode did not come back opaque");

    DeviceSim::Config dc;
    dc.adversary_attached = true;
    {
      DeviceSim dev(p, dc);
      dev.enroll(1);
      bool threw = false;
      try {
        bus::AttackPlan plan;
        plan.inject[1] = img;
        dev.bus().set_plan(plan, 0);
        (void)dev.attempt_native(core::AppId::ScreenLock, 1, 0);
      } catch (const core::SimError& e) {
        threw = e.code() == core::Errc::ChannelOpaque;
      }
      REQUIRE_MSG(threw, name << ": injection was not refused as opaque");
    }
    {
      DeviceSim dev(p, dc);
      dev.enroll(1);
      bus::AttackPlan glitch;
      glitch.glitch_at = 1;
      dev.bus().set_plan(glitch, 0);
      const auto rec = dev.attempt_native(core::AppId::ScreenLock, 1, 0);
      REQUIRE_MSG(rec.outcome.kind == engine::AttemptKind::Canceled,
                  name << ": electrical glitch should still cancel");
    }
  }
  return "15-probe passcode wall, lazy threshold at 3 cancels, sealed "
         "channel opaque to inject and decode";
}

// 5. Wire codec: lossless round trips, every bit flip detected.
std::string check_codec_soundness() {
  const auto fixtures = decodable_fixtures();
  REQUIRE_MSG(fixtures.size() == 8,
              "expected 8 decodable fixtures, found " << fixtures.size());
  std::mt19937 gen(5);

  int round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto& p = *fixtures[static_cast<std::size_t>(i) % fixtures.size()];
    const int sample = 1 + i % p.max_samples;
    const auto img = random_image(p, gen);
    const auto tx = codec::encode_sample(img, p, sample);
    const auto dr = codec::decode_sample(tx, p);
    REQUIRE_MSG(dr.ok(), p.name << ": round trip " << i << " failed to decode");
    REQUIRE_MSG(dr.image->pixels == img.pixels &&
                    dr.image->width == img.width &&
                    dr.image->height == img.height &&
                    dr.image->bpp == img.bpp,
                p.name << ": round trip " << i << " was lossy");
    ++round_trips;
  }

  int flips = 0;
  for (const auto* p : fixtures) {
    const auto img = random_image(*p, gen);
    const auto tx = codec::encode_sample(img, *p, 1);
    const std::size_t bits = codec::line_stream_size(p->spi) * 8;
    for (int j = 0; j < 1250; ++j) {
      auto corrupted = tx;
      const std::size_t bit = gen() % bits;
      const int row = codec::flip_payload_bit(corrupted, p->spi, bit);
      const auto dr = codec::decode_sample(corrupted, *p);
      REQUIRE_MSG(!dr.ok() && dr.error == core::Errc::CrcMismatch,
                  p->name << ": flipped bit " << bit << " went undetected");
      REQUIRE_MSG(dr.error_line == row,
                  p->name << ": flip in row " << row << " reported as row "
                          << dr.error_line);
      ++flips;
    }
  }

  const auto& oneplus = core::find_profile(catalog(), "OnePlus 7 Pro").spi;
  REQUIRE_MSG(codec::frames_for_sample(oneplus, 1) == 4,
              "first-sample frame count is not 4");
  REQUIRE_MSG(codec::frames_for_sample(oneplus, 2) == 13 &&
                  codec::frames_for_sample(oneplus, 4) == 13,
              "later-sample frame count is not 13");
  std::ostringstream os;
  os << round_trips << " lossless round trips, " << flips
     << "/" << flips << " bit flips detected, frame split 4/13";
  return os.str();
}

// 6. Closed-form success probability against seeded simulation.
std::string check_success_probability() {
  const double analytic =
      analytics::success_rate({1.0, 1.0 / 50000.0, 1.0, 50000.0});
  REQUIRE_MSG(std::fabs(analytic - 0.6321) < kAnchorTol,
              "analytic anchor " << analytic);

  analytics::MonteCarloConfig cfg;
  cfg.runs = 10000;
  cfg.horizon_attempts = 50000;
  cfg.inject_per_attempt = 1;
  cfg.enrolled_templates = 1;
  cfg.quality = core::AlignmentQuality::Native;
  cfg.seed = 42;
  const auto res = analytics::monte_carlo_success(
      core::find_profile(catalog(), "OnePlus 7 Pro"), cfg);
  REQUIRE_MSG(std::fabs(res.analytic - analytic) < 1e-12,
              "catalog far does not reproduce the anchor parameters");
  REQUIRE_MSG(std::fabs(res.p_hat - res.analytic) < kMonteCarloTol,
              "monte carlo " << res.p_hat << " vs analytic " << res.analytic);

  const double h1 = analytics::expected_unlock_seconds(1, 1.0 / 50000, 1) / 3600;
  const double h5 = analytics::expected_unlock_seconds(5, 1.0 / 50000, 1) / 3600;
  REQUIRE_MSG(std::fabs(h1 - 13.9) / 13.9 < kExpectedTimeTol,
              "single-template expected unlock " << h1 << "h");
  REQUIRE_MSG(std::fabs(h5 - 2.78) / 2.78 < kExpectedTimeTol,
              "five-template expected unlock " << h5 << "h");
  std::ostringstream os;
  os.precision(4);
  os << "anchor " << analytic << ", monte carlo " << res.p_hat
     << " over 10000 runs, expected unlock 13.9h/2.78h";
  return os.str();
}

// 7. Attempt wall time equals the simulated bus timeline, to the microsecond.
std::string check_attempt_time_formula() {
  const auto base = core::find_profile(catalog(), "OnePlus 7 Pro");
  std::mt19937 gen(7);
  auto draw = [&](core::Micros lo, core::Micros hi) {
    return std::uniform_int_distribution<core::Micros>(lo, hi)(gen);
  };
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    core::DeviceProfile p = base;
    p.timing.t0_us = draw(500, 120'000);
    p.timing.t1_mean_us = draw(5'000, 90'000);
    p.timing.t2_mean_us = draw(1'000, 50'000);
    p.timing.t3_us = draw(1'000, 60'000);
    p.timing.d_us = draw(50'000, 1'500'000);
    for (int n = 1; n <= p.max_samples; ++n) {
      DeviceSim::Config dc;
      dc.seed = 7000 + static_cast<std::uint64_t>(i);
      dc.adversary_attached = true;
      DeviceSim dev(p, dc);
      dev.enroll(1);
      bus::AttackPlan plan;
      plan.corrupt_crc_at = n;  // full transfer of sample n, then the kill
      dev.bus().set_plan(plan, 0);
      const auto rec = dev.attempt_blank(core::AppId::ScreenLock, 0);
      REQUIRE_MSG(rec.evaluated, "press rejected unexpectedly");
      REQUIRE_MSG(rec.outcome.completed_samples == n,
                  "wanted " << n << " completed samples, saw "
                            << rec.outcome.completed_samples);
      const core::Micros expect = analytics::attempt_time_us(p.timing, n);
      REQUIRE_MSG(rec.outcome.end_at - rec.outcome.press_at == expect,
                  "profile " << i << " n=" << n << ": timeline "
                             << rec.outcome.end_at - rec.outcome.press_at
                             << "us vs formula " << expect << "us");
      ++checked;
    }
  }
  std::ostringstream os;
  os << checked << " (timing profile, sample count) pairs exact";
  return os.str();
}

// 8. Spoof acceptance and liveness of the epoch-80 alignment level,
// measured through full campaigns: per seed a 1200-entry dictionary with 200
// entries minted for the enrolled identity and 1000 impostors.
std::string check_spoof_table() {
  const auto& p = core::find_profile(catalog(), "OnePlus 7 Pro");

  std::uint64_t matched = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DeviceSim::Config dc;
    dc.seed = seed;
    dc.adversary_attached = true;
    DeviceSim dev(p, dc);
    dev.enroll(1);

    attacks::SyntheticConfig scfg;
    scfg.count = 1200;
    scfg.quality = core::AlignmentQuality::Epoch80;
    scfg.source_tag = "lab-optical";
    for (std::size_t i = 0; i < 200; ++i) scfg.identity_overrides[i] = 1;
    attacks::SyntheticDictionary dict(p, scfg, core::SeedSource(seed));

    attacks::CamfConfig cfg;
    cfg.continue_after_unlock = true;
    cfg.wrap = false;
    cfg.budget.max_attempts = 1200;
    cfg.log_cap = 0;
    const auto r = attacks::run_camf_bruteforce(dev, dict, cfg);
    REQUIRE_MSG(r.attempts == 1200,
                "seed " << seed << ": ran " << r.attempts << " of 1200");
    REQUIRE_MSG(r.liveness_errors == 0,
                "seed " << seed << ": " << r.liveness_errors
                        << " aligned entries tripped liveness, wanted 0/1000");
    REQUIRE_MSG(r.failed_attempts == 0,
                "seed " << seed << ": counted failures leaked through");
    matched += r.unlocks;
  }
  const double rate = static_cast<double>(matched) / (50.0 * 200.0);
  REQUIRE_MSG(std::fabs(rate - 0.71) <= kSpoofRateTol,
              "pooled match rate " << rate << " not within 0.71 +/- "
                                   << kSpoofRateTol);

  DeviceSim::Config dc;
  dc.seed = 99;
  dc.adversary_attached = true;
  DeviceSim dev(p, dc);
  dev.enroll(1);
  attacks::SyntheticConfig ucfg;
  ucfg.count = 1000;
  ucfg.quality = core::AlignmentQuality::None;
  ucfg.source_tag = "lab-optical";
  attacks::SyntheticDictionary unaligned(p, ucfg, core::SeedSource(99));
  attacks::CamfConfig cfg;
  cfg.continue_after_unlock = true;
  cfg.wrap = false;
  cfg.budget.max_attempts = 1000;
  cfg.log_cap = 0;
  const auto r = attacks::run_camf_bruteforce(dev, unaligned, cfg);
  REQUIRE_MSG(r.attempts == 1000 && r.liveness_errors == 1000,
              r.liveness_errors << "/1000 unaligned entries rejected");
  REQUIRE_MSG(r.unlocks == 0, "an unaligned entry unlocked the device");

  std::ostringstream os;
  os.precision(4);
  os << "match rate " << rate << " over 50 seeds, 0 liveness errors aligned, "
        "1000/1000 unaligned rejected";
  return os.str();
}

// 9. The cancel-counting gate stops the bypass without touching honest use.
std::string check_mitigation() {
  for (const auto* p : cancel_fixtures()) {
    const auto r = survey_campaign(*p, true);
    REQUIRE_MSG(r.outcome == "blocked" && r.blocked_reason == "mitigation",
                p->name << ": mitigated campaign ended " << r.outcome);
    REQUIRE_MSG(r.unlocks == 0,
                p->name << ": " << r.unlocks << " unlocks under mitigation");
  }

  std::uint64_t honest_unlocks = 0;
  const auto fixtures = cancel_fixtures();
  const std::uint64_t share = 1000 / fixtures.size();
  std::uint64_t remaining = 1000;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const std::uint64_t count =
        i + 1 == fixtures.size() ? remaining : share;
    remaining -= count;
    DeviceSim::Config dc;
    dc.seed = 909;
    dc.mitigation = true;
    DeviceSim dev(*fixtures[i], dc);
    dev.enroll(1);
    attacks::HonestConfig cfg;
    cfg.identity = 1;
    cfg.count = count;
    const auto r = attacks::run_honest_attempts(dev, cfg);
    REQUIRE_MSG(r.unlocks == count,
                fixtures[i]->name << ": " << r.unlocks << "/" << count
                                  << " honest unlocks under mitigation");
    REQUIRE_MSG(r.failed_attempts == 0,
                fixtures[i]->name << ": honest use left a fail count");
    honest_unlocks += r.unlocks;
  }
  REQUIRE_MSG(honest_unlocks == 1000, "honest unlock total " << honest_unlocks);
  std::ostringstream os;
  os << cancel_fixtures().size()
     << " campaigns blocked with 0 unlocks, 1000/1000 honest attempts unlocked";
  return os.str();
}

// 10. One screen-lock success re-opens shared-counter apps, never dedicated.
std::string check_shared_counter_reset() {
  int shared_reopened = 0;
  int dedicated_held = 0;
  for (const auto& p : catalog()) {
    DeviceSim dev(p, DeviceSim::Config{.seed = 10});
    dev.enroll(1);
    const auto payment = core::AppId::Payment;
    core::Micros now = 0;

    if (p.payment.dedicated_enrollment) {
      // Drive the dedicated counter to its limit; a screen-lock success
      // cannot reach it.
      const int limit = static_cast<int>(*p.payment.attempt_limit);
      for (int i = 0; i < limit; ++i) {
        const auto rec = dev.attempt_blank(payment, now);
        REQUIRE_MSG(rec.evaluated, p.name << ": payment press rejected early");
        now = rec.outcome.end_at;
      }
      REQUIRE_MSG(dev.lockout().counter(payment).mode ==
                      policy::LockoutMode::Timed,
                  p.name << ": payment limit did not lock");
      const auto unlock = dev.attempt_native(core::AppId::ScreenLock, 1, now);
      REQUIRE_MSG(unlock.unlocked, p.name << ": screen-lock press no unlock");
      const auto held = dev.attempt_blank(payment, unlock.outcome.end_at);
      REQUIRE_MSG(held.rejected,
                  p.name << ": dedicated app admitted a press after the "
                            "screen-lock success");
      ++dedicated_held;
      continue;
    }

    if (!p.payment.attempt_limit) {
      // Unlimited payment attempts never lock in the first place.
      for (int i = 0; i < 12; ++i) {
        const auto rec = dev.attempt_blank(payment, now);
        REQUIRE_MSG(rec.evaluated && !rec.rejected,
                    p.name << ": unlimited payment press rejected");
        now = rec.outcome.end_at;
      }
      REQUIRE_MSG(dev.lockout().counter(payment).mode ==
                      policy::LockoutMode::None,
                  p.name << ": unlimited payment app locked out");
      ++shared_reopened;
      continue;
    }

    const int limit = static_cast<int>(*p.payment.attempt_limit);
    const int screen_x = static_cast<int>(*p.screenlock.lockout_periods);
    if (screen_x >= 2) {
      // Full flow: lock payment, wait the window out, one screen-lock
      // success, payment immediately admitted again.
      for (int i = 0; i < limit; ++i) {
        const auto rec = dev.attempt_blank(payment, now);
        REQUIRE_MSG(rec.evaluated, p.name << ": payment press rejected early");
        now = rec.outcome.end_at;
      }
      const auto& c = dev.lockout().counter(payment);
      REQUIRE_MSG(c.mode == policy::LockoutMode::Timed,
                  p.name << ": payment limit did not lock");
      const auto during = dev.attempt_blank(payment, c.timed_until - 1);
      REQUIRE_MSG(during.rejected, p.name << ": payment admitted in-window");
      const auto unlock = dev.attempt_native(core::AppId::ScreenLock, 1,
                                             c.timed_until);
      REQUIRE_MSG(unlock.unlocked && !unlock.pseudo,
                  p.name << ": screen-lock press did not plainly unlock");
      const auto reopened = dev.attempt_blank(payment, unlock.outcome.end_at);
      REQUIRE_MSG(reopened.evaluated && !reopened.rejected &&
                      reopened.failed_attempts_after == 1,
                  p.name << ": payment not re-enabled after the unlock");
    } else {
      // Single-period devices go permanent at the first window's end, so
      // exhaust all but the last attempt, reset via success, then verify the
      // full budget is available again.
      for (int i = 0; i < limit - 1; ++i) {
        const auto rec = dev.attempt_blank(payment, now);
        REQUIRE_MSG(rec.evaluated, p.name << ": payment press rejected early");
        now = rec.outcome.end_at;
      }
      const auto unlock = dev.attempt_native(core::AppId::ScreenLock, 1, now);
      REQUIRE_MSG(unlock.unlocked, p.name << ": screen-lock press no unlock");
      now = unlock.outcome.end_at;
      for (int i = 1; i <= limit; ++i) {
        const auto rec = dev.attempt_blank(payment, now);
        REQUIRE_MSG(rec.evaluated && !rec.rejected,
                    p.name << ": refreshed budget refused press " << i);
        REQUIRE_MSG(rec.failed_attempts_after == i,
                    p.name << ": counter did not restart from zero");
        now = rec.outcome.end_at;
      }
      REQUIRE_MSG(dev.lockout().counter(payment).mode ==
                      policy::LockoutMode::Timed,
                  p.name << ": refreshed budget never re-locked");
    }
    ++shared_reopened;
  }
  std::ostringstream os;
  os << shared_reopened << " shared-counter devices re-enabled, "
     << dedicated_held << " dedicated app held its lockout";
  return os.str();
}

struct Criterion {
  int id;
  const char* name;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "cancel-kill keeps fail counters untouched", check_unlimited_bypass},
      {2, "timed and permanent lockout cadence", check_lockout_cadence},
      {3, "pseudo-lockout inference arithmetic",
       check_lockout_inference_arithmetic},
      {4, "home-button semantics and sealed channel",
       check_touchid_and_sealed_channel},
      {5, "wire codec round trips and corruption detection",
       check_codec_soundness},
      {6, "closed-form success rate vs seeded runs", check_success_probability},
      {7, "attempt wall-time formula vs bus timeline",
       check_attempt_time_formula},
      {8, "style-aligned spoof acceptance and liveness", check_spoof_table},
      {9, "cancel-counting gate blocks the bypass, honest use unaffected",
       check_mitigation},
      {10, "screen-lock success re-opens shared counters only",
       check_shared_counter_reset},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("unexpected error: ") + e.what();
    }
    std::printf("%s %2d. %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.name,
                detail.c_str());
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d of 10 acceptance checks failed\n", failures);
  return failures ? 1 : 0;
}
