#include "fpsim/engine/device_sim.hpp"

#include "fpsim/core/image.hpp"

namespace fpsim::engine {

namespace {
constexpr core::StreamId kSensorToken = core::stream_id("sensor.token");
}

DeviceSim::DeviceSim(core::DeviceProfile profile, const Config& cfg)
    : profile_(std::move(profile)),
      seeds_(cfg.seed),
      bus_(profile_, cfg.adversary_attached),
      lockout_(profile_),
      fpn_(core::fpn_base(profile_)),
      blank_(core::blank_press(profile_)),
      mitigation_(cfg.mitigation) {}

void DeviceSim::enroll(std::uint64_t identity) {
  enrolled_.enroll(identity, profile_);
}

const core::RawFingerprintImage& DeviceSim::acquire_native(
    std::uint64_t identity) {
  core::RawFingerprintImage img;
  img.width = profile_.spi.width_px;
  img.height = profile_.spi.height_px;
  img.bpp = profile_.spi.bpp;
  img.pixels.resize(img.pixel_count());
  core::fill_scene(img, identity, acq_counter_);
  img.style.source_sensor = core::fnv32(profile_.sensor_tag);
  img.style.aligned_to = 0;
  img.style.quality = core::AlignmentQuality::Native;
  img.identity_id = identity;
  img.token_bits = static_cast<std::uint32_t>(
      seeds_.bits(kSensorToken, identity, acq_counter_));
  core::embed_tag(img);
  core::add_base(img, fpn_);
  ++acq_counter_;
  native_scratch_ = std::move(img);
  return native_scratch_;
}

AttemptRecord DeviceSim::attempt(core::AppId app, const ImageSource& source,
                                 core::Micros press_at) {
  AttemptRecord rec;
  rec.index = attempt_index_++;
  rec.app = app;
  rec.press_at = press_at;

  if (press_at - last_unlock_ > profile_.idle_timeout_us) {
    rec.rejected = true;
    rec.reject_reason = "idle timeout, primary authentication required";
    rec.mode_after = lockout_.counter(app).mode;
    rec.failed_attempts_after = lockout_.counter(app).failed_attempts;
    return rec;
  }

  const policy::GateDecision gate = lockout_.start_authentication(app, press_at);
  if (gate.gate == policy::AuthGate::Rejected) {
    rec.rejected = true;
    rec.reject_reason = gate.reason;
    rec.mode_after = gate.mode;
    rec.retry_at = gate.retry_at;
    rec.failed_attempts_after = lockout_.counter(app).failed_attempts;
    return rec;
  }
  rec.pseudo = gate.gate == policy::AuthGate::ProceedPseudoLockout;
  rec.evaluated = true;

  AttemptConfig cfg;
  cfg.scan_all_samples = mitigation_;
  rec.outcome = authenticate_attempt(bus_, source, enrolled_, profile_, seeds_,
                                     fpn_, press_at, cfg);

  const bool plain = gate.gate == policy::AuthGate::Proceed;
  if (plain) lockout_.record_outcome(app, rec.outcome.kind, rec.outcome.end_at);

  bool unlocked = false;
  if (mitigation_) {
    if (plain) {
      const bool verified = rec.outcome.kind == AttemptKind::Success;
      const bool cancelled = rec.outcome.kind == AttemptKind::Canceled ||
                             rec.outcome.has_error_sample();
      const policy::GateAction act = policy::gate_update(
          gate_, verified, cancelled, profile_.policy(app).attempt_limit);
      rec.gate_action = act;
      unlocked = act == policy::GateAction::Unlock;
      if (act == policy::GateAction::Lockout) lockout_.force_permanent(app);
    }
  } else {
    unlocked = plain && rec.outcome.kind == AttemptKind::Success;
  }
  if (unlocked) last_unlock_ = rec.outcome.end_at;
  rec.unlocked = unlocked;
  rec.mode_after = lockout_.counter(app).mode;
  rec.failed_attempts_after = lockout_.counter(app).failed_attempts;
  return rec;
}

AttemptRecord DeviceSim::attempt_native(core::AppId app, std::uint64_t identity,
                                        core::Micros press_at) {
  return attempt(
      app,
      [&](int) -> const core::RawFingerprintImage& {
        return acquire_native(identity);
      },
      press_at);
}

AttemptRecord DeviceSim::attempt_blank(core::AppId app, core::Micros press_at) {
  return attempt(
      app, [&](int) -> const core::RawFingerprintImage& { return blank_; },
      press_at);
}

policy::TouchIdOutcome DeviceSim::touchid_probe(std::uint64_t identity,
                                                bool glitched, bool sleeping,
                                                bool wake) {
  if (!profile_.touchid_semantics)
    core::fail(core::Errc::InvariantViolation,
               "profile has no home-button press semantics");
  policy::TouchIdPress press;
  press.glitched = glitched;
  press.sleeping = sleeping;
  press.wake = wake;
  // The sensor scans (and the matcher runs) only when the press will be
  // evaluated and the transfer survives.
  if (!touchid_.passcode_required && !touchid_.lazy && !glitched) {
    core::RawFingerprintImage comp =
        compensate(acquire_native(identity), fpn_);
    core::extract_tag(comp);
    press.matched = liveness_check(comp, profile_, seeds_) == Liveness::Live &&
                    match_sample(comp, enrolled_, profile_, seeds_);
  }
  return policy::touchid_record(touchid_, press);
}

}  // namespace fpsim::engine
