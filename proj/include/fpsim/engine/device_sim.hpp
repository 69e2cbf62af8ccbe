#pragma once

#include <optional>
#include <string>

#include "fpsim/bus/bus.hpp"
#include "fpsim/engine/engine.hpp"
#include "fpsim/policy/policy.hpp"

namespace fpsim::engine {

// One press as the OS saw it: gate decision, engine outcome, lockout state
// after accounting.
struct AttemptRecord {
  int index = 0;
  core::AppId app = core::AppId::ScreenLock;
  core::Micros press_at = 0;
  bool evaluated = false;  // the engine ran (gate admitted the press)
  bool rejected = false;
  std::string reject_reason;
  bool pseudo = false;  // evaluated under a shown lockout, result swallowed
  bool unlocked = false;
  std::optional<policy::GateAction> gate_action;
  AttemptOutcome outcome;
  policy::LockoutMode mode_after = policy::LockoutMode::None;
  int failed_attempts_after = 0;
  core::Micros retry_at = 0;
};

// A whole handset: sensor, SPI link, engine, OS policy. All state advances
// through explicit press timestamps; nothing reads a wall clock.
class DeviceSim {
 public:
  struct Config {
    std::uint64_t seed = 1;
    bool adversary_attached = false;
    bool mitigation = false;
  };

  DeviceSim(core::DeviceProfile profile, const Config& cfg);
  DeviceSim(const DeviceSim&) = delete;
  DeviceSim& operator=(const DeviceSim&) = delete;

  const core::DeviceProfile& profile() const { return profile_; }
  const core::SeedSource& seeds() const { return seeds_; }
  bus::BusSession& bus() { return bus_; }
  policy::LockoutState& lockout() { return lockout_; }
  const policy::CamfGate& gate() const { return gate_; }
  const policy::TouchIdState& touchid() const { return touchid_; }
  EnrolledSet& enrolled() { return enrolled_; }
  const core::RawFingerprintImage& fpn() const { return fpn_; }
  const core::RawFingerprintImage& blank() const { return blank_; }
  bool mitigation() const { return mitigation_; }
  core::Micros last_unlock() const { return last_unlock_; }
  std::uint64_t acquisitions() const { return acq_counter_; }

  void enroll(std::uint64_t identity);

  // Synthesizes what the sensor captures for a live presentation of this
  // identity. Each call is a fresh scan; the reference lives until the next.
  const core::RawFingerprintImage& acquire_native(std::uint64_t identity);

  AttemptRecord attempt(core::AppId app, const ImageSource& source,
                        core::Micros press_at);
  AttemptRecord attempt_native(core::AppId app, std::uint64_t identity,
                               core::Micros press_at);
  AttemptRecord attempt_blank(core::AppId app, core::Micros press_at);

  // Home-button press semantics; only valid on profiles that use them.
  policy::TouchIdOutcome touchid_probe(std::uint64_t identity, bool glitched,
                                       bool sleeping, bool wake);

 private:
  core::DeviceProfile profile_;
  core::SeedSource seeds_;
  bus::BusSession bus_;
  policy::LockoutState lockout_;
  policy::CamfGate gate_;
  policy::TouchIdState touchid_;
  EnrolledSet enrolled_;
  core::RawFingerprintImage fpn_;
  core::RawFingerprintImage blank_;
  core::RawFingerprintImage native_scratch_;
  bool mitigation_ = false;
  std::uint64_t acq_counter_ = 0;
  core::Micros last_unlock_ = 0;
  int attempt_index_ = 0;
};

}  // namespace fpsim::engine
