#pragma once

#include <optional>

#include "fpsim/core/types.hpp"
#include "fpsim/engine/engine.hpp"

namespace fpsim::policy {

enum class LockoutMode { None, Timed, Permanent };

const char* lockout_mode_name(LockoutMode m);

struct CounterState {
  int failed_attempts = 0;  // cumulative since the last success or reset
  int periods_done = 0;
  LockoutMode mode = LockoutMode::None;
  core::Micros timed_until = 0;
  // The final allowed period escalates to Permanent once its window expires.
  bool escalate_on_expiry = false;
};

enum class AuthGate { Proceed, ProceedPseudoLockout, Rejected };

struct GateDecision {
  AuthGate gate = AuthGate::Proceed;
  LockoutMode mode = LockoutMode::None;
  core::Micros retry_at = 0;  // meaningful while a timed window is active
  const char* reason = "";
};

// OS-level fail accounting: one counter shared by every app that rides the
// system enrollment, plus a private counter per dedicated-enrollment app.
class LockoutState {
 public:
  explicit LockoutState(const core::DeviceProfile& profile)
      : profile_(profile) {}

  GateDecision start_authentication(core::AppId app, core::Micros now);

  // Called only for attempts admitted with plain Proceed; pseudo-lockout
  // evaluations leave every counter untouched.
  void record_outcome(core::AppId app, engine::AttemptKind kind,
                      core::Micros now);

  const CounterState& counter(core::AppId app) const;
  bool uses_shared_counter(core::AppId app) const;
  void reset_shared_counter();
  void force_permanent(core::AppId app);

 private:
  CounterState& counter_for(core::AppId app);
  void refresh(CounterState& c, core::Micros now) const;

  const core::DeviceProfile& profile_;
  CounterState shared_;
  CounterState payment_;
  CounterState privacy_;
};

// Vendor reset quirk: wipes the shared OS fail counter in place. Dedicated
// per-app counters are out of its reach.
void shared_counter_reset_exploit(LockoutState& s);

// Mitigated unlock gate: refuses to unlock on a match once too many canceled
// attempts have been observed, and hard-locks after repeated clean misses.
struct CamfGate {
  static constexpr int kCancelLimit = 3;
  int attempt_count = 0;
  int cancel_count = 0;
  bool locked = false;
};

enum class GateAction { Unlock, Retry, Lockout };

GateAction gate_update(CamfGate& g, bool verified, bool cancelled,
                       std::optional<std::uint32_t> attempt_limit);

// Press-level authentication semantics of the capacitive home-button stack.
struct TouchIdState {
  static constexpr int kCountedFailLimit = 5;
  static constexpr int kLazyCancelThreshold = 2;  // lazy once cancels exceed it

  int counted_fails = 0;
  int consecutive_cancels = 0;
  bool lazy = false;
  bool passcode_required = false;
};

struct TouchIdPress {
  bool glitched = false;  // MISO shorted during the transfer
  bool sleeping = false;  // pressed while the device slept
  bool wake = false;      // press wakes the device
  bool matched = false;   // matcher verdict; meaningless when glitched
};

struct TouchIdOutcome {
  bool evaluated = false;
  bool canceled = false;
  bool counted_fail = false;
  bool retry_prompt = false;
  bool unlocked = false;
  bool woke_sensor = false;  // press consumed clearing a lazy sensor
  bool passcode_required = false;
};

TouchIdOutcome touchid_record(TouchIdState& st, const TouchIdPress& press);

}  // namespace fpsim::policy
