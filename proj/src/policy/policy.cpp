#include "fpsim/policy/policy.hpp"

namespace fpsim::policy {

const char* lockout_mode_name(LockoutMode m) {
  switch (m) {
    case LockoutMode::None: return "none";
    case LockoutMode::Timed: return "timed";
    case LockoutMode::Permanent: return "permanent";
  }
  return "?";
}

CounterState& LockoutState::counter_for(core::AppId app) {
  if (app == core::AppId::Payment && profile_.payment.dedicated_enrollment)
    return payment_;
  if (app == core::AppId::Privacy && profile_.privacy.dedicated_enrollment)
    return privacy_;
  return shared_;
}

const CounterState& LockoutState::counter(core::AppId app) const {
  return const_cast<LockoutState*>(this)->counter_for(app);
}

bool LockoutState::uses_shared_counter(core::AppId app) const {
  return &counter(app) == &shared_;
}

void LockoutState::refresh(CounterState& c, core::Micros now) const {
  if (c.mode == LockoutMode::Timed && now >= c.timed_until)
    c.mode = c.escalate_on_expiry ? LockoutMode::Permanent : LockoutMode::None;
}

GateDecision LockoutState::start_authentication(core::AppId app,
                                                core::Micros now) {
  CounterState& c = counter_for(app);
  refresh(c, now);
  GateDecision d;
  d.mode = c.mode;
  if (c.mode == LockoutMode::Permanent) {
    d.gate = AuthGate::Rejected;
    d.reason = "permanent lockout, primary authentication required";
    return d;
  }
  if (c.mode == LockoutMode::Timed) {
    d.retry_at = c.timed_until;
    if (profile_.pseudo_lockout_keyguard && app == core::AppId::ScreenLock &&
        !c.escalate_on_expiry) {
      // Keyguard quirk: the UI shows a lockout but the stack still evaluates
      // presses; results are swallowed and nothing is recorded.
      d.gate = AuthGate::ProceedPseudoLockout;
      d.reason = "timed lockout shown, keyguard still evaluating";
    } else {
      d.gate = AuthGate::Rejected;
      d.reason = "timed lockout active";
    }
    return d;
  }
  d.gate = AuthGate::Proceed;
  return d;
}

void LockoutState::record_outcome(core::AppId app, engine::AttemptKind kind,
                                  core::Micros now) {
  CounterState& c = counter_for(app);
  switch (kind) {
    case engine::AttemptKind::Success:
      c = CounterState{};
      return;
    case engine::AttemptKind::Canceled:
    case engine::AttemptKind::NonLiveTerminated:
      return;  // never reaches the fail accounting
    case engine::AttemptKind::Failed:
      break;
  }
  c.failed_attempts += 1;
  const core::AppPolicy& pol = profile_.policy(app);
  if (!pol.attempt_limit) return;
  const int limit = static_cast<int>(*pol.attempt_limit);
  if (limit <= 0 || c.failed_attempts % limit != 0) return;
  c.periods_done = c.failed_attempts / limit;
  c.mode = LockoutMode::Timed;
  c.timed_until = now + profile_.timed_lockout_us;
  c.escalate_on_expiry =
      pol.lockout_periods &&
      c.periods_done >= static_cast<int>(*pol.lockout_periods);
}

void LockoutState::reset_shared_counter() { shared_ = CounterState{}; }

void LockoutState::force_permanent(core::AppId app) {
  counter_for(app).mode = LockoutMode::Permanent;
}

void shared_counter_reset_exploit(LockoutState& s) {
  s.reset_shared_counter();
}

GateAction gate_update(CamfGate& g, bool verified, bool cancelled,
                       std::optional<std::uint32_t> attempt_limit) {
  if (g.locked) return GateAction::Lockout;
  if (verified && (g.cancel_count < CamfGate::kCancelLimit || !cancelled)) {
    g.attempt_count = 0;
    g.cancel_count = 0;
    return GateAction::Unlock;
  }
  if (cancelled) {
    g.cancel_count += 1;
    return GateAction::Retry;
  }
  g.attempt_count += 1;
  if (attempt_limit && g.attempt_count >= static_cast<int>(*attempt_limit)) {
    g.locked = true;
    return GateAction::Lockout;
  }
  return GateAction::Retry;
}

TouchIdOutcome touchid_record(TouchIdState& st, const TouchIdPress& press) {
  TouchIdOutcome out;
  if (st.passcode_required) {
    out.passcode_required = true;
    return out;
  }
  if (st.lazy) {
    if (press.wake) {
      st.lazy = false;
      st.consecutive_cancels = 0;
      out.woke_sensor = true;
    }
    return out;  // lazy sensor never evaluates the press itself
  }
  out.evaluated = true;
  if (press.glitched && press.sleeping) {
    // The one cancelable combination: the killed transfer is discarded with
    // no retry prompt and no counted fail.
    out.canceled = true;
    st.consecutive_cancels += 1;
    if (st.consecutive_cancels > TouchIdState::kLazyCancelThreshold)
      st.lazy = true;
    return out;
  }
  st.consecutive_cancels = 0;
  if (!press.glitched && press.matched) {
    out.unlocked = true;
    st.counted_fails = 0;
    return out;
  }
  out.counted_fail = true;
  out.retry_prompt = true;
  st.counted_fails += 1;
  if (st.counted_fails >= TouchIdState::kCountedFailLimit) {
    st.passcode_required = true;
    out.passcode_required = true;
  }
  return out;
}

}  // namespace fpsim::policy
