#include "fpsim/attacks/campaigns.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "json.hpp"

namespace fpsim::attacks {

namespace {

using engine::AttemptKind;
using engine::AttemptRecord;
using engine::DeviceSim;

core::Micros period_us(const core::DeviceProfile& p) {
  return static_cast<core::Micros>(
      std::llround(1e6 / p.timing.attempts_per_sec));
}

CampaignReport init_report(const char* attack, const DeviceSim& dev,
                           core::AppId app) {
  CampaignReport r;
  r.attack = attack;
  r.profile = dev.profile().name;
  r.app = core::app_name(app);
  r.seed = dev.seeds().seed();
  r.mitigation = dev.mitigation();
  return r;
}

AttemptBrief brief_of(const AttemptRecord& rec) {
  AttemptBrief b;
  b.index = rec.index;
  b.press_at = rec.press_at;
  b.end_at = rec.evaluated ? rec.outcome.end_at : rec.press_at;
  b.disposition =
      rec.rejected ? "rejected" : engine::attempt_kind_name(rec.outcome.kind);
  b.detail = rec.reject_reason;
  b.samples_used = rec.outcome.samples_used;
  b.pseudo = rec.pseudo;
  b.unlocked = rec.unlocked;
  return b;
}

void log_push(CampaignReport& r, const AttemptRecord& rec, std::size_t cap) {
  if (r.log.size() < cap) r.log.push_back(brief_of(rec));
}

void tally(CampaignReport& r, const AttemptRecord& rec) {
  if (rec.outcome.kind == AttemptKind::Canceled) r.cancels += 1;
  if (rec.outcome.kind == AttemptKind::Success) r.matched_hits += 1;
  for (engine::SampleKind s : rec.outcome.samples)
    if (s == engine::SampleKind::NonLive) r.liveness_errors += 1;
  if (rec.unlocked) r.unlocks += 1;
  r.elapsed_us = std::max(r.elapsed_us, rec.outcome.end_at);
}

CampaignReport& snapshot_lockout(CampaignReport& r, DeviceSim& dev,
                                 core::AppId app) {
  const policy::CounterState& c = dev.lockout().counter(app);
  r.lockout_mode = policy::lockout_mode_name(c.mode);
  r.failed_attempts = c.failed_attempts;
  return r;
}

CampaignReport finish(CampaignReport& r, DeviceSim& dev, core::AppId app,
                      const std::string& outcome) {
  r.outcome = outcome;
  return snapshot_lockout(r, dev, app);
}

CampaignReport blocked(CampaignReport& r, DeviceSim& dev, core::AppId app,
                       const std::string& reason, const std::string& detail) {
  r.blocked_reason = reason;
  r.detail = detail;
  return finish(r, dev, app, "blocked");
}

bool horizon_hit(const CampaignBudget& b, core::Micros press) {
  return b.horizon_us && press >= *b.horizon_us;
}

bool attempts_hit(const CampaignBudget& b, std::uint64_t attempts) {
  return b.max_attempts && attempts >= *b.max_attempts;
}

}  // namespace

int infer_sample_count(const std::vector<bus::BusEvent>& events,
                       const core::SpiProfile& spi) {
  int cmds = 0;
  for (const bus::BusEvent& e : events)
    if (e.line == bus::BusLine::Mosi) cmds += 1;
  if (cmds == 0) return 0;
  if (cmds <= spi.frames_first_sample) return 1;
  const int rest = cmds - spi.frames_first_sample;
  return 1 + (rest + spi.frames_other_samples - 1) / spi.frames_other_samples;
}

CampaignReport run_camf_bruteforce(DeviceSim& dev, DictionarySource& dict,
                                   const CamfConfig& cfg) {
  const core::DeviceProfile& p = dev.profile();
  CampaignReport r = init_report("camf", dev, cfg.app);
  if (p.encrypted_channel)
    return blocked(r, dev, cfg.app, "channel_opaque",
                   "sealed channel, injected frames cannot be produced");
  if (!p.error_cancel_supported)
    return blocked(r, dev, cfg.app, "not_cancelable",
                   "sample errors do not cancel attempts on this stack");
  if (!dev.bus().adversary_attached())
    core::fail(core::Errc::InvariantViolation,
               "campaign requires the interceptor attached");
  if (dict.size() == 0)
    core::fail(core::Errc::EmptySource, "empty dictionary");
  const int k = cfg.inject_per_attempt;
  if (k < 1 || k > p.max_samples - 1)
    core::fail(core::Errc::ValidationError,
               "inject_per_attempt must be in [1, max_samples-1]");

  const core::Micros period = period_us(p);
  core::Micros next_press = 0;
  std::size_t cursor = 0;

  while (true) {
    if (attempts_hit(cfg.budget, r.attempts))
      return finish(r, dev, cfg.app, "exhausted");
    if (horizon_hit(cfg.budget, next_press))
      return finish(r, dev, cfg.app, "exhausted");
    if (!cfg.wrap && cursor + static_cast<std::size_t>(k) > dict.size()) {
      r.detail = "dictionary exhausted";
      return finish(r, dev, cfg.app, "exhausted");
    }

    const core::Micros press = next_press;
    bus::AttackPlan plan;
    std::vector<std::size_t> injected;
    for (int m = 0; m < k; ++m) {
      const std::size_t idx = cfg.wrap ? (cursor + m) % dict.size()
                                       : cursor + m;
      plan.inject[m + 1] = dict.entry(idx);
      injected.push_back(idx);
    }
    if (cfg.trigger == CamfTrigger::Glitch)
      plan.glitch_at = k + 1;
    else
      plan.corrupt_crc_at = k + 1;
    dev.bus().set_plan(std::move(plan), press);

    AttemptRecord rec = dev.attempt(
        cfg.app,
        [&](int) -> const core::RawFingerprintImage& { return dev.blank(); },
        press);
    r.presses += 1;
    log_push(r, rec, cfg.log_cap);

    if (rec.rejected) {
      r.rejected += 1;
      if (rec.mode_after == policy::LockoutMode::Permanent)
        return blocked(r, dev, cfg.app, "lockout_permanent",
                       rec.reject_reason);
      next_press = std::max(press + period, rec.retry_at);
      continue;
    }

    r.attempts += 1;
    r.images_injected += static_cast<std::uint64_t>(k);
    cursor += static_cast<std::size_t>(k);
    tally(r, rec);
    next_press = std::max(press + period, rec.outcome.end_at);

    if (rec.unlocked && r.first_unlock_us < 0) {
      r.first_unlock_us = rec.outcome.end_at;
      r.unlock_identity = rec.outcome.matched_identity;
      for (std::size_t s = 0; s < rec.outcome.samples.size(); ++s) {
        if (rec.outcome.samples[s] == engine::SampleKind::Matched) {
          if (s < injected.size())
            r.unlock_entry = static_cast<std::int64_t>(injected[s]);
          break;
        }
      }
    }
    if (rec.unlocked && !cfg.continue_after_unlock)
      return finish(r, dev, cfg.app, "unlocked");

    if (dev.mitigation() &&
        dev.gate().cancel_count >= policy::CamfGate::kCancelLimit)
      return blocked(r, dev, cfg.app, "mitigation",
                     "cancel budget exhausted, matches no longer unlock");

    if (cfg.capture_attempt_cap && r.attempts >= cfg.capture_attempt_cap)
      dev.bus().attach_capture(nullptr);
  }
}

CampaignReport run_mal_inference(DeviceSim& dev, DictionarySource& dict,
                                 const MalConfig& cfg) {
  const core::DeviceProfile& p = dev.profile();
  CampaignReport r = init_report("mal", dev, cfg.app);
  if (p.encrypted_channel)
    return blocked(r, dev, cfg.app, "channel_opaque",
                   "sealed channel, injected frames cannot be produced");
  if (!p.pseudo_lockout_keyguard)
    return blocked(r, dev, cfg.app, "no_pseudo_lockout",
                   "lockout windows reject presses outright");
  if (cfg.app != core::AppId::ScreenLock)
    core::fail(core::Errc::ValidationError,
               "inference rides the keyguard, app must be screenlock");
  if (!dev.bus().adversary_attached())
    core::fail(core::Errc::InvariantViolation,
               "campaign requires the interceptor attached");
  if (dict.size() == 0)
    core::fail(core::Errc::EmptySource, "empty dictionary");

  const int m_samples = p.max_samples;
  const core::Micros period = period_us(p);
  core::Micros next_press = 0;
  std::size_t cursor = 0;
  std::deque<std::size_t> candidates;

  while (true) {
    if (attempts_hit(cfg.budget, r.attempts))
      return finish(r, dev, cfg.app, "exhausted");
    if (horizon_hit(cfg.budget, next_press))
      return finish(r, dev, cfg.app, "exhausted");

    const core::Micros press = next_press;

    // The keyguard UI tells the attacker exactly which window they are in.
    const policy::CounterState& c = dev.lockout().counter(cfg.app);
    const bool timed_now =
        c.mode == policy::LockoutMode::Timed && press < c.timed_until;
    if (timed_now && c.escalate_on_expiry) {
      // Final window: the keyguard stops evaluating, so wait it out.
      next_press = std::max(press + period, c.timed_until);
      continue;
    }
    const int window = timed_now ? c.periods_done : 0;

    bus::AttackPlan plan;
    plan.eavesdrop = true;
    std::vector<std::uint64_t> injected;
    const bool replaying = !timed_now && !candidates.empty();
    if (replaying) {
      plan.inject[1] = dict.entry(candidates.front());
      injected.push_back(candidates.front());
      for (int m = 2; m <= m_samples; ++m) {
        const std::size_t idx = cursor++ % dict.size();
        plan.inject[m] = dict.entry(idx);
        injected.push_back(idx);
      }
    } else {
      for (int m = 1; m <= m_samples; ++m) {
        const std::size_t idx = cursor++ % dict.size();
        plan.inject[m] = dict.entry(idx);
        injected.push_back(idx);
      }
    }
    dev.bus().set_plan(std::move(plan), press);
    dev.bus().clear_events();

    AttemptRecord rec = dev.attempt(
        cfg.app,
        [&](int) -> const core::RawFingerprintImage& { return dev.blank(); },
        press);
    r.presses += 1;
    log_push(r, rec, cfg.log_cap);

    if (rec.rejected) {
      r.rejected += 1;
      if (rec.mode_after == policy::LockoutMode::Permanent)
        return blocked(r, dev, cfg.app, "lockout_permanent",
                       rec.reject_reason);
      next_press = std::max(press + period, rec.retry_at);
      continue;
    }

    r.attempts += 1;
    r.available_attempts += 1;
    if (rec.pseudo) r.valid_inference_attempts += 1;
    r.images_injected += injected.size();
    tally(r, rec);
    next_press = std::max(press + period, rec.outcome.end_at);

    const int observed =
        infer_sample_count(dev.bus().events(), p.spi);

    InferenceEvent ev;
    ev.press_at = press;
    ev.window = window;
    ev.injected = injected;
    ev.observed_samples = observed;

    if (rec.unlocked) {
      r.first_unlock_us = rec.outcome.end_at;
      r.unlock_identity = rec.outcome.matched_identity;
      r.unlock_entry = static_cast<std::int64_t>(injected[0]);
      for (std::size_t s = 0; s < rec.outcome.samples.size(); ++s)
        if (rec.outcome.samples[s] == engine::SampleKind::Matched &&
            s < injected.size())
          r.unlock_entry = static_cast<std::int64_t>(injected[s]);
      if (r.inference.size() < cfg.inference_cap)
        r.inference.push_back(std::move(ev));
      return finish(r, dev, cfg.app, "unlocked");
    }

    if (rec.pseudo && observed == 1) {
      // One transfer during a swallowed evaluation: the entry at sample 1
      // matched (or terminated the scan); replay it once the window ends.
      const std::size_t cand = static_cast<std::size_t>(injected[0]);
      if (std::find(candidates.begin(), candidates.end(), cand) ==
          candidates.end()) {
        candidates.push_back(cand);
        r.candidates_found += 1;
        ev.candidate = true;
      }
    }
    if (replaying) candidates.pop_front();  // replay did not unlock
    if (r.inference.size() < cfg.inference_cap)
      r.inference.push_back(std::move(ev));
    if (cfg.capture_attempt_cap && r.attempts >= cfg.capture_attempt_cap)
      dev.bus().attach_capture(nullptr);
  }
}

CampaignReport run_touchid_sequence(DeviceSim& dev, const TouchIdConfig& cfg) {
  const core::DeviceProfile& p = dev.profile();
  CampaignReport r = init_report("touchid", dev, core::AppId::ScreenLock);
  if (!p.touchid_semantics)
    core::fail(core::Errc::ValidationError,
               "profile has no home-button press semantics");
  if (cfg.probes.empty())
    core::fail(core::Errc::EmptySource, "no probe identities");
  if (cfg.camf_per_cycle < 0)
    core::fail(core::Errc::ValidationError, "camf_per_cycle must be >= 0");

  const core::Micros period = period_us(p);
  const int cycle = cfg.camf_per_cycle + 1;
  std::size_t probe_cursor = 0;
  std::uint64_t press_index = 0;

  while (true) {
    if (attempts_hit(cfg.budget, r.probes_submitted))
      return finish(r, dev, core::AppId::ScreenLock, "exhausted");
    const core::Micros press = static_cast<core::Micros>(press_index) * period;
    if (horizon_hit(cfg.budget, press))
      return finish(r, dev, core::AppId::ScreenLock, "exhausted");

    const bool camf =
        static_cast<int>(press_index % cycle) < cfg.camf_per_cycle;
    const std::uint64_t identity = cfg.probes[probe_cursor % cfg.probes.size()];
    policy::TouchIdOutcome out =
        dev.touchid_probe(identity, camf, camf, !camf);
    r.presses += 1;
    press_index += 1;
    r.elapsed_us = press;

    AttemptBrief b;
    b.index = static_cast<int>(r.presses - 1);
    b.press_at = press;
    b.end_at = press;
    if (out.unlocked)
      b.disposition = "success";
    else if (out.canceled)
      b.disposition = "canceled";
    else if (out.counted_fail)
      b.disposition = "failed";
    else if (out.woke_sensor)
      b.disposition = "woke";
    else
      b.disposition = "skipped";
    b.unlocked = out.unlocked;
    if (r.log.size() < cfg.log_cap) r.log.push_back(b);

    if (out.evaluated) {
      r.probes_submitted += 1;
      r.attempts += 1;
      probe_cursor += 1;
    }
    if (out.canceled) r.cancels += 1;
    if (out.counted_fail) r.counted_fails += 1;
    if (out.unlocked) {
      r.unlocks += 1;
      r.unlock_identity = identity;
      r.first_unlock_us = press;
      return finish(r, dev, core::AppId::ScreenLock, "unlocked");
    }
    if (out.passcode_required) {
      r.passcode_required = true;
      return blocked(r, dev, core::AppId::ScreenLock, "passcode_required",
                     "counted failures exhausted, passcode demanded");
    }
  }
}

CampaignReport run_shared_counter_reset(DeviceSim& dev,
                                        const ResetProbeConfig& cfg) {
  const core::DeviceProfile& p = dev.profile();
  CampaignReport r = init_report("shared_counter_reset", dev, cfg.app);
  const core::AppPolicy& pol = p.policy(cfg.app);
  if (!pol.attempt_limit)
    return blocked(r, dev, cfg.app, "unlimited_attempts",
                   "app enforces no attempt limit, nothing to reset");

  const core::Micros period = period_us(p);
  core::Micros next_press = 0;

  const std::uint64_t limit = *pol.attempt_limit;
  for (std::uint64_t i = 0; i < limit; ++i) {
    AttemptRecord rec = dev.attempt_blank(cfg.app, next_press);
    r.presses += 1;
    if (rec.evaluated) r.attempts += 1;
    tally(r, rec);
    log_push(r, rec, cfg.log_cap);
    next_press = std::max(next_press + period,
                          rec.evaluated ? rec.outcome.end_at : next_press);
    if (rec.rejected) break;
  }
  if (dev.lockout().counter(cfg.app).mode == policy::LockoutMode::None)
    return blocked(r, dev, cfg.app, "no_lockout_reached",
                   "fail limit did not trip a lockout");

  // Confirm the lockout really refuses before firing the quirk.
  AttemptRecord confirm = dev.attempt_blank(cfg.app, next_press);
  r.presses += 1;
  if (confirm.rejected) r.rejected += 1;
  log_push(r, confirm, cfg.log_cap);
  next_press += period;

  policy::shared_counter_reset_exploit(dev.lockout());
  r.detail = "shared counter cleared";

  AttemptRecord genuine =
      dev.attempt_native(cfg.app, cfg.genuine_identity, next_press);
  r.presses += 1;
  if (genuine.evaluated) r.attempts += 1;
  tally(r, genuine);
  log_push(r, genuine, cfg.log_cap);

  if (genuine.unlocked) {
    r.first_unlock_us = genuine.outcome.end_at;
    r.unlock_identity = cfg.genuine_identity;
    return finish(r, dev, cfg.app, "unlocked");
  }
  return blocked(r, dev, cfg.app,
                 genuine.rejected ? "dedicated_counter_held" : "not_matched",
                 genuine.rejected ? genuine.reject_reason
                                  : "genuine press admitted but did not match");
}

CampaignReport run_honest_attempts(DeviceSim& dev, const HonestConfig& cfg) {
  const core::DeviceProfile& p = dev.profile();
  CampaignReport r = init_report("none", dev, cfg.app);
  const core::Micros period = period_us(p);
  core::Micros next_press = 0;
  for (std::uint64_t i = 0; i < cfg.count; ++i) {
    AttemptRecord rec = dev.attempt_native(cfg.app, cfg.identity, next_press);
    r.presses += 1;
    if (rec.rejected) {
      r.rejected += 1;
      next_press = std::max(next_press + period, rec.retry_at);
    } else {
      r.attempts += 1;
      tally(r, rec);
      next_press = std::max(next_press + period, rec.outcome.end_at);
      if (rec.unlocked && r.first_unlock_us < 0) {
        r.first_unlock_us = rec.outcome.end_at;
        r.unlock_identity = cfg.identity;
      }
    }
    log_push(r, rec, cfg.log_cap);
  }
  return finish(r, dev, cfg.app, r.unlocks > 0 ? "unlocked" : "exhausted");
}

std::string to_json_text(const CampaignReport& r) {
  nlohmann::ordered_json j;
  j["attack"] = r.attack;
  j["profile"] = r.profile;
  j["app"] = r.app;
  j["seed"] = r.seed;
  j["mitigation"] = r.mitigation;
  j["outcome"] = r.outcome;
  if (!r.blocked_reason.empty()) j["blocked_reason"] = r.blocked_reason;
  if (!r.detail.empty()) j["detail"] = r.detail;
  j["presses"] = r.presses;
  j["attempts"] = r.attempts;
  j["rejected"] = r.rejected;
  j["images_injected"] = r.images_injected;
  j["cancels"] = r.cancels;
  j["liveness_errors"] = r.liveness_errors;
  j["matched_hits"] = r.matched_hits;
  j["unlocks"] = r.unlocks;
  if (r.unlock_entry >= 0) j["unlock_entry"] = r.unlock_entry;
  if (r.unlock_identity) j["unlock_identity"] = r.unlock_identity;
  if (r.first_unlock_us >= 0) j["first_unlock_us"] = r.first_unlock_us;
  j["elapsed_us"] = r.elapsed_us;
  j["lockout_mode"] = r.lockout_mode;
  j["failed_attempts"] = r.failed_attempts;
  if (r.attack == "mal") {
    j["available_attempts"] = r.available_attempts;
    j["valid_inference_attempts"] = r.valid_inference_attempts;
    j["candidates_found"] = r.candidates_found;
    nlohmann::ordered_json infs = nlohmann::ordered_json::array();
    for (const InferenceEvent& e : r.inference) {
      nlohmann::ordered_json je;
      je["press_at"] = e.press_at;
      je["window"] = e.window;
      je["injected"] = e.injected;
      je["observed_samples"] = e.observed_samples;
      je["candidate"] = e.candidate;
      infs.push_back(std::move(je));
    }
    j["inference"] = std::move(infs);
  }
  if (r.attack == "touchid") {
    j["probes_submitted"] = r.probes_submitted;
    j["counted_fails"] = r.counted_fails;
    j["passcode_required"] = r.passcode_required;
  }
  nlohmann::ordered_json log = nlohmann::ordered_json::array();
  for (const AttemptBrief& b : r.log) {
    nlohmann::ordered_json jb;
    jb["index"] = b.index;
    jb["press_at"] = b.press_at;
    jb["end_at"] = b.end_at;
    jb["disposition"] = b.disposition;
    if (!b.detail.empty()) jb["detail"] = b.detail;
    jb["samples_used"] = b.samples_used;
    jb["pseudo"] = b.pseudo;
    jb["unlocked"] = b.unlocked;
    log.push_back(std::move(jb));
  }
  j["log"] = std::move(log);
  return j.dump(2) + "\n";
}

}  // namespace fpsim::attacks
