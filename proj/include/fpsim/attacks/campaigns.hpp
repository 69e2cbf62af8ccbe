#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpsim/attacks/dictionary.hpp"
#include "fpsim/engine/device_sim.hpp"

namespace fpsim::attacks {

struct CampaignBudget {
  std::optional<std::uint64_t> max_attempts;  // evaluated-attempt cap
  std::optional<core::Micros> horizon_us;     // presses must start before this
};

struct AttemptBrief {
  int index = 0;
  core::Micros press_at = 0;
  core::Micros end_at = 0;
  std::string disposition;  // success|failed|canceled|nonlive|rejected|...
  std::string detail;
  int samples_used = 0;
  bool pseudo = false;
  bool unlocked = false;
};

struct InferenceEvent {
  core::Micros press_at = 0;
  int window = 0;  // 0 = normal phase, else 1-based lockout window
  std::vector<std::uint64_t> injected;
  int observed_samples = 0;
  bool candidate = false;
};

struct CampaignReport {
  std::string attack;
  std::string profile;
  std::string app;
  std::uint64_t seed = 0;
  bool mitigation = false;
  std::string outcome;         // unlocked | exhausted | blocked
  std::string blocked_reason;  // slug, set only when blocked
  std::string detail;

  std::uint64_t presses = 0;
  std::uint64_t attempts = 0;  // evaluated by the engine
  std::uint64_t rejected = 0;
  std::uint64_t images_injected = 0;
  std::uint64_t cancels = 0;
  std::uint64_t liveness_errors = 0;  // nonlive sample results
  std::uint64_t matched_hits = 0;
  std::uint64_t unlocks = 0;
  std::int64_t unlock_entry = -1;
  std::uint64_t unlock_identity = 0;
  core::Micros first_unlock_us = -1;
  core::Micros elapsed_us = 0;

  std::string lockout_mode = "none";
  int failed_attempts = 0;

  std::uint64_t available_attempts = 0;        // admitted presses (any gate)
  std::uint64_t valid_inference_attempts = 0;  // evaluated under pseudo lockout
  std::uint64_t candidates_found = 0;
  std::vector<InferenceEvent> inference;

  std::uint64_t probes_submitted = 0;
  std::uint64_t counted_fails = 0;
  bool passcode_required = false;

  std::vector<AttemptBrief> log;
};

std::string to_json_text(const CampaignReport& r);

enum class CamfTrigger { Glitch, CrcRewrite };

// Inject k dictionary entries at samples 1..k of every attempt and kill
// sample k+1 so failed attempts end canceled instead of counted.
struct CamfConfig {
  core::AppId app = core::AppId::ScreenLock;
  int inject_per_attempt = 1;
  CamfTrigger trigger = CamfTrigger::Glitch;
  bool continue_after_unlock = false;  // survey mode: never halt on success
  bool wrap = true;
  CampaignBudget budget;
  std::size_t log_cap = 32;
  std::uint64_t capture_attempt_cap = 0;  // detach capture after N attempts
};

CampaignReport run_camf_bruteforce(engine::DeviceSim& dev,
                                   DictionarySource& dict,
                                   const CamfConfig& cfg);

// Drive the keyguard into timed lockout, keep pressing while it only looks
// locked, and read the per-attempt sample count off the wire: one transfer
// means the first injected entry matched.
struct MalConfig {
  core::AppId app = core::AppId::ScreenLock;
  CampaignBudget budget;
  std::size_t log_cap = 32;
  std::size_t inference_cap = 512;
  std::uint64_t capture_attempt_cap = 0;  // detach capture after N attempts
};

CampaignReport run_mal_inference(engine::DeviceSim& dev,
                                 DictionarySource& dict, const MalConfig& cfg);

// Home-button press cycle: a run of glitched sleep probes (canceled, never
// counted) closed by one waking press that keeps the sensor responsive.
struct TouchIdConfig {
  std::vector<std::uint64_t> probes;  // consumed per evaluated press, cycled
  int camf_per_cycle = 2;
  CampaignBudget budget;
  std::size_t log_cap = 64;
};

CampaignReport run_touchid_sequence(engine::DeviceSim& dev,
                                    const TouchIdConfig& cfg);

// Drive an app to lockout, fire the vendor counter-reset quirk, then check
// whether a genuine press is admitted again.
struct ResetProbeConfig {
  core::AppId app = core::AppId::Payment;
  std::uint64_t genuine_identity = 1;
  std::size_t log_cap = 64;
};

CampaignReport run_shared_counter_reset(engine::DeviceSim& dev,
                                        const ResetProbeConfig& cfg);

// Plain genuine usage, mostly to exercise a stack end to end.
struct HonestConfig {
  core::AppId app = core::AppId::ScreenLock;
  std::uint64_t identity = 1;
  std::uint64_t count = 1;
  std::size_t log_cap = 32;
};

CampaignReport run_honest_attempts(engine::DeviceSim& dev,
                                   const HonestConfig& cfg);

// Sample count of one attempt as an eavesdropper sees it: acquisition
// commands on MOSI, divided up by the per-sample frame counts.
int infer_sample_count(const std::vector<bus::BusEvent>& events,
                       const core::SpiProfile& spi);

}  // namespace fpsim::attacks
