#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpsim/attacks/campaigns.hpp"

namespace fpsim::cli {

struct SyntheticDictSpec {
  std::size_t count = 0;
  core::AlignmentQuality quality = core::AlignmentQuality::Epoch80;
  std::string source_tag;
  std::map<std::size_t, std::uint64_t> matchable;  // position -> identity
};

struct Scenario {
  std::string profile;
  core::AppId app = core::AppId::ScreenLock;
  std::uint64_t seed = 1;
  bool mitigation = false;
  std::vector<std::uint64_t> enrolled;
  std::string attack = "none";  // camf|mal|touchid|shared_counter_reset|none

  std::optional<std::string> dictionary_path;
  std::optional<SyntheticDictSpec> synthetic;

  attacks::CampaignBudget budget;

  int inject_per_attempt = 1;
  attacks::CamfTrigger trigger = attacks::CamfTrigger::Glitch;
  bool continue_after_unlock = false;
  bool wrap = true;
  std::uint64_t genuine_identity = 0;  // 0 = first enrolled
  std::uint64_t honest_count = 1;
  std::vector<std::uint64_t> probes;
  int camf_per_cycle = 2;

  std::string report_path = "report.json";
  std::optional<std::string> capture_path;
  std::uint64_t capture_attempts = 2;
  std::optional<std::string> events_path;
  std::optional<std::string> curve_path;
  int curve_runs = 2000;
  std::uint64_t curve_horizon_attempts = 50000;
  int curve_points = 512;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

struct ScenarioResult {
  attacks::CampaignReport report;
  int exit_code = 0;
  std::string report_file;  // resolved absolute-ish path that was written
};

// Builds the device, runs the configured campaign, writes every requested
// artifact under out_dir, and maps the outcome to a process exit code.
ScenarioResult run_scenario(const Scenario& sc, const std::string& out_dir,
                            const std::vector<core::DeviceProfile>& catalog);

// unlocked -> 0, exhausted -> 2, blocked -> 3
int exit_code_for(const attacks::CampaignReport& r);

// parse/validation -> 64, io -> 66, anything else -> 70
int exit_code_for_error(const core::SimError& e);

}  // namespace fpsim::cli
