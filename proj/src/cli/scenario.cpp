#include "fpsim/cli/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "fpsim/analytics/analytics.hpp"
#include "fpsim/codec/capture.hpp"
#include "fpsim/core/profiles.hpp"
#include "json.hpp"

namespace fpsim::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      core::fail(core::Errc::ParseError,
                 where + ": unknown field \"" + it.key() + "\"");
}

std::uint64_t get_u64(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_unsigned())
    core::fail(core::Errc::ParseError,
               where + "." + key + " must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

core::AppId parse_app(const std::string& s) {
  if (s == "screenlock") return core::AppId::ScreenLock;
  if (s == "payment") return core::AppId::Payment;
  if (s == "privacy") return core::AppId::Privacy;
  core::fail(core::Errc::ParseError, "unknown app \"" + s + "\"");
}

core::AlignmentQuality parse_quality(const std::string& s,
                                     const std::string& where) {
  auto q = core::alignment_from_name(s);
  if (!q) core::fail(core::Errc::ParseError, where + ": unknown quality \"" + s + "\"");
  return *q;
}

void parse_dictionary(const json& d, Scenario& sc) {
  check_keys(d, {"path", "synthetic"}, "dictionary");
  if (d.contains("path") == d.contains("synthetic"))
    core::fail(core::Errc::ParseError,
               "dictionary needs exactly one of \"path\" or \"synthetic\"");
  if (d.contains("path")) {
    sc.dictionary_path = d.at("path").get<std::string>();
    return;
  }
  const json& s = d.at("synthetic");
  check_keys(s, {"count", "quality", "source_tag", "matchable"},
             "dictionary.synthetic");
  SyntheticDictSpec spec;
  spec.count = get_u64(s, "count", "dictionary.synthetic");
  spec.quality = parse_quality(s.at("quality").get<std::string>(),
                               "dictionary.synthetic");
  spec.source_tag = s.at("source_tag").get<std::string>();
  if (s.contains("matchable")) {
    const json& m = s.at("matchable");
    if (!m.is_object())
      core::fail(core::Errc::ParseError,
                 "dictionary.synthetic.matchable must map position to identity");
    for (auto it = m.begin(); it != m.end(); ++it) {
      std::size_t pos = 0;
      try {
        pos = std::stoull(it.key());
      } catch (const std::exception&) {
        core::fail(core::Errc::ParseError,
                   "matchable position \"" + it.key() + "\" is not a number");
      }
      if (pos >= spec.count)
        core::fail(core::Errc::ValidationError,
                   "matchable position " + it.key() + " outside the dictionary");
      spec.matchable[pos] = it.value().get<std::uint64_t>();
    }
  }
  sc.synthetic = std::move(spec);
}

void parse_budget(const json& b, Scenario& sc) {
  check_keys(b, {"max_attempts", "horizon_seconds"}, "budget");
  if (b.contains("max_attempts"))
    sc.budget.max_attempts = get_u64(b, "max_attempts", "budget");
  if (b.contains("horizon_seconds")) {
    const double secs = b.at("horizon_seconds").get<double>();
    if (!(secs > 0))
      core::fail(core::Errc::ValidationError, "budget.horizon_seconds must be positive");
    sc.budget.horizon_us =
        static_cast<core::Micros>(std::llround(secs * core::kMicrosPerSecond));
  }
}

void parse_options(const json& o, Scenario& sc) {
  check_keys(o,
             {"inject_per_attempt", "trigger", "continue_after_unlock", "wrap",
              "genuine_identity", "honest_count", "probes", "camf_per_cycle"},
             "options");
  if (o.contains("inject_per_attempt"))
    sc.inject_per_attempt = o.at("inject_per_attempt").get<int>();
  if (o.contains("trigger")) {
    const std::string t = o.at("trigger").get<std::string>();
    if (t == "glitch")
      sc.trigger = attacks::CamfTrigger::Glitch;
    else if (t == "crc_rewrite")
      sc.trigger = attacks::CamfTrigger::CrcRewrite;
    else
      core::fail(core::Errc::ParseError, "unknown trigger \"" + t + "\"");
  }
  if (o.contains("continue_after_unlock"))
    sc.continue_after_unlock = o.at("continue_after_unlock").get<bool>();
  if (o.contains("wrap")) sc.wrap = o.at("wrap").get<bool>();
  if (o.contains("genuine_identity"))
    sc.genuine_identity = get_u64(o, "genuine_identity", "options");
  if (o.contains("honest_count"))
    sc.honest_count = get_u64(o, "honest_count", "options");
  if (o.contains("probes"))
    sc.probes = o.at("probes").get<std::vector<std::uint64_t>>();
  if (o.contains("camf_per_cycle"))
    sc.camf_per_cycle = o.at("camf_per_cycle").get<int>();
}

void parse_outputs(const json& o, Scenario& sc) {
  check_keys(o,
             {"report", "capture", "capture_attempts", "events", "curve",
              "curve_runs", "curve_horizon_attempts", "curve_points"},
             "outputs");
  if (o.contains("report")) sc.report_path = o.at("report").get<std::string>();
  if (o.contains("capture"))
    sc.capture_path = o.at("capture").get<std::string>();
  if (o.contains("capture_attempts"))
    sc.capture_attempts = get_u64(o, "capture_attempts", "outputs");
  if (o.contains("events")) sc.events_path = o.at("events").get<std::string>();
  if (o.contains("curve")) sc.curve_path = o.at("curve").get<std::string>();
  if (o.contains("curve_runs")) sc.curve_runs = o.at("curve_runs").get<int>();
  if (o.contains("curve_horizon_attempts"))
    sc.curve_horizon_attempts = get_u64(o, "curve_horizon_attempts", "outputs");
  if (o.contains("curve_points"))
    sc.curve_points = o.at("curve_points").get<int>();
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    core::fail(core::Errc::ParseError, std::string("scenario: ") + e.what());
  }
  if (!root.is_object())
    core::fail(core::Errc::ParseError, "scenario must be a JSON object");
  check_keys(root,
             {"version", "profile", "app", "seed", "mitigation", "enrolled",
              "attack", "dictionary", "budget", "options", "outputs"},
             "scenario");
  if (!root.contains("version") || root.at("version") != 1)
    core::fail(core::Errc::ParseError, "scenario.version must be 1");

  Scenario sc;
  sc.profile = root.at("profile").get<std::string>();
  if (root.contains("app")) sc.app = parse_app(root.at("app").get<std::string>());
  if (root.contains("seed")) sc.seed = get_u64(root, "seed", "scenario");
  if (root.contains("mitigation"))
    sc.mitigation = root.at("mitigation").get<bool>();
  if (root.contains("enrolled"))
    sc.enrolled = root.at("enrolled").get<std::vector<std::uint64_t>>();
  sc.attack = root.at("attack").get<std::string>();
  static const std::set<std::string> kAttacks{"camf", "mal", "touchid",
                                              "shared_counter_reset", "none"};
  if (!kAttacks.count(sc.attack))
    core::fail(core::Errc::ParseError, "unknown attack \"" + sc.attack + "\"");
  if (root.contains("dictionary")) parse_dictionary(root.at("dictionary"), sc);
  if (root.contains("budget")) parse_budget(root.at("budget"), sc);
  if (root.contains("options")) parse_options(root.at("options"), sc);
  if (root.contains("outputs")) parse_outputs(root.at("outputs"), sc);

  if (sc.enrolled.empty())
    core::fail(core::Errc::ValidationError, "scenario needs enrolled identities");
  const bool needs_dict = sc.attack == "camf" || sc.attack == "mal";
  if (needs_dict && !sc.dictionary_path && !sc.synthetic)
    core::fail(core::Errc::ValidationError,
               sc.attack + " needs a dictionary (path or synthetic)");
  if (sc.attack == "touchid" && sc.probes.empty())
    core::fail(core::Errc::ValidationError, "touchid needs options.probes");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) core::fail(core::Errc::IoError, "cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_scenario_text(text);
}

int exit_code_for(const attacks::CampaignReport& r) {
  if (r.outcome == "unlocked") return 0;
  if (r.outcome == "exhausted") return 2;
  return 3;
}

int exit_code_for_error(const core::SimError& e) {
  switch (e.code()) {
    case core::Errc::ParseError:
    case core::Errc::ValidationError:
    case core::Errc::EmptySource:
    case core::Errc::ShapeUnderflow:
    case core::Errc::NoEnrollment:
    case core::Errc::EnrollmentLimit:
    case core::Errc::DomainError:
      return 64;
    case core::Errc::IoError:
      return 66;
    default:
      return 70;
  }
}

ScenarioResult run_scenario(const Scenario& sc, const std::string& out_dir,
                            const std::vector<core::DeviceProfile>& catalog) {
  const core::DeviceProfile& profile = core::find_profile(catalog, sc.profile);
  const bool adversary = sc.attack == "camf" || sc.attack == "mal";

  engine::DeviceSim::Config dc;
  dc.seed = sc.seed;
  dc.adversary_attached = adversary;
  dc.mitigation = sc.mitigation;
  engine::DeviceSim dev(profile, dc);
  for (std::uint64_t id : sc.enrolled) dev.enroll(id);

  std::filesystem::create_directories(out_dir);
  const auto resolve = [&](const std::string& name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  std::optional<codec::CaptureWriter> capture;
  if (sc.capture_path && adversary) {
    capture.emplace(resolve(*sc.capture_path));
    dev.bus().attach_capture(&*capture);
  }

  std::unique_ptr<attacks::DictionarySource> dict;
  if (sc.dictionary_path) {
    dict = std::make_unique<attacks::MaterializedDictionary>(
        attacks::load_dictionary(*sc.dictionary_path));
  } else if (sc.synthetic) {
    attacks::SyntheticConfig scfg;
    scfg.count = sc.synthetic->count;
    scfg.quality = sc.synthetic->quality;
    scfg.source_tag = sc.synthetic->source_tag;
    for (const auto& [pos, id] : sc.synthetic->matchable)
      scfg.identity_overrides[pos] = id;
    dict = std::make_unique<attacks::SyntheticDictionary>(
        profile, std::move(scfg), core::SeedSource(sc.seed));
  }

  const std::uint64_t first_enrolled = sc.enrolled.front();
  const std::size_t log_cap = sc.events_path
                                  ? std::numeric_limits<std::size_t>::max()
                                  : std::size_t{32};

  attacks::CampaignReport report;
  if (sc.attack == "camf") {
    attacks::CamfConfig cfg;
    cfg.app = sc.app;
    cfg.inject_per_attempt = sc.inject_per_attempt;
    cfg.trigger = sc.trigger;
    cfg.continue_after_unlock = sc.continue_after_unlock;
    cfg.wrap = sc.wrap;
    cfg.budget = sc.budget;
    cfg.log_cap = log_cap;
    cfg.capture_attempt_cap = capture ? sc.capture_attempts : 0;
    report = attacks::run_camf_bruteforce(dev, *dict, cfg);
  } else if (sc.attack == "mal") {
    attacks::MalConfig cfg;
    cfg.app = sc.app;
    cfg.budget = sc.budget;
    cfg.log_cap = log_cap;
    cfg.capture_attempt_cap = capture ? sc.capture_attempts : 0;
    report = attacks::run_mal_inference(dev, *dict, cfg);
  } else if (sc.attack == "touchid") {
    attacks::TouchIdConfig cfg;
    cfg.probes = sc.probes;
    cfg.camf_per_cycle = sc.camf_per_cycle;
    cfg.budget = sc.budget;
    cfg.log_cap = log_cap;
    report = attacks::run_touchid_sequence(dev, cfg);
  } else if (sc.attack == "shared_counter_reset") {
    attacks::ResetProbeConfig cfg;
    cfg.app = sc.app;
    cfg.genuine_identity =
        sc.genuine_identity ? sc.genuine_identity : first_enrolled;
    cfg.log_cap = log_cap;
    report = attacks::run_shared_counter_reset(dev, cfg);
  } else {
    attacks::HonestConfig cfg;
    cfg.app = sc.app;
    cfg.identity = sc.genuine_identity ? sc.genuine_identity : first_enrolled;
    cfg.count = sc.honest_count;
    cfg.log_cap = log_cap;
    report = attacks::run_honest_attempts(dev, cfg);
  }

  ScenarioResult res;
  res.report = report;
  res.exit_code = exit_code_for(report);
  res.report_file = resolve(sc.report_path);
  {
    std::ofstream out(res.report_file, std::ios::binary);
    if (!out) core::fail(core::Errc::IoError, "cannot write " + res.report_file);
    out << attacks::to_json_text(report);
  }
  if (sc.events_path) {
    std::ofstream out(resolve(*sc.events_path), std::ios::binary);
    if (!out)
      core::fail(core::Errc::IoError, "cannot write " + *sc.events_path);
    for (const attacks::AttemptBrief& b : report.log) {
      nlohmann::ordered_json j;
      j["index"] = b.index;
      j["press_at"] = b.press_at;
      j["end_at"] = b.end_at;
      j["disposition"] = b.disposition;
      if (!b.detail.empty()) j["detail"] = b.detail;
      j["samples_used"] = b.samples_used;
      j["pseudo"] = b.pseudo;
      j["unlocked"] = b.unlocked;
      out << j.dump() << "\n";
    }
  }
  if (sc.curve_path) {
    analytics::MonteCarloConfig mc;
    mc.runs = sc.curve_runs;
    mc.horizon_attempts = sc.curve_horizon_attempts;
    mc.inject_per_attempt = sc.inject_per_attempt;
    mc.enrolled_templates = static_cast<int>(sc.enrolled.size());
    mc.quality = sc.synthetic ? sc.synthetic->quality
                              : core::AlignmentQuality::Native;
    mc.seed = sc.seed;
    const auto pts = analytics::success_curve(profile, mc, sc.curve_points);
    std::ofstream out(resolve(*sc.curve_path), std::ios::binary);
    if (!out) core::fail(core::Errc::IoError, "cannot write " + *sc.curve_path);
    out << analytics::curve_csv(pts);
  }
  return res;
}

}  // namespace fpsim::cli
