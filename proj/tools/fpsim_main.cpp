#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpsim/attacks/dictionary.hpp"
#include "fpsim/cli/inspect.hpp"
#include "fpsim/cli/scenario.hpp"
#include "fpsim/core/profiles.hpp"

namespace {

using fpsim::core::DeviceProfile;

std::vector<DeviceProfile> catalog_for(const std::string& path) {
  return path.empty() ? fpsim::core::load_fixture_catalog()
                      : fpsim::core::load_profiles(path);
}

void print_profiles(const std::vector<DeviceProfile>& catalog) {
  std::printf("%-22s %-10s %-9s %2s %-6s %9s %9s %s\n", "name", "os",
              "sensor", "M", "cancel", "far", "limit", "notes");
  for (const DeviceProfile& p : catalog) {
    std::string notes;
    if (p.encrypted_channel) notes += "encrypted ";
    if (p.pseudo_lockout_keyguard) notes += "pseudo-lockout ";
    if (p.touchid_semantics) notes += "touchid ";
    if (p.payment.dedicated_enrollment) notes += "dedicated-apps ";
    std::string limit = p.screenlock.attempt_limit
                            ? std::to_string(*p.screenlock.attempt_limit)
                            : std::string("none");
    if (p.screenlock.lockout_periods)
      limit += "x" + std::to_string(*p.screenlock.lockout_periods);
    std::printf("%-22s %-10s %-9s %2d %-6s %9.2e %9s %s\n", p.name.c_str(),
                p.os.c_str(), p.sensor_type.c_str(), p.max_samples,
                p.error_cancel_supported ? "yes" : "no", p.far, limit.c_str(),
                notes.c_str());
  }
}

int run_gen_dict(const std::string& catalog_path, const std::string& profile,
                 std::size_t count, const std::string& quality,
                 const std::string& source_tag, std::uint64_t seed,
                 const std::string& out_dir,
                 const std::vector<std::string>& matchable) {
  const auto catalog = catalog_for(catalog_path);
  const DeviceProfile& target = fpsim::core::find_profile(catalog, profile);
  fpsim::attacks::SyntheticConfig cfg;
  cfg.count = count;
  auto q = fpsim::core::alignment_from_name(quality);
  if (!q)
    fpsim::core::fail(fpsim::core::Errc::ParseError,
                      "unknown quality \"" + quality + "\"");
  cfg.quality = *q;
  cfg.source_tag = source_tag;
  for (const std::string& m : matchable) {
    const auto eq = m.find('=');
    if (eq == std::string::npos)
      fpsim::core::fail(fpsim::core::Errc::ParseError,
                        "--matchable expects pos=identity, got \"" + m + "\"");
    cfg.identity_overrides[std::stoull(m.substr(0, eq))] =
        std::stoull(m.substr(eq + 1));
  }
  fpsim::attacks::SyntheticDictionary dict(target, std::move(cfg),
                                           fpsim::core::SeedSource(seed));
  fpsim::attacks::MaterializedDictionary mat;
  for (std::size_t i = 0; i < dict.size(); ++i) mat.push(dict.entry(i));
  fpsim::attacks::save_dictionary(mat, out_dir);
  std::printf("wrote %zu entries to %s\n", mat.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fingerprint authentication stack simulator"};
  app.require_subcommand(1);
  std::string catalog_path;
  app.add_option("--catalog", catalog_path,
                 "device catalog JSON (defaults to the built-in fixtures)");

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_path;
  std::string out_dir = ".";
  run->add_option("scenario", scenario_path, "scenario JSON path")->required();
  run->add_option("--out", out_dir, "directory for report/capture artifacts");

  auto* profiles = app.add_subcommand("profiles", "list the device catalog");

  auto* inspect = app.add_subcommand("inspect", "decode a bus capture file");
  std::string capture_path;
  std::string inspect_profile;
  inspect->add_option("capture", capture_path, "capture file path")
      ->required();
  inspect->add_option("--profile", inspect_profile, "device the bus belongs to")
      ->required();

  auto* gen = app.add_subcommand("gen-dict", "materialize a spoof dictionary");
  std::string gen_profile, gen_quality = "epoch80", gen_source = "lab-optical",
              gen_out = "dict";
  std::size_t gen_count = 16;
  std::uint64_t gen_seed = 1;
  std::vector<std::string> gen_matchable;
  gen->add_option("--profile", gen_profile, "target device")->required();
  gen->add_option("--count", gen_count, "entry count");
  gen->add_option("--quality", gen_quality, "alignment quality name");
  gen->add_option("--source-tag", gen_source, "style domain of the sources");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--matchable", gen_matchable,
                  "pos=identity overrides (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    if (*run) {
      const fpsim::cli::Scenario sc = fpsim::cli::load_scenario(scenario_path);
      const auto res =
          fpsim::cli::run_scenario(sc, out_dir, catalog_for(catalog_path));
      std::printf("%s: %s%s%s (report: %s)\n", res.report.attack.c_str(),
                  res.report.outcome.c_str(),
                  res.report.blocked_reason.empty() ? "" : " / ",
                  res.report.blocked_reason.c_str(),
                  res.report_file.c_str());
      return res.exit_code;
    }
    if (*profiles) {
      print_profiles(catalog_for(catalog_path));
      return 0;
    }
    if (*inspect) {
      const auto catalog = catalog_for(catalog_path);
      std::cout << fpsim::cli::inspect_capture(
          capture_path, fpsim::core::find_profile(catalog, inspect_profile));
      return 0;
    }
    if (*gen) {
      return run_gen_dict(catalog_path, gen_profile, gen_count, gen_quality,
                          gen_source, gen_seed, gen_out, gen_matchable);
    }
  } catch (const fpsim::core::SimError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return fpsim::cli::exit_code_for_error(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 70;
  }
  return 0;
}
