#pragma once

#include <string>
#include <vector>

#include "fpsim/core/types.hpp"

namespace fpsim::analytics {

// Cumulative acceptance probability of a brute-force run:
//   p = 1 - (1 - r * far)^(fips * attempts)
// r usable templates, fips images evaluated per attempt.
struct SuccessParams {
  double r = 1.0;
  double far = 0.0;
  double fips = 1.0;
  double attempts = 1.0;
};

double success_rate(const SuccessParams& p);

// Expected wait until the first accepted image at one attempt every
// attempt_period_s seconds.
double expected_unlock_seconds(double r, double far, double fips,
                               double attempt_period_s = 1.0);

// Wall time of one attempt with n completed sample transfers.
core::Micros attempt_time_us(const core::TimingProfile& t,
                             int completed_samples);

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
};

WilsonInterval wilson(double p_hat, std::uint64_t n,
                      double z = 1.959963984540054);

// Metadata-only replica of the injection campaign: identical draw keys as
// the byte-level stack, none of the byte-level cost.
struct MonteCarloConfig {
  int runs = 1000;
  std::uint64_t horizon_attempts = 1;
  int inject_per_attempt = 1;
  int enrolled_templates = 1;
  core::AlignmentQuality quality = core::AlignmentQuality::Native;
  std::uint64_t seed = 1;
};

struct MonteCarloResult {
  int runs = 0;
  std::uint64_t horizon_attempts = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double analytic = 0.0;
  std::vector<std::uint64_t> success_attempt;  // per run, 0 = never
};

// First successful attempt of one simulated run, 0 if the horizon passes.
std::uint64_t fast_camf_run(const core::DeviceProfile& profile,
                            const MonteCarloConfig& cfg,
                            std::uint64_t run_seed);

MonteCarloResult monte_carlo_success(const core::DeviceProfile& profile,
                                     const MonteCarloConfig& cfg);

struct CurvePoint {
  double attempts = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double low = 0.0;
  double high = 0.0;
};

std::vector<CurvePoint> success_curve(const core::DeviceProfile& profile,
                                      const MonteCarloConfig& cfg,
                                      int points = 512);

std::string curve_csv(const std::vector<CurvePoint>& pts);

}  // namespace fpsim::analytics
