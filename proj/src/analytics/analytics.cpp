#include "fpsim/analytics/analytics.hpp"

#include <cmath>
#include <sstream>

#include "fpsim/attacks/dictionary.hpp"
#include "fpsim/engine/engine.hpp"

namespace fpsim::analytics {

namespace {
constexpr core::StreamId kRunStream = core::stream_id("mc.run");
}

double success_rate(const SuccessParams& p) {
  const double rf = p.r * p.far;
  if (!(p.r >= 0.0) || !(p.far >= 0.0) || rf > 1.0)
    core::fail(core::Errc::DomainError, "r*far must lie in [0, 1]");
  if (!(p.fips >= 0.0) || !(p.attempts >= 0.0))
    core::fail(core::Errc::DomainError, "fips and attempts must be >= 0");
  return 1.0 - std::pow(1.0 - rf, p.fips * p.attempts);
}

double expected_unlock_seconds(double r, double far, double fips,
                               double attempt_period_s) {
  const double rate = r * far * fips;
  if (!(rate > 0.0))
    core::fail(core::Errc::DomainError, "r*far*fips must be positive");
  if (!(attempt_period_s > 0.0))
    core::fail(core::Errc::DomainError, "attempt period must be positive");
  return attempt_period_s / rate;
}

core::Micros attempt_time_us(const core::TimingProfile& t,
                             int completed_samples) {
  if (completed_samples < 0)
    core::fail(core::Errc::DomainError, "sample count must be >= 0");
  return t.t0_us +
         static_cast<core::Micros>(completed_samples) *
             (t.t1_mean_us + t.t2_mean_us) +
         t.t3_us + t.d_us;
}

WilsonInterval wilson(double p_hat, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p_hat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::uint64_t fast_camf_run(const core::DeviceProfile& profile,
                            const MonteCarloConfig& cfg,
                            std::uint64_t run_seed) {
  const core::SeedSource seeds(run_seed);
  engine::EnrolledSet enrolled;
  for (int i = 1; i <= cfg.enrolled_templates; ++i)
    enrolled.enroll(static_cast<std::uint64_t>(i), profile);
  std::size_t index = 0;
  for (std::uint64_t t = 1; t <= cfg.horizon_attempts; ++t) {
    for (int m = 0; m < cfg.inject_per_attempt; ++m, ++index) {
      const std::uint64_t identity = attacks::kSyntheticIdentityBase + index;
      const std::uint32_t token = static_cast<std::uint32_t>(
          seeds.bits(attacks::kDictTokenStream, identity, index,
                     static_cast<std::uint64_t>(cfg.quality)));
      if (engine::match_meta(identity, token, cfg.quality, enrolled, profile,
                             seeds))
        return t;
    }
  }
  return 0;
}

MonteCarloResult monte_carlo_success(const core::DeviceProfile& profile,
                                     const MonteCarloConfig& cfg) {
  if (cfg.runs <= 0)
    core::fail(core::Errc::ValidationError, "runs must be positive");
  MonteCarloResult res;
  res.runs = cfg.runs;
  res.horizon_attempts = cfg.horizon_attempts;
  res.success_attempt.resize(static_cast<std::size_t>(cfg.runs));
  const core::SeedSource master(cfg.seed);
  for (int j = 0; j < cfg.runs; ++j) {
    const std::uint64_t run_seed =
        master.derive_seed(kRunStream, static_cast<std::uint64_t>(j));
    const std::uint64_t at = fast_camf_run(profile, cfg, run_seed);
    res.success_attempt[static_cast<std::size_t>(j)] = at;
    if (at != 0) res.successes += 1;
  }
  res.p_hat = static_cast<double>(res.successes) / cfg.runs;
  const WilsonInterval w =
      wilson(res.p_hat, static_cast<std::uint64_t>(cfg.runs));
  res.wilson_low = w.low;
  res.wilson_high = w.high;
  res.analytic = success_rate(
      {static_cast<double>(cfg.enrolled_templates),
       profile.far * engine::spoof_scale(cfg.quality),
       static_cast<double>(cfg.inject_per_attempt),
       static_cast<double>(cfg.horizon_attempts)});
  return res;
}

std::vector<CurvePoint> success_curve(const core::DeviceProfile& profile,
                                      const MonteCarloConfig& cfg,
                                      int points) {
  if (points <= 0)
    core::fail(core::Errc::ValidationError, "curve needs at least one point");
  const MonteCarloResult res = monte_carlo_success(profile, cfg);
  std::vector<std::uint64_t> sorted;
  sorted.reserve(res.success_attempt.size());
  for (std::uint64_t a : res.success_attempt)
    if (a != 0) sorted.push_back(a);
  std::sort(sorted.begin(), sorted.end());

  std::vector<CurvePoint> pts;
  pts.reserve(static_cast<std::size_t>(points));
  const double far_scaled = profile.far * engine::spoof_scale(cfg.quality);
  for (int i = 1; i <= points; ++i) {
    CurvePoint pt;
    pt.attempts = static_cast<double>(cfg.horizon_attempts) * i / points;
    pt.analytic = success_rate({static_cast<double>(cfg.enrolled_templates),
                                far_scaled,
                                static_cast<double>(cfg.inject_per_attempt),
                                pt.attempts});
    const auto it = std::upper_bound(sorted.begin(), sorted.end(),
                                     static_cast<std::uint64_t>(pt.attempts));
    pt.empirical =
        static_cast<double>(it - sorted.begin()) / res.runs;
    const WilsonInterval w =
        wilson(pt.empirical, static_cast<std::uint64_t>(res.runs));
    pt.low = w.low;
    pt.high = w.high;
    pts.push_back(pt);
  }
  return pts;
}

std::string curve_csv(const std::vector<CurvePoint>& pts) {
  std::ostringstream out;
  out << "attempts,analytic,empirical,wilson_low,wilson_high\n";
  out.precision(10);
  for (const CurvePoint& p : pts)
    out << p.attempts << ',' << p.analytic << ',' << p.empirical << ','
        << p.low << ',' << p.high << "\n";
  return out.str();
}

}  // namespace fpsim::analytics
