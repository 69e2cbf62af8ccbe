#pragma once

#include <functional>
#include <vector>

#include "fpsim/bus/bus.hpp"
#include "fpsim/core/image.hpp"
#include "fpsim/core/rng.hpp"
#include "fpsim/core/types.hpp"

namespace fpsim::engine {

enum class SampleKind { Matched, Unmatched, NonLive, Error };
enum class AttemptKind { Success, Failed, Canceled, NonLiveTerminated };

const char* attempt_kind_name(AttemptKind k);

// Framework callback codes surfaced by the HAL.
constexpr int kAcquiredGood = 0;
constexpr int kAcquiredVendor = 6;  // vendorCode meaningful only here
constexpr int kErrorVendor = 8;

constexpr int kVendorCodeCanceled = 101;
constexpr int kVendorCodeNonLive = 201;

struct CallbackEvent {
  enum class Kind { OnAcquired, OnAuthenticated, OnError };
  Kind kind = Kind::OnAcquired;
  core::Micros t_us = 0;
  int acquired_info = 0;  // OnAcquired
  int error = 0;          // OnError
  int vendor_code = 0;    // OnAcquired(acquired_info==6) and OnError
  bool success = false;   // OnAuthenticated
};

struct Template {
  std::uint64_t identity_id = 0;
};

class EnrolledSet {
 public:
  void enroll(std::uint64_t identity, const core::DeviceProfile& profile);
  bool contains(std::uint64_t identity) const;
  bool empty() const { return templates_.empty(); }
  std::size_t size() const { return templates_.size(); }
  const std::vector<Template>& templates() const { return templates_; }

 private:
  std::vector<Template> templates_;
};

struct AttemptOutcome {
  AttemptKind kind = AttemptKind::Failed;
  int samples_used = 0;  // FDA transactions started, the MAL side channel
  std::vector<SampleKind> samples;
  std::vector<CallbackEvent> callbacks;
  core::Micros press_at = 0;
  core::Micros end_at = 0;
  std::uint64_t matched_identity = 0;
  int completed_samples = 0;  // n in the attempt-time formula

  bool has_error_sample() const {
    for (SampleKind s : samples)
      if (s == SampleKind::Error) return true;
    return false;
  }
};

// Subtracts the sensor's fixed-pattern-noise base, wrapping at the bpp
// ceiling; the exact inverse of the sensor-side add.
core::RawFingerprintImage compensate(const core::RawFingerprintImage& raw,
                                     const core::RawFingerprintImage& base);

// Acceptance-rate multiplier of a presentation relative to a native capture.
double spoof_scale(core::AlignmentQuality q);

// Residual liveness-error rate of aligned presentations (zero across the
// board; unaligned material is rejected deterministically upstream).
double liveness_error_rate(core::AlignmentQuality q);

enum class Liveness { Live, NonLive };

Liveness liveness_check(const core::RawFingerprintImage& compensated,
                        const core::DeviceProfile& profile,
                        const core::SeedSource& seeds);

// Match decision on tag metadata alone; shared verbatim by the byte-level
// path and the fast campaign path so both draw identical verdicts.
bool match_meta(std::uint64_t identity, std::uint32_t token_bits,
                core::AlignmentQuality quality, const EnrolledSet& enrolled,
                const core::DeviceProfile& profile,
                const core::SeedSource& seeds);

bool match_sample(const core::RawFingerprintImage& compensated,
                  const EnrolledSet& enrolled,
                  const core::DeviceProfile& profile,
                  const core::SeedSource& seeds);

// Supplies the sensor's view for each sample of an attempt (1-based).
using ImageSource =
    std::function<const core::RawFingerprintImage&(int sample_index)>;

struct AttemptConfig {
  // Mitigated stacks acquire every sample even after a match so that late
  // cancels are still seen by the cancel check.
  bool scan_all_samples = false;
};

// Runs one authentication attempt: up to max_samples acquisitions over the
// bus, decode, compensation, liveness, matching, with framework callbacks.
AttemptOutcome authenticate_attempt(bus::BusSession& session,
                                    const ImageSource& source,
                                    const EnrolledSet& enrolled,
                                    const core::DeviceProfile& profile,
                                    const core::SeedSource& seeds,
                                    const core::RawFingerprintImage& fpn,
                                    core::Micros press_at,
                                    const AttemptConfig& cfg = {});

}  // namespace fpsim::engine
