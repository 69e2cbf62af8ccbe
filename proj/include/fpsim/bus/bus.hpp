#pragma once

#include <functional>
#include <map>
#include <optional>

#include "fpsim/codec/capture.hpp"
#include "fpsim/codec/codec.hpp"
#include "fpsim/core/types.hpp"

namespace fpsim::bus {

// Steady MITM configurations of the two SPDT switches (S0 routes the sensor's
// MISO into the interceptor, S1 drives the master's MISO from the injector).
// Glitch is a transient: S1 briefly shorts the master's MISO during data.
enum class SpdtMode { Listen, Eavesdrop, Replace, Glitch };

struct SpdtState {
  int s0 = 0;
  int s1 = 0;
  bool operator==(const SpdtState&) const = default;
};

SpdtState spdt_state(SpdtMode m);

enum class BusLine : std::uint8_t {
  Mosi,
  MisoSensor,
  MisoMaster,
  MisoAdversary,
  Glitch,
};

struct BusEvent {
  core::Micros t_us = 0;
  BusLine line = BusLine::Mosi;
  std::size_t byte_count = 0;
};

// What the adversary does during one attempt. Injections and triggers are
// keyed by 1-based sample index.
struct AttackPlan {
  bool eavesdrop = false;
  std::map<int, core::RawFingerprintImage> inject;
  std::optional<int> glitch_at;
  std::optional<int> corrupt_crc_at;

  bool passive() const {
    return !eavesdrop && inject.empty() && !glitch_at && !corrupt_crc_at;
  }
};

struct FdaResult {
  codec::FdaTransaction delivered;
  core::Micros data_start = 0;
  core::Micros data_end = 0;  // == data_start when the transfer was glitched
  bool injected = false;
  bool glitched = false;
  bool crc_rewritten = false;
};

// Minimum time between committing a switch change and the next data transfer
// it affects; switching inside that window is physically too slow.
constexpr core::Micros kSwitchBudgetUs = 206;

// One SPI link between the fingerprint sensor and the SoC, with an optional
// MITM board in the middle. All timing is driven by the caller's simulated
// clock; the session itself is stateless between attempts apart from the
// armed plan and eavesdrop storage.
class BusSession {
 public:
  BusSession(const core::DeviceProfile& profile, bool adversary_attached);

  bool adversary_attached() const { return attached_; }

  // Coarse single-action surface; composes an AttackPlan internally.
  void set_mode(SpdtMode mode, core::Micros now);

  // Arms the adversary's per-attempt plan. Fails with SwitchTooSlow later if
  // a data transfer it affects starts within the switch budget.
  void set_plan(AttackPlan plan, core::Micros now);

  SpdtState state() const { return steady_; }

  void attach_capture(codec::CaptureWriter* writer) { capture_ = writer; }

  // Caps how many eavesdropped images are stored (counting continues).
  void set_eavesdrop_cap(std::size_t cap) { eaves_cap_ = cap; }
  const std::vector<core::RawFingerprintImage>& eavesdropped() const {
    return eaves_store_;
  }
  std::uint64_t eavesdrop_count() const { return eaves_count_; }

  using SensorSource = std::function<const core::RawFingerprintImage&()>;

  // Runs one FDA transaction whose data phase starts at data_start. The
  // sensor's pixels are materialized lazily: only when something on the bus
  // actually observes them (pass-through delivery, eavesdrop, or capture).
  FdaResult run_fda(int sample_index, core::Micros data_start,
                    const SensorSource& sensor_source);

  const std::vector<BusEvent>& events() const { return events_; }
  void clear_events() { events_.clear(); }

 private:
  void emit(core::Micros t, BusLine line, std::span<const std::uint8_t> bytes,
            codec::Direction dir, bool to_capture);
  void check_switch_latency(core::Micros data_start) const;

  const core::DeviceProfile& profile_;
  bool attached_;
  AttackPlan plan_;
  core::Micros plan_set_at_ = -1'000'000;
  SpdtState steady_{0, 0};
  codec::CaptureWriter* capture_ = nullptr;
  std::vector<core::RawFingerprintImage> eaves_store_;
  std::size_t eaves_cap_ = 16;
  std::uint64_t eaves_count_ = 0;
  std::vector<BusEvent> events_;
};

// Data-phase time of n completed samples on this profile (transfer plus
// inter-sample interval, per the timing model).
core::Micros transaction_duration(const core::DeviceProfile& profile,
                                  int n_samples);

}  // namespace fpsim::bus
