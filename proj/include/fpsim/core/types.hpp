#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpsim::core {

// All simulated time is integer microseconds from scenario start.
using Micros = std::int64_t;

constexpr Micros kMicrosPerSecond = 1'000'000;

enum class Errc {
  ParseError,
  InvariantViolation,
  ShapeMismatch,
  BppUnsupported,
  CrcMismatch,
  TruncatedFrame,
  UnknownCommand,
  ChannelOpaque,
  SwitchTooSlow,
  TransactionInFlight,
  NoEnrollment,
  EnrollmentLimit,
  EmptySource,
  ShapeUnderflow,
  NotCancelable,
  NoPseudoLockout,
  DomainError,
  ValidationError,
  IoError,
};

const char* errc_name(Errc e);

class SimError : public std::runtime_error {
 public:
  SimError(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw SimError(code, std::string(errc_name(code)) + ": " + what);
}

enum class ByteOrder { LittleEndian, BigEndian };

enum class LineLayout { SerialPixelsCrc };

enum class CrcVariant { CcittFalse, Xmodem, Modbus, Arc };

enum class AppId { ScreenLock, Payment, Privacy };

const char* app_name(AppId a);

// Per-line SPI framing and sensor geometry for one device model.
struct SpiProfile {
  double clock_mhz = 0.0;
  std::vector<std::uint8_t> fda_command;
  int bpp = 8;
  int width_px = 0;
  int height_px = 0;
  int frames_first_sample = 1;
  int frames_other_samples = 1;
  LineLayout line_layout = LineLayout::SerialPixelsCrc;
  CrcVariant crc_variant = CrcVariant::CcittFalse;
  ByteOrder byte_order = ByteOrder::LittleEndian;

  bool operator==(const SpiProfile&) const = default;
};

// Attempt-time components, integer microseconds.
//   t0: finger-down to first data transfer
//   t1_mean: one sample's data transfer
//   t2_mean: interval between consecutive samples
//   t3: last transfer to finger-up
//   d: post-attempt delay before the next attempt can start
struct TimingProfile {
  Micros t0_us = 0;
  Micros t1_mean_us = 0;
  Micros t2_mean_us = 0;
  Micros t3_us = 0;
  Micros d_us = 0;
  double attempts_per_sec = 1.0;

  bool operator==(const TimingProfile&) const = default;
};

// Attempt-limit policy for one app class. nullopt means unlimited.
struct AppPolicy {
  std::optional<std::uint32_t> attempt_limit;
  std::optional<std::uint32_t> lockout_periods;  // x in "limit x periods"
  bool dedicated_enrollment = false;

  bool operator==(const AppPolicy&) const = default;
};

struct DeviceProfile {
  std::string name;
  std::string os;
  std::string tee;
  std::string sensor_manufacturer;
  std::string sensor_type;
  std::string sensor_tag;  // style domain of natively acquired images
  int max_samples = 1;     // M in the multi-sampling loop
  bool error_cancel_supported = false;
  AppPolicy screenlock;
  AppPolicy payment;
  AppPolicy privacy;
  Micros timed_lockout_us = 30 * kMicrosPerSecond;
  bool pseudo_lockout_keyguard = false;
  Micros idle_timeout_us = 72LL * 3600 * kMicrosPerSecond;
  double far = 0.0;
  double frr = 0.0;
  int r_max = 5;  // max enrolled fingerprints
  bool hot_plug = true;
  SpiProfile spi;
  TimingProfile timing;
  bool encrypted_channel = false;
  bool touchid_semantics = false;

  const AppPolicy& policy(AppId app) const {
    switch (app) {
      case AppId::Payment: return payment;
      case AppId::Privacy: return privacy;
      default: return screenlock;
    }
  }
  std::uint32_t attempt_limit() const {
    return screenlock.attempt_limit.value_or(0);
  }
  std::optional<std::uint32_t> lockout_periods_x() const {
    return screenlock.lockout_periods;
  }

  bool operator==(const DeviceProfile&) const = default;
};

// Style-transfer alignment level of an image relative to a target sensor.
enum class AlignmentQuality : std::uint8_t {
  None = 0,
  Epoch20 = 20,
  Epoch40 = 40,
  Epoch60 = 60,
  Epoch80 = 80,
  Epoch100 = 100,
  Native = 255,
};

const char* alignment_name(AlignmentQuality q);
std::optional<AlignmentQuality> alignment_from_name(const std::string& s);

// Styles are tracked as 32-bit tags (fnv32 of the human-readable name) so they
// survive the pixel-level wire round trip.
struct StyleDescriptor {
  std::uint32_t source_sensor = 0;  // style domain the pixels came from
  std::uint32_t aligned_to = 0;     // profile the image was adapted to, 0 = none
  AlignmentQuality quality = AlignmentQuality::None;

  bool operator==(const StyleDescriptor&) const = default;
};

struct RawFingerprintImage {
  int width = 0;
  int height = 0;
  int bpp = 8;  // 8 or 16
  std::vector<std::uint16_t> pixels;  // row-major, values fit bpp

  // Simulation metadata; valid only when tagged (carried in-band in the first
  // pixels so it survives encode/decode byte-exactly).
  StyleDescriptor style;
  std::uint64_t identity_id = 0;  // 0 = no ridge content
  std::uint32_t token_bits = 0;   // per-image acceptance token, fixed point

  bool tagged = false;

  double spoof_token() const { return token_bits * 0x1p-32; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  bool operator==(const RawFingerprintImage&) const = default;
};

std::uint32_t fnv32(std::string_view s);

}  // namespace fpsim::core
