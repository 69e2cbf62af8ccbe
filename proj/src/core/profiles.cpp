#include "fpsim/core/profiles.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fpsim::core {

using json = nlohmann::ordered_json;

const char* errc_name(Errc e) {
  switch (e) {
    case Errc::ParseError: return "ParseError";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::BppUnsupported: return "BppUnsupported";
    case Errc::CrcMismatch: return "CrcMismatch";
    case Errc::TruncatedFrame: return "TruncatedFrame";
    case Errc::UnknownCommand: return "UnknownCommand";
    case Errc::ChannelOpaque: return "ChannelOpaque";
    case Errc::SwitchTooSlow: return "SwitchTooSlow";
    case Errc::TransactionInFlight: return "TransactionInFlight";
    case Errc::NoEnrollment: return "NoEnrollment";
    case Errc::EnrollmentLimit: return "EnrollmentLimit";
    case Errc::EmptySource: return "EmptySource";
    case Errc::ShapeUnderflow: return "ShapeUnderflow";
    case Errc::NotCancelable: return "NotCancelable";
    case Errc::NoPseudoLockout: return "NoPseudoLockout";
    case Errc::DomainError: return "DomainError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

const char* app_name(AppId a) {
  switch (a) {
    case AppId::ScreenLock: return "screenlock";
    case AppId::Payment: return "payment";
    case AppId::Privacy: return "privacy";
  }
  return "?";
}

const char* alignment_name(AlignmentQuality q) {
  switch (q) {
    case AlignmentQuality::None: return "none";
    case AlignmentQuality::Epoch20: return "epoch20";
    case AlignmentQuality::Epoch40: return "epoch40";
    case AlignmentQuality::Epoch60: return "epoch60";
    case AlignmentQuality::Epoch80: return "epoch80";
    case AlignmentQuality::Epoch100: return "epoch100";
    case AlignmentQuality::Native: return "native";
  }
  return "?";
}

std::optional<AlignmentQuality> alignment_from_name(const std::string& s) {
  if (s == "none") return AlignmentQuality::None;
  if (s == "epoch20") return AlignmentQuality::Epoch20;
  if (s == "epoch40") return AlignmentQuality::Epoch40;
  if (s == "epoch60") return AlignmentQuality::Epoch60;
  if (s == "epoch80") return AlignmentQuality::Epoch80;
  if (s == "epoch100") return AlignmentQuality::Epoch100;
  if (s == "native") return AlignmentQuality::Native;
  return std::nullopt;
}

std::uint32_t fnv32(std::string_view s) {
  std::uint32_t h = 0x811c9dc5u;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x01000193u;
  }
  return h;
}

namespace {

[[noreturn]] void parse_fail(const std::string& ctx, const std::string& what) {
  fail(Errc::ParseError, ctx + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& ctx) {
  if (!obj.is_object()) parse_fail(ctx, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      parse_fail(ctx, "unknown field \"" + it.key() + "\"");
}

const json& field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(ctx, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_string()) parse_fail(ctx, std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_number()) parse_fail(ctx, std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_number_integer())
    parse_fail(ctx, std::string("field \"") + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_boolean()) parse_fail(ctx, std::string("field \"") + key + "\" must be a bool");
  return v.get<bool>();
}

// Counter fields accept a non-negative integer or the string "inf".
std::optional<std::uint32_t> get_limit(const json& obj, const char* key,
                                       const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::nullopt;
    parse_fail(ctx, std::string("field \"") + key + "\" must be an integer or \"inf\"");
  }
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    parse_fail(ctx, std::string("field \"") + key + "\" must be an integer or \"inf\"");
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

std::vector<std::uint8_t> parse_hex(const std::string& s, const std::string& ctx) {
  if (s.size() % 2 != 0) parse_fail(ctx, "hex string must have even length");
  std::vector<std::uint8_t> out;
  out.reserve(s.size() / 2);
  auto nib = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    parse_fail(ctx, "invalid hex digit");
  };
  for (std::size_t i = 0; i < s.size(); i += 2)
    out.push_back(static_cast<std::uint8_t>(nib(s[i]) * 16 + nib(s[i + 1])));
  return out;
}

std::string to_hex(const std::vector<std::uint8_t>& v) {
  static const char* digits = "0123456789ABCDEF";
  std::string s;
  for (auto b : v) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

AppPolicy parse_app_policy(const json& obj, const std::string& ctx) {
  check_keys(obj, {"attempt_limit", "lockout_periods", "dedicated_enrollment"}, ctx);
  AppPolicy p;
  p.attempt_limit = get_limit(obj, "attempt_limit", ctx);
  p.lockout_periods = get_limit(obj, "lockout_periods", ctx);
  if (obj.contains("dedicated_enrollment"))
    p.dedicated_enrollment = get_bool(obj, "dedicated_enrollment", ctx);
  return p;
}

json limit_json(const std::optional<std::uint32_t>& v) {
  if (!v) return json("inf");
  return json(*v);
}

json app_policy_json(const AppPolicy& p) {
  json j;
  j["attempt_limit"] = limit_json(p.attempt_limit);
  j["lockout_periods"] = limit_json(p.lockout_periods);
  if (p.dedicated_enrollment) j["dedicated_enrollment"] = true;
  return j;
}

DeviceProfile parse_profile(const json& obj) {
  std::string ctx = "profile";
  if (obj.is_object() && obj.contains("name") && obj["name"].is_string())
    ctx = "profile \"" + obj["name"].get<std::string>() + "\"";
  check_keys(obj,
             {"name", "os", "tee", "sensor", "max_samples",
              "error_cancel_supported", "apps", "timed_lockout_secs",
              "pseudo_lockout_keyguard", "idle_timeout_hours", "far", "frr",
              "r_max", "hot_plug", "spi", "timing", "encrypted_channel",
              "touchid_semantics"},
             ctx);
  DeviceProfile p;
  p.name = get_string(obj, "name", ctx);
  p.os = get_string(obj, "os", ctx);
  p.tee = get_string(obj, "tee", ctx);

  const json& sensor = field(obj, "sensor", ctx);
  check_keys(sensor, {"manufacturer", "type", "tag"}, ctx + ".sensor");
  p.sensor_manufacturer = get_string(sensor, "manufacturer", ctx + ".sensor");
  p.sensor_type = get_string(sensor, "type", ctx + ".sensor");
  p.sensor_tag = get_string(sensor, "tag", ctx + ".sensor");

  p.max_samples = static_cast<int>(get_int(obj, "max_samples", ctx));
  p.error_cancel_supported = get_bool(obj, "error_cancel_supported", ctx);

  const json& apps = field(obj, "apps", ctx);
  check_keys(apps, {"screenlock", "payment", "privacy"}, ctx + ".apps");
  p.screenlock = parse_app_policy(field(apps, "screenlock", ctx + ".apps"),
                                  ctx + ".apps.screenlock");
  p.payment = parse_app_policy(field(apps, "payment", ctx + ".apps"),
                               ctx + ".apps.payment");
  p.privacy = parse_app_policy(field(apps, "privacy", ctx + ".apps"),
                               ctx + ".apps.privacy");

  p.timed_lockout_us = get_int(obj, "timed_lockout_secs", ctx) * kMicrosPerSecond;
  p.pseudo_lockout_keyguard = get_bool(obj, "pseudo_lockout_keyguard", ctx);
  p.idle_timeout_us =
      get_int(obj, "idle_timeout_hours", ctx) * 3600 * kMicrosPerSecond;
  p.far = get_number(obj, "far", ctx);
  p.frr = get_number(obj, "frr", ctx);
  p.r_max = static_cast<int>(get_int(obj, "r_max", ctx));
  p.hot_plug = get_bool(obj, "hot_plug", ctx);

  const json& spi = field(obj, "spi", ctx);
  std::string sctx = ctx + ".spi";
  check_keys(spi,
             {"clock_mhz", "fda_command", "bpp", "width_px", "height_px",
              "frames_first_sample", "frames_other_samples", "line_layout",
              "crc_variant", "byte_order"},
             sctx);
  p.spi.clock_mhz = get_number(spi, "clock_mhz", sctx);
  p.spi.fda_command = parse_hex(get_string(spi, "fda_command", sctx), sctx);
  p.spi.bpp = static_cast<int>(get_int(spi, "bpp", sctx));
  p.spi.width_px = static_cast<int>(get_int(spi, "width_px", sctx));
  p.spi.height_px = static_cast<int>(get_int(spi, "height_px", sctx));
  p.spi.frames_first_sample =
      static_cast<int>(get_int(spi, "frames_first_sample", sctx));
  p.spi.frames_other_samples =
      static_cast<int>(get_int(spi, "frames_other_samples", sctx));
  std::string layout = get_string(spi, "line_layout", sctx);
  if (layout != "serial_pixels_crc")
    parse_fail(sctx, "unsupported line_layout \"" + layout + "\"");
  p.spi.line_layout = LineLayout::SerialPixelsCrc;
  std::string crc = get_string(spi, "crc_variant", sctx);
  if (crc == "ccitt_false") p.spi.crc_variant = CrcVariant::CcittFalse;
  else if (crc == "xmodem") p.spi.crc_variant = CrcVariant::Xmodem;
  else if (crc == "modbus") p.spi.crc_variant = CrcVariant::Modbus;
  else if (crc == "arc") p.spi.crc_variant = CrcVariant::Arc;
  else parse_fail(sctx, "unknown crc_variant \"" + crc + "\"");
  std::string order = get_string(spi, "byte_order", sctx);
  if (order == "little_endian") p.spi.byte_order = ByteOrder::LittleEndian;
  else if (order == "big_endian") p.spi.byte_order = ByteOrder::BigEndian;
  else parse_fail(sctx, "unknown byte_order \"" + order + "\"");

  const json& t = field(obj, "timing", ctx);
  std::string tctx = ctx + ".timing";
  check_keys(t,
             {"t0_us", "t1_mean_us", "t2_mean_us", "t3_us", "d_us",
              "attempts_per_sec"},
             tctx);
  p.timing.t0_us = get_int(t, "t0_us", tctx);
  p.timing.t1_mean_us = get_int(t, "t1_mean_us", tctx);
  p.timing.t2_mean_us = get_int(t, "t2_mean_us", tctx);
  p.timing.t3_us = get_int(t, "t3_us", tctx);
  p.timing.d_us = get_int(t, "d_us", tctx);
  p.timing.attempts_per_sec = get_number(t, "attempts_per_sec", tctx);

  p.encrypted_channel = get_bool(obj, "encrypted_channel", ctx);
  p.touchid_semantics = get_bool(obj, "touchid_semantics", ctx);

  validate_profile(p);
  return p;
}

}  // namespace

void validate_profile(const DeviceProfile& p) {
  auto bad = [&](const std::string& what) {
    fail(Errc::InvariantViolation, "profile \"" + p.name + "\": " + what);
  };
  if (p.name.empty()) bad("name is empty");
  if (p.sensor_tag.empty()) bad("sensor tag is empty");
  if (p.max_samples < 1 || p.max_samples > 8) bad("max_samples out of range");
  for (AppId a : {AppId::ScreenLock, AppId::Payment, AppId::Privacy}) {
    const AppPolicy& ap = p.policy(a);
    if (ap.attempt_limit && *ap.attempt_limit < 1)
      bad(std::string(app_name(a)) + " attempt_limit must be >= 1");
    if (ap.attempt_limit && ap.lockout_periods && *ap.lockout_periods < 1)
      bad(std::string(app_name(a)) + " lockout_periods must be >= 1");
    if (!ap.attempt_limit && ap.lockout_periods)
      bad(std::string(app_name(a)) + " lockout_periods given without a limit");
  }
  if (p.timed_lockout_us <= 0) bad("timed_lockout must be positive");
  if (p.idle_timeout_us <= 0) bad("idle_timeout must be positive");
  if (!(p.far > 0.0 && p.far < 1.0)) bad("far must lie in (0,1)");
  if (!(p.frr >= 0.0 && p.frr < 1.0)) bad("frr must lie in [0,1)");
  if (p.r_max < 1) bad("r_max must be >= 1");
  if (p.spi.clock_mhz < 4.8 || p.spi.clock_mhz > 38.0)
    bad("spi clock outside the supported 4.8-38 MHz range");
  if (p.spi.fda_command.empty() || p.spi.fda_command.size() > 8)
    bad("fda_command must be 1-8 bytes");
  if (p.spi.bpp != 8 && p.spi.bpp != 16) bad("bpp must be 8 or 16");
  if (p.spi.width_px < 28 || p.spi.height_px < 1)
    bad("sensor shape too small");
  if (p.spi.frames_first_sample < 1 || p.spi.frames_other_samples < 1)
    bad("frame counts must be >= 1");
  if (p.timing.t0_us < 0 || p.timing.t1_mean_us <= 0 || p.timing.t2_mean_us < 0 ||
      p.timing.t3_us < 0 || p.timing.d_us < 0)
    bad("timing components must be non-negative (t1 positive)");
  if (!(p.timing.attempts_per_sec > 0.0)) bad("attempts_per_sec must be positive");
}

std::vector<DeviceProfile> parse_catalog(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, std::string("catalog is not valid JSON: ") + e.what());
  }
  check_keys(doc, {"catalog_version", "profiles"}, "catalog");
  if (get_int(doc, "catalog_version", "catalog") != 1)
    fail(Errc::ParseError, "catalog: unsupported catalog_version");
  const json& arr = field(doc, "profiles", "catalog");
  if (!arr.is_array() || arr.empty())
    fail(Errc::ParseError, "catalog: profiles must be a nonempty array");
  std::vector<DeviceProfile> out;
  std::set<std::string> names;
  for (const json& item : arr) {
    DeviceProfile p = parse_profile(item);
    if (!names.insert(p.name).second)
      fail(Errc::ParseError, "catalog: duplicate profile \"" + p.name + "\"");
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<DeviceProfile> load_profiles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open catalog " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_catalog(ss.str());
}

std::string serialize_catalog(const std::vector<DeviceProfile>& profiles) {
  json doc;
  doc["catalog_version"] = 1;
  json arr = json::array();
  for (const DeviceProfile& p : profiles) {
    json j;
    j["name"] = p.name;
    j["os"] = p.os;
    j["tee"] = p.tee;
    j["sensor"] = {{"manufacturer", p.sensor_manufacturer},
                   {"type", p.sensor_type},
                   {"tag", p.sensor_tag}};
    j["max_samples"] = p.max_samples;
    j["error_cancel_supported"] = p.error_cancel_supported;
    json apps;
    apps["screenlock"] = app_policy_json(p.screenlock);
    apps["payment"] = app_policy_json(p.payment);
    apps["privacy"] = app_policy_json(p.privacy);
    j["apps"] = apps;
    j["timed_lockout_secs"] = p.timed_lockout_us / kMicrosPerSecond;
    j["pseudo_lockout_keyguard"] = p.pseudo_lockout_keyguard;
    j["idle_timeout_hours"] = p.idle_timeout_us / (3600 * kMicrosPerSecond);
    j["far"] = p.far;
    j["frr"] = p.frr;
    j["r_max"] = p.r_max;
    j["hot_plug"] = p.hot_plug;
    json spi;
    spi["clock_mhz"] = p.spi.clock_mhz;
    spi["fda_command"] = to_hex(p.spi.fda_command);
    spi["bpp"] = p.spi.bpp;
    spi["width_px"] = p.spi.width_px;
    spi["height_px"] = p.spi.height_px;
    spi["frames_first_sample"] = p.spi.frames_first_sample;
    spi["frames_other_samples"] = p.spi.frames_other_samples;
    spi["line_layout"] = "serial_pixels_crc";
    switch (p.spi.crc_variant) {
      case CrcVariant::CcittFalse: spi["crc_variant"] = "ccitt_false"; break;
      case CrcVariant::Xmodem: spi["crc_variant"] = "xmodem"; break;
      case CrcVariant::Modbus: spi["crc_variant"] = "modbus"; break;
      case CrcVariant::Arc: spi["crc_variant"] = "arc"; break;
    }
    spi["byte_order"] = p.spi.byte_order == ByteOrder::LittleEndian
                            ? "little_endian"
                            : "big_endian";
    j["spi"] = spi;
    json t;
    t["t0_us"] = p.timing.t0_us;
    t["t1_mean_us"] = p.timing.t1_mean_us;
    t["t2_mean_us"] = p.timing.t2_mean_us;
    t["t3_us"] = p.timing.t3_us;
    t["d_us"] = p.timing.d_us;
    t["attempts_per_sec"] = p.timing.attempts_per_sec;
    j["timing"] = t;
    j["encrypted_channel"] = p.encrypted_channel;
    j["touchid_semantics"] = p.touchid_semantics;
    arr.push_back(std::move(j));
  }
  doc["profiles"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::vector<DeviceProfile> load_fixture_catalog() {
  return load_profiles(FPSIM_FIXTURE_CATALOG);
}

const DeviceProfile& find_profile(const std::vector<DeviceProfile>& catalog,
                                  const std::string& name) {
  for (const DeviceProfile& p : catalog)
    if (p.name == name) return p;
  fail(Errc::ValidationError, "unknown profile \"" + name + "\"");
}

}  // namespace fpsim::core
