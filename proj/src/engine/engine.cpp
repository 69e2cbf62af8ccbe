#include "fpsim/engine/engine.hpp"

#include "fpsim/codec/codec.hpp"

namespace fpsim::engine {

namespace {

constexpr core::StreamId kFarStream = core::stream_id("engine.match.far");
constexpr core::StreamId kFrrStream = core::stream_id("engine.match.frr");
constexpr core::StreamId kLiveStream = core::stream_id("engine.liveness");

}  // namespace

const char* attempt_kind_name(AttemptKind k) {
  switch (k) {
    case AttemptKind::Success: return "success";
    case AttemptKind::Failed: return "failed";
    case AttemptKind::Canceled: return "canceled";
    case AttemptKind::NonLiveTerminated: return "nonlive";
  }
  return "?";
}

void EnrolledSet::enroll(std::uint64_t identity,
                         const core::DeviceProfile& profile) {
  if (identity == 0)
    core::fail(core::Errc::InvariantViolation, "identity 0 is reserved");
  if (contains(identity))
    core::fail(core::Errc::InvariantViolation, "identity already enrolled");
  if (static_cast<int>(templates_.size()) >= profile.r_max)
    core::fail(core::Errc::EnrollmentLimit,
               "enrollment slots exhausted for this device");
  templates_.push_back(Template{identity});
}

bool EnrolledSet::contains(std::uint64_t identity) const {
  for (const Template& t : templates_)
    if (t.identity_id == identity) return true;
  return false;
}

core::RawFingerprintImage compensate(const core::RawFingerprintImage& raw,
                                     const core::RawFingerprintImage& base) {
  if (raw.width != base.width || raw.height != base.height ||
      raw.bpp != base.bpp)
    core::fail(core::Errc::ShapeMismatch, "compensation base shape mismatch");
  core::RawFingerprintImage out;
  out.width = raw.width;
  out.height = raw.height;
  out.bpp = raw.bpp;
  out.pixels.resize(raw.pixels.size());
  const std::uint16_t mask = core::max_pixel(raw.bpp);
  for (std::size_t i = 0; i < raw.pixels.size(); ++i)
    out.pixels[i] =
        static_cast<std::uint16_t>((raw.pixels[i] - base.pixels[i]) & mask);
  return out;
}

double spoof_scale(core::AlignmentQuality q) {
  switch (q) {
    case core::AlignmentQuality::None: return 0.0;
    case core::AlignmentQuality::Epoch20: return 0.45;
    case core::AlignmentQuality::Epoch40: return 0.63;
    case core::AlignmentQuality::Epoch60: return 0.66;
    case core::AlignmentQuality::Epoch80: return 0.71;
    case core::AlignmentQuality::Epoch100: return 0.44;
    case core::AlignmentQuality::Native: return 1.0;
  }
  return 0.0;
}

double liveness_error_rate(core::AlignmentQuality q) {
  (void)q;
  return 0.0;
}

Liveness liveness_check(const core::RawFingerprintImage& compensated,
                        const core::DeviceProfile& profile,
                        const core::SeedSource& seeds) {
  if (!compensated.tagged) return Liveness::NonLive;
  if (compensated.style.source_sensor == core::fnv32(profile.sensor_tag)) {
    // Captured by this sensor family; liveness holds by construction.
  } else {
    if (compensated.style.quality == core::AlignmentQuality::None)
      return Liveness::NonLive;
    if (compensated.style.aligned_to != core::fnv32(profile.name))
      return Liveness::NonLive;
  }
  const double rate = liveness_error_rate(compensated.style.quality);
  if (rate > 0.0 && seeds.draw(kLiveStream, compensated.identity_id,
                               compensated.token_bits) < rate)
    return Liveness::NonLive;
  return Liveness::Live;
}

bool match_meta(std::uint64_t identity, std::uint32_t token_bits,
                core::AlignmentQuality quality, const EnrolledSet& enrolled,
                const core::DeviceProfile& profile,
                const core::SeedSource& seeds) {
  if (identity == 0) return false;
  const double scale = spoof_scale(quality);
  if (scale <= 0.0) return false;
  if (enrolled.contains(identity)) {
    const double token = token_bits * 0x1.0p-32;
    if (token >= scale) return false;
    return seeds.draw(kFrrStream, identity, token_bits) >= profile.frr;
  }
  for (const Template& t : enrolled.templates()) {
    if (seeds.draw(kFarStream, t.identity_id, identity, token_bits) <
        profile.far * scale)
      return true;
  }
  return false;
}

bool match_sample(const core::RawFingerprintImage& compensated,
                  const EnrolledSet& enrolled,
                  const core::DeviceProfile& profile,
                  const core::SeedSource& seeds) {
  if (!compensated.tagged) return false;
  return match_meta(compensated.identity_id, compensated.token_bits,
                    compensated.style.quality, enrolled, profile, seeds);
}

AttemptOutcome authenticate_attempt(bus::BusSession& session,
                                    const ImageSource& source,
                                    const EnrolledSet& enrolled,
                                    const core::DeviceProfile& profile,
                                    const core::SeedSource& seeds,
                                    const core::RawFingerprintImage& fpn,
                                    core::Micros press_at,
                                    const AttemptConfig& cfg) {
  if (enrolled.empty())
    core::fail(core::Errc::NoEnrollment, "no enrolled templates");

  AttemptOutcome out;
  out.press_at = press_at;
  const core::TimingProfile& tm = profile.timing;
  const core::Micros step = tm.t1_mean_us + tm.t2_mean_us;

  int n = 0;  // fully transferred samples
  bool matched = false;
  bool error_seen = false;
  bool ended_early = false;
  AttemptKind early_kind = AttemptKind::Failed;

  for (int s = 1; s <= profile.max_samples; ++s) {
    const core::Micros ds =
        press_at + tm.t0_us + static_cast<core::Micros>(s - 1) * step;
    out.samples_used = s;
    bus::FdaResult fda = session.run_fda(
        s, ds, [&]() -> const core::RawFingerprintImage& { return source(s); });

    SampleKind kind = SampleKind::Error;
    if (!fda.delivered.glitched) {
      n += 1;
      std::optional<core::RawFingerprintImage> received;
      if (profile.encrypted_channel) {
        if (fda.delivered.sealed) received = *fda.delivered.sealed;
      } else {
        codec::DecodeResult dr = codec::decode_sample(fda.delivered, profile);
        if (dr.ok()) received = std::move(*dr.image);
      }
      if (received) {
        core::RawFingerprintImage comp = compensate(*received, fpn);
        core::extract_tag(comp);
        if (liveness_check(comp, profile, seeds) == Liveness::NonLive) {
          kind = SampleKind::NonLive;
        } else if (match_sample(comp, enrolled, profile, seeds)) {
          kind = SampleKind::Matched;
          out.matched_identity = comp.identity_id;
        } else {
          kind = SampleKind::Unmatched;
        }
      }
    }
    out.samples.push_back(kind);

    const core::Micros sample_end = fda.data_end;
    switch (kind) {
      case SampleKind::Matched:
        matched = true;
        out.callbacks.push_back({CallbackEvent::Kind::OnAcquired, sample_end,
                                 kAcquiredGood, 0, 0, false});
        break;
      case SampleKind::Unmatched:
        out.callbacks.push_back({CallbackEvent::Kind::OnAcquired, sample_end,
                                 kAcquiredGood, 0, 0, false});
        break;
      case SampleKind::NonLive:
        out.callbacks.push_back({CallbackEvent::Kind::OnAcquired, sample_end,
                                 kAcquiredVendor, 0, kVendorCodeNonLive,
                                 false});
        ended_early = true;
        early_kind = AttemptKind::NonLiveTerminated;
        break;
      case SampleKind::Error:
        error_seen = true;
        // Without error-cancel support the HAL swallows the broken transfer
        // and moves on; with it the attempt is canceled unless the sensor is
        // scanning every sample for the cancel check.
        if (profile.error_cancel_supported && !cfg.scan_all_samples) {
          ended_early = true;
          early_kind = AttemptKind::Canceled;
        }
        break;
    }
    if (ended_early) break;
    if (matched && !cfg.scan_all_samples) break;
  }

  if (ended_early) {
    out.kind = early_kind;
  } else if (matched) {
    out.kind = AttemptKind::Success;
  } else if (error_seen && profile.error_cancel_supported) {
    out.kind = AttemptKind::Canceled;
  } else {
    out.kind = AttemptKind::Failed;
  }

  out.completed_samples = n;
  out.end_at = press_at + tm.t0_us + static_cast<core::Micros>(n) * step +
               tm.t3_us + tm.d_us;

  if (out.kind == AttemptKind::Canceled) {
    out.callbacks.push_back({CallbackEvent::Kind::OnError, out.end_at, 0,
                             kErrorVendor, kVendorCodeCanceled, false});
  } else if (out.kind == AttemptKind::Success) {
    out.callbacks.push_back({CallbackEvent::Kind::OnAuthenticated, out.end_at,
                             0, 0, 0, true});
  } else if (out.kind == AttemptKind::Failed) {
    out.callbacks.push_back({CallbackEvent::Kind::OnAuthenticated, out.end_at,
                             0, 0, 0, false});
  }
  return out;
}

}  // namespace fpsim::engine
