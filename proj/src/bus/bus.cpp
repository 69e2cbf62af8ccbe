#include "fpsim/bus/bus.hpp"

namespace fpsim::bus {

using core::Errc;
using core::Micros;

SpdtState spdt_state(SpdtMode m) {
  switch (m) {
    case SpdtMode::Listen: return {0, 0};
    case SpdtMode::Eavesdrop: return {1, 0};
    case SpdtMode::Replace: return {1, 1};
    case SpdtMode::Glitch: return {0, 1};
  }
  return {0, 0};
}

BusSession::BusSession(const core::DeviceProfile& profile, bool adversary_attached)
    : profile_(profile), attached_(adversary_attached) {}

void BusSession::set_mode(SpdtMode mode, Micros now) {
  if (!attached_)
    core::fail(Errc::InvariantViolation, "no adversary hardware attached");
  steady_ = spdt_state(mode);
  plan_.eavesdrop = (mode == SpdtMode::Eavesdrop);
  if (mode == SpdtMode::Listen) plan_ = AttackPlan{};
  plan_set_at_ = now;
}

void BusSession::set_plan(AttackPlan plan, Micros now) {
  if (!attached_)
    core::fail(Errc::InvariantViolation, "no adversary hardware attached");
  plan_ = std::move(plan);
  plan_set_at_ = now;
  if (!plan_.inject.empty())
    steady_ = spdt_state(SpdtMode::Replace);
  else if (plan_.eavesdrop)
    steady_ = spdt_state(SpdtMode::Eavesdrop);
  else
    steady_ = spdt_state(SpdtMode::Listen);
}

void BusSession::emit(Micros t, BusLine line, std::span<const std::uint8_t> bytes,
                      codec::Direction dir, bool to_capture) {
  events_.push_back(BusEvent{t, line, bytes.size()});
  if (capture_ && to_capture) capture_->write(t, dir, bytes);
}

void BusSession::check_switch_latency(Micros data_start) const {
  if (data_start - plan_set_at_ < kSwitchBudgetUs)
    core::fail(Errc::SwitchTooSlow,
               "switch change landed inside the transfer window");
}

FdaResult BusSession::run_fda(int sample_index, Micros data_start,
                              const SensorSource& sensor_source) {
  const core::SpiProfile& spi = profile_.spi;
  const Micros t1 = profile_.timing.t1_mean_us;

  const bool glitch =
      attached_ && plan_.glitch_at && *plan_.glitch_at == sample_index;
  auto inj = plan_.inject.find(sample_index);
  const bool injected = attached_ && inj != plan_.inject.end();
  const bool crc_rw = attached_ && plan_.corrupt_crc_at &&
                      *plan_.corrupt_crc_at == sample_index;
  const bool eaves = attached_ && plan_.eavesdrop;

  if (glitch || injected || crc_rw || eaves) check_switch_latency(data_start);
  // The glitch is purely electrical, so it survives encryption; everything
  // that needs to read or forge protocol bytes does not.
  if (profile_.encrypted_channel && (injected || crc_rw))
    core::fail(Errc::ChannelOpaque, "cannot forge traffic on a sealed channel");

  FdaResult r;
  r.data_start = data_start;
  r.injected = injected;
  r.glitched = glitch;
  r.crc_rewritten = crc_rw;

  if (glitch) {
    // The transient short kills the transfer at data start: the master sees a
    // dead line immediately, nothing is delivered and no data time elapses.
    emit(data_start, BusLine::Mosi, spi.fda_command, codec::Direction::Mosi, true);
    emit(data_start, BusLine::Glitch, {}, codec::Direction::Glitch, true);
    r.delivered.command = spi.fda_command;
    r.delivered.sample_index = sample_index;
    r.delivered.glitched = true;
    r.data_end = data_start;
    return r;
  }

  // Sensor-side bytes exist physically, but materializing them costs time
  // only when something observes them.
  const bool sensor_observed = !injected || eaves || capture_ != nullptr;
  codec::FdaTransaction sensor_tx;
  if (sensor_observed) sensor_tx = codec::encode_sample(sensor_source(), profile_, sample_index);

  codec::FdaTransaction delivered =
      injected ? codec::encode_sample(inj->second, profile_, sample_index)
               : std::move(sensor_tx);
  const codec::FdaTransaction* sensor_side = injected && sensor_observed
                                                 ? &sensor_tx
                                                 : nullptr;

  if (crc_rw) {
    // Rewrites the stream's final checksum bytes in flight; payload length
    // and timing are untouched.
    int left = 2;
    for (auto f = delivered.frames.rbegin();
         f != delivered.frames.rend() && left > 0; ++f) {
      for (auto b = f->chunk.rbegin(); b != f->chunk.rend() && left > 0; ++b) {
        *b ^= 0xFF;
        --left;
      }
    }
  }

  const int frames = static_cast<int>(delivered.frames.size());
  std::vector<std::uint8_t> wire;
  for (int f = 0; f < frames; ++f) {
    const Micros slice = data_start + (t1 * f) / frames;
    emit(slice, BusLine::Mosi, spi.fda_command, codec::Direction::Mosi, true);
    auto frame_bytes = [&](const codec::WireFrame& wf) -> std::span<const std::uint8_t> {
      wire.clear();
      wire.reserve(2 + wf.chunk.size());
      wire.push_back(static_cast<std::uint8_t>(wf.index >> 8));
      wire.push_back(static_cast<std::uint8_t>(wf.index & 0xFF));
      wire.insert(wire.end(), wf.chunk.begin(), wf.chunk.end());
      return wire;
    };
    if (sensor_side) {
      events_.push_back(BusEvent{slice, BusLine::MisoSensor,
                                 2 + sensor_side->frames[f].chunk.size()});
      if (capture_)
        capture_->write(slice, codec::Direction::MisoSensor,
                        frame_bytes(sensor_side->frames[f]));
    }
    events_.push_back(BusEvent{slice, BusLine::MisoMaster,
                               2 + delivered.frames[f].chunk.size()});
    if (capture_)
      capture_->write(slice, codec::Direction::MisoMaster,
                      frame_bytes(delivered.frames[f]));
  }

  if (eaves && sensor_observed) {
    ++eaves_count_;
    events_.push_back(BusEvent{data_start, BusLine::MisoAdversary, 0});
    if (eaves_store_.size() < eaves_cap_) {
      codec::DecodeResult dr =
          codec::decode_sample(injected ? sensor_tx : delivered, profile_);
      if (dr.ok()) eaves_store_.push_back(std::move(*dr.image));
    }
  }

  r.delivered = std::move(delivered);
  r.data_end = data_start + t1;
  return r;
}

Micros transaction_duration(const core::DeviceProfile& profile, int n_samples) {
  return static_cast<Micros>(n_samples) *
         (profile.timing.t1_mean_us + profile.timing.t2_mean_us);
}

}  // namespace fpsim::bus
