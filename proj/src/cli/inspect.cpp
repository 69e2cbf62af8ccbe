#include "fpsim/cli/inspect.hpp"

#include <sstream>

#include "fpsim/codec/capture.hpp"
#include "fpsim/codec/codec.hpp"
#include "fpsim/core/image.hpp"
#include "fpsim/engine/engine.hpp"

namespace fpsim::cli {

namespace {

codec::WireFrame to_frame(const std::vector<std::uint8_t>& bytes) {
  codec::WireFrame f;
  if (bytes.size() >= 2)
    f.index = static_cast<std::uint16_t>(bytes[0] << 8 | bytes[1]);
  if (bytes.size() > 2) f.chunk.assign(bytes.begin() + 2, bytes.end());
  return f;
}

int guess_sample_index(const core::DeviceProfile& profile, int frame_count,
                       int position) {
  for (int i = 1; i <= profile.max_samples; ++i)
    if (codec::frames_for_sample(profile.spi, i) == frame_count) return i;
  return position;
}

}  // namespace

std::string inspect_capture(const std::string& path,
                            const core::DeviceProfile& profile) {
  const auto records = codec::read_capture(path);
  const core::SpiProfile& spi = profile.spi;

  std::size_t counts[4] = {0, 0, 0, 0};
  std::vector<std::uint8_t> mosi;
  std::vector<core::Micros> glitches;
  std::vector<std::vector<codec::WireFrame>> samples;
  for (const codec::CaptureRecord& rec : records) {
    counts[static_cast<int>(rec.dir)]++;
    switch (rec.dir) {
      case codec::Direction::Mosi:
        mosi.insert(mosi.end(), rec.bytes.begin(), rec.bytes.end());
        break;
      case codec::Direction::Glitch:
        glitches.push_back(rec.t_us);
        break;
      case codec::Direction::MisoMaster: {
        codec::WireFrame f = to_frame(rec.bytes);
        if (f.index == 0 || samples.empty()) samples.emplace_back();
        samples.back().push_back(std::move(f));
        break;
      }
      case codec::Direction::MisoSensor:
        break;
    }
  }

  std::ostringstream out;
  out << "capture: " << records.size() << " records (mosi " << counts[0]
      << ", miso-sensor " << counts[1] << ", miso-master " << counts[2]
      << ", glitch " << counts[3] << ")\n";
  out << "fda commands on mosi: " << codec::detect_fda(mosi, spi).size()
      << "\n";
  for (core::Micros t : glitches) out << "glitch marker at t=" << t << "us\n";

  const core::RawFingerprintImage base = core::fpn_base(profile);
  int n = 0;
  for (const auto& frames : samples) {
    ++n;
    codec::FdaTransaction tx;
    tx.command = spi.fda_command;
    tx.frames = frames;
    tx.sample_index =
        guess_sample_index(profile, static_cast<int>(frames.size()), n);
    codec::DecodeResult dr = codec::decode_sample(tx, profile);
    out << "sample " << n << " (" << frames.size() << " frames): ";
    if (!dr.ok()) {
      out << "decode failed: " << dr.detail << "\n";
      continue;
    }
    core::RawFingerprintImage img = engine::compensate(*dr.image, base);
    out << img.width << "x" << img.height << " @" << img.bpp << "bpp";
    if (core::extract_tag(img))
      out << ", identity=" << img.identity_id
          << ", quality=" << core::alignment_name(img.style.quality)
          << (img.style.source_sensor == core::fnv32(profile.sensor_tag)
                  ? ", native source"
                  : ", foreign source");
    else
      out << ", no readable tag";
    out << "\n";
  }
  if (samples.empty()) out << "no master-side samples captured\n";
  return out.str();
}

}  // namespace fpsim::cli
