#include "fpsim/codec/codec.hpp"

#include "fpsim/codec/crc16.hpp"
#include "fpsim/core/image.hpp"
#include "fpsim/core/rng.hpp"

namespace fpsim::codec {

using core::Errc;
using core::RawFingerprintImage;

namespace {

int row_bytes(const core::SpiProfile& spi) {
  return spi.width_px * (spi.bpp / 8);
}

int line_size(const core::SpiProfile& spi) { return 2 + row_bytes(spi) + 2; }

DecodeResult err(Errc code, std::string detail, int line = -1) {
  DecodeResult r;
  r.error = code;
  r.error_line = line;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

int frames_for_sample(const core::SpiProfile& spi, int sample_index) {
  if (sample_index < 1)
    core::fail(Errc::InvariantViolation, "sample_index must be >= 1");
  return sample_index == 1 ? spi.frames_first_sample : spi.frames_other_samples;
}

std::size_t line_stream_size(const core::SpiProfile& spi) {
  return static_cast<std::size_t>(spi.height_px) * line_size(spi);
}

FdaTransaction encode_sample(const RawFingerprintImage& img,
                             const core::DeviceProfile& profile,
                             int sample_index) {
  const core::SpiProfile& spi = profile.spi;
  if (img.width != spi.width_px || img.height != spi.height_px)
    core::fail(Errc::ShapeMismatch, "image shape does not match the sensor");
  if (img.bpp != spi.bpp)
    core::fail(Errc::BppUnsupported, "image bpp does not match the sensor");
  const std::uint16_t cap = core::max_pixel(img.bpp);
  for (std::uint16_t v : img.pixels)
    if (v > cap) core::fail(Errc::InvariantViolation, "pixel exceeds bpp range");

  FdaTransaction tx;
  tx.command = spi.fda_command;
  tx.sample_index = sample_index;
  const int frames = frames_for_sample(spi, sample_index);
  const std::size_t total = line_stream_size(spi);

  if (profile.encrypted_channel) {
    // Sealed session: the wire carries ciphertext of the right length.
    tx.sealed = img;
    std::vector<std::uint8_t> stream(total);
    std::uint64_t ks = core::fnv64(profile.name) ^ 0x7e55edULL;
    ks = core::mix64(ks ^ img.identity_id ^ (std::uint64_t{img.token_bits} << 16) ^
                     static_cast<std::uint64_t>(sample_index));
    for (std::size_t i = 0; i < total; i += 8) {
      std::uint64_t w = core::mix64(ks ^ (i / 8));
      for (std::size_t j = 0; j < 8 && i + j < total; ++j)
        stream[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
    const std::size_t chunk = (total + frames - 1) / frames;
    for (int f = 0; f < frames; ++f) {
      WireFrame wf;
      wf.index = static_cast<std::uint16_t>(f);
      const std::size_t a = f * chunk;
      const std::size_t b = std::min(total, a + chunk);
      wf.chunk.assign(stream.begin() + a, stream.begin() + (b > a ? b : a));
      tx.frames.push_back(std::move(wf));
    }
    return tx;
  }

  std::vector<std::uint8_t> stream;
  stream.reserve(total);
  const Crc16 crc(spi.crc_variant);
  const int rb = row_bytes(spi);
  for (int y = 0; y < spi.height_px; ++y) {
    const std::size_t line_off = stream.size();
    stream.push_back(static_cast<std::uint8_t>(y >> 8));
    stream.push_back(static_cast<std::uint8_t>(y & 0xFF));
    const std::uint16_t* row = img.pixels.data() +
                               static_cast<std::size_t>(y) * spi.width_px;
    if (spi.bpp == 8) {
      for (int x = 0; x < spi.width_px; ++x)
        stream.push_back(static_cast<std::uint8_t>(row[x]));
    } else if (spi.byte_order == core::ByteOrder::LittleEndian) {
      for (int x = 0; x < spi.width_px; ++x) {
        stream.push_back(static_cast<std::uint8_t>(row[x] & 0xFF));
        stream.push_back(static_cast<std::uint8_t>(row[x] >> 8));
      }
    } else {
      for (int x = 0; x < spi.width_px; ++x) {
        stream.push_back(static_cast<std::uint8_t>(row[x] >> 8));
        stream.push_back(static_cast<std::uint8_t>(row[x] & 0xFF));
      }
    }
    const std::uint16_t c = crc.compute(
        std::span<const std::uint8_t>(stream.data() + line_off, 2 + rb));
    stream.push_back(static_cast<std::uint8_t>(c >> 8));
    stream.push_back(static_cast<std::uint8_t>(c & 0xFF));
  }

  const std::size_t chunk = (total + frames - 1) / frames;
  for (int f = 0; f < frames; ++f) {
    WireFrame wf;
    wf.index = static_cast<std::uint16_t>(f);
    const std::size_t a = std::min(total, static_cast<std::size_t>(f) * chunk);
    const std::size_t b = std::min(total, a + chunk);
    wf.chunk.assign(stream.begin() + a, stream.begin() + b);
    tx.frames.push_back(std::move(wf));
  }
  return tx;
}

DecodeResult decode_sample(const FdaTransaction& tx,
                           const core::DeviceProfile& profile) {
  const core::SpiProfile& spi = profile.spi;
  if (profile.encrypted_channel)
    return err(Errc::ChannelOpaque, "channel is encrypted end to end");
  if (tx.command != spi.fda_command)
    return err(Errc::UnknownCommand, "command bytes do not match the profile");

  const std::size_t expected = line_stream_size(spi);
  if (tx.frames.empty())
    return err(Errc::TruncatedFrame,
               tx.glitched ? "no data delivered (glitched)" : "no frames delivered");

  std::size_t total = 0;
  for (std::size_t i = 0; i < tx.frames.size(); ++i) {
    if (tx.frames[i].index != i)
      return err(Errc::TruncatedFrame, "frame index out of order");
    total += tx.frames[i].chunk.size();
  }
  if (total < expected) return err(Errc::TruncatedFrame, "sample data truncated");
  if (total > expected)
    return err(Errc::TruncatedFrame, "trailing bytes after sample data");
  const int want_frames = frames_for_sample(spi, tx.sample_index);
  if (static_cast<int>(tx.frames.size()) != want_frames)
    return err(Errc::TruncatedFrame, "frame count differs from the protocol");

  std::vector<std::uint8_t> stream;
  stream.reserve(expected);
  for (const WireFrame& f : tx.frames)
    stream.insert(stream.end(), f.chunk.begin(), f.chunk.end());

  RawFingerprintImage img;
  img.width = spi.width_px;
  img.height = spi.height_px;
  img.bpp = spi.bpp;
  img.pixels.resize(img.pixel_count());

  const Crc16 crc(spi.crc_variant);
  const int rb = row_bytes(spi);
  const int ls = line_size(spi);
  for (int y = 0; y < spi.height_px; ++y) {
    const std::uint8_t* line = stream.data() + static_cast<std::size_t>(y) * ls;
    const std::uint16_t stored =
        static_cast<std::uint16_t>((line[2 + rb] << 8) | line[2 + rb + 1]);
    const std::uint16_t computed =
        crc.compute(std::span<const std::uint8_t>(line, 2 + rb));
    if (stored != computed)
      return err(Errc::CrcMismatch, "line checksum mismatch", y);
    const std::uint16_t serial =
        static_cast<std::uint16_t>((line[0] << 8) | line[1]);
    if (serial != y)
      return err(Errc::TruncatedFrame, "line serial out of order", y);
    std::uint16_t* row = img.pixels.data() + static_cast<std::size_t>(y) * spi.width_px;
    const std::uint8_t* p = line + 2;
    if (spi.bpp == 8) {
      for (int x = 0; x < spi.width_px; ++x) row[x] = p[x];
    } else if (spi.byte_order == core::ByteOrder::LittleEndian) {
      for (int x = 0; x < spi.width_px; ++x)
        row[x] = static_cast<std::uint16_t>(p[2 * x] | (p[2 * x + 1] << 8));
    } else {
      for (int x = 0; x < spi.width_px; ++x)
        row[x] = static_cast<std::uint16_t>((p[2 * x] << 8) | p[2 * x + 1]);
    }
  }

  core::extract_tag(img);
  DecodeResult r;
  r.image = std::move(img);
  r.error_line = -1;
  return r;
}

std::vector<std::size_t> detect_fda(std::span<const std::uint8_t> mosi,
                                    const core::SpiProfile& spi) {
  std::vector<std::size_t> out;
  const auto& cmd = spi.fda_command;
  if (cmd.empty() || mosi.size() < cmd.size()) return out;
  for (std::size_t i = 0; i + cmd.size() <= mosi.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < cmd.size(); ++j)
      if (mosi[i + j] != cmd[j]) {
        hit = false;
        break;
      }
    if (hit) out.push_back(i);
  }
  return out;
}

RawFingerprintImage adapt_pixels(const RawFingerprintImage& img, int target_bpp) {
  if (img.bpp != 8 && img.bpp != 16)
    core::fail(Errc::BppUnsupported, "source bpp must be 8 or 16");
  if (target_bpp != 8 && target_bpp != 16)
    core::fail(Errc::BppUnsupported, "target bpp must be 8 or 16");
  RawFingerprintImage out = img;
  if (target_bpp == img.bpp) return out;
  out.bpp = target_bpp;
  out.tagged = false;  // one byte per pixel no longer holds after rescale
  if (target_bpp == 16) {
    for (auto& v : out.pixels) v = static_cast<std::uint16_t>(v * 257u);
  } else {
    for (auto& v : out.pixels)
      v = static_cast<std::uint16_t>((v * 255u + 32767u) / 65535u);
  }
  return out;
}

int flip_payload_bit(FdaTransaction& tx, const core::SpiProfile& spi,
                     std::size_t bit_index) {
  std::size_t byte_index = bit_index / 8;
  std::size_t off = byte_index;
  for (WireFrame& f : tx.frames) {
    if (off < f.chunk.size()) {
      f.chunk[off] ^= static_cast<std::uint8_t>(1u << (bit_index % 8));
      return static_cast<int>(byte_index / line_size(spi));
    }
    off -= f.chunk.size();
  }
  core::fail(Errc::InvariantViolation, "bit index beyond transaction payload");
}

}  // namespace fpsim::codec
