#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpsim/core/types.hpp"

namespace fpsim::codec {

// One sensor line on the wire: 2-byte big-endian serial, pixel payload at the
// profile's bpp/byte order, 2-byte big-endian CRC over serial+payload.
struct WireLine {
  std::uint16_t serial = 0;
  std::vector<std::uint8_t> payload;
  std::uint16_t crc = 0;
};

// One MISO frame: 2-byte big-endian frame index header followed by a chunk of
// the sample's concatenated line stream. The final frame may run short.
struct WireFrame {
  std::uint16_t index = 0;
  std::vector<std::uint8_t> chunk;
};

// Everything exchanged for one FDA (fingerprint-data-acquisition) request.
struct FdaTransaction {
  std::vector<std::uint8_t> command;  // MOSI bytes, sent before every frame
  std::vector<WireFrame> frames;
  int sample_index = 1;  // 1-based within the attempt
  bool glitched = false;  // MISO shorted at data start, nothing delivered
  // Encrypted-channel profiles carry the payload opaquely; only the
  // sensor/TEE pair can read it.
  std::optional<core::RawFingerprintImage> sealed;
};

struct DecodeResult {
  std::optional<core::RawFingerprintImage> image;
  core::Errc error = core::Errc::ParseError;
  int error_line = -1;  // row index for CrcMismatch
  std::string detail;

  bool ok() const { return image.has_value(); }
};

int frames_for_sample(const core::SpiProfile& spi, int sample_index);

// Bytes of one sample's line stream (before frame headers).
std::size_t line_stream_size(const core::SpiProfile& spi);

// Serializes an image into the wire transaction the sensor would emit.
FdaTransaction encode_sample(const core::RawFingerprintImage& img,
                             const core::DeviceProfile& profile,
                             int sample_index);

// Reverses encode_sample with full integrity checking. Never throws for data
// errors; those come back in the result so the engine can treat them as
// sample-level Error results.
DecodeResult decode_sample(const FdaTransaction& tx,
                           const core::DeviceProfile& profile);

// Offsets of every FDA command occurrence in a MOSI byte stream.
std::vector<std::size_t> detect_fda(std::span<const std::uint8_t> mosi,
                                    const core::SpiProfile& spi);

// Linear dynamic-range rescale between 8 and 16 bpp. Shape and metadata
// fields are preserved; a pixel-embedded tag does not survive a bpp change.
core::RawFingerprintImage adapt_pixels(const core::RawFingerprintImage& img,
                                       int target_bpp);

// Flips one bit in a transaction's frame bytes; bit_index addresses the
// concatenated chunk payloads (headers excluded). Returns the affected row.
int flip_payload_bit(FdaTransaction& tx, const core::SpiProfile& spi,
                     std::size_t bit_index);

}  // namespace fpsim::codec
