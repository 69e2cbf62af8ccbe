#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "fpsim/core/types.hpp"

namespace fpsim::codec {

enum class Direction : std::uint8_t {
  Mosi = 0,        // master -> sensor commands
  MisoSensor = 1,  // true sensor output (pre-MITM)
  MisoMaster = 2,  // what the SoC actually received
  Glitch = 3,      // transient short marker, no payload
};

const char* direction_name(Direction d);

struct CaptureRecord {
  core::Micros t_us = 0;
  Direction dir = Direction::Mosi;
  std::vector<std::uint8_t> bytes;

  bool operator==(const CaptureRecord&) const = default;
};

// Streaming binary writer: "FPCAP01\n" magic, then per record
// i64 timestamp, u8 direction, u32 length, payload bytes (all little-endian).
class CaptureWriter {
 public:
  explicit CaptureWriter(const std::string& path);
  ~CaptureWriter();
  CaptureWriter(const CaptureWriter&) = delete;
  CaptureWriter& operator=(const CaptureWriter&) = delete;

  void write(core::Micros t_us, Direction dir,
             std::span<const std::uint8_t> bytes);
  std::uint64_t records_written() const { return count_; }

 private:
  std::FILE* f_ = nullptr;
  std::uint64_t count_ = 0;
};

std::vector<CaptureRecord> read_capture(const std::string& path);

// Human-readable listing; payloads truncated to max_bytes per record.
std::string hex_listing(const std::vector<CaptureRecord>& records,
                        std::size_t max_bytes = 32);

}  // namespace fpsim::codec
