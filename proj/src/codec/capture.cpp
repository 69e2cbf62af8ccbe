#include "fpsim/codec/capture.hpp"

#include <cinttypes>
#include <cstring>

namespace fpsim::codec {

using core::Errc;

namespace {
constexpr char kMagic[8] = {'F', 'P', 'C', 'A', 'P', '0', '1', '\n'};
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Mosi: return "MOSI";
    case Direction::MisoSensor: return "MISO_S";
    case Direction::MisoMaster: return "MISO_M";
    case Direction::Glitch: return "GLITCH";
  }
  return "?";
}

CaptureWriter::CaptureWriter(const std::string& path) {
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) core::fail(Errc::IoError, "cannot open capture file " + path);
  std::fwrite(kMagic, 1, sizeof(kMagic), f_);
}

CaptureWriter::~CaptureWriter() {
  if (f_) std::fclose(f_);
}

void CaptureWriter::write(core::Micros t_us, Direction dir,
                          std::span<const std::uint8_t> bytes) {
  std::uint8_t head[13];
  std::uint64_t t = static_cast<std::uint64_t>(t_us);
  for (int i = 0; i < 8; ++i) head[i] = static_cast<std::uint8_t>(t >> (8 * i));
  head[8] = static_cast<std::uint8_t>(dir);
  std::uint32_t len = static_cast<std::uint32_t>(bytes.size());
  for (int i = 0; i < 4; ++i)
    head[9 + i] = static_cast<std::uint8_t>(len >> (8 * i));
  std::fwrite(head, 1, sizeof(head), f_);
  if (!bytes.empty()) std::fwrite(bytes.data(), 1, bytes.size(), f_);
  ++count_;
}

std::vector<CaptureRecord> read_capture(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) core::fail(Errc::IoError, "cannot open capture file " + path);
  struct Closer {
    std::FILE* f;
    ~Closer() { std::fclose(f); }
  } closer{f};

  char magic[8];
  if (std::fread(magic, 1, 8, f) != 8 || std::memcmp(magic, kMagic, 8) != 0)
    core::fail(Errc::ParseError, "not a capture file: " + path);

  std::vector<CaptureRecord> out;
  for (;;) {
    std::uint8_t head[13];
    std::size_t got = std::fread(head, 1, sizeof(head), f);
    if (got == 0) break;
    if (got != sizeof(head))
      core::fail(Errc::ParseError, "truncated capture record header");
    CaptureRecord rec;
    std::uint64_t t = 0;
    for (int i = 0; i < 8; ++i) t |= static_cast<std::uint64_t>(head[i]) << (8 * i);
    rec.t_us = static_cast<core::Micros>(t);
    if (head[8] > 3) core::fail(Errc::ParseError, "bad capture direction byte");
    rec.dir = static_cast<Direction>(head[8]);
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(head[9 + i]) << (8 * i);
    rec.bytes.resize(len);
    if (len && std::fread(rec.bytes.data(), 1, len, f) != len)
      core::fail(Errc::ParseError, "truncated capture record payload");
    out.push_back(std::move(rec));
  }
  return out;
}

std::string hex_listing(const std::vector<CaptureRecord>& records,
                        std::size_t max_bytes) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CaptureRecord& r = records[i];
    std::snprintf(buf, sizeof(buf), "%6zu %12" PRId64 "us %-6s %5zu  ", i,
                  r.t_us, direction_name(r.dir), r.bytes.size());
    out += buf;
    const std::size_t n = std::min(max_bytes, r.bytes.size());
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%02X", r.bytes[j]);
      out += buf;
      if (j + 1 < n) out += ' ';
    }
    if (r.bytes.size() > n) out += " ..";
    out += '\n';
  }
  return out;
}

}  // namespace fpsim::codec
