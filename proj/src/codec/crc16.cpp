#include "fpsim/codec/crc16.hpp"

namespace fpsim::codec {

CrcParams crc_params(core::CrcVariant v) {
  switch (v) {
    case core::CrcVariant::CcittFalse: return {0x1021, 0xFFFF, 0x0000, false};
    case core::CrcVariant::Xmodem: return {0x1021, 0x0000, 0x0000, false};
    case core::CrcVariant::Modbus: return {0x8005, 0xFFFF, 0x0000, true};
    case core::CrcVariant::Arc: return {0x8005, 0x0000, 0x0000, true};
  }
  core::fail(core::Errc::InvariantViolation, "unknown crc variant");
}

namespace {

std::uint16_t reflect16(std::uint16_t v) {
  std::uint16_t r = 0;
  for (int i = 0; i < 16; ++i)
    if (v & (1u << i)) r |= 1u << (15 - i);
  return r;
}

}  // namespace

Crc16::Crc16(core::CrcVariant v) : params_(crc_params(v)) {
  if (params_.reflect) {
    const std::uint16_t rpoly = reflect16(params_.poly);
    for (int i = 0; i < 256; ++i) {
      std::uint16_t crc = static_cast<std::uint16_t>(i);
      for (int b = 0; b < 8; ++b)
        crc = (crc & 1) ? static_cast<std::uint16_t>((crc >> 1) ^ rpoly)
                        : static_cast<std::uint16_t>(crc >> 1);
      table_[i] = crc;
    }
  } else {
    for (int i = 0; i < 256; ++i) {
      std::uint16_t crc = static_cast<std::uint16_t>(i << 8);
      for (int b = 0; b < 8; ++b)
        crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ params_.poly)
                             : static_cast<std::uint16_t>(crc << 1);
      table_[i] = crc;
    }
  }
}

std::uint16_t Crc16::update(std::uint16_t crc,
                            std::span<const std::uint8_t> data) const {
  if (params_.reflect) {
    for (std::uint8_t b : data)
      crc = static_cast<std::uint16_t>((crc >> 8) ^ table_[(crc ^ b) & 0xFF]);
  } else {
    for (std::uint8_t b : data)
      crc = static_cast<std::uint16_t>((crc << 8) ^ table_[((crc >> 8) ^ b) & 0xFF]);
  }
  return crc;
}

std::uint16_t Crc16::compute(std::span<const std::uint8_t> data) const {
  return finish(update(start(), data));
}

std::uint16_t crc16(core::CrcVariant v, std::span<const std::uint8_t> data) {
  return Crc16(v).compute(data);
}

}  // namespace fpsim::codec
