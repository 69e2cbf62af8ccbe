#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "fpsim/core/types.hpp"

namespace fpsim::codec {

struct CrcParams {
  std::uint16_t poly;
  std::uint16_t init;
  std::uint16_t xor_out;
  bool reflect;  // reflected input and output (always paired here)
};

CrcParams crc_params(core::CrcVariant v);

// Table-driven CRC16 over one parameter set.
class Crc16 {
 public:
  explicit Crc16(core::CrcVariant v);

  std::uint16_t compute(std::span<const std::uint8_t> data) const;

  // Streaming form: fold bytes into a running register, finish with xor_out.
  std::uint16_t start() const { return params_.init; }
  std::uint16_t update(std::uint16_t crc, std::span<const std::uint8_t> data) const;
  std::uint16_t finish(std::uint16_t crc) const { return crc ^ params_.xor_out; }

  const CrcParams& params() const { return params_; }

 private:
  CrcParams params_;
  std::array<std::uint16_t, 256> table_;
};

std::uint16_t crc16(core::CrcVariant v, std::span<const std::uint8_t> data);

}  // namespace fpsim::codec
