#include "fpsim/core/image.hpp"

namespace fpsim::core {

namespace {

constexpr std::uint8_t kTagMagic0 = 0xF5;
constexpr std::uint8_t kTagMagic1 = 0xA7;
constexpr std::uint8_t kTagVersion = 1;
constexpr int kTagPayload = 24;  // bytes covered by the checksum

void put32(std::uint8_t* p, std::uint32_t v) {
  p[0] = v & 0xFF;
  p[1] = (v >> 8) & 0xFF;
  p[2] = (v >> 16) & 0xFF;
  p[3] = (v >> 24) & 0xFF;
}

void put64(std::uint8_t* p, std::uint64_t v) {
  put32(p, static_cast<std::uint32_t>(v));
  put32(p + 4, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(get32(p)) |
         (static_cast<std::uint64_t>(get32(p + 4)) << 32);
}

std::uint16_t sum16(const std::uint8_t* p, int n) {
  std::uint32_t s = 0;
  for (int i = 0; i < n; ++i) s += p[i];
  return static_cast<std::uint16_t>(s & 0xFFFF);
}

}  // namespace

std::uint16_t max_pixel(int bpp) {
  return bpp == 8 ? std::uint16_t{0xFF} : std::uint16_t{0xFFFF};
}

void embed_tag(RawFingerprintImage& img) {
  if (img.pixel_count() < static_cast<std::size_t>(kTagPixels) ||
      img.pixels.size() != img.pixel_count())
    fail(Errc::ShapeMismatch, "image too small for metadata block");
  std::uint8_t b[kTagPixels] = {};
  b[0] = kTagMagic0;
  b[1] = kTagMagic1;
  b[2] = kTagVersion;
  b[3] = static_cast<std::uint8_t>(img.style.quality);
  put32(b + 4, img.style.source_sensor);
  put32(b + 8, img.style.aligned_to);
  put64(b + 12, img.identity_id);
  put32(b + 20, img.token_bits);
  std::uint16_t ck = sum16(b, kTagPayload);
  b[24] = ck & 0xFF;
  b[25] = (ck >> 8) & 0xFF;
  for (int i = 0; i < kTagPixels; ++i) img.pixels[i] = b[i];
  img.tagged = true;
}

bool extract_tag(RawFingerprintImage& img) {
  img.tagged = false;
  img.style = {};
  img.identity_id = 0;
  img.token_bits = 0;
  if (img.pixels.size() < static_cast<std::size_t>(kTagPixels)) return false;
  std::uint8_t b[kTagPixels];
  for (int i = 0; i < kTagPixels; ++i) {
    if (img.pixels[i] > 0xFF) return false;
    b[i] = static_cast<std::uint8_t>(img.pixels[i]);
  }
  if (b[0] != kTagMagic0 || b[1] != kTagMagic1 || b[2] != kTagVersion)
    return false;
  std::uint16_t ck = static_cast<std::uint16_t>(b[24] | (b[25] << 8));
  if (ck != sum16(b, kTagPayload)) return false;
  switch (b[3]) {
    case 0: img.style.quality = AlignmentQuality::None; break;
    case 20: img.style.quality = AlignmentQuality::Epoch20; break;
    case 40: img.style.quality = AlignmentQuality::Epoch40; break;
    case 60: img.style.quality = AlignmentQuality::Epoch60; break;
    case 80: img.style.quality = AlignmentQuality::Epoch80; break;
    case 100: img.style.quality = AlignmentQuality::Epoch100; break;
    case 255: img.style.quality = AlignmentQuality::Native; break;
    default: return false;
  }
  img.style.source_sensor = get32(b + 4);
  img.style.aligned_to = get32(b + 8);
  img.identity_id = get64(b + 12);
  img.token_bits = get32(b + 20);
  img.tagged = true;
  return true;
}

RawFingerprintImage fpn_base(const DeviceProfile& profile) {
  RawFingerprintImage base;
  base.width = profile.spi.width_px;
  base.height = profile.spi.height_px;
  base.bpp = profile.spi.bpp;
  base.pixels.resize(base.pixel_count());
  std::uint64_t key = fnv64(profile.name);
  for (std::size_t i = 0; i < base.pixels.size(); ++i)
    base.pixels[i] = static_cast<std::uint16_t>(1 + (mix64(key ^ i) & 0x0F));
  return base;
}

void add_base(RawFingerprintImage& img, const RawFingerprintImage& base) {
  if (img.width != base.width || img.height != base.height ||
      img.bpp != base.bpp)
    fail(Errc::ShapeMismatch, "base shape differs from image");
  const std::uint16_t mask = max_pixel(img.bpp);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] =
        static_cast<std::uint16_t>((img.pixels[i] + base.pixels[i]) & mask);
}

void fill_scene(RawFingerprintImage& img, std::uint64_t identity,
                std::uint64_t variant) {
  // Mid-range values with headroom above for the FPN base; exact content is
  // irrelevant downstream.
  img.pixels.resize(img.pixel_count());
  std::uint64_t key = mix64(identity ^ mix64(variant ^ 0x5ce27u));
  const int shift = img.bpp == 8 ? 0 : 8;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    std::uint16_t v =
        static_cast<std::uint16_t>(0x30 + (mix64(key ^ i) & 0x3F));
    img.pixels[i] = static_cast<std::uint16_t>(v << shift);
  }
}

RawFingerprintImage blank_press(const DeviceProfile& profile) {
  RawFingerprintImage img;
  img.width = profile.spi.width_px;
  img.height = profile.spi.height_px;
  img.bpp = profile.spi.bpp;
  img.pixels.assign(img.pixel_count(), 0x10);
  img.style.source_sensor = fnv32(profile.sensor_tag);
  img.style.quality = AlignmentQuality::Native;
  img.identity_id = 0;
  img.token_bits = 0;
  embed_tag(img);
  add_base(img, fpn_base(profile));
  return img;
}

}  // namespace fpsim::core
