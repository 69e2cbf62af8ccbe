#pragma once

#include "fpsim/core/rng.hpp"
#include "fpsim/core/types.hpp"

namespace fpsim::core {

// In-band metadata block. Occupies the first kTagPixels pixels (one byte per
// pixel value, valid at 8 and 16 bpp): magic, version, quality, style tags,
// identity, token, checksum. Images narrower than the block stay untagged.
constexpr int kTagPixels = 28;

std::uint16_t max_pixel(int bpp);

// Writes the image's metadata fields into the pixel block. Requires
// width*height >= kTagPixels.
void embed_tag(RawFingerprintImage& img);

// Parses the pixel block. On success fills the metadata fields and sets
// tagged=true; otherwise clears them and sets tagged=false.
bool extract_tag(RawFingerprintImage& img);

// Per-model fixed-pattern-noise base. Deterministic in the profile name only
// (a physical property of the sensor, independent of scenario seed); every
// value is in [1, 16] so compensation visibly alters any unbased image.
RawFingerprintImage fpn_base(const DeviceProfile& profile);

// Adds the FPN base in place (sensor output = scene + base, wrapping at the
// bpp ceiling). Wrap-around keeps the add exactly invertible at any depth.
void add_base(RawFingerprintImage& img, const RawFingerprintImage& base);

// Procedural scene fill: low-amplitude deterministic texture keyed by
// (identity, variant). Content pixels never feed a decision; the oracles ride
// in the tag block.
void fill_scene(RawFingerprintImage& img, std::uint64_t identity,
                std::uint64_t variant);

// A blank-tip press: tagged with identity 0 (no ridge content), native style.
RawFingerprintImage blank_press(const DeviceProfile& profile);

}  // namespace fpsim::core
