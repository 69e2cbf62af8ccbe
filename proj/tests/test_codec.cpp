#include <random>

#include "doctest.h"
#include "fpsim/codec/codec.hpp"
#include "fpsim/core/image.hpp"
#include "fpsim/core/profiles.hpp"

using namespace fpsim;
using namespace fpsim::codec;

namespace {

core::RawFingerprintImage tagged_image(const core::DeviceProfile& p,
                                       std::uint64_t identity,
                                       std::uint64_t variant) {
  core::RawFingerprintImage img;
  img.width = p.spi.width_px;
  img.height = p.spi.height_px;
  img.bpp = p.spi.bpp;
  core::fill_scene(img, identity, variant);
  img.identity_id = identity;
  img.token_bits = static_cast<std::uint32_t>(0x9E3779B9u * (variant + 1));
  img.style.quality = core::AlignmentQuality::Native;
  img.style.source_sensor = core::fnv32(p.sensor_tag);
  img.style.aligned_to = core::fnv32(p.name);
  core::embed_tag(img);
  return img;
}

std::vector<core::DeviceProfile> decodable_profiles() {
  std::vector<core::DeviceProfile> out;
  for (core::DeviceProfile& p : core::load_fixture_catalog())
    if (!p.encrypted_channel) out.push_back(std::move(p));
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("codec");

TEST_CASE("per-sample frame counts follow the profile") {
  const auto catalog = core::load_fixture_catalog();
  const core::SpiProfile& spi =
      core::find_profile(catalog, "OnePlus 7 Pro").spi;
  CHECK(frames_for_sample(spi, 1) == 4);
  CHECK(frames_for_sample(spi, 2) == 13);
  CHECK(frames_for_sample(spi, 3) == 13);
  CHECK(line_stream_size(spi) ==
        static_cast<std::size_t>(178) * (2 + 218 * 2 + 2));
}

TEST_CASE("encode/decode round-trips pixels and metadata") {
  const auto profiles = decodable_profiles();
  REQUIRE(profiles.size() == 8);
  for (const auto& p : profiles) {
    for (int sample = 1; sample <= p.max_samples; ++sample) {
      const auto img = tagged_image(p, 1000 + sample, sample);
      FdaTransaction tx = encode_sample(img, p, sample);
      CHECK(static_cast<int>(tx.frames.size()) ==
            frames_for_sample(p.spi, sample));
      CHECK(!tx.sealed.has_value());
      DecodeResult dr = decode_sample(tx, p);
      REQUIRE(dr.ok());
      CHECK(dr.image->pixels == img.pixels);
      core::RawFingerprintImage back = *dr.image;
      CHECK(core::extract_tag(back));
      CHECK(back.identity_id == img.identity_id);
      CHECK(back.token_bits == img.token_bits);
    }
  }
}

TEST_CASE("encrypted channels seal the payload") {
  const auto catalog = core::load_fixture_catalog();
  const core::DeviceProfile& ip = core::find_profile(catalog, "Apple iPhone SE");
  const auto img = tagged_image(ip, 7, 1);
  FdaTransaction tx = encode_sample(img, ip, 1);
  REQUIRE(tx.sealed.has_value());
  CHECK(tx.sealed->pixels == img.pixels);
  DecodeResult dr = decode_sample(tx, ip);
  CHECK(!dr.ok());
  CHECK(dr.error == core::Errc::ChannelOpaque);
}

TEST_CASE("every payload bit flip is caught and names the row") {
  const auto profiles = decodable_profiles();
  std::mt19937 gen(777);
  for (const auto& p : profiles) {
    const auto img = tagged_image(p, 42, 9);
    const FdaTransaction clean = encode_sample(img, p, 1);
    std::size_t payload_bits = 0;
    for (const WireFrame& f : clean.frames) payload_bits += f.chunk.size() * 8;
    std::uniform_int_distribution<std::size_t> pick(0, payload_bits - 1);
    for (int trial = 0; trial < 160; ++trial) {
      FdaTransaction tx = clean;
      const int row = flip_payload_bit(tx, p.spi, pick(gen));
      DecodeResult dr = decode_sample(tx, p);
      REQUIRE(!dr.ok());
      CHECK(dr.error == core::Errc::CrcMismatch);
      CHECK(dr.error_line == row);
      CHECK(dr.detail.find("checksum") != std::string::npos);
    }
  }
}

TEST_CASE("structural damage is rejected as truncation") {
  const auto catalog = core::load_fixture_catalog();
  const core::DeviceProfile& p = core::find_profile(catalog, "OnePlus 7 Pro");
  const FdaTransaction clean = encode_sample(tagged_image(p, 5, 2), p, 1);

  SUBCASE("dropped frame") {
    FdaTransaction tx = clean;
    tx.frames.pop_back();
    DecodeResult dr = decode_sample(tx, p);
    CHECK(!dr.ok());
    CHECK(dr.error == core::Errc::TruncatedFrame);
  }
  SUBCASE("short final frame") {
    FdaTransaction tx = clean;
    tx.frames.back().chunk.pop_back();
    DecodeResult dr = decode_sample(tx, p);
    CHECK(!dr.ok());
    CHECK(dr.error == core::Errc::TruncatedFrame);
  }
  SUBCASE("wrong command bytes") {
    FdaTransaction tx = clean;
    tx.command[0] ^= 0xFF;
    DecodeResult dr = decode_sample(tx, p);
    CHECK(!dr.ok());
    CHECK(dr.error == core::Errc::UnknownCommand);
  }
  SUBCASE("frame count for the wrong sample index") {
    FdaTransaction tx = clean;
    tx.sample_index = 2;
    DecodeResult dr = decode_sample(tx, p);
    CHECK(!dr.ok());
    CHECK(dr.error == core::Errc::TruncatedFrame);
  }
}

TEST_CASE("encode rejects shape and depth mismatches") {
  const auto catalog = core::load_fixture_catalog();
  const core::DeviceProfile& p = core::find_profile(catalog, "OnePlus 7 Pro");
  auto img = tagged_image(p, 1, 1);

  SUBCASE("wrong shape") {
    img.width += 1;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  }
  SUBCASE("wrong depth") { img.bpp = 8; }

  CHECK_THROWS_AS(encode_sample(img, p, 1), core::SimError);
}

TEST_CASE("bit depth adaptation preserves dynamic range") {
  core::RawFingerprintImage img;
  img.width = 32;
  img.height = 2;
  img.bpp = 16;
  img.pixels.resize(64);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = static_cast<std::uint16_t>(i * 1040);

  const auto down = adapt_pixels(img, 8);
  CHECK(down.bpp == 8);
  CHECK(down.pixels.front() == 0);
  for (std::uint16_t v : down.pixels) CHECK(v <= 255);
  CHECK(down.pixels.back() == 255);

  const auto up = adapt_pixels(down, 16);
  CHECK(up.bpp == 16);
  CHECK(up.pixels.front() == 0);
  CHECK(up.pixels.back() == 65535);
  CHECK(adapt_pixels(img, 16).pixels == img.pixels);
}

TEST_CASE("fda detection finds every command occurrence") {
  const auto catalog = core::load_fixture_catalog();
  const core::SpiProfile& spi =
      core::find_profile(catalog, "OnePlus 7 Pro").spi;
  std::vector<std::uint8_t> mosi;
  std::vector<std::size_t> expect;
  for (int i = 0; i < 5; ++i) {
    mosi.push_back(0x00);
    expect.push_back(mosi.size());
    mosi.insert(mosi.end(), spi.fda_command.begin(), spi.fda_command.end());
  }
  CHECK(detect_fda(mosi, spi) == expect);
}

TEST_SUITE_END();
