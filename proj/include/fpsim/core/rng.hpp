#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace fpsim::core {

// 64-bit finalizer with full avalanche; splitmix64's mixing constants.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t fnv64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Compile-time name of an independent draw stream.
struct StreamId {
  std::uint64_t tag;
};

constexpr StreamId stream_id(std::string_view name) {
  return StreamId{mix64(fnv64(name))};
}

// Deterministic seeded randomness. Every draw is a pure function of
// (global seed, stream, key); there is no sequential generator state, so
// call order never changes a result.
class SeedSource {
 public:
  explicit SeedSource(std::uint64_t global_seed) : seed_(global_seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(StreamId s) const { return finish(absorb(base(s), 0)); }
  std::uint64_t bits(StreamId s, std::uint64_t k0) const {
    return finish(absorb(absorb(base(s), k0), 1));
  }
  std::uint64_t bits(StreamId s, std::uint64_t k0, std::uint64_t k1) const {
    return finish(absorb(absorb(absorb(base(s), k0), k1), 2));
  }
  std::uint64_t bits(StreamId s, std::uint64_t k0, std::uint64_t k1,
                     std::uint64_t k2) const {
    return finish(absorb(absorb(absorb(absorb(base(s), k0), k1), k2), 3));
  }
  std::uint64_t bits_span(StreamId s, std::span<const std::uint64_t> ks) const;

  // Uniform in [0, 1) with 53 significant bits.
  static double to_unit(std::uint64_t h) { return (h >> 11) * 0x1.0p-53; }

  double draw(StreamId s) const { return to_unit(bits(s)); }
  double draw(StreamId s, std::uint64_t k0) const { return to_unit(bits(s, k0)); }
  double draw(StreamId s, std::uint64_t k0, std::uint64_t k1) const {
    return to_unit(bits(s, k0, k1));
  }
  double draw(StreamId s, std::uint64_t k0, std::uint64_t k1,
              std::uint64_t k2) const {
    return to_unit(bits(s, k0, k1, k2));
  }

  // Byte-key form; equivalent to packing the bytes little-endian into words.
  double draw_keyed(std::string_view stream,
                    std::span<const std::uint8_t> key) const;

  // Derives the seed for an owned sub-simulation (e.g. one Monte Carlo run).
  std::uint64_t derive_seed(StreamId s, std::uint64_t index) const {
    return bits(s, index);
  }

 private:
  std::uint64_t base(StreamId s) const { return mix64(seed_ ^ s.tag); }
  static std::uint64_t absorb(std::uint64_t h, std::uint64_t w) {
    return mix64(h ^ w);
  }
  static std::uint64_t finish(std::uint64_t h) { return mix64(h); }

  std::uint64_t seed_;
};

}  // namespace fpsim::core
