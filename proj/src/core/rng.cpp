#include "fpsim/core/rng.hpp"

#include <cstring>

namespace fpsim::core {

std::uint64_t SeedSource::bits_span(StreamId s,
                                    std::span<const std::uint64_t> ks) const {
  std::uint64_t h = base(s);
  for (std::uint64_t k : ks) h = absorb(h, k);
  return finish(absorb(h, ks.size()));
}

double SeedSource::draw_keyed(std::string_view stream,
                              std::span<const std::uint8_t> key) const {
  std::uint64_t h = base(stream_id(stream));
  std::size_t i = 0;
  while (i + 8 <= key.size()) {
    std::uint64_t w;
    std::memcpy(&w, key.data() + i, 8);
    h = absorb(h, w);
    i += 8;
  }
  if (i < key.size()) {
    std::uint64_t w = 0;
    std::memcpy(&w, key.data() + i, key.size() - i);
    h = absorb(h, w);
  }
  return to_unit(finish(absorb(h, key.size())));
}

}  // namespace fpsim::core
