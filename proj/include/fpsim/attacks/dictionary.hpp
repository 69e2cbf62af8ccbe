#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fpsim/core/image.hpp"
#include "fpsim/core/rng.hpp"
#include "fpsim/core/types.hpp"

namespace fpsim::attacks {

constexpr std::uint64_t kSyntheticIdentityBase = 0x40000000ULL;

// Acceptance-token draw stream; the analytic fast path reproduces entry
// metadata with it, so it lives here rather than in a translation unit.
constexpr core::StreamId kDictTokenStream = core::stream_id("dict.token");

struct EntryMeta {
  std::uint64_t identity = 0;
  std::uint32_t token_bits = 0;
  core::AlignmentQuality quality = core::AlignmentQuality::None;
  std::uint32_t source_sensor = 0;
  std::uint32_t aligned_to = 0;
};

class DictionarySource {
 public:
  virtual ~DictionarySource() = default;
  virtual std::size_t size() const = 0;
  virtual EntryMeta meta(std::size_t index) const = 0;
  // Reference stays valid until the next entry() call on the same object.
  virtual const core::RawFingerprintImage& entry(std::size_t index) = 0;
};

// Procedurally generated spoof dictionary. Entry metadata is a pure function
// of (seed, index), so campaign results never depend on materialization.
struct SyntheticConfig {
  std::size_t count = 0;
  core::AlignmentQuality quality = core::AlignmentQuality::Epoch80;
  std::string source_tag;  // style domain the pixels nominally came from
  std::map<std::size_t, std::uint64_t> identity_overrides;
  std::uint64_t identity_base = kSyntheticIdentityBase;
};

class SyntheticDictionary : public DictionarySource {
 public:
  SyntheticDictionary(const core::DeviceProfile& target, SyntheticConfig cfg,
                      core::SeedSource seeds);

  std::size_t size() const override { return cfg_.count; }
  EntryMeta meta(std::size_t index) const override;
  const core::RawFingerprintImage& entry(std::size_t index) override;

 private:
  core::DeviceProfile target_;
  SyntheticConfig cfg_;
  core::SeedSource seeds_;
  core::RawFingerprintImage fpn_;
  core::RawFingerprintImage scratch_;
};

class MaterializedDictionary : public DictionarySource {
 public:
  std::size_t size() const override { return entries_.size(); }
  EntryMeta meta(std::size_t index) const override;
  const core::RawFingerprintImage& entry(std::size_t index) override;

  void push(core::RawFingerprintImage img);
  const std::vector<core::RawFingerprintImage>& entries() const {
    return entries_;
  }

 private:
  std::vector<core::RawFingerprintImage> entries_;
};

// Adapts foreign captures to a target sensor: dpi rescale (nearest neighbor),
// center crop to the sensor's geometry, bit-depth adaptation, style metadata,
// and the target's fixed-pattern base for every aligned entry.
MaterializedDictionary generate_dictionary(
    const std::vector<core::RawFingerprintImage>& sources,
    const core::DeviceProfile& target, double dpi_ratio,
    core::AlignmentQuality quality, const std::string& default_source_tag,
    const core::SeedSource& seeds);

// Directory layout: manifest.json plus one pixel file per entry (PGM at
// 8 bpp, headerless little-endian raw at 16 bpp).
void save_dictionary(MaterializedDictionary& dict,
                     const std::filesystem::path& dir);
MaterializedDictionary load_dictionary(const std::filesystem::path& dir);

}  // namespace fpsim::attacks
