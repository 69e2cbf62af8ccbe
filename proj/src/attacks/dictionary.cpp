#include "fpsim/attacks/dictionary.hpp"

#include <cmath>
#include <fstream>

#include "fpsim/codec/codec.hpp"
#include "fpsim/codec/image_io.hpp"
#include "json.hpp"

namespace fpsim::attacks {

namespace {
constexpr core::StreamId kDictToken = kDictTokenStream;

void check_index(std::size_t index, std::size_t size) {
  if (index >= size)
    core::fail(core::Errc::InvariantViolation, "dictionary index out of range");
}
}  // namespace

SyntheticDictionary::SyntheticDictionary(const core::DeviceProfile& target,
                                         SyntheticConfig cfg,
                                         core::SeedSource seeds)
    : target_(target),
      cfg_(std::move(cfg)),
      seeds_(seeds),
      fpn_(core::fpn_base(target)) {}

EntryMeta SyntheticDictionary::meta(std::size_t index) const {
  check_index(index, cfg_.count);
  EntryMeta m;
  auto ov = cfg_.identity_overrides.find(index);
  m.identity = ov != cfg_.identity_overrides.end() ? ov->second
                                                   : cfg_.identity_base + index;
  m.quality = cfg_.quality;
  m.token_bits = static_cast<std::uint32_t>(seeds_.bits(
      kDictToken, m.identity, index, static_cast<std::uint64_t>(m.quality)));
  m.source_sensor = core::fnv32(cfg_.source_tag);
  m.aligned_to = cfg_.quality == core::AlignmentQuality::None
                     ? 0
                     : core::fnv32(target_.name);
  return m;
}

const core::RawFingerprintImage& SyntheticDictionary::entry(std::size_t index) {
  const EntryMeta m = meta(index);
  scratch_ = core::RawFingerprintImage{};
  scratch_.width = target_.spi.width_px;
  scratch_.height = target_.spi.height_px;
  scratch_.bpp = target_.spi.bpp;
  scratch_.pixels.resize(scratch_.pixel_count());
  core::fill_scene(scratch_, m.identity, index);
  scratch_.style.source_sensor = m.source_sensor;
  scratch_.style.aligned_to = m.aligned_to;
  scratch_.style.quality = m.quality;
  scratch_.identity_id = m.identity;
  scratch_.token_bits = m.token_bits;
  core::embed_tag(scratch_);
  // Unaligned entries never went through the target's preprocessing, so they
  // do not carry its fixed-pattern base; compensation will break their tag.
  if (m.quality != core::AlignmentQuality::None) core::add_base(scratch_, fpn_);
  return scratch_;
}

EntryMeta MaterializedDictionary::meta(std::size_t index) const {
  check_index(index, entries_.size());
  const core::RawFingerprintImage& e = entries_[index];
  return EntryMeta{e.identity_id, e.token_bits, e.style.quality,
                   e.style.source_sensor, e.style.aligned_to};
}

const core::RawFingerprintImage& MaterializedDictionary::entry(
    std::size_t index) {
  check_index(index, entries_.size());
  return entries_[index];
}

void MaterializedDictionary::push(core::RawFingerprintImage img) {
  entries_.push_back(std::move(img));
}

MaterializedDictionary generate_dictionary(
    const std::vector<core::RawFingerprintImage>& sources,
    const core::DeviceProfile& target, double dpi_ratio,
    core::AlignmentQuality quality, const std::string& default_source_tag,
    const core::SeedSource& seeds) {
  if (sources.empty())
    core::fail(core::Errc::EmptySource, "no source images to adapt");
  if (!(dpi_ratio > 0.0))
    core::fail(core::Errc::ValidationError, "dpi ratio must be positive");

  MaterializedDictionary out;
  const int tw = target.spi.width_px;
  const int th = target.spi.height_px;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const core::RawFingerprintImage& src = sources[i];
    if (src.pixels.size() != src.pixel_count())
      core::fail(core::Errc::ValidationError,
                 "source " + std::to_string(i) +
                     " pixel buffer does not match its dimensions");
    const int sw = static_cast<int>(std::lround(src.width * dpi_ratio));
    const int sh = static_cast<int>(std::lround(src.height * dpi_ratio));
    if (sw < tw || sh < th)
      core::fail(core::Errc::ShapeUnderflow,
                 "source " + std::to_string(i) + " rescales to " +
                     std::to_string(sw) + "x" + std::to_string(sh) +
                     ", smaller than the sensor");

    core::RawFingerprintImage img;
    img.width = tw;
    img.height = th;
    img.bpp = src.bpp;
    img.pixels.resize(img.pixel_count());
    const int ox = (sw - tw) / 2;
    const int oy = (sh - th) / 2;
    for (int y = 0; y < th; ++y) {
      int sy = static_cast<int>((y + oy) / dpi_ratio);
      sy = std::min(sy, src.height - 1);
      for (int x = 0; x < tw; ++x) {
        int sx = static_cast<int>((x + ox) / dpi_ratio);
        sx = std::min(sx, src.width - 1);
        img.pixels[static_cast<std::size_t>(y) * tw + x] =
            src.pixels[static_cast<std::size_t>(sy) * src.width + sx];
      }
    }
    if (img.bpp != target.spi.bpp)
      img = codec::adapt_pixels(img, target.spi.bpp);

    img.identity_id =
        src.tagged && src.identity_id ? src.identity_id
                                      : kSyntheticIdentityBase + i;
    img.style.quality = quality;
    img.style.source_sensor = src.tagged && src.style.source_sensor
                                  ? src.style.source_sensor
                                  : core::fnv32(default_source_tag);
    img.style.aligned_to = quality == core::AlignmentQuality::None
                               ? 0
                               : core::fnv32(target.name);
    img.token_bits = static_cast<std::uint32_t>(
        seeds.bits(kDictToken, img.identity_id, i,
                   static_cast<std::uint64_t>(quality)));
    core::embed_tag(img);
    if (quality != core::AlignmentQuality::None)
      core::add_base(img, core::fpn_base(target));
    out.push(std::move(img));
  }
  return out;
}

void save_dictionary(MaterializedDictionary& dict,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["version"] = 1;
  manifest["entries"] = nlohmann::ordered_json::array();
  char name[32];
  for (std::size_t i = 0; i < dict.size(); ++i) {
    const core::RawFingerprintImage& e = dict.entry(i);
    std::snprintf(name, sizeof name, "entry_%04zu.%s", i,
                  e.bpp == 8 ? "pgm" : "raw16");
    const std::filesystem::path file = dir / name;
    if (e.bpp == 8)
      codec::write_pgm(e, file.string());
    else
      codec::write_raw16(e, file.string());
    nlohmann::ordered_json j;
    j["file"] = name;
    j["width"] = e.width;
    j["height"] = e.height;
    j["bpp"] = e.bpp;
    j["identity"] = e.identity_id;
    j["token_bits"] = e.token_bits;
    j["quality"] = core::alignment_name(e.style.quality);
    j["source_sensor"] = e.style.source_sensor;
    j["aligned_to"] = e.style.aligned_to;
    manifest["entries"].push_back(std::move(j));
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) core::fail(core::Errc::IoError, "cannot write dictionary manifest");
  out << manifest.dump(2) << "\n";
}

MaterializedDictionary load_dictionary(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json", std::ios::binary);
  if (!in)
    core::fail(core::Errc::IoError,
               "cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    core::fail(core::Errc::ParseError,
               std::string("dictionary manifest: ") + e.what());
  }
  if (!manifest.is_object() || manifest.value("version", 0) != 1 ||
      !manifest.contains("entries") || !manifest["entries"].is_array())
    core::fail(core::Errc::ParseError, "dictionary manifest malformed");

  MaterializedDictionary out;
  for (const auto& j : manifest["entries"]) {
    const std::string file = j.at("file").get<std::string>();
    const int bpp = j.at("bpp").get<int>();
    core::RawFingerprintImage img;
    if (bpp == 8)
      img = codec::read_pgm((dir / file).string());
    else
      img = codec::read_raw16((dir / file).string(), j.at("width").get<int>(),
                              j.at("height").get<int>());
    img.identity_id = j.at("identity").get<std::uint64_t>();
    img.token_bits = j.at("token_bits").get<std::uint32_t>();
    auto q = core::alignment_from_name(j.at("quality").get<std::string>());
    if (!q) core::fail(core::Errc::ParseError, "unknown quality in manifest");
    img.style.quality = *q;
    img.style.source_sensor = j.at("source_sensor").get<std::uint32_t>();
    img.style.aligned_to = j.at("aligned_to").get<std::uint32_t>();
    img.tagged = true;
    out.push(std::move(img));
  }
  return out;
}

}  // namespace fpsim::attacks
