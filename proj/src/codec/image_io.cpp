#include "fpsim/codec/image_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fpsim/core/image.hpp"

namespace fpsim::codec {

using core::Errc;
using core::RawFingerprintImage;

void write_pgm(const RawFingerprintImage& img, const std::string& path) {
  if (img.bpp != 8) core::fail(Errc::BppUnsupported, "PGM output is 8 bpp only");
  std::ofstream out(path, std::ios::binary);
  if (!out) core::fail(Errc::IoError, "cannot write " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::string row(static_cast<std::size_t>(img.width), '\0');
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x)
      row[x] = static_cast<char>(
          img.pixels[static_cast<std::size_t>(y) * img.width + x] & 0xFF);
    out.write(row.data(), row.size());
  }
  if (!out) core::fail(Errc::IoError, "short write to " + path);
}

namespace {

int pgm_token(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comment lines between header tokens.
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
    } else if (!std::isspace(c)) {
      break;
    }
  }
  if (c == EOF) core::fail(Errc::ParseError, "truncated PGM header: " + path);
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) core::fail(Errc::ParseError, "malformed PGM header: " + path);
  return value;
}

}  // namespace

RawFingerprintImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) core::fail(Errc::IoError, "cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5')
    core::fail(Errc::ParseError, "not a binary PGM: " + path);
  RawFingerprintImage img;
  img.width = pgm_token(in, path);
  img.height = pgm_token(in, path);
  int maxval = pgm_token(in, path);
  if (maxval != 255)
    core::fail(Errc::BppUnsupported, "PGM maxval must be 255: " + path);
  if (img.width < 1 || img.height < 1)
    core::fail(Errc::ParseError, "bad PGM dimensions: " + path);
  img.bpp = 8;
  img.pixels.resize(img.pixel_count());
  std::string row(static_cast<std::size_t>(img.width), '\0');
  for (int y = 0; y < img.height; ++y) {
    in.read(row.data(), row.size());
    if (in.gcount() != static_cast<std::streamsize>(row.size()))
      core::fail(Errc::ParseError, "truncated PGM pixel data: " + path);
    for (int x = 0; x < img.width; ++x)
      img.pixels[static_cast<std::size_t>(y) * img.width + x] =
          static_cast<std::uint8_t>(row[x]);
  }
  core::extract_tag(img);
  return img;
}

void write_raw16(const RawFingerprintImage& img, const std::string& path) {
  if (img.bpp != 16)
    core::fail(Errc::BppUnsupported, "raw16 output is 16 bpp only");
  std::ofstream out(path, std::ios::binary);
  if (!out) core::fail(Errc::IoError, "cannot write " + path);
  std::vector<char> buf(img.pixels.size() * 2);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    buf[2 * i] = static_cast<char>(img.pixels[i] & 0xFF);
    buf[2 * i + 1] = static_cast<char>(img.pixels[i] >> 8);
  }
  out.write(buf.data(), buf.size());
  if (!out) core::fail(Errc::IoError, "short write to " + path);
}

RawFingerprintImage read_raw16(const std::string& path, int width, int height) {
  if (width < 1 || height < 1)
    core::fail(Errc::ValidationError, "raw16 dimensions must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) core::fail(Errc::IoError, "cannot open " + path);
  RawFingerprintImage img;
  img.width = width;
  img.height = height;
  img.bpp = 16;
  img.pixels.resize(img.pixel_count());
  std::vector<char> buf(img.pixels.size() * 2);
  in.read(buf.data(), buf.size());
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    core::fail(Errc::ParseError, "truncated raw16 pixel data: " + path);
  in.get();
  if (!in.eof())
    core::fail(Errc::ParseError, "trailing bytes in raw16 file: " + path);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = static_cast<std::uint16_t>(
        static_cast<std::uint8_t>(buf[2 * i]) |
        (static_cast<std::uint8_t>(buf[2 * i + 1]) << 8));
  core::extract_tag(img);
  return img;
}

}  // namespace fpsim::codec
