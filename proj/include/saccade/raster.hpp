#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "saccade/core.hpp"
#include "saccade/imaging.hpp"

namespace saccade {

// Tile container on disk, one tile = three files:
//   <path>        binary pixmap (P6, 16-bit big-endian samples), the pixels
//   <path>.stain  binary graymap (P5, 16-bit big-endian), the stain channel
//   <path>.meta   structured text: label, seed, dims, run-length relevance
// Values are stored as round(v * 65535); tiles produced by the generator sit
// exactly on that grid, so write -> read is the identity.

constexpr double kRasterMax = 65535.0;

inline uint16_t to_u16(double v) {
  double q = clamp01(v) * kRasterMax;
  return uint16_t(q + 0.5);
}

inline double from_u16(uint16_t u) { return double(u) / kRasterMax; }

namespace detail {

inline void put_be16(std::string& out, uint16_t v) {
  out.push_back(char(v >> 8));
  out.push_back(char(v & 0xff));
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw data_error("cannot open for writing: " + tmp);
    f.write(bytes.data(), std::streamsize(bytes.size()));
    if (!f) throw data_error("short write: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Parses "P6\n<w> <h>\n65535\n" style headers; returns payload offset.
inline size_t parse_pnm_header(const std::string& bytes, const std::string& magic,
                               const std::string& path, int& w, int& h) {
  size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < bytes.size() && std::isspace((unsigned char)bytes[pos])) ++pos;
    size_t start = pos;
    while (pos < bytes.size() && !std::isspace((unsigned char)bytes[pos])) ++pos;
    if (start == pos) throw data_error("malformed header: " + path);
    return bytes.substr(start, pos - start);
  };
  if (token() != magic) throw data_error("bad magic (want " + magic + "): " + path);
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    if (std::stoi(token()) != 65535) throw data_error("");
  } catch (const std::exception&) {
    throw data_error("malformed header: " + path);
  }
  if (w <= 0 || h <= 0) throw data_error("bad dimensions: " + path);
  if (pos >= bytes.size()) throw data_error("truncated payload: " + path);
  return pos + 1;  // single whitespace after maxval
}

inline std::string encode_rle(const Grid2<uint8_t>& mask) {
  // Alternating run lengths over the flat row-major mask, first run is zeros.
  std::string out;
  uint8_t cur = 0;
  size_t run = 0;
  for (size_t i = 0; i < mask.data.size(); ++i) {
    if ((mask.data[i] != 0) == (cur != 0)) {
      ++run;
    } else {
      out += std::to_string(run);
      out.push_back(' ');
      cur = cur ? 0 : 1;
      run = 1;
    }
  }
  out += std::to_string(run);
  return out;
}

inline Grid2<uint8_t> decode_rle(const std::string& text, int h, int w,
                                 const std::string& path) {
  Grid2<uint8_t> mask(h, w);
  std::istringstream ss(text);
  size_t i = 0;
  uint8_t cur = 0;
  long long run = 0;
  while (ss >> run) {
    if (run < 0 || i + size_t(run) > mask.data.size())
      throw data_error("mask/pixel shape mismatch: " + path);
    for (long long k = 0; k < run; ++k) mask.data[i++] = cur;
    cur = cur ? 0 : 1;
  }
  if (i != mask.data.size()) throw data_error("mask/pixel shape mismatch: " + path);
  return mask;
}

}  // namespace detail

inline void write_raster(const Tile& tile, const std::string& path) {
  const int h = tile.height(), w = tile.width();
  check(tile.pixels.channels == 3, "raster tiles must have 3 channels");
  check(tile.stain.height == h && tile.stain.width == w &&
            tile.relevance.height == h && tile.relevance.width == w,
        "stain/relevance shape must match pixels");

  std::string img = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n65535\n";
  img.reserve(img.size() + size_t(h) * w * 6);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) detail::put_be16(img, to_u16(tile.pixels.at(c, y, x)));
  detail::write_file(path, img);

  std::string st = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n65535\n";
  st.reserve(st.size() + size_t(h) * w * 2);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) detail::put_be16(st, to_u16(tile.stain.at(y, x)));
  detail::write_file(path + ".stain", st);

  std::string meta;
  meta += "format=saccade-tile-v1\n";
  meta += "width=" + std::to_string(w) + "\n";
  meta += "height=" + std::to_string(h) + "\n";
  meta += "label=" + std::to_string(tile.label) + "\n";
  meta += "seed=" + std::to_string(tile.seed) + "\n";
  meta += "relevance=" + detail::encode_rle(tile.relevance) + "\n";
  detail::write_file(path + ".meta", meta);
}

inline Tile read_raster(const std::string& path) {
  Tile tile;
  std::string img = detail::read_file(path);
  int w = 0, h = 0;
  size_t off = detail::parse_pnm_header(img, "P6", path, w, h);
  size_t need = size_t(h) * w * 6;
  if (img.size() - off < need) throw data_error("truncated payload: " + path);
  tile.pixels = Grid3<double>(3, h, w);
  const auto* p = reinterpret_cast<const unsigned char*>(img.data() + off);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        tile.pixels.at(c, y, x) = from_u16(uint16_t(p[0]) << 8 | p[1]);
        p += 2;
      }

  std::string st = detail::read_file(path + ".stain");
  int sw = 0, sh = 0;
  size_t soff = detail::parse_pnm_header(st, "P5", path + ".stain", sw, sh);
  if (sw != w || sh != h) throw data_error("mask/pixel shape mismatch: " + path);
  if (st.size() - soff < size_t(h) * w * 2)
    throw data_error("truncated payload: " + path + ".stain");
  tile.stain = Grid2<double>(h, w);
  const auto* q = reinterpret_cast<const unsigned char*>(st.data() + soff);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      tile.stain.at(y, x) = from_u16(uint16_t(q[0]) << 8 | q[1]);
      q += 2;
    }

  std::string meta = detail::read_file(path + ".meta");
  std::istringstream ms(meta);
  std::string line, rle;
  bool have_label = false, have_seed = false, have_rle = false;
  int mw = -1, mh = -1;
  while (std::getline(ms, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (key == "label") {
        tile.label = std::stoi(val);
        have_label = true;
      } else if (key == "seed") {
        tile.seed = std::stoull(val);
        have_seed = true;
      } else if (key == "width") {
        mw = std::stoi(val);
      } else if (key == "height") {
        mh = std::stoi(val);
      } else if (key == "relevance") {
        rle = val;
        have_rle = true;
      }
    } catch (const std::exception&) {
      throw data_error("malformed sidecar: " + path + ".meta");
    }
  }
  if (!have_label || !have_seed || !have_rle || mw != w || mh != h)
    throw data_error("malformed sidecar: " + path + ".meta");
  if (tile.label < 0 || tile.label >= kNumClasses)
    throw data_error("label out of range: " + path + ".meta");
  tile.relevance = detail::decode_rle(rle, h, w, path + ".meta");
  return tile;
}

}  // namespace saccade
