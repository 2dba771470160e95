#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "saccade/core.hpp"

namespace saccade {

constexpr int kNumClasses = 4;
constexpr int kContextFactor = 16;

struct Location {
  double x = 0.0;  // column, normalized to [0,1]
  double y = 0.0;  // row, normalized to [0,1]

  Location() = default;
  Location(double x_, double y_) : x(clamp01(x_)), y(clamp01(y_)) {}
};

// One labeled image tile. Pixel values live in [0,1]; `stain` is the known
// diagnostic-stain intensity channel and `relevance` marks stained pixels.
struct Tile {
  Grid3<double> pixels;      // 3 x H x W
  int label = 0;             // score in {0,1,2,3}
  Grid2<double> stain;       // H x W
  Grid2<uint8_t> relevance;  // H x W, 0/1
  uint64_t seed = 0;

  int height() const { return pixels.height; }
  int width() const { return pixels.width; }
};

// A fixed-size patch pair at two emulated magnifications around one center.
struct Glimpse {
  Grid3<double> fine;    // w x w crop at native resolution
  Grid3<double> coarse;  // 2w x 2w crop average-pooled down to w x w
  Location center;
};

struct ContextImage {
  Grid3<double> pixels;  // 3 x H/16 x W/16
  std::vector<Location> suppressed;
};

// Integer left/top of a w-wide crop centered at a normalized coordinate,
// shifted inward so the window lies fully inside [0, extent).
inline int crop_origin(double coord, int extent, int w) {
  int center = int(std::lround(coord * double(extent - 1)));
  int origin = center - w / 2;
  return std::clamp(origin, 0, extent - w);
}

inline Grid3<double> crop(const Grid3<double>& img, int left, int top, int w) {
  Grid3<double> out(img.channels, w, w);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < w; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, top + y, left + x);
  return out;
}

inline Grid3<double> avg_pool2(const Grid3<double>& img) {
  Grid3<double> out(img.channels, img.height / 2, img.width / 2);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x)
        out.at(c, y, x) = 0.25 * (img.at(c, 2 * y, 2 * x) + img.at(c, 2 * y, 2 * x + 1) +
                                  img.at(c, 2 * y + 1, 2 * x) + img.at(c, 2 * y + 1, 2 * x + 1));
  return out;
}

// Extracts the two-magnification patch pair centered at `center`. The fine
// patch is a w-wide native crop; the coarse patch covers twice the extent and
// is 2x2 average-pooled back to w. Windows that would stick out are shifted
// inward, never padded.
inline Glimpse extract_glimpse(const Tile& tile, Location center, int w) {
  check(w % 2 == 0, "glimpse width must be even");
  check(w >= 2 && 2 * w <= std::min(tile.height(), tile.width()),
        "glimpse width must not exceed half the tile extent");
  Glimpse g;
  g.center = center;
  int fl = crop_origin(center.x, tile.width(), w);
  int ft = crop_origin(center.y, tile.height(), w);
  g.fine = crop(tile.pixels, fl, ft, w);
  int cl = crop_origin(center.x, tile.width(), 2 * w);
  int ct = crop_origin(center.y, tile.height(), 2 * w);
  g.coarse = avg_pool2(crop(tile.pixels, cl, ct, 2 * w));
  return g;
}

// 16x block average per channel.
inline ContextImage make_context(const Tile& tile) {
  const int f = kContextFactor;
  check(tile.height() % f == 0 && tile.width() % f == 0,
        "tile dimensions must be divisible by 16");
  ContextImage ctx;
  ctx.pixels = Grid3<double>(tile.pixels.channels, tile.height() / f, tile.width() / f);
  const double inv = 1.0 / double(f * f);
  for (int c = 0; c < tile.pixels.channels; ++c)
    for (int by = 0; by < ctx.pixels.height; ++by)
      for (int bx = 0; bx < ctx.pixels.width; ++bx) {
        double s = 0.0;
        for (int y = 0; y < f; ++y)
          for (int x = 0; x < f; ++x) s += tile.pixels.at(c, by * f + y, bx * f + x);
        ctx.pixels.at(c, by, bx) = s * inv;
      }
  return ctx;
}

// Zeroes the context window under the fine-glimpse footprint at `center`.
// Repeating a center is a no-op on the pixels; the window is clipped to the
// context bounds.
inline ContextImage suppress_region(ContextImage ctx, Location center, int w) {
  const int f = kContextFactor;
  int tile_w = ctx.pixels.width * f;
  int tile_h = ctx.pixels.height * f;
  int left = crop_origin(center.x, tile_w, std::min(w, tile_w));
  int top = crop_origin(center.y, tile_h, std::min(w, tile_h));
  int span = std::max(1, w / f);
  int cx0 = std::clamp(left / f, 0, ctx.pixels.width - 1);
  int cy0 = std::clamp(top / f, 0, ctx.pixels.height - 1);
  int cx1 = std::min(cx0 + span, ctx.pixels.width);
  int cy1 = std::min(cy0 + span, ctx.pixels.height);
  for (int c = 0; c < ctx.pixels.channels; ++c)
    for (int y = cy0; y < cy1; ++y)
      for (int x = cx0; x < cx1; ++x) ctx.pixels.at(c, y, x) = 0.0;
  ctx.suppressed.push_back(center);
  return ctx;
}

enum class AugmentOp { rot0, rot90, rot180, rot270, flipH, flipV, transpose };

constexpr AugmentOp kAugmentOps[7] = {AugmentOp::rot0,  AugmentOp::rot90,
                                      AugmentOp::rot180, AugmentOp::rot270,
                                      AugmentOp::flipH, AugmentOp::flipV,
                                      AugmentOp::transpose};

inline const char* augment_name(AugmentOp op) {
  switch (op) {
    case AugmentOp::rot0: return "rot0";
    case AugmentOp::rot90: return "rot90";
    case AugmentOp::rot180: return "rot180";
    case AugmentOp::rot270: return "rot270";
    case AugmentOp::flipH: return "flipH";
    case AugmentOp::flipV: return "flipV";
    case AugmentOp::transpose: return "transpose";
  }
  return "?";
}

namespace detail {

// Maps output (y, x) to source (y, x) for each op.
template <typename Get, typename Set>
void transform_plane(AugmentOp op, int h, int w, Get get, Set set) {
  int oh = h, ow = w;
  if (op == AugmentOp::rot90 || op == AugmentOp::rot270 || op == AugmentOp::transpose)
    std::swap(oh, ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      int sy = y, sx = x;
      switch (op) {
        case AugmentOp::rot0: break;
        case AugmentOp::rot90:  // 90 deg counterclockwise
          sy = x;
          sx = w - 1 - y;
          break;
        case AugmentOp::rot180:
          sy = h - 1 - y;
          sx = w - 1 - x;
          break;
        case AugmentOp::rot270:
          sy = h - 1 - x;
          sx = y;
          break;
        case AugmentOp::flipH: sx = w - 1 - x; break;
        case AugmentOp::flipV: sy = h - 1 - y; break;
        case AugmentOp::transpose:
          sy = x;
          sx = y;
          break;
      }
      set(y, x, get(sy, sx));
    }
}

}  // namespace detail

// Applies the same dihedral transform to pixels, stain, and relevance.
inline Tile augment(const Tile& tile, AugmentOp op) {
  bool square_only = op == AugmentOp::rot90 || op == AugmentOp::rot270 ||
                     op == AugmentOp::transpose;
  check(!square_only || tile.height() == tile.width(),
        "rot90/rot270/transpose require a square tile");
  int h = tile.height(), w = tile.width();
  int oh = h, ow = w;
  if (op == AugmentOp::rot90 || op == AugmentOp::rot270 || op == AugmentOp::transpose)
    std::swap(oh, ow);

  Tile out;
  out.label = tile.label;
  out.seed = tile.seed;
  out.pixels = Grid3<double>(tile.pixels.channels, oh, ow);
  out.stain = Grid2<double>(oh, ow);
  out.relevance = Grid2<uint8_t>(oh, ow);
  for (int c = 0; c < tile.pixels.channels; ++c)
    detail::transform_plane(
        op, h, w, [&](int y, int x) { return tile.pixels.at(c, y, x); },
        [&](int y, int x, double v) { out.pixels.at(c, y, x) = v; });
  detail::transform_plane(
      op, h, w, [&](int y, int x) { return tile.stain.at(y, x); },
      [&](int y, int x, double v) { out.stain.at(y, x) = v; });
  detail::transform_plane(
      op, h, w, [&](int y, int x) { return tile.relevance.at(y, x); },
      [&](int y, int x, uint8_t v) { out.relevance.at(y, x) = v; });
  return out;
}

}  // namespace saccade
