#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "saccade/core.hpp"
#include "saccade/imaging.hpp"
#include "saccade/rng.hpp"

namespace saccade {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v < hi; }  // half-open
  double width() const { return hi - lo; }
};

// Synthetic tile environment. Each class is a disjoint region of
// (stained-area fraction, mean stain intensity) space; class 0 has no stain
// at all. Stain is painted as membrane-like rings so that small glimpses
// only see the signal when they actually land on it.
struct EnvConfig {
  int tile_size = 256;
  double noise_std = 0.02;
  // Per-class intervals, index 0..3. Class 0 intervals are empty.
  std::array<Interval, kNumClasses> fraction = {
      Interval{0.0, 0.0}, Interval{0.02, 0.10}, Interval{0.10, 0.25},
      Interval{0.10, 0.35}};
  std::array<Interval, kNumClasses> intensity = {
      Interval{0.0, 0.0}, Interval{0.2, 0.4}, Interval{0.4, 0.7},
      Interval{0.7, 1.0}};
  double ring_radius_lo = 9.0;
  double ring_radius_hi = 15.0;
  double ring_thickness_lo = 3.0;
  double ring_thickness_hi = 5.0;
  double minority_fraction = 0.2;  // adjacent-class tiles per slide
  uint64_t seed = 0;

  void validate() const {
    check(tile_size >= 32 && tile_size % kContextFactor == 0,
          "tile_size must be a positive multiple of 16");
    check(noise_std >= 0.0, "noise_std must be nonnegative");
    for (int c = 1; c < kNumClasses; ++c) {
      check(fraction[c].lo > 0.0 && fraction[c].hi <= 1.0 &&
                fraction[c].lo < fraction[c].hi,
            "class fraction interval must lie in (0,1]");
      check(intensity[c].lo >= 0.0 && intensity[c].hi <= 1.0 &&
                intensity[c].lo < intensity[c].hi,
            "class intensity interval must lie in [0,1]");
      // Disjoint intensity bands keep (fraction, intensity) -> class unambiguous.
      for (int o = 1; o < c; ++o)
        check(intensity[c].lo >= intensity[o].hi || intensity[o].lo >= intensity[c].hi,
              "class intensity intervals must be disjoint");
    }
  }
};

namespace detail {

// Background: pale tissue-like base with a smooth low-frequency wash plus
// per-pixel noise. Cheap and featureless enough that the stain stands out.
inline void paint_background(Grid3<double>& px, Rng& rng, double noise_std) {
  const int h = px.height, w = px.width;
  const double base[3] = {0.87, 0.82, 0.84};
  const int cg = 8;  // coarse grid for the smooth wash
  std::vector<double> coarse((cg + 1) * (cg + 1));
  for (auto& v : coarse) v = rng.uniform(-0.05, 0.05);
  for (int y = 0; y < h; ++y) {
    double fy = double(y) / h * cg;
    int gy = int(fy);
    double ty = fy - gy;
    for (int x = 0; x < w; ++x) {
      double fx = double(x) / w * cg;
      int gx = int(fx);
      double tx = fx - gx;
      double wash = (1 - ty) * ((1 - tx) * coarse[gy * (cg + 1) + gx] +
                                tx * coarse[gy * (cg + 1) + gx + 1]) +
                    ty * ((1 - tx) * coarse[(gy + 1) * (cg + 1) + gx] +
                          tx * coarse[(gy + 1) * (cg + 1) + gx + 1]);
      double n = noise_std > 0.0 ? rng.normal(0.0, noise_std) : 0.0;
      for (int c = 0; c < 3; ++c) px.at(c, y, x) = clamp01(base[c] + wash + n);
    }
  }
}

// Rasterizes an annulus into the stain channel; returns newly stained pixels.
inline long paint_ring(Grid2<double>& stain, double cx, double cy, double r_out,
                       double r_in, double value) {
  int x0 = std::max(0, int(cx - r_out - 1));
  int x1 = std::min(stain.width - 1, int(cx + r_out + 1));
  int y0 = std::max(0, int(cy - r_out - 1));
  int y1 = std::min(stain.height - 1, int(cy + r_out + 1));
  long painted = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      double dx = x - cx, dy = y - cy;
      double d2 = dx * dx + dy * dy;
      if (d2 <= r_out * r_out && d2 >= r_in * r_in) {
        if (stain.at(y, x) == 0.0) ++painted;
        stain.at(y, x) = value;
      }
    }
  return painted;
}

inline double snap8(double v) { return std::round(clamp01(v) * 255.0) / 255.0; }

}  // namespace detail

// Deterministic tile generator. The same (cfg, cls, seed) triple always
// produces byte-identical tiles; pixel and stain values are snapped to the
// 8-bit grid so raster round-trips are exact.
inline Tile gen_tile(const EnvConfig& cfg, int cls, uint64_t seed) {
  cfg.validate();
  check(cls >= 0 && cls < kNumClasses, "class out of range");
  Rng rng(derive_seed(cfg.seed, 0x711e, uint64_t(cls), seed));

  const int n = cfg.tile_size;
  Tile tile;
  tile.label = cls;
  tile.seed = seed;
  tile.pixels = Grid3<double>(3, n, n);
  tile.stain = Grid2<double>(n, n);
  tile.relevance = Grid2<uint8_t>(n, n);
  detail::paint_background(tile.pixels, rng, cfg.noise_std);

  if (cls > 0) {
    // Draw targets from the interior of the class intervals so that ring
    // rasterization overshoot cannot cross a class boundary.
    const Interval& fr = cfg.fraction[cls];
    const Interval& in = cfg.intensity[cls];
    double max_ring = 3.15 * cfg.ring_radius_hi * cfg.ring_radius_hi;  // area bound
    double margin = std::max(0.1 * fr.width(), 1.5 * max_ring / double(n) / double(n));
    check(fr.width() > 2.0 * margin, "fraction interval too narrow for ring size");
    double target_fraction = rng.uniform(fr.lo + margin, fr.hi - margin);
    double level = rng.uniform(in.lo + 0.1 * in.width(), in.hi - 0.1 * in.width());
    level = detail::snap8(level);
    if (!in.contains(level)) level = detail::snap8(0.5 * (in.lo + in.hi));

    long target_px = long(target_fraction * double(n) * double(n));
    long painted = 0;
    int guard = 0;
    while (painted < target_px && guard++ < 10000) {
      double r_out = rng.uniform(cfg.ring_radius_lo, cfg.ring_radius_hi);
      double r_in = std::max(1.0, r_out - rng.uniform(cfg.ring_thickness_lo,
                                                      cfg.ring_thickness_hi));
      double cx = rng.uniform(r_out, n - 1 - r_out);
      double cy = rng.uniform(r_out, n - 1 - r_out);
      painted += detail::paint_ring(tile.stain, cx, cy, r_out, r_in, level);
    }
    check(guard < 10000, "ring painting failed to reach target fraction");

    // Blend the stain into the pixels as a brownish chromogen.
    const double dab[3] = {0.38, 0.22, 0.10};
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double a = tile.stain.at(y, x);
        if (a > 0.0)
          for (int c = 0; c < 3; ++c)
            tile.pixels.at(c, y, x) = (1.0 - a) * tile.pixels.at(c, y, x) + a * dab[c];
      }
  }

  for (auto& v : tile.pixels.data) v = detail::snap8(v);
  for (size_t i = 0; i < tile.stain.data.size(); ++i) {
    tile.stain.data[i] = detail::snap8(tile.stain.data[i]);
    tile.relevance.data[i] = tile.stain.data[i] > 0.0 ? 1 : 0;
  }
  return tile;
}

// Recomputes the class from the measured (fraction, intensity) pair.
inline int label_oracle(const EnvConfig& cfg, const Tile& tile) {
  long stained = 0;
  double sum = 0.0;
  for (size_t i = 0; i < tile.stain.data.size(); ++i)
    if (tile.stain.data[i] > 0.0) {
      ++stained;
      sum += tile.stain.data[i];
    }
  if (stained == 0) return 0;
  double fraction = double(stained) / double(tile.stain.data.size());
  double mean_intensity = sum / double(stained);
  for (int c = 1; c < kNumClasses; ++c)
    if (cfg.fraction[c].contains(fraction) && cfg.intensity[c].contains(mean_intensity))
      return c;
  throw data_error("measured stain statistics match no class interval");
}

struct SyntheticSlide {
  int rows = 0, cols = 0;
  int slide_label = 0;
  std::vector<Tile> tiles;               // row-major
  std::vector<double> tissue_fraction;   // per tile
  uint64_t seed = 0;
};

// A grid of tiles dominated by the slide class with a minority of
// adjacent-class tiles mixed in to exercise slide-level aggregation.
inline SyntheticSlide gen_slide(const EnvConfig& cfg, int cls, int rows, int cols,
                                uint64_t seed) {
  check(rows >= 1 && cols >= 1, "slide grid must be at least 1x1");
  check(cls >= 0 && cls < kNumClasses, "class out of range");
  check(cfg.minority_fraction >= 0.0 && cfg.minority_fraction < 0.5,
        "minority fraction must be < 0.5");
  Rng rng(derive_seed(cfg.seed, 0x51cde, uint64_t(cls), seed));

  const int n = rows * cols;
  int minority = int(std::lround(cfg.minority_fraction * n));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  std::vector<int> neighbors;
  if (cls > 0) neighbors.push_back(cls - 1);
  if (cls < kNumClasses - 1) neighbors.push_back(cls + 1);
  std::vector<int> labels(n, cls);
  for (int k = 0; k < minority; ++k)
    labels[order[k]] = neighbors[rng.below(neighbors.size())];

  SyntheticSlide slide;
  slide.rows = rows;
  slide.cols = cols;
  slide.slide_label = cls;
  slide.seed = seed;
  slide.tiles.reserve(n);
  for (int i = 0; i < n; ++i) {
    uint64_t tile_seed = derive_seed(seed, 0x7113, uint64_t(i));
    slide.tiles.push_back(gen_tile(cfg, labels[i], tile_seed));
    slide.tissue_fraction.push_back(0.6 + 0.4 * rng.uniform());
  }
  return slide;
}

}  // namespace saccade
