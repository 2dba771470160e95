#include <catch2/catch_amalgamated.hpp>

#include "saccade/synthenv.hpp"

using namespace saccade;

namespace {

double stained_fraction(const Tile& t) {
  long n = 0;
  for (double v : t.stain.data)
    if (v > 0.0) ++n;
  return double(n) / double(t.stain.data.size());
}

}  // namespace

TEST_CASE("class 0 tiles carry no stain and no relevance") {
  EnvConfig cfg;
  cfg.tile_size = 128;
  Tile t = gen_tile(cfg, 0, 17);
  for (double v : t.stain.data) REQUIRE(v == 0.0);
  for (uint8_t v : t.relevance.data) REQUIRE(v == 0);
  REQUIRE(t.label == 0);
}

TEST_CASE("generation is deterministic in (cfg, class, seed)") {
  EnvConfig cfg;
  cfg.tile_size = 128;
  for (int cls : {0, 2}) {
    Tile a = gen_tile(cfg, cls, 5);
    Tile b = gen_tile(cfg, cls, 5);
    REQUIRE(a.pixels == b.pixels);
    REQUIRE(a.stain == b.stain);
    REQUIRE(a.relevance == b.relevance);
    Tile c = gen_tile(cfg, cls, 6);
    REQUIRE(a.pixels.data != c.pixels.data);
  }
}

TEST_CASE("class 3 stain fraction lands inside the class interval") {
  EnvConfig cfg;
  for (uint64_t seed = 0; seed < 8; ++seed) {
    Tile t = gen_tile(cfg, 3, seed);
    double f = stained_fraction(t);
    REQUIRE(f >= cfg.fraction[3].lo);
    REQUIRE(f < cfg.fraction[3].hi);
  }
}

TEST_CASE("relevance is nonempty exactly for positive classes") {
  EnvConfig cfg;
  cfg.tile_size = 128;
  for (int cls = 0; cls < 4; ++cls) {
    Tile t = gen_tile(cfg, cls, 33);
    long n = 0;
    for (uint8_t v : t.relevance.data) n += v;
    if (cls == 0) REQUIRE(n == 0);
    else REQUIRE(n > 0);
  }
}

TEST_CASE("gen_tile rejects a class out of range") {
  EnvConfig cfg;
  REQUIRE_THROWS_AS(gen_tile(cfg, 4, 0), value_error);
  REQUIRE_THROWS_AS(gen_tile(cfg, -1, 0), value_error);
}

TEST_CASE("label_oracle agrees with the stored label") {
  EnvConfig cfg;
  cfg.tile_size = 128;
  // Full-rate consistency sweep; the acceptance suite runs the default size.
  for (int cls = 0; cls < 4; ++cls)
    for (uint64_t seed = 0; seed < 250; ++seed) {
      Tile t = gen_tile(cfg, cls, seed);
      REQUIRE(label_oracle(cfg, t) == cls);
    }
}

TEST_CASE("label_oracle on hand-built tiles") {
  EnvConfig cfg;
  SECTION("all-zero stain maps to class 0") {
    Tile t;
    t.pixels = Grid3<double>(3, 64, 64, 0.5);
    t.stain = Grid2<double>(64, 64);
    t.relevance = Grid2<uint8_t>(64, 64);
    REQUIRE(label_oracle(cfg, t) == 0);
  }
  SECTION("fraction and intensity at class-2 midpoints map to class 2") {
    Tile t;
    int n = 128;
    t.pixels = Grid3<double>(3, n, n, 0.5);
    t.stain = Grid2<double>(n, n);
    t.relevance = Grid2<uint8_t>(n, n);
    double frac = 0.5 * (cfg.fraction[2].lo + cfg.fraction[2].hi);
    double inten = 0.5 * (cfg.intensity[2].lo + cfg.intensity[2].hi);
    long want = long(frac * n * n);
    for (long i = 0; i < want; ++i) t.stain.data[i] = inten;
    REQUIRE(label_oracle(cfg, t) == 2);
  }
  SECTION("statistics outside every class interval are a generator bug") {
    Tile t;
    t.pixels = Grid3<double>(3, 64, 64, 0.5);
    t.stain = Grid2<double>(64, 64);
    t.relevance = Grid2<uint8_t>(64, 64);
    for (auto& v : t.stain.data) v = 0.9;  // fraction 1.0 fits no class
    REQUIRE_THROWS_AS(label_oracle(cfg, t), data_error);
  }
}

TEST_CASE("stain signal is sparse for every positive class") {
  EnvConfig cfg;
  for (int cls = 1; cls < 4; ++cls)
    for (uint64_t seed = 0; seed < 4; ++seed)
      REQUIRE(stained_fraction(gen_tile(cfg, cls, seed)) < 0.35);
}

TEST_CASE("gen_slide mixes in adjacent-class minority tiles") {
  EnvConfig cfg;
  cfg.tile_size = 64;

  SECTION("minority fraction zero gives a pure slide") {
    cfg.minority_fraction = 0.0;
    SyntheticSlide s = gen_slide(cfg, 2, 3, 3, 9);
    for (const Tile& t : s.tiles) REQUIRE(t.label == 2);
  }
  SECTION("1x1 slide label equals its single tile label") {
    cfg.minority_fraction = 0.0;
    SyntheticSlide s = gen_slide(cfg, 1, 1, 1, 4);
    REQUIRE(s.tiles.size() == 1);
    REQUIRE(s.tiles[0].label == s.slide_label);
  }
  SECTION("4x4 slide at fraction 0.2 has exactly 3 minority tiles") {
    cfg.minority_fraction = 0.2;
    SyntheticSlide s = gen_slide(cfg, 1, 4, 4, 21);
    int minority = 0;
    for (const Tile& t : s.tiles)
      if (t.label != 1) {
        REQUIRE((t.label == 0 || t.label == 2));
        ++minority;
      }
    REQUIRE(minority == 3);
  }
  SECTION("minority fraction at or above one-half is rejected") {
    cfg.minority_fraction = 0.5;
    REQUIRE_THROWS_AS(gen_slide(cfg, 1, 2, 2, 0), value_error);
  }
  SECTION("tile seeds derive from the slide seed deterministically") {
    cfg.minority_fraction = 0.2;
    SyntheticSlide a = gen_slide(cfg, 3, 2, 2, 77);
    SyntheticSlide b = gen_slide(cfg, 3, 2, 2, 77);
    for (size_t i = 0; i < a.tiles.size(); ++i) {
      REQUIRE(a.tiles[i].pixels == b.tiles[i].pixels);
      REQUIRE(a.tissue_fraction[i] == b.tissue_fraction[i]);
    }
  }
}
