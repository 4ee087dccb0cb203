#include <doctest.h>

#include <cmath>
#include <random>

#include "lbm/geometry.hpp"

using namespace lbm;

TEST_CASE("channel census") {
  const FlagField ff = build_geometry({GeometryKind::Channel, 500, 100, 100});
  CHECK(fluid_count(ff) == 4802000);
  CHECK(ff.periodic == std::array<bool, 3>{true, false, false});
}

TEST_CASE("channel fluid count formula") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(3, 24);
  for (int trial = 0; trial < 20; ++trial) {
    const int nx = dim(rng), ny = dim(rng), nz = dim(rng);
    const FlagField ff = build_geometry({GeometryKind::Channel, nx, ny, nz});
    CHECK(fluid_count(ff) ==
          static_cast<std::int64_t>(nx) * (ny - 2) * (nz - 2));
  }
}

TEST_CASE("slit walls sit at the z extremes only") {
  const FlagField ff = build_geometry({GeometryKind::Slit, 8, 8, 10});
  CHECK(fluid_count(ff) == 8 * 8 * 8);
  CHECK(ff.periodic == std::array<bool, 3>{true, true, false});
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      CHECK(ff.solid(x, y, 0));
      CHECK(ff.solid(x, y, 9));
      for (int z = 1; z < 9; ++z) CHECK(ff.fluid(x, y, z));
    }
}

TEST_CASE("blocks census against an enumeration oracle") {
  GeometrySpec spec{GeometryKind::Blocks, 16, 16, 16, 4, 4};
  const FlagField ff = build_geometry(spec);
  CHECK(fluid_count(ff) == 16 * 16 * 16 - 8 * 4 * 4 * 4);  // 3584

  // oracle: count nodes that avoid every obstacle cube directly
  std::int64_t oracle = 0;
  for (int x = 0; x < 16; ++x)
    for (int y = 0; y < 16; ++y)
      for (int z = 0; z < 16; ++z) {
        bool inside = false;
        for (int bx = 4; bx < 16 && !inside; bx += 8)
          for (int by = 4; by < 16 && !inside; by += 8)
            for (int bz = 4; bz < 16 && !inside; bz += 8)
              inside = x >= bx && x < bx + 4 && y >= by && y < by + 4 &&
                       z >= bz && z < bz + 4;
        oracle += !inside;
      }
  CHECK(fluid_count(ff) == oracle);
  CHECK(ff.periodic == std::array<bool, 3>{true, true, true});

  // obstacles start after `spacing` fluid layers at the origin
  CHECK(ff.fluid(0, 0, 0));
  CHECK(ff.solid(4, 4, 4));
}

TEST_CASE("blocks fluid fraction is exact on period multiples") {
  for (int b : {1, 2, 3})
    for (int s : {1, 2, 4}) {
      const int period = b + s;
      const int n = 2 * period;
      const FlagField ff =
          build_geometry({GeometryKind::Blocks, n, n, n, b, s});
      const double expect =
          1.0 - std::pow(static_cast<double>(b) / period, 3);
      const double got = static_cast<double>(fluid_count(ff)) /
                         static_cast<double>(ff.volume());
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("fluid_count on an all-fluid field") {
  FlagField ff;
  ff.nx = ff.ny = ff.nz = 4;
  ff.flags.assign(64, 0);
  CHECK(fluid_count(ff) == 64);
}

TEST_CASE("neighbor: periodic wrap and solid hits") {
  const FlagField ff = build_geometry({GeometryKind::Channel, 12, 8, 8});

  const NeighborResult wrap = neighbor(ff, {0, 5, 5}, DIR_W);
  CHECK(wrap.kind == NeighborResult::Kind::Coordinate);
  CHECK(wrap.c == Coord{11, 5, 5});

  const NeighborResult hit = neighbor(ff, {3, 1, 5}, DIR_S);
  CHECK(hit.kind == NeighborResult::Kind::SolidHit);

  // non-periodic escape happens only from the boundary layer itself
  const FlagField slit = build_geometry({GeometryKind::Slit, 4, 4, 6});
  const NeighborResult outside = neighbor(slit, {0, 0, 0}, DIR_B);
  CHECK(outside.kind == NeighborResult::Kind::Outside);
  const NeighborResult ywrap = neighbor(slit, {0, 3, 2}, DIR_N);
  CHECK(ywrap.kind == NeighborResult::Kind::Coordinate);
  CHECK(ywrap.c == Coord{0, 0, 2});
}

TEST_CASE("pipe staircase fraction approximates the circle area") {
  const FlagField ff = build_geometry({GeometryKind::Pipe, 20, 21, 21});
  const double r = (21 - 2) / 2.0;
  const double circle = M_PI * r * r / (21.0 * 21.0);
  const double got = static_cast<double>(fluid_count(ff)) /
                     static_cast<double>(ff.volume());
  CHECK(std::abs(got - circle) / circle < 0.15);

  // enumeration oracle for one cross-section
  std::int64_t disc = 0;
  for (int y = 0; y < 21; ++y)
    for (int z = 0; z < 21; ++z)
      if ((y - 10.0) * (y - 10.0) + (z - 10.0) * (z - 10.0) <= r * r) ++disc;
  CHECK(fluid_count(ff) == disc * 20);
}

TEST_CASE("geometry generation is deterministic") {
  const GeometrySpec spec{GeometryKind::Blocks, 12, 10, 10, 3, 2};
  const FlagField a = build_geometry(spec);
  const FlagField b = build_geometry(spec);
  CHECK(a.flags == b.flags);
}

TEST_CASE("flags are invariant along periodic axes") {
  const FlagField ch = build_geometry({GeometryKind::Channel, 6, 7, 8});
  for (int x = 1; x < 6; ++x)
    for (int y = 0; y < 7; ++y)
      for (int z = 0; z < 8; ++z)
        CHECK(ch.solid(x, y, z) == ch.solid(0, y, z));

  const FlagField pipe = build_geometry({GeometryKind::Pipe, 5, 9, 9});
  for (int x = 1; x < 5; ++x)
    for (int y = 0; y < 9; ++y)
      for (int z = 0; z < 9; ++z)
        CHECK(pipe.solid(x, y, z) == pipe.solid(0, y, z));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(build_geometry({GeometryKind::Channel, 4, 2, 5}),
                  ConfigError);
  CHECK_THROWS_AS(build_geometry({GeometryKind::Slit, 4, 4, 2}), ConfigError);
  CHECK_THROWS_AS(build_geometry({GeometryKind::Pipe, 4, 3, 3}), ConfigError);
  CHECK_THROWS_AS(build_geometry({GeometryKind::Blocks, 4, 4, 4, 5, 1}),
                  ConfigError);
  // no fluid at all
  CHECK_THROWS_AS(build_geometry({GeometryKind::Blocks, 4, 4, 4, 2, 0}),
                  ConfigError);
  CHECK_THROWS_AS(geometry_kind_from_string("torus"), ConfigError);
}
