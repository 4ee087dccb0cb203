#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lbm/d3q19.hpp"
#include "lbm/errors.hpp"

namespace lbm {

struct Coord {
  int x = 0, y = 0, z = 0;
  bool operator==(const Coord&) const = default;
};

// Per-node fluid/solid flags with per-axis periodicity. Flags are stored
// x-major: index = (x*ny + y)*nz + z. Non-periodic axes of the built-in
// geometry kinds always carry solid boundary layers, so full-array kernels
// may wrap indices on every axis.
struct FlagField {
  int nx = 0, ny = 0, nz = 0;
  std::array<bool, 3> periodic = {false, false, false};
  std::vector<std::uint8_t> flags;  // 0 = fluid, 1 = solid

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * ny + y) * nz + z;
  }
  bool solid(int x, int y, int z) const { return flags[index(x, y, z)] != 0; }
  bool fluid(int x, int y, int z) const { return flags[index(x, y, z)] == 0; }
  std::size_t volume() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
};

enum class GeometryKind { Channel, Slit, Pipe, Blocks };

const char* to_string(GeometryKind k);
GeometryKind geometry_kind_from_string(const std::string& s);

struct GeometrySpec {
  GeometryKind kind = GeometryKind::Channel;
  int nx = 500, ny = 100, nz = 100;
  // blocks parameters: obstacle edge length b and fluid spacing s
  int block = 4;
  int spacing = 4;
};

FlagField build_geometry(const GeometrySpec& spec);

std::int64_t fluid_count(const FlagField& ff);

struct NeighborResult {
  enum class Kind { Coordinate, SolidHit, Outside };
  Kind kind = Kind::Coordinate;
  Coord c;
};

// Coordinate offset by kC[dir], wrapped modulo dims on periodic axes.
// Outside only on non-periodic axis escape (callers treat it as a solid hit);
// SolidHit if the target node is flagged solid.
NeighborResult neighbor(const FlagField& ff, Coord at, int dir);

}  // namespace lbm
