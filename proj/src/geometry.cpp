#include "lbm/geometry.hpp"

#include <algorithm>
#include <cstdint>

namespace lbm {

const char* to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::Channel: return "channel";
    case GeometryKind::Slit: return "slit";
    case GeometryKind::Pipe: return "pipe";
    case GeometryKind::Blocks: return "blocks";
  }
  return "?";
}

GeometryKind geometry_kind_from_string(const std::string& s) {
  if (s == "channel") return GeometryKind::Channel;
  if (s == "slit") return GeometryKind::Slit;
  if (s == "pipe") return GeometryKind::Pipe;
  if (s == "blocks") return GeometryKind::Blocks;
  throw ConfigError("unknown geometry kind '" + s +
                    "' (valid: channel, slit, pipe, blocks)");
}

namespace {

void check_dims(const GeometrySpec& s, int min_x, int min_y, int min_z) {
  if (s.nx < min_x || s.ny < min_y || s.nz < min_z)
    throw ConfigError(std::string("geometry '") + to_string(s.kind) +
                      "' needs dims of at least " + std::to_string(min_x) +
                      "x" + std::to_string(min_y) + "x" +
                      std::to_string(min_z) + ", got " + std::to_string(s.nx) +
                      "x" + std::to_string(s.ny) + "x" + std::to_string(s.nz));
}

}  // namespace

FlagField build_geometry(const GeometrySpec& spec) {
  FlagField ff;
  ff.nx = spec.nx;
  ff.ny = spec.ny;
  ff.nz = spec.nz;
  ff.flags.assign(ff.volume(), 0);

  switch (spec.kind) {
    case GeometryKind::Channel: {
      check_dims(spec, 1, 3, 3);
      ff.periodic = {true, false, false};
      for (int x = 0; x < ff.nx; ++x)
        for (int y = 0; y < ff.ny; ++y)
          for (int z = 0; z < ff.nz; ++z)
            if (y == 0 || y == ff.ny - 1 || z == 0 || z == ff.nz - 1)
              ff.flags[ff.index(x, y, z)] = 1;
      break;
    }
    case GeometryKind::Slit: {
      check_dims(spec, 1, 1, 3);
      ff.periodic = {true, true, false};
      for (int x = 0; x < ff.nx; ++x)
        for (int y = 0; y < ff.ny; ++y) {
          ff.flags[ff.index(x, y, 0)] = 1;
          ff.flags[ff.index(x, y, ff.nz - 1)] = 1;
        }
      break;
    }
    case GeometryKind::Pipe: {
      check_dims(spec, 1, 4, 4);
      ff.periodic = {true, false, false};
      // staircase disc: integer test on 4*((y-cy)^2+(z-cz)^2) > 4*r^2 with
      // cy = (ny-1)/2, cz = (nz-1)/2, r = (min(ny,nz)-2)/2
      const std::int64_t r2x4 =
          static_cast<std::int64_t>(std::min(ff.ny, ff.nz) - 2) *
          (std::min(ff.ny, ff.nz) - 2);
      for (int y = 0; y < ff.ny; ++y)
        for (int z = 0; z < ff.nz; ++z) {
          const std::int64_t dy = 2 * y - (ff.ny - 1);
          const std::int64_t dz = 2 * z - (ff.nz - 1);
          if (dy * dy + dz * dz > r2x4)
            for (int x = 0; x < ff.nx; ++x) ff.flags[ff.index(x, y, z)] = 1;
        }
      break;
    }
    case GeometryKind::Blocks: {
      check_dims(spec, 1, 1, 1);
      if (spec.block < 1)
        throw ConfigError("blocks geometry: block edge must be >= 1");
      if (spec.spacing < 0)
        throw ConfigError("blocks geometry: spacing must be >= 0");
      const int period = spec.block + spec.spacing;
      if (period > std::min({spec.nx, spec.ny, spec.nz}))
        throw ConfigError(
            "blocks geometry: block+spacing must not exceed the smallest "
            "dimension");
      ff.periodic = {true, true, true};
      for (int x = 0; x < ff.nx; ++x)
        for (int y = 0; y < ff.ny; ++y)
          for (int z = 0; z < ff.nz; ++z)
            if (x % period >= spec.spacing && y % period >= spec.spacing &&
                z % period >= spec.spacing)
              ff.flags[ff.index(x, y, z)] = 1;
      break;
    }
  }

  if (fluid_count(ff) == 0)
    throw ConfigError(std::string("geometry '") + to_string(spec.kind) +
                      "' produced no fluid nodes");
  return ff;
}

std::int64_t fluid_count(const FlagField& ff) {
  std::int64_t n = 0;
  for (std::uint8_t f : ff.flags) n += (f == 0);
  return n;
}

NeighborResult neighbor(const FlagField& ff, Coord at, int dir) {
  const int dims[3] = {ff.nx, ff.ny, ff.nz};
  int t[3] = {at.x + kC[dir][0], at.y + kC[dir][1], at.z + kC[dir][2]};
  for (int a = 0; a < 3; ++a) {
    if (t[a] < 0 || t[a] >= dims[a]) {
      if (!ff.periodic[a]) return {NeighborResult::Kind::Outside, at};
      t[a] = (t[a] + dims[a]) % dims[a];
    }
  }
  const Coord c{t[0], t[1], t[2]};
  if (ff.solid(c.x, c.y, c.z)) return {NeighborResult::Kind::SolidHit, c};
  return {NeighborResult::Kind::Coordinate, c};
}

}  // namespace lbm
