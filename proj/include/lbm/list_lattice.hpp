#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lbm/alloc.hpp"
#include "lbm/d3q19.hpp"
#include "lbm/geometry.hpp"
#include "lbm/layout.hpp"
#include "lbm/workers.hpp"

namespace lbm {

// Cache/TLB model used by the padding policies: 64 B lines over 512 sets,
// 2 MiB pages over 4 sets.
inline constexpr std::size_t kPadCacheLineBytes = 64;
inline constexpr std::size_t kPadCacheSets = 512;
inline constexpr std::size_t kPadPageBytes = 2u << 20;
inline constexpr std::size_t kPadTlbSets = 4;

struct PaddingPolicy {
  enum class Mode { None, Auto, Thrash, Explicit };
  Mode mode = Mode::None;
  // Explicit mode: pad slots inserted before each direction array;
  // pads[0] shifts the first array.
  std::array<std::int64_t, kQ> pads{};

  static PaddingPolicy none() { return {}; }
  static PaddingPolicy automatic() { return {Mode::Auto, {}}; }
  static PaddingPolicy thrash() { return {Mode::Thrash, {}}; }

  // "none" | "auto" | "thrash" | comma list of 19 pad counts
  static PaddingPolicy parse(const std::string& s);
  std::string to_string() const;
};

// Per-direction start offsets (in elements) of the 19 SoA direction arrays.
// none: d*n_fluid. auto: starts spread over distinct cache sets
// (set(start_d) = d*floor(512/19) mod 512) and TLB sets (page-set = d mod 4).
// thrash: all starts on one cache set and one TLB set.
std::array<std::size_t, kQ> padding_offsets(std::size_t n_fluid,
                                            const PaddingPolicy& policy,
                                            std::size_t* total_slots = nullptr);

std::size_t cache_set_of(std::size_t element_offset);
std::size_t tlb_set_of(std::size_t element_offset);

// blk = 0: plain loop nest x (outer), y, z (inner) over fluid nodes.
// blk > 0: the y-z plane is tiled into blk x blk tiles; iteration order is
// (tile_y, tile_z), x, y in tile, z in tile.
std::vector<Coord> order_nodes(const FlagField& ff, int blk);

// Cache capacity bound of the blocking analysis: largest layer (y-z plane
// node count) for which `layers` layers per worker fit into the cache.
std::size_t layer_condition_max_nodes(std::size_t cache_bytes, int workers,
                                      int layers,
                                      std::size_t bytes_per_node = 8 * kQ +
                                                                   4 * 18);

enum class Orientation { Gather, Scatter };

struct SlotMap {
  Layout layout = Layout::SoA;
  std::array<std::size_t, kQ> starts{};
  std::size_t total_slots = 0;

  std::size_t slot(std::size_t n, int d) const {
    if (layout == Layout::AoS) return n * kQ + d;
    return starts[d] + n;
  }
};

// Fluid-only lattice structure: blocked node ordering, PDF slot map with
// optional SoA padding, and one adjacency orientation.
//
// Gather entry (n,d): slot the pull kernel reads for direction d, i.e.
// (neighbor of n in direction opp(d), slot d) for fluid neighbors and the
// node's own slot opp(d) otherwise (half-way bounce-back).
// Scatter entry (n,d): slot the push kernel writes direction d to, i.e.
// (neighbor in direction d, slot d) or own slot opp(d). The AA odd step uses
// the scatter table for both sides: it gathers through column opp(d).
struct ListStructure {
  const FlagField* ff = nullptr;
  int blk = 0;
  Orientation orientation = Orientation::Gather;
  std::vector<Coord> nodes;
  std::vector<std::uint32_t> rank;  // coord -> list index, UINT32_MAX if solid
  SlotMap slots;
  NumaBuffer<std::uint32_t> adj;  // [n*18 + (d-1)]
  std::size_t n_fluid = 0;

  std::uint32_t entry(std::size_t n, int d) const {
    return adj[n * 18 + (d - 1)];
  }
};

ListStructure build_structure(const FlagField& ff, Layout layout, int blk,
                              const PaddingPolicy& padding,
                              Orientation orientation,
                              WorkerPool* pool = nullptr);

// Run-length coding of the adjacency list: maximal runs of consecutive nodes
// whose entries share one pattern of slot offsets relative to the node's own
// slots.
struct RiaRun {
  std::uint32_t start = 0;
  std::uint32_t length = 0;
  std::array<std::int32_t, 18> pattern{};
};

struct RiaCoding {
  std::vector<RiaRun> runs;
  std::size_t n_fluid = 0;
  std::size_t total_runs() const { return runs.size(); }
};

RiaCoding build_ria(const ListStructure& ls);

// v = sum over runs of floor(len/W)*W, divided by n_fluid.
double vectorizable_fraction(const RiaCoding& ria, int vector_width);

class ListLattice {
 public:
  // defer_pdf_init leaves the PDF buffers untouched so a kernel with its own
  // partitioning (run-aligned ranges) can do the first-touch initialization.
  ListLattice(const FlagField& ff, Layout layout, int blk,
              const PaddingPolicy& padding, Orientation orientation,
              int buffers, WorkerPool* pool = nullptr,
              bool defer_pdf_init = false);

  const ListStructure& structure() const { return structure_; }
  const SlotMap& slots() const { return structure_.slots; }
  std::size_t n_fluid() const { return structure_.n_fluid; }

  double* src() { return pdf_[src_].data(); }
  const double* src() const { return pdf_[src_].data(); }
  double* dst() { return pdf_[1 - src_].data(); }
  void swap_buffers() { src_ = 1 - src_; }
  int buffers() const { return buffers_; }
  bool huge_advised() const {
    return pdf_[0].huge_advised();
  }

  void init_range(int buffer, std::size_t first, std::size_t last);

  // RIA kernels replace the adjacency table with run-length coding; the
  // table can be dropped once the runs are built.
  void release_adjacency() { structure_.adj = NumaBuffer<std::uint32_t>(); }

  std::vector<double> snapshot() const;
  void load_state(std::span<const double> state);

  // Mass over all fluid populations of the current buffer (pads excluded).
  double total_mass() const;

 private:
  ListStructure structure_;
  int buffers_;
  int src_ = 0;
  NumaBuffer<double> pdf_[2];
};

}  // namespace lbm
