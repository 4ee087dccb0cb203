#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lbm/alloc.hpp"
#include "lbm/d3q19.hpp"
#include "lbm/geometry.hpp"
#include "lbm/layout.hpp"
#include "lbm/workers.hpp"

namespace lbm {

// Dense PDF storage over the whole box, fluid and solid nodes alike. One
// buffer for AA kernels, two for one-step kernels. row_pad adds unused
// elements behind each z-row (a manual padding experiment; 0 by default, in
// which case the index maps are exactly
//   AoS: ((x*ny+y)*nz+z)*19+d      SoA: d*nx*ny*nz + (x*ny+y)*nz+z
class FullLattice {
 public:
  FullLattice(const FlagField& ff, Layout layout, int buffers,
              int row_pad = 0);

  const FlagField& flags() const { return *ff_; }
  Layout layout() const { return layout_; }
  int buffers() const { return buffers_; }

  std::size_t index(int x, int y, int z, int d) const {
    const std::size_t spatial =
        (static_cast<std::size_t>(x) * ny_ + y) * zstride_ + z;
    if (layout_ == Layout::AoS) return spatial * kQ + d;
    return static_cast<std::size_t>(d) * plane_ + spatial;
  }

  double* src() { return buf_[src_].data(); }
  const double* src() const { return buf_[src_].data(); }
  double* dst() { return buf_[1 - src_].data(); }
  void swap_buffers() { src_ = 1 - src_; }

  std::size_t slots_per_buffer() const { return slots_; }
  std::size_t zstride() const { return zstride_; }
  std::size_t plane() const { return plane_; }
  bool huge_advised() const { return buf_[0].huge_advised(); }

  // First-touch initialization to equilibrium(1, 0); the caller supplies the
  // same partitioning its sweeps use. Flat ranges address nodes in
  // (x*ny+y)*nz+z order, slabs address x ranges.
  void init_range_flat(int buffer, std::size_t first, std::size_t last);
  void init_slab(int buffer, int x0, int x1);

  // Full-way bounce-back: swap f[i] <-> f[opp[i]] at every solid node with
  // x in [x0, x1). Applying it twice is the identity.
  void correction(double* buf, int x0, int x1);

  // Canonical per-fluid-node PDFs in x,y,z node order (source buffer).
  std::vector<double> snapshot() const;
  void load_state(std::span<const double> state);

  // Mass over fluid and solid nodes of the source buffer (pads excluded).
  double total_mass() const;

 private:
  const FlagField* ff_;
  Layout layout_;
  int buffers_;
  int src_ = 0;
  int ny_, nz_;
  std::size_t zstride_, plane_, slots_;
  NumaBuffer<double> buf_[2];
};

}  // namespace lbm
