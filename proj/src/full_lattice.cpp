#include "lbm/full_lattice.hpp"

#include <stdexcept>

namespace lbm {

FullLattice::FullLattice(const FlagField& ff, Layout layout, int buffers,
                         int row_pad)
    : ff_(&ff), layout_(layout), buffers_(buffers) {
  if (buffers != 1 && buffers != 2)
    throw ConfigError("FullLattice: buffers must be 1 or 2");
  if (row_pad < 0) throw ConfigError("FullLattice: row_pad must be >= 0");
  ny_ = ff.ny;
  nz_ = ff.nz;
  zstride_ = static_cast<std::size_t>(ff.nz) + row_pad;
  plane_ = static_cast<std::size_t>(ff.nx) * ff.ny * zstride_;
  slots_ = plane_ * kQ;
  for (int b = 0; b < buffers; ++b) buf_[b] = NumaBuffer<double>(slots_);
}

void FullLattice::init_range_flat(int buffer, std::size_t first,
                                  std::size_t last) {
  double* f = buf_[buffer].data();
  const std::size_t plane_nodes = static_cast<std::size_t>(ny_) * nz_;
  for (std::size_t n = first; n < last; ++n) {
    const int x = static_cast<int>(n / plane_nodes);
    const std::size_t r = n % plane_nodes;
    const int y = static_cast<int>(r / nz_);
    const int z = static_cast<int>(r % nz_);
    for (int d = 0; d < kQ; ++d) f[index(x, y, z, d)] = kW[d];
  }
}

void FullLattice::init_slab(int buffer, int x0, int x1) {
  double* f = buf_[buffer].data();
  for (int x = x0; x < x1; ++x)
    for (int y = 0; y < ny_; ++y)
      for (int z = 0; z < nz_; ++z)
        for (int d = 0; d < kQ; ++d) f[index(x, y, z, d)] = kW[d];
}

void FullLattice::correction(double* buf, int x0, int x1) {
  const FlagField& ff = *ff_;
  for (int x = x0; x < x1; ++x)
    for (int y = 0; y < ny_; ++y)
      for (int z = 0; z < nz_; ++z) {
        if (!ff.solid(x, y, z)) continue;
        for (int i = 1; i < kQ; i += 2) {
          const std::size_t a = index(x, y, z, i);
          const std::size_t b = index(x, y, z, i + 1);
          const double tmp = buf[a];
          buf[a] = buf[b];
          buf[b] = tmp;
        }
      }
}

std::vector<double> FullLattice::snapshot() const {
  const FlagField& ff = *ff_;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(fluid_count(ff)) * kQ);
  const double* f = src();
  for (int x = 0; x < ff.nx; ++x)
    for (int y = 0; y < ff.ny; ++y)
      for (int z = 0; z < ff.nz; ++z) {
        if (ff.solid(x, y, z)) continue;
        for (int d = 0; d < kQ; ++d) out.push_back(f[index(x, y, z, d)]);
      }
  return out;
}

double FullLattice::total_mass() const {
  const FlagField& ff = *ff_;
  const double* f = src();
  // Kahan summation keeps the drift checks meaningful on large boxes.
  double sum = 0.0, carry = 0.0;
  for (int x = 0; x < ff.nx; ++x)
    for (int y = 0; y < ff.ny; ++y)
      for (int z = 0; z < ff.nz; ++z)
        for (int d = 0; d < kQ; ++d) {
          const double v = f[index(x, y, z, d)] - carry;
          const double t = sum + v;
          carry = (t - sum) - v;
          sum = t;
        }
  return sum;
}

void FullLattice::load_state(std::span<const double> state) {
  const FlagField& ff = *ff_;
  double* f = buf_[src_].data();
  std::size_t k = 0;
  for (int x = 0; x < ff.nx; ++x)
    for (int y = 0; y < ff.ny; ++y)
      for (int z = 0; z < ff.nz; ++z) {
        if (ff.solid(x, y, z)) continue;
        for (int d = 0; d < kQ; ++d) f[index(x, y, z, d)] = state[k++];
      }
  if (k != state.size())
    throw ConfigError("load_state: state size does not match fluid count");
}

}  // namespace lbm
