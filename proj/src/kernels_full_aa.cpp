#include <algorithm>

#include "kernels_impl.hpp"

namespace lbm::detail {
namespace {

template <class F>
void for_flat_nodes(const FlagField& ff, std::size_t first, std::size_t last,
                    F&& fn) {
  if (first >= last) return;
  const std::size_t plane = static_cast<std::size_t>(ff.ny) * ff.nz;
  int x = static_cast<int>(first / plane);
  std::size_t r = first % plane;
  int y = static_cast<int>(r / ff.nz);
  int z = static_cast<int>(r % ff.nz);
  for (std::size_t n = first; n < last; ++n) {
    fn(x, y, z);
    if (++z == ff.nz) {
      z = 0;
      if (++y == ff.ny) {
        y = 0;
        ++x;
      }
    }
  }
}

template <class F>
void for_slab_tiled(const FlagField& ff, int x0, int x1, int blk, F&& fn) {
  for (int ty = 0; ty < ff.ny; ty += blk)
    for (int tz = 0; tz < ff.nz; tz += blk) {
      const int ye = std::min(ty + blk, ff.ny);
      const int ze = std::min(tz + blk, ff.nz);
      for (int x = x0; x < x1; ++x)
        for (int y = ty; y < ye; ++y)
          for (int z = tz; z < ze; ++z) fn(x, y, z);
    }
}

// Even step: node-local collide, result stored into the opposite slot.
// Odd step: gather the post-collision populations from the neighbors'
// opposite slots, collide, scatter into the neighbors' regular slots. The
// solid swap after each sub-step turns the stale solid slots into the
// reflected populations the next gather expects (full-way bounce-back).
template <Layout L>
struct AaEvenBody {
  const FlagField& ff;
  const FullLattice& lat;
  double* buf;
  double wp, wm;
  const double* g;

  void operator()(int x, int y, int z) const {
    if (!ff.fluid(x, y, z)) return;
    double q[kQ];
    for (int d = 0; d < kQ; ++d) q[d] = buf[lat.index(x, y, z, d)];
    collide_node(q, wp, wm, g);
    for (int d = 0; d < kQ; ++d) buf[lat.index(x, y, z, kOpp[d])] = q[d];
  }
};

template <Layout L>
struct AaOddBody {
  const FlagField& ff;
  const FullLattice& lat;
  double* buf;
  double wp, wm;
  const double* g;

  void operator()(int x, int y, int z) const {
    if (!ff.fluid(x, y, z)) return;
    const int xp = x + 1 == ff.nx ? 0 : x + 1;
    const int xm = x == 0 ? ff.nx - 1 : x - 1;
    const int yp = y + 1 == ff.ny ? 0 : y + 1;
    const int ym = y == 0 ? ff.ny - 1 : y - 1;
    const int zp = z + 1 == ff.nz ? 0 : z + 1;
    const int zm = z == 0 ? ff.nz - 1 : z - 1;
    const int X[3] = {xm, x, xp};
    const int Y[3] = {ym, y, yp};
    const int Z[3] = {zm, z, zp};

    double q[kQ];
    q[0] = buf[lat.index(x, y, z, 0)];
    for (int d = 1; d < kQ; ++d)
      q[d] = buf[lat.index(X[1 - kC[d][0]], Y[1 - kC[d][1]], Z[1 - kC[d][2]],
                           kOpp[d])];
    collide_node(q, wp, wm, g);
    buf[lat.index(x, y, z, 0)] = q[0];
    for (int d = 1; d < kQ; ++d)
      buf[lat.index(X[1 + kC[d][0]], Y[1 + kC[d][1]], Z[1 + kC[d][2]], d)] =
          q[d];
  }
};

template <Layout L>
class FullAaKernel final : public Kernel {
 public:
  FullAaKernel(KernelDescriptor d, const FlagField& ff, WorkerPool& pool,
               int row_pad)
      : Kernel(std::move(d)),
        ff_(ff),
        pool_(pool),
        lat_(ff, L, 1, row_pad),
        n_fluid_(static_cast<std::size_t>(fluid_count(ff))) {
    pool_.run([&](int w) {
      if (desc_.blk == 0) {
        auto [first, last] =
            WorkerPool::partition(ff_.volume(), pool_.size(), w);
        lat_.init_range_flat(0, first, last);
      } else {
        auto [x0, x1] = WorkerPool::partition(ff_.nx, pool_.size(), w);
        lat_.init_slab(0, static_cast<int>(x0), static_cast<int>(x1));
      }
    });
  }

  std::size_t n_fluid() const override { return n_fluid_; }

  KernelCaps capabilities() const override {
    return {false, 0, lat_.huge_advised()};
  }

  std::vector<double> snapshot() const override { return lat_.snapshot(); }
  void load_state(std::span<const double> s) override { lat_.load_state(s); }
  double total_mass() const override { return lat_.total_mass(); }

 protected:
  void do_advance(const TrtParams& p, const BodyForce& g,
                  long steps) override {
    const double wp = p.omega_plus;
    const double wm = p.omega_minus();
    double* buf = lat_.src();

    pool_.run([&](int w) {
      const auto [nfirst, nlast] =
          WorkerPool::partition(ff_.volume(), pool_.size(), w);
      const auto [sx0, sx1] = WorkerPool::partition(ff_.nx, pool_.size(), w);
      const int x0 = static_cast<int>(sx0);
      const int x1 = static_cast<int>(sx1);

      AaEvenBody<L> even{ff_, lat_, buf, wp, wm, g.g.data()};
      AaOddBody<L> odd{ff_, lat_, buf, wp, wm, g.g.data()};

      auto sub_step = [&](const auto& body) {
        if (desc_.blk == 0)
          for_flat_nodes(ff_, nfirst, nlast, body);
        else
          for_slab_tiled(ff_, x0, x1, desc_.blk, body);
        pool_.sync();
        lat_.correction(buf, x0, x1);
        pool_.sync();
      };

      for (long s = 0; s < steps; s += 2) {
        sub_step(even);
        sub_step(odd);
      }
    });
  }

 private:
  const FlagField& ff_;
  WorkerPool& pool_;
  FullLattice lat_;
  std::size_t n_fluid_;
};

// aa-vec-soa: same update as aa-soa, but both sub-steps process the z rows
// in fixed-width chunks with straight-line bodies (scalar fallback at row
// edges, wrap positions, and mixed fluid/solid chunks).
class FullAaVecKernel final : public Kernel {
 public:
  FullAaVecKernel(KernelDescriptor d, const FlagField& ff, WorkerPool& pool,
                  int row_pad)
      : Kernel(std::move(d)),
        ff_(ff),
        pool_(pool),
        lat_(ff, Layout::SoA, 1, row_pad),
        n_fluid_(static_cast<std::size_t>(fluid_count(ff))) {
    rows_ = static_cast<std::size_t>(ff.nx) * ff.ny;
    pool_.run([&](int w) {
      if (desc_.blk == 0) {
        auto [r0, r1] = WorkerPool::partition(rows_, pool_.size(), w);
        lat_.init_range_flat(0, r0 * ff_.nz, r1 * ff_.nz);
      } else {
        auto [x0, x1] = WorkerPool::partition(ff_.nx, pool_.size(), w);
        lat_.init_slab(0, static_cast<int>(x0), static_cast<int>(x1));
      }
    });
  }

  std::size_t n_fluid() const override { return n_fluid_; }

  KernelCaps capabilities() const override {
    return {false, 0, lat_.huge_advised()};
  }

  std::vector<double> snapshot() const override { return lat_.snapshot(); }
  void load_state(std::span<const double> s) override { lat_.load_state(s); }
  double total_mass() const override { return lat_.total_mass(); }

 protected:
  void do_advance(const TrtParams& p, const BodyForce& g,
                  long steps) override {
    const double wp = p.omega_plus;
    const double wm = p.omega_minus();
    double* buf = lat_.src();
    const int W = desc_.vector_width;
    const std::size_t plane = lat_.plane();
    const std::size_t zs = lat_.zstride();

    pool_.run([&](int w) {
      const auto [r0, r1] = WorkerPool::partition(rows_, pool_.size(), w);
      const auto [sx0, sx1] = WorkerPool::partition(ff_.nx, pool_.size(), w);
      const int x0 = static_cast<int>(sx0);
      const int x1 = static_cast<int>(sx1);

      AaEvenBody<Layout::SoA> even_scalar{ff_, lat_, buf, wp, wm, g.g.data()};
      AaOddBody<Layout::SoA> odd_scalar{ff_, lat_, buf, wp, wm, g.g.data()};

      auto all_fluid = [&](int x, int y, int z, int n) {
        for (int l = 0; l < n; ++l)
          if (!ff_.fluid(x, y, z + l)) return false;
        return true;
      };

      auto even_chunk = [&](int x, int y, int z, std::size_t row_off) {
        double q[kQ][8];
        for (int d = 0; d < kQ; ++d) {
          const double* b = buf + d * plane + row_off + z;
          for (int l = 0; l < W; ++l) q[d][l] = b[l];
        }
        for (int l = 0; l < W; ++l) {
          double f[kQ];
          for (int d = 0; d < kQ; ++d) f[d] = q[d][l];
          collide_node(f, wp, wm, g.g.data());
          for (int d = 0; d < kQ; ++d) q[d][l] = f[d];
        }
        for (int d = 0; d < kQ; ++d) {
          double* b = buf + kOpp[d] * plane + row_off + z;
          for (int l = 0; l < W; ++l) b[l] = q[d][l];
        }
      };

      auto odd_chunk = [&](int x, int y, int z, std::size_t row_off) {
        const int xp = x + 1 == ff_.nx ? 0 : x + 1;
        const int xm = x == 0 ? ff_.nx - 1 : x - 1;
        const int yp = y + 1 == ff_.ny ? 0 : y + 1;
        const int ym = y == 0 ? ff_.ny - 1 : y - 1;
        const int X[3] = {xm, x, xp};
        const int Y[3] = {ym, y, yp};

        double q[kQ][8];
        {
          const double* b = buf + row_off + z;
          for (int l = 0; l < W; ++l) q[0][l] = b[l];
        }
        for (int d = 1; d < kQ; ++d) {
          const std::size_t src_row =
              (static_cast<std::size_t>(X[1 - kC[d][0]]) * ff_.ny +
               Y[1 - kC[d][1]]) *
              zs;
          const double* b =
              buf + kOpp[d] * plane + src_row + (z - kC[d][2]);
          for (int l = 0; l < W; ++l) q[d][l] = b[l];
        }
        for (int l = 0; l < W; ++l) {
          double f[kQ];
          for (int d = 0; d < kQ; ++d) f[d] = q[d][l];
          collide_node(f, wp, wm, g.g.data());
          for (int d = 0; d < kQ; ++d) q[d][l] = f[d];
        }
        {
          double* b = buf + row_off + z;
          for (int l = 0; l < W; ++l) b[l] = q[0][l];
        }
        for (int d = 1; d < kQ; ++d) {
          const std::size_t dst_row =
              (static_cast<std::size_t>(X[1 + kC[d][0]]) * ff_.ny +
               Y[1 + kC[d][1]]) *
              zs;
          double* b = buf + d * plane + dst_row + (z + kC[d][2]);
          for (int l = 0; l < W; ++l) b[l] = q[d][l];
        }
      };

      // Walks one z segment [zb, ze) of row (x, y) in W chunks. Odd chunks
      // must not touch the z wrap, so they stay within [1, nz-1).
      auto row_segment = [&](bool odd, int x, int y, int zb, int ze) {
        const std::size_t row_off =
            (static_cast<std::size_t>(x) * ff_.ny + y) * zs;
        int z = zb;
        while (z < ze) {
          const bool fits = z + W <= ze && all_fluid(x, y, z, W) &&
                            (!odd || (z >= 1 && z + W <= ff_.nz - 1));
          if (fits) {
            if (odd)
              odd_chunk(x, y, z, row_off);
            else
              even_chunk(x, y, z, row_off);
            z += W;
          } else {
            if (odd)
              odd_scalar(x, y, z);
            else
              even_scalar(x, y, z);
            ++z;
          }
        }
      };

      auto sub_step = [&](bool odd) {
        if (desc_.blk == 0) {
          for (std::size_t r = r0; r < r1; ++r) {
            const int x = static_cast<int>(r / ff_.ny);
            const int y = static_cast<int>(r % ff_.ny);
            row_segment(odd, x, y, 0, ff_.nz);
          }
        } else {
          for (int ty = 0; ty < ff_.ny; ty += desc_.blk)
            for (int tz = 0; tz < ff_.nz; tz += desc_.blk) {
              const int ye = std::min(ty + desc_.blk, ff_.ny);
              const int ze = std::min(tz + desc_.blk, ff_.nz);
              for (int x = x0; x < x1; ++x)
                for (int y = ty; y < ye; ++y) row_segment(odd, x, y, tz, ze);
            }
        }
        pool_.sync();
        lat_.correction(buf, x0, x1);
        pool_.sync();
      };

      for (long s = 0; s < steps; s += 2) {
        sub_step(false);
        sub_step(true);
      }
    });
  }

 private:
  const FlagField& ff_;
  WorkerPool& pool_;
  FullLattice lat_;
  std::size_t n_fluid_;
  std::size_t rows_ = 0;
};

}  // namespace

std::unique_ptr<Kernel> make_full_aa(KernelDescriptor d, const FlagField& ff,
                                     WorkerPool& pool, int row_pad) {
  if (d.vec)
    return std::make_unique<FullAaVecKernel>(std::move(d), ff, pool, row_pad);
  if (d.layout == Layout::AoS)
    return std::make_unique<FullAaKernel<Layout::AoS>>(std::move(d), ff, pool,
                                                       row_pad);
  return std::make_unique<FullAaKernel<Layout::SoA>>(std::move(d), ff, pool,
                                                     row_pad);
}

}  // namespace lbm::detail
