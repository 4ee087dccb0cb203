#include <algorithm>

#include "kernels_impl.hpp"

namespace lbm::detail {
namespace {

// Visits nodes n in [first, last) of the flat (x*ny+y)*nz+z index space.
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

// Per-worker x slab, y-z plane tiled into blk x blk tiles.
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

// One-step update of a single node. PULL gathers from the neighbors and
// writes locally, push reads locally and scatters. COLLIDE=false gives the
// pure streaming pass the pull variant uses to convert conventions at the
// end of a run. Solid nodes always stream without collision.
template <Layout L, bool PULL, bool COLLIDE>
struct OsBody {
  const FlagField& ff;
  const FullLattice& lat;
  const double* src;
  double* dst;
  double wp, wm;
  const double* g;

  void operator()(int x, int y, int z) const {
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
    if constexpr (PULL) {
      q[0] = src[lat.index(x, y, z, 0)];
      for (int d = 1; d < kQ; ++d)
        q[d] = src[lat.index(X[1 - kC[d][0]], Y[1 - kC[d][1]],
                             Z[1 - kC[d][2]], d)];
    } else {
      for (int d = 0; d < kQ; ++d) q[d] = src[lat.index(x, y, z, d)];
    }

    if constexpr (COLLIDE) {
      if (ff.fluid(x, y, z)) collide_node(q, wp, wm, g);
    }

    if constexpr (PULL) {
      for (int d = 0; d < kQ; ++d) dst[lat.index(x, y, z, d)] = q[d];
    } else {
      dst[lat.index(x, y, z, 0)] = q[0];
      for (int d = 1; d < kQ; ++d)
        dst[lat.index(X[1 + kC[d][0]], Y[1 + kC[d][1]], Z[1 + kC[d][2]], d)] =
            q[d];
    }
  }
};

template <Layout L>
class FullOsKernel final : public Kernel {
 public:
  FullOsKernel(KernelDescriptor d, const FlagField& ff, WorkerPool& pool,
               int row_pad)
      : Kernel(std::move(d)),
        ff_(ff),
        pool_(pool),
        lat_(ff, L, 2, row_pad),
        n_fluid_(static_cast<std::size_t>(fluid_count(ff))) {
    pool_.run([&](int w) {
      if (desc_.blk == 0) {
        auto [first, last] =
            WorkerPool::partition(ff_.volume(), pool_.size(), w);
        lat_.init_range_flat(0, first, last);
        lat_.init_range_flat(1, first, last);
      } else {
        auto [x0, x1] = WorkerPool::partition(ff_.nx, pool_.size(), w);
        lat_.init_slab(0, static_cast<int>(x0), static_cast<int>(x1));
        lat_.init_slab(1, static_cast<int>(x0), static_cast<int>(x1));
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
    double* bufs[2] = {lat_.src(), lat_.dst()};
    const bool pull = desc_.prop == Propagation::OsPull;

    pool_.run([&](int w) {
      const auto [nfirst, nlast] =
          WorkerPool::partition(ff_.volume(), pool_.size(), w);
      const auto [sx0, sx1] = WorkerPool::partition(ff_.nx, pool_.size(), w);
      const int x0 = static_cast<int>(sx0);
      const int x1 = static_cast<int>(sx1);

      auto pass = [&]<bool PULL, bool COLLIDE>(const double* src,
                                               double* dst) {
        OsBody<L, PULL, COLLIDE> body{ff_, lat_, src, dst, wp, wm, g.g.data()};
        if (desc_.blk == 0)
          for_flat_nodes(ff_, nfirst, nlast, body);
        else
          for_slab_tiled(ff_, x0, x1, desc_.blk, body);
      };

      auto collide_pass = [&](double* buf) {
        auto body = [&](int x, int y, int z) {
          if (!ff_.fluid(x, y, z)) return;
          double q[kQ];
          for (int d = 0; d < kQ; ++d) q[d] = buf[lat_.index(x, y, z, d)];
          collide_node(q, wp, wm, g.g.data());
          for (int d = 0; d < kQ; ++d) buf[lat_.index(x, y, z, d)] = q[d];
        };
        if (desc_.blk == 0)
          for_flat_nodes(ff_, nfirst, nlast, body);
        else
          for_slab_tiled(ff_, x0, x1, desc_.blk, body);
      };

      int flip = 0;
      if (!pull) {
        for (long s = 0; s < steps; ++s) {
          pass.template operator()<false, true>(bufs[flip], bufs[1 - flip]);
          pool_.sync();
          lat_.correction(bufs[1 - flip], x0, x1);
          pool_.sync();
          flip ^= 1;
        }
      } else {
        // Pull sweeps propagate post-collision states; convert on entry and
        // exit so the run maps standard convention to standard convention,
        // identically to the push variant.
        collide_pass(bufs[0]);
        pool_.sync();
        for (long s = 0; s < steps - 1; ++s) {
          pass.template operator()<true, true>(bufs[flip], bufs[1 - flip]);
          pool_.sync();
          lat_.correction(bufs[1 - flip], x0, x1);
          pool_.sync();
          flip ^= 1;
        }
        pass.template operator()<true, false>(bufs[flip], bufs[1 - flip]);
        pool_.sync();
        lat_.correction(bufs[1 - flip], x0, x1);
        pool_.sync();
      }
    });

    if (steps % 2 != 0) lat_.swap_buffers();
  }

 private:
  const FlagField& ff_;
  WorkerPool& pool_;
  FullLattice lat_;
  std::size_t n_fluid_;
};

}  // namespace

std::unique_ptr<Kernel> make_full_os(KernelDescriptor d, const FlagField& ff,
                                     WorkerPool& pool, int row_pad) {
  if (d.layout == Layout::AoS)
    return std::make_unique<FullOsKernel<Layout::AoS>>(std::move(d), ff, pool,
                                                       row_pad);
  return std::make_unique<FullOsKernel<Layout::SoA>>(std::move(d), ff, pool,
                                                     row_pad);
}

}  // namespace lbm::detail
