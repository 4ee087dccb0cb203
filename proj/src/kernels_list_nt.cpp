#include <cstdint>
#include <cstring>

#include "kernels_impl.hpp"

#if defined(__SSE2__)
#include <immintrin.h>
#define LBM_HAVE_NT_STORES 1
#else
#define LBM_HAVE_NT_STORES 0
#endif

namespace lbm::detail {
namespace {

constexpr std::size_t kStripNodes = 64;

#if LBM_HAVE_NT_STORES

// Cache-bypassing copy of one stream: scalar edges, streamed 16 B pairs.
void nt_copy(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  if (n && (reinterpret_cast<std::uintptr_t>(dst) & 0xF)) {
    dst[0] = src[0];
    i = 1;
  }
  for (; i + 2 <= n; i += 2) _mm_stream_pd(dst + i, _mm_loadu_pd(src + i));
  if (i < n) dst[i] = src[i];
}

// Two interleaved non-temporal store streams.
void nt_copy_2s(double* da, const double* sa, double* db, const double* sb,
                std::size_t n) {
  std::size_t ka = 0, kb = 0;
  if (n && (reinterpret_cast<std::uintptr_t>(da) & 0xF)) {
    da[0] = sa[0];
    ka = 1;
  }
  if (n && (reinterpret_cast<std::uintptr_t>(db) & 0xF)) {
    db[0] = sb[0];
    kb = 1;
  }
  while (ka + 2 <= n && kb + 2 <= n) {
    _mm_stream_pd(da + ka, _mm_loadu_pd(sa + ka));
    _mm_stream_pd(db + kb, _mm_loadu_pd(sb + kb));
    ka += 2;
    kb += 2;
  }
  for (; ka + 2 <= n; ka += 2) _mm_stream_pd(da + ka, _mm_loadu_pd(sa + ka));
  for (; kb + 2 <= n; kb += 2) _mm_stream_pd(db + kb, _mm_loadu_pd(sb + kb));
  if (ka < n) da[ka] = sa[ka];
  if (kb < n) db[kb] = sb[kb];
}

void nt_fence() { _mm_sfence(); }

#else

void nt_copy(double* dst, const double* src, std::size_t n) {
  std::memcpy(dst, src, n * sizeof(double));
}

void nt_copy_2s(double* da, const double* sa, double* db, const double* sb,
                std::size_t n) {
  std::memcpy(da, sa, n * sizeof(double));
  std::memcpy(db, sb, n * sizeof(double));
}

void nt_fence() {}

#endif

// list-pull-split-nt-(1s|2s)-soa: the update is strip mined; each strip is
// gathered and collided into a small staging buffer, then written back per
// direction with one or two concurrent store streams. Stores to consecutive
// list slots are what makes the write-back streamable.
class ListNtKernel final : public Kernel {
 public:
  ListNtKernel(KernelDescriptor d, const FlagField& ff,
               const PaddingPolicy& padding, WorkerPool& pool)
      : Kernel(std::move(d)),
        pool_(pool),
        lat_(ff, Layout::SoA, desc_.blk, padding, Orientation::Gather, 2,
             &pool) {}

  std::size_t n_fluid() const override { return lat_.n_fluid(); }

  KernelCaps capabilities() const override {
    KernelCaps caps;
    caps.nt_stores_available = LBM_HAVE_NT_STORES;
    caps.nt_streams_effective = LBM_HAVE_NT_STORES ? desc_.nt_streams : 0;
    caps.huge_pages_advised = lat_.huge_advised();
    return caps;
  }

  std::vector<double> snapshot() const override { return lat_.snapshot(); }
  void load_state(std::span<const double> s) override { lat_.load_state(s); }
  double total_mass() const override { return lat_.total_mass(); }

 protected:
  void do_advance(const TrtParams& p, const BodyForce& g,
                  long steps) override {
    const double wp = p.omega_plus;
    const double wm = p.omega_minus();
    const ListStructure& ls = lat_.structure();
    const SlotMap& sm = ls.slots;
    const std::uint32_t* adj = ls.adj.data();
    double* bufs[2] = {lat_.src(), lat_.dst()};
    const bool two_streams = desc_.nt_streams == 2;

    pool_.run([&](int w) {
      const auto [first, last] =
          WorkerPool::partition(ls.n_fluid, pool_.size(), w);

      double stage[kQ][kStripNodes];

      auto sweep = [&]<bool COLLIDE>(const double* src, double* dst) {
        for (std::size_t s0 = first; s0 < last; s0 += kStripNodes) {
          const std::size_t m = std::min(kStripNodes, last - s0);
          for (std::size_t n = s0; n < s0 + m; ++n) {
            const std::uint32_t* an = adj + n * 18;
            double q[kQ];
            q[0] = src[sm.slot(n, 0)];
            for (int d = 1; d < kQ; ++d) q[d] = src[an[d - 1]];
            if constexpr (COLLIDE) collide_node(q, wp, wm, g.g.data());
            for (int d = 0; d < kQ; ++d) stage[d][n - s0] = q[d];
          }
          if (two_streams) {
            for (int d = 0; d + 1 < kQ; d += 2)
              nt_copy_2s(dst + sm.starts[d] + s0, stage[d],
                         dst + sm.starts[d + 1] + s0, stage[d + 1], m);
            nt_copy(dst + sm.starts[kQ - 1] + s0, stage[kQ - 1], m);
          } else {
            for (int d = 0; d < kQ; ++d)
              nt_copy(dst + sm.starts[d] + s0, stage[d], m);
          }
        }
        nt_fence();
        pool_.sync();
      };

      auto collide_pass = [&](double* buf) {
        for (std::size_t n = first; n < last; ++n) {
          double q[kQ];
          for (int d = 0; d < kQ; ++d) q[d] = buf[sm.slot(n, d)];
          collide_node(q, wp, wm, g.g.data());
          for (int d = 0; d < kQ; ++d) buf[sm.slot(n, d)] = q[d];
        }
        pool_.sync();
      };

      int flip = 0;
      collide_pass(bufs[0]);
      for (long s = 0; s < steps - 1; ++s) {
        sweep.template operator()<true>(bufs[flip], bufs[1 - flip]);
        flip ^= 1;
      }
      sweep.template operator()<false>(bufs[flip], bufs[1 - flip]);
    });

    if (steps % 2 != 0) lat_.swap_buffers();
  }

 private:
  WorkerPool& pool_;
  ListLattice lat_;
};

}  // namespace

std::unique_ptr<Kernel> make_list_nt(KernelDescriptor d, const FlagField& ff,
                                     const PaddingPolicy& padding,
                                     WorkerPool& pool) {
  return std::make_unique<ListNtKernel>(std::move(d), ff, padding, pool);
}

}  // namespace lbm::detail
