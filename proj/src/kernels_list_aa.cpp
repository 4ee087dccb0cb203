#include <cstdint>

#include "kernels_impl.hpp"

namespace lbm::detail {
namespace {

// Even step: in-place collide, results land in the opposite slots.
template <class SlotFn>
inline void aa_even_node(double* buf, const SlotFn& slot, std::size_t n,
                         double wp, double wm, const double* g) {
  double q[kQ];
  for (int d = 0; d < kQ; ++d) q[d] = buf[slot(n, d)];
  collide_node(q, wp, wm, g);
  for (int d = 0; d < kQ; ++d) buf[slot(n, kOpp[d])] = q[d];
}

// Odd step through the scatter-oriented adjacency: gather direction d from
// column opp(d) (own slot d if bounced), scatter through column d. One table
// serves both sides, which is what the 340 B/FLUP accounting assumes.
template <class SlotFn>
inline void aa_odd_node(double* buf, const SlotFn& slot,
                        const std::uint32_t* an, std::size_t n, double wp,
                        double wm, const double* g) {
  double q[kQ];
  q[0] = buf[slot(n, 0)];
  for (int d = 1; d < kQ; ++d) q[d] = buf[an[kOpp[d] - 1]];
  collide_node(q, wp, wm, g);
  buf[slot(n, 0)] = q[0];
  for (int d = 1; d < kQ; ++d) buf[an[d - 1]] = q[d];
}

template <Layout L>
class ListAaKernel final : public Kernel {
 public:
  ListAaKernel(KernelDescriptor d, const FlagField& ff,
               const PaddingPolicy& padding, WorkerPool& pool)
      : Kernel(std::move(d)),
        pool_(pool),
        lat_(ff, L, desc_.blk, padding, Orientation::Scatter, 1, &pool) {}

  std::size_t n_fluid() const override { return lat_.n_fluid(); }

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
    const ListStructure& ls = lat_.structure();
    const SlotMap& sm = ls.slots;
    const std::uint32_t* adj = ls.adj.data();
    double* buf = lat_.src();
    auto slot = [&sm](std::size_t n, int d) { return sm.slot(n, d); };

    pool_.run([&](int w) {
      const auto [first, last] =
          WorkerPool::partition(ls.n_fluid, pool_.size(), w);
      for (long s = 0; s < steps; s += 2) {
        for (std::size_t n = first; n < last; ++n)
          aa_even_node(buf, slot, n, wp, wm, g.g.data());
        pool_.sync();
        for (std::size_t n = first; n < last; ++n)
          aa_odd_node(buf, slot, adj + n * 18, n, wp, wm, g.g.data());
        pool_.sync();
      }
    });
  }

 private:
  WorkerPool& pool_;
  ListLattice lat_;
};

// list-aa-ria-soa / list-aa-pv-soa: the odd step iterates runs of nodes
// sharing one relative adjacency pattern, resolving slot bases once per run.
// pv additionally walks runs in vector-width chunks with a scalar remainder,
// and chunks the even step the same way.
class ListAaRiaKernel final : public Kernel {
 public:
  ListAaRiaKernel(KernelDescriptor d, const FlagField& ff,
                  const PaddingPolicy& padding, WorkerPool& pool)
      : Kernel(std::move(d)),
        pool_(pool),
        lat_(ff, Layout::SoA, desc_.blk, padding, Orientation::Scatter, 1,
             &pool, /*defer_pdf_init=*/true),
        ria_(build_ria(lat_.structure())) {
    const std::size_t n = lat_.n_fluid();
    const int workers = pool.size();
    // whole runs per worker, balanced by node count
    run_bounds_.assign(workers + 1, ria_.runs.size());
    run_bounds_[0] = 0;
    std::size_t r = 0;
    for (int w = 1; w < workers; ++w) {
      const std::size_t target = n * w / workers;
      while (r < ria_.runs.size() && ria_.runs[r].start < target) ++r;
      run_bounds_[w] = r;
    }
    pool_.run([&](int w) {
      auto [n0, n1] = node_span(w);
      lat_.init_range(0, n0, n1);
    });
    lat_.release_adjacency();

    std::size_t covered = 0;
    for (const RiaRun& run : ria_.runs)
      covered += static_cast<std::size_t>(run.length) / desc_.vector_width *
                 desc_.vector_width;
    pv_fraction_ = static_cast<double>(covered) / static_cast<double>(n);
  }

  std::size_t n_fluid() const override { return lat_.n_fluid(); }

  KernelCaps capabilities() const override {
    return {false, 0, lat_.huge_advised()};
  }

  std::vector<double> snapshot() const override { return lat_.snapshot(); }
  void load_state(std::span<const double> s) override { lat_.load_state(s); }
  double total_mass() const override { return lat_.total_mass(); }

  std::optional<RiaStats> ria_stats() const override {
    return RiaStats{ria_.total_runs(), ria_.n_fluid};
  }

  std::optional<double> vector_fraction() const override {
    return pv_fraction_;
  }

  std::optional<double> pv_chunk_fraction() const override {
    if (!desc_.pv) return std::nullopt;
    return pv_fraction_;
  }

 protected:
  void do_advance(const TrtParams& p, const BodyForce& g,
                  long steps) override {
    const double wp = p.omega_plus;
    const double wm = p.omega_minus();
    const SlotMap& sm = lat_.slots();
    double* buf = lat_.src();
    const int W = desc_.vector_width;
    const bool pv = desc_.pv;
    auto slot = [&sm](std::size_t n, int d) { return sm.slot(n, d); };

    pool_.run([&](int w) {
      const auto [n0, n1] = node_span(w);
      const std::size_t r0 = run_bounds_[w];
      const std::size_t r1 = run_bounds_[w + 1];

      auto even_step = [&] {
        if (!pv) {
          for (std::size_t n = n0; n < n1; ++n)
            aa_even_node(buf, slot, n, wp, wm, g.g.data());
          return;
        }
        std::size_t n = n0;
        for (; n + W <= n1; n += W) {
          double q[kQ][8];
          for (int d = 0; d < kQ; ++d) {
            const double* b = buf + sm.starts[d] + n;
            for (int l = 0; l < W; ++l) q[d][l] = b[l];
          }
          for (int l = 0; l < W; ++l) {
            double f[kQ];
            for (int d = 0; d < kQ; ++d) f[d] = q[d][l];
            collide_node(f, wp, wm, g.g.data());
            for (int d = 0; d < kQ; ++d) q[d][l] = f[d];
          }
          for (int d = 0; d < kQ; ++d) {
            double* b = buf + sm.starts[kOpp[d]] + n;
            for (int l = 0; l < W; ++l) b[l] = q[d][l];
          }
        }
        for (; n < n1; ++n) aa_even_node(buf, slot, n, wp, wm, g.g.data());
      };

      auto odd_step = [&] {
        for (std::size_t r = r0; r < r1; ++r) {
          const RiaRun& run = ria_.runs[r];
          std::ptrdiff_t gbase[kQ], sbase[kQ];
          gbase[0] = sbase[0] = static_cast<std::ptrdiff_t>(sm.starts[0]);
          for (int d = 1; d < kQ; ++d) {
            gbase[d] = static_cast<std::ptrdiff_t>(sm.starts[kOpp[d]]) +
                       run.pattern[kOpp[d] - 1];
            sbase[d] = static_cast<std::ptrdiff_t>(sm.starts[d]) +
                       run.pattern[d - 1];
          }
          std::size_t n = run.start;
          const std::size_t end = run.start + run.length;
          if (pv) {
            for (; n + W <= end; n += W) {
              double q[kQ][8];
              for (int d = 0; d < kQ; ++d) {
                const double* b = buf + gbase[d] + n;
                for (int l = 0; l < W; ++l) q[d][l] = b[l];
              }
              for (int l = 0; l < W; ++l) {
                double f[kQ];
                for (int d = 0; d < kQ; ++d) f[d] = q[d][l];
                collide_node(f, wp, wm, g.g.data());
                for (int d = 0; d < kQ; ++d) q[d][l] = f[d];
              }
              for (int d = 0; d < kQ; ++d) {
                double* b = buf + sbase[d] + n;
                for (int l = 0; l < W; ++l) b[l] = q[d][l];
              }
            }
          }
          for (; n < end; ++n) {
            double q[kQ];
            for (int d = 0; d < kQ; ++d) q[d] = buf[gbase[d] + n];
            collide_node(q, wp, wm, g.g.data());
            for (int d = 0; d < kQ; ++d) buf[sbase[d] + n] = q[d];
          }
        }
      };

      for (long s = 0; s < steps; s += 2) {
        even_step();
        pool_.sync();
        odd_step();
        pool_.sync();
      }
    });
  }

 private:
  std::pair<std::size_t, std::size_t> node_span(int w) const {
    const std::size_t r0 = run_bounds_[w];
    const std::size_t r1 = run_bounds_[w + 1];
    const std::size_t n0 =
        r0 < ria_.runs.size() ? ria_.runs[r0].start : lat_.n_fluid();
    const std::size_t n1 =
        r1 < ria_.runs.size() ? ria_.runs[r1].start : lat_.n_fluid();
    return {n0, n1};
  }

  WorkerPool& pool_;
  ListLattice lat_;
  RiaCoding ria_;
  std::vector<std::size_t> run_bounds_;
  double pv_fraction_ = 0.0;
};

}  // namespace

std::unique_ptr<Kernel> make_list_aa(KernelDescriptor d, const FlagField& ff,
                                     const PaddingPolicy& padding,
                                     WorkerPool& pool) {
  if (d.ria)
    return std::make_unique<ListAaRiaKernel>(std::move(d), ff, padding, pool);
  if (d.layout == Layout::AoS)
    return std::make_unique<ListAaKernel<Layout::AoS>>(std::move(d), ff,
                                                       padding, pool);
  return std::make_unique<ListAaKernel<Layout::SoA>>(std::move(d), ff,
                                                     padding, pool);
}

}  // namespace lbm::detail
