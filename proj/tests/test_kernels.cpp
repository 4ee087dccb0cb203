#include <doctest.h>

#include <cmath>

#include "lbm/harness.hpp"
#include "lbm/kernels.hpp"
#include "support/reference.hpp"

using namespace lbm;
using lbmtest::max_rel_diff;

namespace {

const TrtParams kParams = TrtParams::from_tau(0.9);
const BodyForce kForce{{1e-5, 2e-6, -3e-6}};

FlagField bench_blocks() {
  return build_geometry({GeometryKind::Blocks, 12, 10, 10, 4, 4});
}

std::unique_ptr<Kernel> make(const std::string& name, const FlagField& ff,
                             WorkerPool& pool, int blk = 0,
                             PaddingPolicy pad = PaddingPolicy::automatic()) {
  return make_kernel(make_descriptor(name, blk), ff, pad, pool);
}

}  // namespace

TEST_CASE("registry lists exactly the 17 kernel names") {
  CHECK(kernel_names().size() == 17);
  CHECK(is_kernel_name("list-aa-pv-soa"));
  CHECK(!is_kernel_name("list-aa-pv-aos"));
  CHECK_THROWS_AS(make_descriptor("plain-push"), ConfigError);
  try {
    make_descriptor("plain-push");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("blk-push-aos") != std::string::npos);
  }

  const KernelDescriptor nt = make_descriptor("list-pull-split-nt-2s-soa");
  CHECK(nt.prop == Propagation::OsPull);
  CHECK(nt.addr == Addressing::Indirect);
  CHECK(nt.layout == Layout::SoA);
  CHECK(nt.nt_streams == 2);

  const KernelDescriptor pv = make_descriptor("list-aa-pv-soa");
  CHECK(pv.prop == Propagation::Aa);
  CHECK(pv.ria);
  CHECK(pv.pv);

  const KernelDescriptor vec = make_descriptor("aa-vec-soa");
  CHECK(vec.vec);
  CHECK(vec.addr == Addressing::Direct);
}

TEST_CASE("uniform equilibrium is a fixed point of every kernel") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(1);
  for (const std::string& name : kernel_names()) {
    auto k = make(name, ff, pool);
    k->advance(kParams, BodyForce{}, 4);
    const std::vector<double> snap = k->snapshot();
    for (std::size_t n = 0; n < snap.size() / kQ; ++n)
      for (int d = 0; d < kQ; ++d)
        CHECK(std::abs(snap[n * kQ + d] - kW[d]) <= 1e-15);
  }
}

TEST_CASE("every kernel matches its family's reference stepper") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(2);
  const std::size_t n_fluid = static_cast<std::size_t>(fluid_count(ff));
  const std::vector<double> init = perturbed_equilibrium(n_fluid, 1234);
  const long steps = 8;

  lbmtest::RefLattice full_ref(ff), half_ref(ff);
  lbmtest::ref_load(full_ref, init);
  lbmtest::ref_load(half_ref, init);
  lbmtest::ref_advance_fullway(full_ref, kParams, kForce, steps);
  lbmtest::ref_advance_halfway(half_ref, kParams, kForce, steps);
  const std::vector<double> full_expect = lbmtest::ref_snapshot(full_ref);
  const std::vector<double> half_expect = lbmtest::ref_snapshot(half_ref);

  for (const std::string& name : kernel_names()) {
    CAPTURE(name);
    auto k = make(name, ff, pool);
    k->load_state(init);
    k->advance(kParams, kForce, steps);
    const std::vector<double>& expect =
        k->descriptor().addr == Addressing::Indirect ? half_expect
                                                     : full_expect;
    CHECK(max_rel_diff(k->snapshot(), expect) <= 1e-13);
  }
}

TEST_CASE("push and pull realize the identical per-step mapping") {
  const FlagField ff = build_geometry({GeometryKind::Blocks, 12, 12, 12, 4, 4});
  WorkerPool pool(1);
  const std::size_t n_fluid = static_cast<std::size_t>(fluid_count(ff));
  const std::vector<double> init = perturbed_equilibrium(n_fluid, 99);
  for (auto [push_name, pull_name] :
       {std::pair{"blk-push-soa", "blk-pull-soa"},
        std::pair{"list-push-aos", "list-pull-aos"}}) {
    auto push = make(push_name, ff, pool);
    auto pull = make(pull_name, ff, pool);
    push->load_state(init);
    pull->load_state(init);
    push->advance(kParams, kForce, 1);
    pull->advance(kParams, kForce, 1);
    CHECK(max_rel_diff(push->snapshot(), pull->snapshot()) <= 1e-13);
  }
}

TEST_CASE("one AA pair equals two one-step updates") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(1);
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 5);
  auto os = make("blk-push-soa", ff, pool);
  auto aa = make("aa-soa", ff, pool);
  os->load_state(init);
  aa->load_state(init);
  os->advance(kParams, kForce, 2);
  aa->advance(kParams, kForce, 2);
  CHECK(max_rel_diff(os->snapshot(), aa->snapshot()) <= 1e-13);
}

TEST_CASE("ria and pv are bitwise identical to list-aa-soa") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(2);
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 77);
  auto base = make("list-aa-soa", ff, pool);
  base->load_state(init);
  base->advance(kParams, kForce, 8);
  const std::vector<double> expect = base->snapshot();
  for (const char* name : {"list-aa-ria-soa", "list-aa-pv-soa"}) {
    CAPTURE(name);
    auto k = make(name, ff, pool);
    k->load_state(init);
    k->advance(kParams, kForce, 8);
    CHECK(k->snapshot() == expect);
  }
}

TEST_CASE("advance: zero steps is a bitwise no-op, pairs compose") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(1);
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 3);
  for (const char* name : {"blk-pull-aos", "list-aa-soa"}) {
    CAPTURE(name);
    auto a = make(name, ff, pool);
    a->load_state(init);
    a->advance(kParams, kForce, 0);
    CHECK(a->snapshot() == init);

    a->advance(kParams, kForce, 4);
    auto b = make(name, ff, pool);
    b->load_state(init);
    b->advance(kParams, kForce, 2);
    b->advance(kParams, kForce, 2);
    CHECK(a->snapshot() == b->snapshot());
  }
}

TEST_CASE("AA kernels reject odd step counts before touching state") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(1);
  auto k = make("list-aa-soa", ff, pool);
  const std::vector<double> before = k->snapshot();
  CHECK_THROWS_AS(k->advance(kParams, kForce, 3), ConfigError);
  CHECK(k->snapshot() == before);
  CHECK_THROWS_AS(k->advance(kParams, kForce, -2), ConfigError);
}

TEST_CASE("results are bitwise identical across worker counts") {
  const FlagField ff = bench_blocks();
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 4242);
  for (const std::string& name : kernel_names()) {
    CAPTURE(name);
    std::vector<double> base;
    for (int workers : {1, 2, 4}) {
      WorkerPool pool(workers);
      auto k = make(name, ff, pool);
      k->load_state(init);
      k->advance(kParams, kForce, 8);
      if (workers == 1)
        base = k->snapshot();
      else
        CHECK(k->snapshot() == base);
    }
  }
}

TEST_CASE("blocking factor never changes results (spot check)") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(2);
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 8);
  for (const char* name : {"blk-push-aos", "aa-vec-soa", "list-aa-pv-soa"}) {
    CAPTURE(name);
    std::vector<double> base;
    for (int blk : {0, 2, 8, 50}) {
      auto k = make(name, ff, pool, blk);
      k->load_state(init);
      k->advance(kParams, kForce, 8);
      if (blk == 0)
        base = k->snapshot();
      else
        CHECK(k->snapshot() == base);
    }
  }
}

TEST_CASE("padding never changes results (spot check)") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(2);
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 12);
  for (const char* name :
       {"list-pull-soa", "list-aa-soa", "list-aa-pv-soa",
        "list-pull-split-nt-1s-soa"}) {
    CAPTURE(name);
    std::vector<double> base;
    bool first = true;
    for (PaddingPolicy pad : {PaddingPolicy::none(), PaddingPolicy::automatic(),
                              PaddingPolicy::thrash()}) {
      auto k = make(name, ff, pool, 0, pad);
      k->load_state(init);
      k->advance(kParams, kForce, 8);
      if (first) {
        base = k->snapshot();
        first = false;
      } else {
        CHECK(k->snapshot() == base);
      }
    }
  }
}

TEST_CASE("global mass is conserved by every kernel without forcing") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(2);
  const std::vector<double> init =
      perturbed_equilibrium(static_cast<std::size_t>(fluid_count(ff)), 21);
  for (const std::string& name : kernel_names()) {
    CAPTURE(name);
    auto k = make(name, ff, pool);
    k->load_state(init);
    const double mass0 = k->total_mass();
    k->advance(kParams, BodyForce{}, 100);
    CHECK(std::abs(k->total_mass() - mass0) <= 1e-11 * mass0);
  }
}

TEST_CASE("pv chunk accounting equals the vectorizable fraction") {
  const FlagField ff = build_geometry({GeometryKind::Channel, 20, 10, 10});
  WorkerPool pool(1);
  for (int blk : {0, 2}) {
    auto k = make("list-aa-pv-soa", ff, pool, blk);
    const ListStructure ls = build_structure(
        ff, Layout::SoA, blk, PaddingPolicy::none(), Orientation::Scatter);
    const double v = vectorizable_fraction(build_ria(ls), 4);
    REQUIRE(k->pv_chunk_fraction().has_value());
    CHECK(*k->pv_chunk_fraction() == v);
    REQUIRE(k->ria_stats().has_value());
    CHECK(k->ria_stats()->n_fluid == ls.n_fluid);
  }
  // channel z lines of 8: v(W=4) = 4/8
  auto k = make("list-aa-pv-soa", ff, pool, 0);
  CHECK(*k->vector_fraction() == doctest::Approx(0.5));
}

TEST_CASE("nt kernels report their store capability") {
  const FlagField ff = bench_blocks();
  WorkerPool pool(1);
  auto k1 = make("list-pull-split-nt-1s-soa", ff, pool);
  auto k2 = make("list-pull-split-nt-2s-soa", ff, pool);
  const KernelCaps c1 = k1->capabilities();
  const KernelCaps c2 = k2->capabilities();
  if (c1.nt_stores_available) {
    CHECK(c1.nt_streams_effective == 1);
    CHECK(c2.nt_streams_effective == 2);
  } else {
    CHECK(c1.nt_streams_effective == 0);
    CHECK(c2.nt_streams_effective == 0);
  }
  auto plain = make("blk-push-soa", ff, pool);
  CHECK(plain->capabilities().nt_streams_effective == 0);
}
