#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lbm/kernels.hpp"
#include "lbm/perfmodel.hpp"

namespace lbm {

struct BenchConfig {
  KernelDescriptor kernel;
  GeometrySpec geometry;
  long iterations = 100;
  long warmup = 10;
  int workers = 1;
  std::vector<int> pin;  // core ids; shorter than workers leaves the rest unbound
  PaddingPolicy padding = PaddingPolicy::automatic();
  int row_pad = 0;
  TrtParams params = TrtParams::from_tau(0.9);
  BodyForce force;
  std::optional<std::uint64_t> seed;  // randomized initial perturbation
};

struct BenchResult {
  BenchConfig config;
  std::size_t n_fluid = 0;
  double seconds = 0.0;
  double mflups = 0.0;  // n_fluid * iterations / seconds / 1e6
  double bl_min = 0.0, bl_max = 0.0;
  std::optional<double> pmax_min_mflups, pmax_max_mflups;
  std::optional<double> v_fraction;  // ria/pv kernels, W = vector_width
  KernelCaps caps;
  bool affinity_applied = false;  // every requested pin succeeded
  std::vector<AffinityRecord> affinity;
  // FNV-1a over the final canonical state; equal configs (same seed) must
  // reproduce it bitwise.
  std::uint64_t state_hash = 0;
};

std::uint64_t state_fingerprint(const std::vector<double>& snapshot);

// Reads the LBMBENCH_MAX_WORKERS cap, if set.
int effective_workers(int requested);

// Builds geometry and lattice with first-touch partitioning identical to the
// compute partitioning, runs the warmup, then times `iterations` steps.
// Configuration errors are raised before any allocation.
BenchResult run_benchmark(const BenchConfig& cfg,
                          const BandwidthSet* bandwidths = nullptr);

struct SteadyStateResult {
  long steps = 0;
  bool converged = false;
  double final_delta = 0.0;
};

// Advances in check_interval chunks until the successive velocity change
// max|u - u_prev| / max|u| drops below rel_tol, or max_steps is reached.
// Throws NumericalError naming the step if the field turns non-finite.
SteadyStateResult steady_state_run(Kernel& kernel, const TrtParams& p,
                                   const BodyForce& g, long check_interval,
                                   double rel_tol, long max_steps);

// rho and u per fluid node from a canonical snapshot.
struct MacroFields {
  std::vector<double> rho;
  std::vector<double> u;  // 3 per node
};
MacroFields macro_fields(const std::vector<double>& snapshot);

// Deterministic, partition-independent initial perturbation: population d of
// fluid node n (x,y,z order) scaled by 1 + amplitude*(h(seed,n,d) - 1/2).
std::vector<double> perturbed_equilibrium(std::size_t n_fluid,
                                          std::uint64_t seed,
                                          double amplitude = 1e-3);

}  // namespace lbm
