#include "lbm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace lbm {
namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t state_fingerprint(const std::vector<double>& snapshot) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : snapshot) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

int effective_workers(int requested) {
  if (requested < 1) throw ConfigError("workers must be >= 1");
  if (const char* cap = std::getenv("LBMBENCH_MAX_WORKERS")) {
    const int c = std::atoi(cap);
    if (c >= 1) return std::min(requested, c);
  }
  return requested;
}

std::vector<double> perturbed_equilibrium(std::size_t n_fluid,
                                          std::uint64_t seed,
                                          double amplitude) {
  std::vector<double> state(n_fluid * kQ);
  for (std::size_t n = 0; n < n_fluid; ++n)
    for (int d = 0; d < kQ; ++d) {
      const std::uint64_t h = splitmix64(seed ^ (n * kQ + d));
      const double u01 =
          static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
      state[n * kQ + d] = kW[d] * (1.0 + amplitude * (u01 - 0.5));
    }
  return state;
}

MacroFields macro_fields(const std::vector<double>& snapshot) {
  const std::size_t n = snapshot.size() / kQ;
  MacroFields mf;
  mf.rho.resize(n);
  mf.u.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    double rho;
    std::array<double, 3> u;
    macroscopic(std::span<const double, kQ>(snapshot.data() + i * kQ, kQ),
                rho, u);
    mf.rho[i] = rho;
    mf.u[3 * i] = u[0];
    mf.u[3 * i + 1] = u[1];
    mf.u[3 * i + 2] = u[2];
  }
  return mf;
}

BenchResult run_benchmark(const BenchConfig& cfg,
                          const BandwidthSet* bandwidths) {
  // validate before any allocation
  cfg.params.validate();
  if (cfg.iterations < 1)
    throw ConfigError("--iterations must be >= 1, e.g. --iterations 100");
  if (cfg.warmup < 0) throw ConfigError("--warmup must be >= 0, e.g. --warmup 10");
  const bool aa = cfg.kernel.prop == Propagation::Aa;
  if (aa && cfg.iterations % 2 != 0)
    throw ConfigError("kernel '" + cfg.kernel.name +
                      "' uses the AA pattern; --iterations must be even");
  const int workers = effective_workers(cfg.workers);

  WorkerPool pool(workers, cfg.pin);
  const FlagField ff = build_geometry(cfg.geometry);
  auto kernel = make_kernel(cfg.kernel, ff, cfg.padding, pool, cfg.row_pad);

  if (cfg.seed)
    kernel->load_state(perturbed_equilibrium(kernel->n_fluid(), *cfg.seed));

  long warmup = cfg.warmup;
  if (aa && warmup % 2 != 0) ++warmup;
  kernel->advance(cfg.params, cfg.force, warmup);

  const double t0 = now_seconds();
  kernel->advance(cfg.params, cfg.force, cfg.iterations);
  const double seconds = now_seconds() - t0;

  BenchResult res;
  res.config = cfg;
  res.config.workers = workers;
  res.n_fluid = kernel->n_fluid();
  res.seconds = seconds;
  res.mflups = static_cast<double>(res.n_fluid) * cfg.iterations / seconds /
               1e6;

  const LoopBalance bl = loop_balance(cfg.kernel, kernel->ria_stats());
  res.bl_min = bl.min_bflup;
  res.bl_max = bl.max_bflup;
  if (bandwidths) {
    if (auto b = bandwidths->get(micro_for(cfg.kernel))) {
      const RooflinePrediction pred = roofline(*b, bl);
      res.pmax_min_mflups = pred.pmax_min_mflups;
      res.pmax_max_mflups = pred.pmax_max_mflups;
    }
  }
  res.v_fraction = kernel->vector_fraction();
  res.caps = kernel->capabilities();

  res.state_hash = state_fingerprint(kernel->snapshot());

  res.affinity = pool.affinity();
  res.affinity_applied = !cfg.pin.empty();
  for (std::size_t i = 0; i < cfg.pin.size() && i < res.affinity.size(); ++i)
    if (!res.affinity[i].applied) res.affinity_applied = false;

  return res;
}

SteadyStateResult steady_state_run(Kernel& kernel, const TrtParams& p,
                                   const BodyForce& g, long check_interval,
                                   double rel_tol, long max_steps) {
  if (!(rel_tol > 0.0)) throw ConfigError("steady_state_run: rel_tol > 0");
  if (check_interval < 1)
    throw ConfigError("steady_state_run: check_interval >= 1");
  if (kernel.descriptor().prop == Propagation::Aa && check_interval % 2 != 0)
    ++check_interval;

  MacroFields prev = macro_fields(kernel.snapshot());
  SteadyStateResult res;
  while (res.steps < max_steps) {
    const long chunk = std::min(check_interval, max_steps - res.steps);
    kernel.advance(p, g, chunk);
    res.steps += chunk;
    MacroFields cur = macro_fields(kernel.snapshot());

    double max_du = 0.0, max_u = 0.0;
    for (std::size_t i = 0; i < cur.u.size(); ++i) {
      if (!std::isfinite(cur.u[i]))
        throw NumericalError("steady_state_run: non-finite velocity at step " +
                             std::to_string(res.steps));
      max_du = std::max(max_du, std::abs(cur.u[i] - prev.u[i]));
      max_u = std::max(max_u, std::abs(cur.u[i]));
    }
    res.final_delta = max_u > 0.0 ? max_du / max_u : max_du;
    prev = std::move(cur);
    if (res.final_delta < rel_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace lbm
