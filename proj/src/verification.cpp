#include "lbm/verification.hpp"

#include <cmath>

namespace lbm {

void PoiseuilleCase::validate() const {
  params.validate();
  if (nz < 6) throw ConfigError("Poiseuille case: nz must be >= 6");
  if (nx < 1 || ny < 1) throw ConfigError("Poiseuille case: bad dims");
  const double h = fluid_layers();
  const double u_max = std::abs(g) * h * h / (8.0 * params.viscosity());
  if (!(u_max < 0.05))
    throw ConfigError(
        "Poiseuille case: centerline velocity g*h^2/(8 nu) = " +
        std::to_string(u_max) + " is too close to the speed of sound");
}

std::vector<double> analytic_profile(const PoiseuilleCase& c) {
  c.validate();
  const double h = c.fluid_layers();
  const double nu = c.params.viscosity();
  std::vector<double> u(c.fluid_layers());
  for (int k = 0; k < c.fluid_layers(); ++k) {
    const double zeta = k + 0.5;
    u[k] = c.g / (2.0 * nu) * zeta * (h - zeta);
  }
  return u;
}

VerificationReport verify_kernel(const KernelDescriptor& k,
                                 const PoiseuilleCase& c, int workers,
                                 long check_interval, double rel_tol,
                                 long max_steps) {
  c.validate();

  VerificationReport rep;
  rep.kernel = k.name;
  rep.setup = c;
  rep.analytic = analytic_profile(c);
  rep.half_force_shift = c.g / 2.0;

  GeometrySpec spec;
  spec.kind = GeometryKind::Slit;
  spec.nx = c.nx;
  spec.ny = c.ny;
  spec.nz = c.nz;
  const FlagField ff = build_geometry(spec);

  WorkerPool pool(effective_workers(workers));
  auto kernel = make_kernel(k, ff, PaddingPolicy::automatic(), pool);

  // Warm start from the equilibrium of the expected steady profile (bare
  // velocity convention, hence the -g/2). The fixed point is unique, so this
  // only shortens the transient the convergence check has to ride out.
  {
    const std::size_t n_fluid = kernel->n_fluid();
    const int layers = c.fluid_layers();
    std::vector<double> state(n_fluid * kQ);
    for (std::size_t n = 0; n < n_fluid; ++n) {
      const int kz = static_cast<int>(n % layers);
      const NodePdfs f = equilibrium(
          1.0, {rep.analytic[kz] - rep.half_force_shift, 0.0, 0.0});
      for (int d = 0; d < kQ; ++d) state[n * kQ + d] = f[d];
    }
    kernel->load_state(state);
  }

  const BodyForce force{{c.g, 0.0, 0.0}};
  const SteadyStateResult ss = steady_state_run(
      *kernel, c.params, force, check_interval, rel_tol, max_steps);
  rep.steps = ss.steps;
  rep.converged = ss.converged;

  // layer-averaged u_x over fluid layers z = 1 .. nz-2
  const MacroFields mf = macro_fields(kernel->snapshot());
  const std::size_t per_layer = static_cast<std::size_t>(c.nx) * c.ny;
  rep.simulated.assign(c.fluid_layers(), 0.0);
  // snapshot order is x, y, z with z innermost over the nz-2 fluid layers
  std::size_t i = 0;
  for (std::size_t col = 0; col < per_layer; ++col)
    for (int kz = 0; kz < c.fluid_layers(); ++kz, ++i)
      rep.simulated[kz] += mf.u[3 * i];
  for (double& v : rep.simulated)
    v = v / static_cast<double>(per_layer) + rep.half_force_shift;

  double max_ana = 0.0, max_diff = 0.0, sum_ana2 = 0.0, sum_diff2 = 0.0;
  for (int kz = 0; kz < c.fluid_layers(); ++kz) {
    const double d = rep.simulated[kz] - rep.analytic[kz];
    max_ana = std::max(max_ana, std::abs(rep.analytic[kz]));
    max_diff = std::max(max_diff, std::abs(d));
    sum_ana2 += rep.analytic[kz] * rep.analytic[kz];
    sum_diff2 += d * d;
  }
  rep.linf_rel = max_ana > 0.0 ? max_diff / max_ana : max_diff;
  rep.l2_rel =
      sum_ana2 > 0.0 ? std::sqrt(sum_diff2 / sum_ana2) : std::sqrt(sum_diff2);
  rep.passed = rep.converged && rep.linf_rel < kVerifyLinfTolerance;
  return rep;
}

}  // namespace lbm
