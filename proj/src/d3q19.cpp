#include "lbm/d3q19.hpp"

#include <cmath>

namespace lbm {

NodePdfs equilibrium(double rho, const std::array<double, 3>& u) {
  if (!(rho > 0.0))
    throw ConfigError("equilibrium: rho must be positive, got " +
                      std::to_string(rho));
  const double usq = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
  NodePdfs f;
  for (int i = 0; i < kQ; ++i) {
    const double cu = kC[i][0] * u[0] + kC[i][1] * u[1] + kC[i][2] * u[2];
    f[i] = kW[i] * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq);
  }
  return f;
}

void macroscopic(std::span<const double, kQ> f, double& rho,
                 std::array<double, 3>& u) {
  double r = 0.0, mx = 0.0, my = 0.0, mz = 0.0;
  for (int i = 0; i < kQ; ++i) {
    if (!std::isfinite(f[i]))
      throw NumericalError("macroscopic: non-finite population f[" +
                           std::to_string(i) + "]");
    r += f[i];
    mx += kC[i][0] * f[i];
    my += kC[i][1] * f[i];
    mz += kC[i][2] * f[i];
  }
  rho = r;
  u = {mx / r, my / r, mz / r};
}

NodePdfs trt_collide(const NodePdfs& f, const TrtParams& p,
                     const BodyForce& force) {
  p.validate();
  for (int i = 0; i < kQ; ++i)
    if (!std::isfinite(f[i]))
      throw NumericalError("trt_collide: non-finite population f[" +
                           std::to_string(i) + "]");
  NodePdfs out = f;
  collide_node(out.data(), p.omega_plus, p.omega_minus(), force.g.data());
  return out;
}

}  // namespace lbm
