#pragma once

#include <string>
#include <vector>

#include "lbm/harness.hpp"
#include "lbm/kernels.hpp"

namespace lbm {

inline constexpr double kVerifyLinfTolerance = 1e-4;

// Body-force driven flow between two slabs (periodic x and y, walls at the
// z extremes), compared against the analytical parabola.
struct PoiseuilleCase {
  int nx = 8, ny = 8, nz = 34;
  double g = 1e-6;  // acceleration along x
  TrtParams params = TrtParams::from_tau(0.9);

  int fluid_layers() const { return nz - 2; }
  void validate() const;
};

// u_x per fluid layer k at wall distance zeta = k + 1/2, with the no-slip
// walls half-way outside the first and last fluid layer:
//   u(zeta) = g/(2 nu) * zeta * (h - zeta),  h = number of fluid layers.
std::vector<double> analytic_profile(const PoiseuilleCase& c);

struct VerificationReport {
  std::string kernel;
  PoiseuilleCase setup;
  std::vector<double> simulated;  // layer-averaged u_x, shift applied
  std::vector<double> analytic;
  // The simple forcing scheme makes the bare velocity moment sit half a
  // force increment below the hydrodynamic velocity; the comparison adds
  // g/2 and reports the shift.
  double half_force_shift = 0.0;
  double linf_rel = 0.0;
  double l2_rel = 0.0;
  long steps = 0;
  bool converged = false;
  bool passed = false;
};

VerificationReport verify_kernel(const KernelDescriptor& k,
                                 const PoiseuilleCase& c, int workers = 1,
                                 long check_interval = 200,
                                 double rel_tol = 1e-12,
                                 long max_steps = 200000);

}  // namespace lbm
