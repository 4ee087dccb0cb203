#pragma once

#include <array>
#include <cmath>
#include <span>

#include "lbm/errors.hpp"

namespace lbm {

inline constexpr int kQ = 19;

// Direction ordering: rest first, then the 6 axis directions, then the 12
// diagonals. Opposite directions are adjacent (opp(2k-1) = 2k), which the TRT
// split and the solid swap rely on. All layouts and adjacency lists reference
// this ordering.
enum Dir : int {
  DIR_C = 0,
  DIR_E, DIR_W,    // +x, -x
  DIR_N, DIR_S,    // +y, -y
  DIR_T, DIR_B,    // +z, -z
  DIR_NE, DIR_SW,
  DIR_SE, DIR_NW,
  DIR_TE, DIR_BW,
  DIR_BE, DIR_TW,
  DIR_TN, DIR_BS,
  DIR_BN, DIR_TS,
};

inline constexpr std::array<std::array<int, 3>, kQ> kC = {{
    {0, 0, 0},
    {1, 0, 0}, {-1, 0, 0},
    {0, 1, 0}, {0, -1, 0},
    {0, 0, 1}, {0, 0, -1},
    {1, 1, 0}, {-1, -1, 0},
    {1, -1, 0}, {-1, 1, 0},
    {1, 0, 1}, {-1, 0, -1},
    {1, 0, -1}, {-1, 0, 1},
    {0, 1, 1}, {0, -1, -1},
    {0, 1, -1}, {0, -1, 1},
}};

inline constexpr std::array<int, kQ> kOpp = {
    0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13, 16, 15, 18, 17};

inline constexpr double kWRest = 1.0 / 3.0;
inline constexpr double kWAxis = 1.0 / 18.0;
inline constexpr double kWDiag = 1.0 / 36.0;

inline constexpr std::array<double, kQ> kW = {
    kWRest,
    kWAxis, kWAxis, kWAxis, kWAxis, kWAxis, kWAxis,
    kWDiag, kWDiag, kWDiag, kWDiag, kWDiag, kWDiag,
    kWDiag, kWDiag, kWDiag, kWDiag, kWDiag, kWDiag};

// Weights scaled by 36 for exact integer moment checks.
inline constexpr std::array<int, kQ> kW36 = {
    12, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

using NodePdfs = std::array<double, kQ>;

// TRT relaxation parameters. omega_minus is derived from the magic parameter
// so that (1/w+ - 1/2)(1/w- - 1/2) = lambda.
struct TrtParams {
  double omega_plus = 1.0;
  double magic_lambda = 3.0 / 16.0;

  double viscosity() const { return (1.0 / omega_plus - 0.5) / 3.0; }

  double omega_minus() const {
    const double kappa = 1.0 / omega_plus - 0.5;
    return 1.0 / (0.5 + magic_lambda / kappa);
  }

  void validate() const {
    if (!(omega_plus > 0.0) || !(omega_plus < 2.0))
      throw ConfigError("TrtParams: omega_plus must be in (0, 2), got " +
                        std::to_string(omega_plus));
    if (!(magic_lambda > 0.0))
      throw ConfigError("TrtParams: magic_lambda must be positive");
  }

  static TrtParams from_tau(double tau_plus, double lambda = 3.0 / 16.0) {
    return TrtParams{1.0 / tau_plus, lambda};
  }
};

struct BodyForce {
  std::array<double, 3> g = {0.0, 0.0, 0.0};

  bool zero() const { return g[0] == 0.0 && g[1] == 0.0 && g[2] == 0.0; }
};

NodePdfs equilibrium(double rho, const std::array<double, 3>& u);

// rho = sum f, u = sum c f / rho. No force correction term is applied; the
// bare moment is what all kernels and the harness report.
void macroscopic(std::span<const double, kQ> f, double& rho,
                 std::array<double, 3>& u);

NodePdfs trt_collide(const NodePdfs& f, const TrtParams& p,
                     const BodyForce& force);

// In-place TRT collision with constant body force on one node's populations.
// This is the single arithmetic kernel shared by all sweep variants; keeping
// one instantiation is what makes cross-kernel comparisons bitwise-stable.
inline void collide_node(double* f, double omega_plus, double omega_minus,
                         const double* g) {
  double rho = f[0];
  for (int i = 1; i < kQ; ++i) rho += f[i];

  double mx = f[1] - f[2] + f[7] - f[8] + f[9] - f[10] + f[11] - f[12] +
              f[13] - f[14];
  double my = f[3] - f[4] + f[7] - f[8] - f[9] + f[10] + f[15] - f[16] +
              f[17] - f[18];
  double mz = f[5] - f[6] + f[11] - f[12] - f[13] + f[14] + f[15] - f[16] -
              f[17] + f[18];

  const double inv_rho = 1.0 / rho;
  const double ux = mx * inv_rho;
  const double uy = my * inv_rho;
  const double uz = mz * inv_rho;
  const double usq = ux * ux + uy * uy + uz * uz;
  const double one_m = 1.0 - 1.5 * usq;

  // rest population: pure even relaxation
  f[0] -= omega_plus * (f[0] - kWRest * rho * one_m);

  for (int i = 1; i < kQ; i += 2) {
    const int j = i + 1;  // opposite direction
    const double cu = kC[i][0] * ux + kC[i][1] * uy + kC[i][2] * uz;
    const double cg = kC[i][0] * g[0] + kC[i][1] * g[1] + kC[i][2] * g[2];
    const double wr = kW[i] * rho;
    const double e_even = wr * (one_m + 4.5 * cu * cu);
    const double e_odd = wr * 3.0 * cu;
    const double f_even = 0.5 * (f[i] + f[j]);
    const double f_odd = 0.5 * (f[i] - f[j]);
    const double d_even = omega_plus * (f_even - e_even);
    const double d_odd = omega_minus * (f_odd - e_odd);
    const double forcing = wr * 3.0 * cg;
    f[i] = f[i] - d_even - d_odd + forcing;
    f[j] = f[j] - d_even + d_odd - forcing;
  }
}

}  // namespace lbm
