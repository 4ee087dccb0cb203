#include <doctest.h>

#include <cmath>
#include <random>

#include "lbm/d3q19.hpp"

using namespace lbm;

namespace {

NodePdfs random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  NodePdfs f;
  for (int i = 0; i < kQ; ++i) f[i] = kW[i] * amp(rng);
  return f;
}

}  // namespace

TEST_CASE("stencil constants: exact integer moment identities") {
  // rest + 6 axis + 12 diagonal directions in that order
  CHECK(kC[0] == std::array<int, 3>{0, 0, 0});
  for (int i = 1; i <= 6; ++i) {
    const int c2 = kC[i][0] * kC[i][0] + kC[i][1] * kC[i][1] +
                   kC[i][2] * kC[i][2];
    CHECK(c2 == 1);
    CHECK(kW[i] == 1.0 / 18.0);
  }
  for (int i = 7; i < kQ; ++i) {
    const int c2 = kC[i][0] * kC[i][0] + kC[i][1] * kC[i][1] +
                   kC[i][2] * kC[i][2];
    CHECK(c2 == 2);
    CHECK(kW[i] == 1.0 / 36.0);
  }
  CHECK(kW[0] == 1.0 / 3.0);

  // exact in 36ths: sum w = 1, sum w c = 0, sum w c_a c_b = delta/3
  int sum_w = 0;
  int sum_wc[3] = {0, 0, 0};
  int sum_wcc[3][3] = {};
  for (int i = 0; i < kQ; ++i) {
    sum_w += kW36[i];
    for (int a = 0; a < 3; ++a) {
      sum_wc[a] += kW36[i] * kC[i][a];
      for (int b = 0; b < 3; ++b) sum_wcc[a][b] += kW36[i] * kC[i][a] * kC[i][b];
    }
    CHECK(kW36[i] == doctest::Approx(kW[i] * 36).epsilon(1e-15));
  }
  CHECK(sum_w == 36);
  for (int a = 0; a < 3; ++a) {
    CHECK(sum_wc[a] == 0);
    for (int b = 0; b < 3; ++b) CHECK(sum_wcc[a][b] == (a == b ? 12 : 0));
  }
}

TEST_CASE("opp is an involution with c[opp] = -c") {
  for (int i = 0; i < kQ; ++i) {
    CHECK(kOpp[kOpp[i]] == i);
    for (int a = 0; a < 3; ++a) CHECK(kC[kOpp[i]][a] == -kC[i][a]);
    CHECK(kW[kOpp[i]] == kW[i]);
  }
}

TEST_CASE("TrtParams relations") {
  TrtParams p = TrtParams::from_tau(0.9);
  CHECK(p.viscosity() == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  const double lhs = (1.0 / p.omega_plus - 0.5) * (1.0 / p.omega_minus() - 0.5);
  CHECK(lhs == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
  CHECK_THROWS_AS(TrtParams{0.0}.validate(), ConfigError);
  CHECK_THROWS_AS(TrtParams{2.0}.validate(), ConfigError);
}

TEST_CASE("equilibrium at rest equals the weights") {
  const NodePdfs f = equilibrium(1.0, {0, 0, 0});
  for (int i = 0; i < kQ; ++i) CHECK(f[i] == kW[i]);
}

TEST_CASE("equilibrium moment identities") {
  const std::array<double, 3> u = {0.02, -0.01, 0.03};
  const NodePdfs f = equilibrium(1.0, u);
  double rho = 0.0, m[3] = {0, 0, 0};
  for (int i = 0; i < kQ; ++i) {
    rho += f[i];
    for (int a = 0; a < 3; ++a) m[a] += kC[i][a] * f[i];
  }
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-14));
  for (int a = 0; a < 3; ++a) CHECK(m[a] == doctest::Approx(u[a]).epsilon(1e-14));
}

TEST_CASE("equilibrium east-west asymmetry at u=(0.1,0,0)") {
  const NodePdfs f = equilibrium(1.0, {0.1, 0, 0});
  // 2 * (1/18) * 3 * 0.1 = 1/30
  CHECK(f[DIR_E] - f[DIR_W] == doctest::Approx(1.0 / 30.0).epsilon(1e-14));
}

TEST_CASE("equilibrium rejects non-positive density") {
  CHECK_THROWS_AS(equilibrium(0.0, {0, 0, 0}), ConfigError);
  CHECK_THROWS_AS(equilibrium(-1.0, {0, 0, 0}), ConfigError);
}

TEST_CASE("macroscopic moments") {
  NodePdfs f;
  for (int i = 0; i < kQ; ++i) f[i] = kW[i];
  double rho;
  std::array<double, 3> u;
  macroscopic(std::span<const double, kQ>(f.data(), kQ), rho, u);
  CHECK(rho == doctest::Approx(1.0).epsilon(1e-15));
  for (int a = 0; a < 3; ++a) CHECK(std::abs(u[a]) < 1e-16);

  f = equilibrium(2.0, {0, 0, 0});
  macroscopic(std::span<const double, kQ>(f.data(), kQ), rho, u);
  CHECK(rho == doctest::Approx(2.0).epsilon(1e-15));
  for (int a = 0; a < 3; ++a) CHECK(std::abs(u[a]) < 1e-16);

  f = equilibrium(1.0, {0.05, 0, 0});
  macroscopic(std::span<const double, kQ>(f.data(), kQ), rho, u);
  CHECK(std::abs(u[0] - 0.05) < 1e-15);
  CHECK(std::abs(u[1]) < 1e-15);
  CHECK(std::abs(u[2]) < 1e-15);

  f[3] = std::numeric_limits<double>::quiet_NaN();
  auto call_on_nan = [&] {
    double r;
    std::array<double, 3> uu;
    macroscopic(std::span<const double, kQ>(f.data(), kQ), r, uu);
  };
  CHECK_THROWS_AS(call_on_nan(), NumericalError);
}

TEST_CASE("trt_collide: equilibrium is a fixed point without forcing") {
  const TrtParams p = TrtParams::from_tau(0.9);
  const NodePdfs f = equilibrium(1.0, {0.01, -0.02, 0.005});
  const NodePdfs out = trt_collide(f, p, BodyForce{});
  for (int i = 0; i < kQ; ++i)
    CHECK(out[i] == doctest::Approx(f[i]).epsilon(1e-14));
}

TEST_CASE("trt_collide conserves mass and momentum over random states") {
  const TrtParams p = TrtParams::from_tau(0.8);
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const NodePdfs f = random_state(rng);
    const NodePdfs out = trt_collide(f, p, BodyForce{});
    double rho = 0, drho = 0, dm[3] = {0, 0, 0};
    for (int i = 0; i < kQ; ++i) {
      rho += f[i];
      drho += out[i] - f[i];
      for (int a = 0; a < 3; ++a) dm[a] += kC[i][a] * (out[i] - f[i]);
    }
    CHECK(std::abs(drho) <= 1e-13 * rho);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(dm[a]) <= 1e-13);
  }
}

TEST_CASE("trt_collide adds rho*g of momentum per collision") {
  const TrtParams p = TrtParams::from_tau(0.9);
  const BodyForce g{{1e-6, 0, 0}};
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const NodePdfs f = random_state(rng);
    const NodePdfs out = trt_collide(f, p, g);
    double rho = 0, dm[3] = {0, 0, 0};
    for (int i = 0; i < kQ; ++i) {
      rho += f[i];
      for (int a = 0; a < 3; ++a) dm[a] += kC[i][a] * (out[i] - f[i]);
    }
    for (int a = 0; a < 3; ++a)
      CHECK(std::abs(dm[a] - rho * g.g[a]) <= 1e-15);
  }
}

// independent transcription of the TRT update, term by term
TEST_CASE("collide_node matches a direct formula evaluation") {
  const TrtParams p = TrtParams::from_tau(1.1);
  const double wp = p.omega_plus, wm = p.omega_minus();
  const BodyForce g{{2e-6, -1e-6, 3e-6}};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const NodePdfs f = random_state(rng);
    double rho;
    std::array<double, 3> u;
    macroscopic(std::span<const double, kQ>(f.data(), kQ), rho, u);
    const NodePdfs feq = equilibrium(rho, u);
    NodePdfs expect;
    for (int i = 0; i < kQ; ++i) {
      const int j = kOpp[i];
      const double fplus = 0.5 * (f[i] + f[j]);
      const double fminus = 0.5 * (f[i] - f[j]);
      const double eplus = 0.5 * (feq[i] + feq[j]);
      const double eminus = 0.5 * (feq[i] - feq[j]);
      const double cg = kC[i][0] * g.g[0] + kC[i][1] * g.g[1] +
                        kC[i][2] * g.g[2];
      expect[i] = f[i] - wp * (fplus - eplus) - wm * (fminus - eminus) +
                  3.0 * kW[i] * rho * cg;
    }
    const NodePdfs out = trt_collide(f, p, g);
    for (int i = 0; i < kQ; ++i)
      CHECK(out[i] == doctest::Approx(expect[i]).epsilon(1e-13));
  }
}
