#include "eddm/euler_core.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

using namespace eddm;

namespace {

LinearizationState state(double rho, double u, double v, double c, double beta) {
  LinearizationState s;
  s.rho_bar = rho;
  s.u_bar = u;
  s.v_bar = v;
  s.c_bar = c;
  s.beta = beta;
  return s;
}

}  // namespace

TEST(Jacobians, MatchClosedForm) {
  const auto s = state(2.0, 0.3, -0.1, 1.5, 1.0);
  const auto j = jacobians(s);
  Mat3 a, b;
  a << 0.3, 2.0 * 2.25, 0, 1.0 / 2.0, 0.3, 0, 0, 0, 0.3;
  b << -0.1, 0, 2.0 * 2.25, 0, -0.1, 0, 1.0 / 2.0, 0, -0.1;
  EXPECT_LT((j.A - a).norm(), 1e-15);
  EXPECT_LT((j.B - b).norm(), 1e-15);
}

TEST(Jacobians, RejectsNonPositiveDensity) {
  auto s = state(0.0, 0.1, 0, 1, 1);
  EXPECT_THROW(jacobians(s), std::invalid_argument);
}

TEST(Rotate, NormalFrameComponents) {
  const auto s = state(1.0, 0.3, 0.4, 1.0, 2.0);
  const double r = 1.0 / std::sqrt(2.0);
  const auto f = rotate_to_normal(s, {r, r});
  EXPECT_NEAR(f.u_n, 0.7 * r, 1e-15);
  EXPECT_NEAR(f.u_tau, 0.1 * r, 1e-15);
  EXPECT_THROW(rotate_to_normal(s, {1.0, 1.0}), std::invalid_argument);
}

TEST(FluxSplit, AxisAlignedSpeedsAndSum) {
  const auto s = state(1.0, 0.2, 0.0, 1.0, 1.0);
  const auto fs = flux_split(s, {1.0, 0.0});
  EXPECT_NEAR(fs.speeds(0), -0.8, 1e-15);
  EXPECT_NEAR(fs.speeds(1), 0.2, 1e-15);
  EXPECT_NEAR(fs.speeds(2), 1.2, 1e-15);
  EXPECT_LT((fs.a_plus + fs.a_minus - jacobians(s).A).norm(), 1e-14);
  EXPECT_LT((fs.a_plus - fs.a_minus - fs.a_abs).norm(), 1e-14);
  EXPECT_LT((fs.proj_plus + fs.proj_minus - Mat3::Identity()).norm(), 1e-14);
  EXPECT_LT((fs.left * fs.right - Mat3::Identity()).norm(), 1e-14);
}

TEST(FluxSplit, SubsonicInflowHasTwoPositiveSpeeds) {
  const auto fs = flux_split(state(1.3, 0.5, 0.1, 1.0, 1.0), {1.0, 0.0});
  int pos = 0;
  for (int k = 0; k < 3; ++k) pos += fs.speeds(k) > 0;
  EXPECT_EQ(pos, 2);
  EXPECT_NEAR(fs.proj_plus.trace(), 2.0, 1e-13);
}

TEST(FluxSplit, AgreesWithNumericalEigendecomposition) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    const auto s = state(1.0 + 0.5 * u(g), 0.3 * u(g), 0.3 * u(g), 1.0 + 0.4 * u(g), 1.0);
    const double t = std::atan2(u(g), u(g));
    const Normal n{std::cos(t), std::sin(t)};
    const auto j = jacobians(s);
    const Mat3 an = n.nx * j.A + n.ny * j.B;
    Eigen::EigenSolver<Mat3> es(an);
    const Eigen::Matrix3cd v = es.eigenvectors();
    Eigen::Vector3cd lam = es.eigenvalues();
    for (int q = 0; q < 3; ++q) lam(q) = std::max(lam(q).real(), 0.0);
    const Mat3 ap = (v * lam.asDiagonal() * v.inverse()).real();
    EXPECT_LT((ap - flux_split(s, n).a_plus).norm(), 1e-12 * an.norm());
  }
}

TEST(Symbols, DeterminantIsTransportTimesWave) {
  const auto s = state(1.2, 0.4, -0.2, 1.1, 0.7);
  for (double xi : {-3.0, 0.5, 7.0}) {
    for (cplx lam : {cplx(0.3, 0.1), cplx(-2.0, 1.5)}) {
      const cplx d = det3(symbol_p_hat(s, xi, lam));
      const cplx gl = g_hat(s, xi, lam) * l_hat(s, xi, lam);
      EXPECT_LT(std::abs(d - gl), 1e-12 * std::max(1.0, std::abs(gl)));
    }
  }
}

TEST(Symbols, TransportSymbolClosedForm) {
  const auto s = state(1.0, 0.4, 0.2, 1.0, 2.0);
  EXPECT_LT(std::abs(g_hat(s, 3.0, cplx(1.0, -1.0)) - (2.0 + 0.4 * cplx(1.0, -1.0) + cplx(0, 0.6))), 1e-15);
}
