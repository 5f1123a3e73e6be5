#include "eddm/euler_core.hpp"
#include "eddm/symbol_analysis.hpp"

#include <gtest/gtest.h>

using namespace eddm;

namespace {

LinearizationState state(double u, double v = 0.0, double beta = 1.0, double c = 1.0, double rho = 1.0) {
  LinearizationState s;
  s.rho_bar = rho;
  s.u_bar = u;
  s.v_bar = v;
  s.c_bar = c;
  s.beta = beta;
  return s;
}

}  // namespace

TEST(LambdaRoots, ZeroWavenumberExample) {
  const auto m = lambda_roots(state(0.5), 0.0);
  EXPECT_NEAR(m.lambda1.real(), 2.0, 1e-14);
  EXPECT_NEAR(m.lambda2.real(), -2.0 / 3.0, 1e-14);
  EXPECT_NEAR(m.lambda3.real(), -2.0, 1e-14);
}

TEST(LambdaRoots, BranchAndRootsOfSymbol) {
  const auto s = state(0.3, 0.2, 1.7, 1.2, 0.9);
  for (double xi : {-5.0, -0.1, 0.2, 4.0}) {
    const auto m = lambda_roots(s, xi);
    EXPECT_GT(m.lambda1.real(), 0.0);
    EXPECT_LT(m.lambda2.real(), 0.0);
    EXPECT_LT(m.lambda3.real(), 0.0);
    EXPECT_GE(m.r_xi.real(), 0.0);
    for (cplx l : {m.lambda1, m.lambda2})
      EXPECT_LT(std::abs(l_hat(s, xi, l)), 1e-10 * (1 + std::norm(l)));
    EXPECT_LT(std::abs(g_hat(s, xi, m.lambda3)), 1e-12);
  }
}

TEST(LambdaRoots, DomainErrors) {
  EXPECT_THROW(lambda_roots(state(0.0), 1.0), std::domain_error);
  EXPECT_THROW(lambda_roots(state(-0.2), 1.0), std::domain_error);
  EXPECT_THROW(lambda_roots(state(1.2), 1.0), std::domain_error);
}

TEST(TwoStep, ZeroForcingGivesZeroIterate) {
  const auto r = continuous_two_step_check(state(0.4, 0.1, 0.8), 2.0, cplx(0.0));
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.max_alpha2, 0.0);
}

TEST(TwoStep, SecondIterateVanishes) {
  for (double u : {0.001, 0.1, 0.5, 0.9})
    for (double xi : {-30.0, -1.0, 0.01, 2.5})
      EXPECT_LE(continuous_two_step_check(state(u, 0.05, 1.3), xi, cplx(0.7, -0.2)).residual, 1e-12);
}

TEST(TwoStep, CorrectionCoefficientsMatchClosedForm) {
  // c = 1: alpha~1 = -aG / (a + u R), alpha~2 = -aG / (a c - u R), alpha~3 = -alpha~2
  const auto s = state(0.3, 0.0, 1.1);
  const double xi = 1.7;
  const cplx ag(0.6, 0.25);
  const auto m = lambda_roots(s, xi);
  const auto r = continuous_two_step_check(s, xi, ag);
  const cplx t1 = -ag / (m.a_xi + s.u_bar * m.r_xi);
  const cplx t2 = -ag / (m.a_xi * s.c_bar - s.u_bar * m.r_xi);
  EXPECT_LT(std::abs(r.alpha_tilde[0] - t1), 1e-12 * std::abs(t1));
  EXPECT_LT(std::abs(r.alpha_tilde[1] - t2), 1e-12 * std::abs(t2));
  EXPECT_LT(std::abs(r.alpha_tilde[2] + t2), 1e-12 * std::abs(t2));
}

TEST(TwoStep, RejectsZeroWavenumber) {
  EXPECT_THROW(continuous_two_step_check(state(0.3), 0.0, cplx(1.0)), std::invalid_argument);
}
