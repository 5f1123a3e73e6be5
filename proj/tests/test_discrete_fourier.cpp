#include "eddm/discrete_fourier.hpp"
#include "eddm/symbol_analysis.hpp"

#include <gtest/gtest.h>

using namespace eddm;

namespace {

LinearizationState rig_state(double mn, double mt = 0.0) {
  LinearizationState s;
  s.u_bar = mn;
  s.v_bar = mt;
  s.beta = (std::hypot(mn, mt) + 1.0) / (100 * 0.05);
  return s;
}

const MeshSpacing kRig{0.05, 0.05};

}  // namespace

TEST(DiscreteModes, RootsAreAccurateAndSplit) {
  for (double mn : {0.001, 0.1, 0.5, 0.8})
    for (double xi : {0.3, 5.0, 40.0}) {
      const auto ms = discrete_modes(rig_state(mn, 0.1), kRig, xi);
      EXPECT_EQ(ms.outside.size(), 1u);
      EXPECT_EQ(ms.inside.size(), 2u);
      for (const auto* set : {&ms.outside, &ms.inside})
        for (const auto& r : *set) EXPECT_LE(r.residual, 1e-10);
    }
}

TEST(DiscreteModes, ApproachContinuousRootsAsMeshRefines) {
  LinearizationState s;
  s.u_bar = 0.4;
  s.beta = 1.0;
  const double xi = 2.0;
  const auto m = lambda_roots(s, xi);
  double prev = 1e300;
  for (double h : {0.02, 0.01, 0.005}) {
    const auto ms = discrete_modes(s, {h, h}, xi);
    double best = 1e300;
    for (const auto& r : ms.outside) best = std::min(best, std::abs(r.lambda - m.lambda1));
    EXPECT_LT(best, prev);
    prev = best;
  }
  EXPECT_LT(prev, 0.05 * std::abs(m.lambda1));
}

TEST(DiscreteRate, FrozenRigValues) {
  // frozen from the Bloch single-mode solver runs (independent of the Fourier code path)
  EXPECT_NEAR(discrete_convergence_rate(rig_state(0.001), kRig, 2.0 / 0.05, RateVariant::Stabilized).rho, 0.9789, 2e-3);
  EXPECT_NEAR(discrete_convergence_rate(rig_state(0.1), kRig, 0.94 / 0.05, RateVariant::Stabilized).rho, 0.1145, 2e-3);
  EXPECT_NEAR(discrete_convergence_rate(rig_state(0.8), kRig, 0.3 / 0.05, RateVariant::Stabilized).rho, 0.0085, 1e-3);
}

TEST(DiscreteRate, StabilizationNeededAtLowMach) {
  for (double mn : {0.001, 0.01, 0.1}) {
    const auto s = rig_state(mn);
    const auto st = rate_curve(s, kRig, RateVariant::Stabilized, 20, XiSpacing::Uniform, 0.0, -1);
    const auto un = rate_curve(s, kRig, RateVariant::Unstabilized, 20, XiSpacing::Uniform, 0.0, -1);
    EXPECT_LT(st.max_rho(), 1.0) << mn;
    EXPECT_GT(un.max_rho(), 1.0) << mn;
  }
}

TEST(DiscreteRate, VariantsAgreeAtSmallWavenumber) {
  const auto s = rig_state(0.3);
  const double a = discrete_convergence_rate(s, kRig, 1e-3, RateVariant::Stabilized).rho;
  const double b = discrete_convergence_rate(s, kRig, 1e-3, RateVariant::Unstabilized).rho;
  EXPECT_NEAR(a, b, 1e-4);
}

TEST(DiscreteRate, NyquistIsFlagged) {
  const auto r = discrete_convergence_rate(rig_state(0.3), kRig, M_PI / 0.05, RateVariant::Stabilized);
  EXPECT_TRUE(r.nyquist_limit);
  EXPECT_TRUE(std::isfinite(r.rho));
}

TEST(DiscreteRate, CurveIsDeterministic) {
  const auto s = rig_state(0.2);
  const auto a = rate_curve(s, kRig, RateVariant::Classical, 15, XiSpacing::Log, 0.1, -1);
  const auto b = rate_curve(s, kRig, RateVariant::Classical, 15, XiSpacing::Log, 0.1, -1);
  ASSERT_EQ(a.points.size(), 15u);
  for (std::size_t k = 0; k < a.points.size(); ++k) EXPECT_EQ(a.points[k].rho, b.points[k].rho);
}
