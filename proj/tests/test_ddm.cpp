#include "eddm/ddm.hpp"

#include <gtest/gtest.h>

using namespace eddm;

namespace {

Discretization small_rig(double mn, int nx = 24, int ny = 8) {
  return make_rig(nx, ny, 4.0 * nx / 80, 1.0 * ny / 20, 100, Profile::Constant, mn, 0.0);
}

}  // namespace

TEST(Strips, CutsByCeiling) {
  const auto d = small_rig(0.1, 80, 4);
  const auto dec = make_strips(d, 3);
  ASSERT_EQ(dec.count(), 3);
  EXPECT_EQ(dec.strips[0].end, 27);
  EXPECT_EQ(dec.strips[1].end, 54);
  EXPECT_EQ(dec.strips[2].end, 80);
  EXPECT_THROW(make_strips(d, 0), ConfigError);
}

TEST(Profiles, Endpoints) {
  EXPECT_NEAR(mt_cos(0.0), 0.2, 1e-15);
  EXPECT_NEAR(mt_cos(1.0), 0.0, 1e-15);
  EXPECT_NEAR(mn_tanh(0.0), 0.1, 1e-15);
  EXPECT_EQ(parse_profile("mt_cos"), Profile::MtCos);
  EXPECT_THROW(parse_profile("spline"), ConfigError);
  const auto d = make_rig(8, 10, 0.4, 1.0, 100, Profile::MtCos, 0.1, 0.0);
  EXPECT_NEAR(d.rows.front().v_bar, mt_cos(0.05), 1e-15);
  EXPECT_GT(d.rows.front().v_bar, d.rows.back().v_bar);
}

TEST(Classical, OneStripConvergesInOneSolve) {
  const auto d = small_rig(0.3);
  const auto dec = make_strips(d, 1);
  RunOptions o;
  o.method = Method::Classical;
  const auto r = run_classical(d, dec, forced_problem<double>(d, 5), o);
  EXPECT_TRUE(r.log.converged);
  EXPECT_EQ(r.log.solves(), 1);
}

TEST(Classical, ForcedRunsMatchMonolithic) {
  for (int n : {2, 3}) {
    const auto d = small_rig(0.2);
    const auto dec = make_strips(d, n);
    const auto pb = forced_problem<double>(d, 9);
    RunOptions o;
    o.method = Method::Classical;
    o.tol = 1e-12;
    const auto r = run_classical(d, dec, pb, o);
    ASSERT_TRUE(r.log.converged) << n;
    EXPECT_LT(detail::error_inf(r.w, pb.exact), 1e-8);
    EXPECT_EQ(r.log.subdomains, n);
    EXPECT_EQ(r.log.total_solves(), n * r.log.iterations);
  }
}

TEST(Classical, GaussSeidelNeedsNoMoreIterations) {
  const auto d = small_rig(0.2);
  const auto dec = make_strips(d, 3);
  const auto pb = homogeneous_problem<double>(d, 1);
  RunOptions o;
  o.method = Method::Classical;
  const int jac = run_classical(d, dec, pb, o).log.iterations;
  o.ordering = Ordering::GaussSeidel;
  EXPECT_LE(run_classical(d, dec, pb, o).log.iterations, jac);
}

TEST(NewMethod, BookkeepingCountsTwoSolvesPerIteration) {
  const auto rig = make_bloch_rig(0.3, 0.0, 0.8, 20);
  const auto pb = homogeneous_problem<cplx>(rig.disc, 3);
  RunOptions o;
  o.max_iter = 4;
  o.tol = 1e-300;
  const auto r = run_new(rig.disc, rig.dec, pb, o);
  EXPECT_EQ(r.log.iterations, 4);
  EXPECT_EQ(r.log.solves(), 8);
  EXPECT_EQ(r.log.entries.back().solves, 8);
  EXPECT_EQ(r.log.entries.size(), 5u);
}

TEST(NewMethod, InitialTracesMustShareP) {
  const auto rig = make_bloch_rig(0.3, 0.0, 0.8, 10);
  NewDdm<cplx> ddm(rig.disc, rig.dec, Stabilization::Laplacian);
  auto id = ddm.initial_traces(random_field<cplx>(rig.disc.nx(), rig.disc.ny(), 2));
  EXPECT_NO_THROW(ddm.check_compatible(id));
  id.left[0](0) += 1.0;
  EXPECT_THROW(ddm.check_compatible(id), std::logic_error);
}

TEST(NewMethod, OneStripIsASingleSolve) {
  const auto d = small_rig(0.3);
  const auto pb = forced_problem<double>(d, 4);
  RunOptions o;
  const auto r = run_new(d, make_strips(d, 1), pb, o);
  EXPECT_TRUE(r.log.converged);
  EXPECT_EQ(r.log.solves(), 1);
  EXPECT_LT(detail::error_inf(r.w, pb.exact), 1e-10);
}

TEST(NewMethod, ConvergedBlochRunMatchesMonolithic) {
  // single-mode rig: interface modes stay away from 0 and the Nyquist angle
  const auto rig = make_bloch_rig(0.3, 0.0, 0.5, 20);
  const auto pb = forced_problem<cplx>(rig.disc, 8);
  RunOptions o;
  o.tol = 1e-12;
  const auto r = run_new(rig.disc, rig.dec, pb, o);
  ASSERT_TRUE(r.log.converged);
  EXPECT_LT(detail::error_inf(r.w, pb.exact), 1e-8 * std::max(1.0, pb.exact.max_norm()));
}

TEST(NewMethod, InterfaceMapRadiusMatchesFourierRate) {
  const double mn = 0.1, theta = 0.94;
  const auto rig = make_bloch_rig(mn, 0.0, theta, 200);
  const double rad = interface_map_radius<cplx>(rig.disc, rig.dec, Stabilization::Laplacian);
  // the three Bloch-compatible angles theta + 2 pi k / 3 all enter the map
  double fr = 0;
  for (int k = 0; k < 3; ++k) {
    double t = std::remainder(theta + 2 * M_PI * k / 3, 2 * M_PI);
    fr = std::max(fr, discrete_convergence_rate(rig.disc.rows[0], {0.05, 0.05}, std::abs(t) / 0.05,
                                                RateVariant::Stabilized)
                          .rho);
  }
  EXPECT_NEAR(rad, fr, 0.1 * fr);
}

TEST(NewMethod, BlochObservedRateMatchesFourier) {
  const auto rig = make_bloch_rig(0.01, 0.0, 1.5, 200);
  const auto m = measure_bloch_rate(rig);
  const double fr =
      discrete_convergence_rate(rig.disc.rows[0], {0.05, 0.05}, 1.5 / 0.05, RateVariant::Stabilized).rho;
  EXPECT_NEAR(m.observed, fr, 0.1 * fr);
}

TEST(NewMethod, ParseEnums) {
  EXPECT_EQ(parse_method("new"), Method::New);
  EXPECT_EQ(parse_stabilization("none"), Stabilization::None);
  EXPECT_EQ(parse_ordering("gauss_seidel"), Ordering::GaussSeidel);
  EXPECT_THROW(parse_method("schwarz"), ConfigError);
}
