#include "eddm/ddm.hpp"
#include "eddm/harness/verify.hpp"

#include <gtest/gtest.h>

using namespace eddm;
using namespace eddm::harness;

class Seeded : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(Seeded, SmithIdentity) {
  const auto r = check_smith_identity(200, GetParam());
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST_P(Seeded, TwoStepConvergence) {
  const auto r = check_two_step(50, GetParam());
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST_P(Seeded, ContinuousModeSplit) {
  const auto r = check_continuous_mode_count(50, GetParam());
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST_P(Seeded, FluxSplitConsistency) {
  const auto r = check_flux_split(100, GetParam());
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST_P(Seeded, DiscreteModesSplitOneAndTwo) {
  std::mt19937_64 g(GetParam());
  std::uniform_real_distribution<double> xi(0.05, 60.0), h(0.01, 0.2);
  for (int k = 0; k < 20; ++k) {
    const auto s = random_state(g);
    const auto ms = discrete_modes(s, {h(g), h(g)}, xi(g));
    EXPECT_EQ(ms.outside.size(), 1u);
    EXPECT_EQ(ms.inside.size(), 2u);
  }
}

TEST_P(Seeded, NewSweepKeepsSharedInterfacePressure) {
  std::mt19937_64 g(GetParam());
  std::uniform_real_distribution<double> mn(0.01, 0.8), th(0.2, 2.9);
  const auto rig = make_bloch_rig(mn(g), 0.0, th(g), 12);
  NewDdm<cplx> ddm(rig.disc, rig.dec, Stabilization::Laplacian);
  PrimitiveField<cplx> w = random_field<cplx>(rig.disc.nx(), rig.disc.ny(), GetParam());
  const PrimitiveField<cplx> f(rig.disc.nx(), rig.disc.ny());
  auto id = ddm.initial_traces(w);
  for (int k = 0; k < 3; ++k) {
    id = ddm.iterate(id, f, w);
    EXPECT_NO_THROW(ddm.check_compatible(id));
  }
}

TEST_P(Seeded, MonolithicSolveIsLinear) {
  const auto d = make_rig(12, 6, 0.6, 0.3, 100, Profile::MtCos, 0.2, 0.0);
  const auto a = random_field<double>(12, 6, GetParam()), b = random_field<double>(12, 6, GetParam() + 100);
  PrimitiveField<double> s(12, 6);
  s.data = 2.0 * a.data - 3.0 * b.data;
  const auto ws = monolithic_solve(d, s), wa = monolithic_solve(d, a), wb = monolithic_solve(d, b);
  EXPECT_LT((ws.data - (2.0 * wa.data - 3.0 * wb.data)).cwiseAbs().maxCoeff(), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, Seeded, ::testing::Values(1u, 17u, 123u, 4242u, 99991u));
