#pragma once

#include "eddm/discrete_fourier.hpp"
#include "eddm/harness/output.hpp"
#include "eddm/symbol_analysis.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace eddm::harness {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Random subsonic state with 0 < u < c.
inline LinearizationState random_state(std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  LinearizationState s;
  s.rho_bar = 0.5 + 1.5 * U(g);
  s.c_bar = 0.5 + 1.5 * U(g);
  const double mn = 0.01 + 0.89 * U(g);
  const double mt_max = std::sqrt(std::max(0.0, 0.95 - mn * mn));
  const double mt = mt_max * (2.0 * U(g) - 1.0);
  s.u_bar = mn * s.c_bar;
  s.v_bar = mt * s.c_bar;
  s.beta = 0.1 + 4.9 * U(g);
  return s;
}

inline CheckResult check_smith_identity(int samples = 200, std::uint64_t seed = 1) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const auto s = random_state(g);
    const double xi = 10.0 * U(g);
    const cplx lam(5.0 * U(g), 5.0 * U(g));
    const cplx gl = g_hat(s, xi, lam) * l_hat(s, xi, lam);
    const cplx det = det3(symbol_p_hat(s, xi, lam));
    worst = std::max(worst, std::abs(det - gl) / std::max(1.0, std::abs(gl)));
  }
  return {"smith determinant identity", worst <= 1e-12,
          std::to_string(samples) + " samples, worst relative mismatch " + fmt(worst, 3)};
}

inline std::vector<double> signed_log_xis(int n_per_side = 10) {
  std::vector<double> xs;
  for (int k = 0; k < n_per_side; ++k) {
    const double x = std::pow(10.0, -2.0 + 4.0 * k / (n_per_side - 1));
    xs.push_back(x);
    xs.push_back(-x);
  }
  return xs;
}

inline CheckResult check_two_step(int states = 100, std::uint64_t seed = 2) {
  std::mt19937_64 g(seed);
  double worst = 0.0;
  const auto xs = signed_log_xis();
  for (int k = 0; k < states; ++k) {
    const auto s = random_state(g);
    for (double xi : xs) worst = std::max(worst, continuous_two_step_check(s, xi, cplx(1.0, 0.5)).residual);
  }
  return {"continuous two-step convergence", worst <= 1e-12,
          std::to_string(states) + " states x " + std::to_string(xs.size()) + " wavenumbers, worst residual " +
              fmt(worst, 3)};
}

inline CheckResult check_continuous_mode_count(int states = 100, std::uint64_t seed = 3) {
  std::mt19937_64 g(seed);
  int bad = 0;
  double worst_branch = 0.0;
  const auto xs = signed_log_xis();
  for (int k = 0; k < states; ++k) {
    const auto s = random_state(g);
    for (double xi : xs) {
      const auto m = lambda_roots(s, xi);
      if (!(m.lambda1.real() > 0 && m.lambda2.real() < 0 && m.lambda3.real() < 0)) ++bad;
      const cplx r2 = m.a_xi * m.a_xi + xi * xi * (s.c_bar * s.c_bar - s.u_bar * s.u_bar);
      worst_branch = std::max(worst_branch, std::abs(m.r_xi * m.r_xi - r2) / std::max(1.0, std::abs(r2)));
      if (m.r_xi.real() < 0) ++bad;
    }
  }
  return {"continuous mode count and branch", bad == 0 && worst_branch <= 1e-12,
          std::to_string(bad) + " misclassified, worst R^2 mismatch " + fmt(worst_branch, 3)};
}

inline CheckResult check_flux_split(int samples = 200, std::uint64_t seed = 4) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> U(0.0, 2.0 * 3.14159265358979323846);
  double worst = 0.0;
  int bad_sign = 0;
  for (int k = 0; k < samples; ++k) {
    const auto s = random_state(g);
    const double a = U(g);
    const Normal n{std::cos(a), std::sin(a)};
    const auto j = jacobians(s);
    const Mat3 an = n.nx * j.A + n.ny * j.B;
    const auto f = flux_split(s, n);
    worst = std::max(worst, (f.a_plus + f.a_minus - an).norm() / an.norm());
    Eigen::EigenSolver<Mat3> ep(f.a_plus), em(f.a_minus);
    for (int q = 0; q < 3; ++q) {
      if (ep.eigenvalues()(q).real() < -1e-12 * an.norm()) ++bad_sign;
      if (em.eigenvalues()(q).real() > 1e-12 * an.norm()) ++bad_sign;
    }
  }
  return {"flux split consistency", worst <= 1e-13 && bad_sign == 0,
          "worst |A+ + A- - A_n|/|A_n| " + fmt(worst, 3) + ", sign violations " + std::to_string(bad_sign)};
}

// Mode count 1 outside / 2 inside over the benchmark Mach sweep on the 80 x 20 mesh.
inline CheckResult check_discrete_mode_count() {
  int bad = 0, total = 0;
  for (double mn : {0.001, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}) {
    LinearizationState s;
    s.u_bar = mn;
    s.beta = (mn + 1.0) / (100.0 * 0.05);
    for (int k = 1; k <= 40; ++k) {
      const double xi = k * 3.14159265358979323846 / (40 * 0.05);
      const auto m = discrete_modes(s, {0.05, 0.05}, xi);
      ++total;
      if (m.outside.size() != 1 || m.inside.size() != 2) ++bad;
    }
  }
  return {"discrete mode count", bad == 0, std::to_string(bad) + " of " + std::to_string(total) + " samples off"};
}

inline std::vector<CheckResult> run_verify_suite() {
  return {check_smith_identity(), check_two_step(), check_continuous_mode_count(), check_flux_split(),
          check_discrete_mode_count()};
}

}  // namespace eddm::harness
