#pragma once

#include "eddm/euler_core.hpp"

#include <algorithm>
#include <array>

namespace eddm {

struct ContinuousModes {
  cplx lambda1, lambda2, lambda3;
  cplx a_xi;  // beta + i xi v
  cplx r_xi;  // principal root, Re >= 0
};

inline ContinuousModes lambda_roots(const LinearizationState& s, double xi) {
  if (!s.analysis_valid()) throw std::domain_error("lambda_roots needs 0 < u < c");
  const double u = s.u_bar, c = s.c_bar, d = c * c - u * u;
  ContinuousModes m;
  m.a_xi = cplx(s.beta, xi * s.v_bar);
  m.r_xi = std::sqrt(m.a_xi * m.a_xi + xi * xi * d);  // std::sqrt is the principal branch
  m.lambda1 = (u * m.a_xi + c * m.r_xi) / d;
  m.lambda2 = (u * m.a_xi - c * m.r_xi) / d;
  m.lambda3 = -m.a_xi / u;
  return m;
}

// Outcome of one correction + update of the scalar third-order algorithm, starting from the
// first iterate pinned by alpha_gamma (G e^1 = G e^2 on the interface).
struct TwoStepReport {
  std::array<cplx, 3> alpha1;        // first iterate (alpha3 set to zero; it is not seen by the step)
  std::array<cplx, 3> alpha_tilde;   // correction coefficients
  std::array<cplx, 3> alpha2;        // second iterate
  cplx gamma;
  cplx delta;
  double max_alpha2 = 0.0;
  double residual = 0.0;  // max |alpha2| / |alpha_gamma| (0 when alpha_gamma = 0)
};

// Fourier-space rendering of the scalar algorithm on the two half planes split at x = 0:
//   correction  (A grad - a/2) G Q~ . n_i = gamma on both sides, Q~2 = 0;
//   update      G Q^{i,new} = G Q^i + delta, Q^{2,new} = Q^1 + Q~1.
// The local conditions are assembled and solved as dense complex systems.
inline TwoStepReport continuous_two_step_check(const LinearizationState& s, double xi,
                                               cplx alpha_gamma) {
  require(xi != 0.0, "continuous_two_step_check: xi must be nonzero");
  const ContinuousModes m = lambda_roots(s, xi);
  const double u = s.u_bar, v = s.v_bar, c = s.c_bar, d = c * c - u * u;
  const cplx i(0.0, 1.0);
  const std::array<cplx, 3> lam{m.lambda1, m.lambda2, m.lambda3};
  std::array<cplx, 3> g{}, fx{};
  for (int l = 0; l < 3; ++l) {
    g[l] = g_hat(s, xi, lam[l]);
    fx[l] = d * lam[l] - u * v * i * xi;  // (A grad) . (1,0) on e^{lambda x}
  }
  const double half_a = s.beta * u;  // (a/2) . (1,0)

  const cplx k1 = m.a_xi * c + u * m.r_xi;
  const cplx k2 = m.a_xi * c - u * m.r_xi;
  if (std::abs(k1) == 0.0 || std::abs(k2) == 0.0) throw NumericalError("degenerate interface symbol");

  TwoStepReport r;
  r.alpha1 = {alpha_gamma / k1, alpha_gamma / k2, 0.0};
  const auto& a = r.alpha1;

  // gamma = -1/2 [ A grad G Q1 . n1 + A grad G Q2 . n2 ]
  r.gamma = -0.5 * (fx[0] * g[0] * a[0] - (fx[1] * g[1] * a[1] + fx[2] * g[2] * a[2]));

  // correction in Omega1: one bounded mode, one condition
  Eigen::Matrix<cplx, 1, 1> c1;
  c1(0, 0) = (fx[0] - half_a) * g[0];
  r.alpha_tilde[0] = r.gamma / c1(0, 0);
  // correction in Omega2: two bounded modes, flux condition with n2 = -n1 and Dirichlet
  Eigen::Matrix2cd c2;
  c2 << -(fx[1] - half_a) * g[1], -(fx[2] - half_a) * g[2],
        1.0, 1.0;
  const Eigen::Vector2cd t2 = c2.fullPivLu().solve(Eigen::Vector2cd(r.gamma, 0.0));
  r.alpha_tilde[1] = t2(0);
  r.alpha_tilde[2] = t2(1);

  r.delta = 0.5 * (g[0] * r.alpha_tilde[0] + g[1] * r.alpha_tilde[1] + g[2] * r.alpha_tilde[2]);

  // update
  r.alpha2[0] = (g[0] * a[0] + r.delta) / g[0];
  Eigen::Matrix2cd u2;
  u2 << g[1], g[2],
        1.0, 1.0;
  const Eigen::Vector2cd rhs(g[1] * a[1] + g[2] * a[2] + r.delta, a[0] + r.alpha_tilde[0]);
  const Eigen::Vector2cd n2 = u2.fullPivLu().solve(rhs);
  r.alpha2[1] = n2(0);
  r.alpha2[2] = n2(1);

  for (const auto& x : r.alpha2) r.max_alpha2 = std::max(r.max_alpha2, std::abs(x));
  r.residual = std::abs(alpha_gamma) > 0 ? r.max_alpha2 / std::abs(alpha_gamma) : r.max_alpha2;
  return r;
}

}  // namespace eddm
