#pragma once

#include "eddm/euler_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace eddm {

// Semi-discrete mode analysis of the two half-plane problem for a constant state.
// Omega1 holds cells i <= 0, Omega2 cells i >= 1, the interface is the edge between them.
// A discrete mode is W_{i,j} = t^i e^{i xi j dy} V with det M(t) = 0.

struct MeshSpacing {
  double dx = 0.05;
  double dy = 0.05;
};

struct DiscreteRoot {
  cplx t;
  cplx lambda;  // log(t)/dx
  CVec3 v;      // unit null vector
  double residual = 0.0;
};

struct DiscreteModeSet {
  double xi = 0.0;
  std::vector<DiscreteRoot> outside;  // |t| > 1, bounded as i -> -inf (Omega1)
  std::vector<DiscreteRoot> inside;   // |t| < 1, bounded as i -> +inf (Omega2), sorted by |t|
  bool marginal = false;              // some |t| within 1e-8 of 1
  int spurious_dropped = 0;
};

namespace detail {

using Poly = std::array<cplx, 7>;  // coefficients of t^0 .. t^6

inline Poly pmul(const Poly& a, const Poly& b) {
  Poly r{};
  for (int i = 0; i < 7; ++i)
    for (int j = 0; i + j < 7; ++j) r[i + j] += a[i] * b[j];
  return r;
}
inline Poly psub(const Poly& a, const Poly& b) {
  Poly r{};
  for (int i = 0; i < 7; ++i) r[i] = a[i] - b[i];
  return r;
}
inline Poly padd(const Poly& a, const Poly& b) {
  Poly r{};
  for (int i = 0; i < 7; ++i) r[i] = a[i] + b[i];
  return r;
}

// Tangential part of the symbol: K = beta + |A1|/dx + (|A2| + A2- e - A2+ / e)/dy, e = e^{i xi dy}.
inline CMat3 k_matrix(const LinearizationState& s, const MeshSpacing& h, double xi) {
  const FluxSplit x = flux_split(s, {1.0, 0.0});
  const FluxSplit y = flux_split(s, {0.0, 1.0});
  const cplx e = std::exp(cplx(0.0, xi * h.dy));
  return (s.beta * Mat3::Identity() + x.a_abs / h.dx + y.a_abs / h.dy).cast<cplx>() +
         (y.a_minus.cast<cplx>() * e - y.a_plus.cast<cplx>() / e) / h.dy;
}

inline CMat3 pencil_at(const LinearizationState& s, const MeshSpacing& h, const CMat3& k, cplx t) {
  const FluxSplit x = flux_split(s, {1.0, 0.0});
  return k + x.a_minus.cast<cplx>() * (t / h.dx) - x.a_plus.cast<cplx>() / (t * h.dx);
}

inline double spectral_radius(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Newton steps on det(t M(t)) evaluated from the matrix entries in extended precision;
// companion eigenvalues lose accuracy when two roots are close.
inline cplx polish_root(const Mat3& ap, const Mat3& am, const CMat3& k, double dx, cplx t0) {
  using lc = std::complex<long double>;
  if (!std::isfinite(std::abs(t0)) || std::abs(t0) == 0.0) return t0;
  auto det_at = [&](lc t) {
    lc m[3][3];
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        m[p][q] = -static_cast<long double>(ap(p, q)) / dx + lc(k(p, q).real(), k(p, q).imag()) * t +
                  static_cast<long double>(am(p, q)) / dx * t * t;
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  lc t(t0.real(), t0.imag());
  for (int it = 0; it < 6; ++it) {
    const long double h = 1e-7L * std::abs(t);
    const lc f = det_at(t);
    const lc df = (det_at(t + h) - det_at(t - h)) / (2.0L * h);
    if (std::abs(df) == 0.0L) break;
    const lc step = f / df;
    t -= step;
    if (std::abs(step) <= 1e-18L * std::abs(t)) break;
  }
  return {static_cast<double>(t.real()), static_cast<double>(t.imag())};
}

}  // namespace detail

// det(t M(t)) expanded exactly as a degree-6 polynomial in t (t^0 first).
inline std::array<cplx, 7> determinant_polynomial(const LinearizationState& s, const MeshSpacing& h,
                                                  double xi) {
  using detail::Poly;
  const FluxSplit x = flux_split(s, {1.0, 0.0});
  const CMat3 k = detail::k_matrix(s, h, xi);
  std::array<std::array<Poly, 3>, 3> e{};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      e[p][q][0] = -x.a_plus(p, q) / h.dx;
      e[p][q][1] = k(p, q);
      e[p][q][2] = x.a_minus(p, q) / h.dx;
    }
  using detail::pmul;
  using detail::psub;
  const Poly c0 = psub(pmul(e[1][1], e[2][2]), pmul(e[1][2], e[2][1]));
  const Poly c1 = psub(pmul(e[1][0], e[2][2]), pmul(e[1][2], e[2][0]));
  const Poly c2 = psub(pmul(e[1][0], e[2][1]), pmul(e[1][1], e[2][0]));
  return detail::padd(psub(pmul(e[0][0], c0), pmul(e[0][1], c1)), pmul(e[0][2], c2));
}

// Roots from the companion matrix of the trimmed determinant polynomial; null vectors by SVD.
inline DiscreteModeSet discrete_modes(const LinearizationState& s, const MeshSpacing& h, double xi) {
  require(s.analysis_valid(), "discrete_modes needs a subsonic state with u > 0");
  const auto poly = determinant_polynomial(s, h, xi);
  double scale = 0.0;
  for (const auto& c : poly) scale = std::max(scale, std::abs(c));
  const double cut = 1e-12 * scale;
  int lo = 0, hi = 6;
  while (lo < 7 && std::abs(poly[lo]) <= cut) ++lo;
  while (hi > lo && std::abs(poly[hi]) <= cut) --hi;
  const int deg = hi - lo;
  DiscreteModeSet out;
  out.xi = xi;
  if (deg < 1) throw NumericalError("degenerate determinant polynomial");
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int r = 1; r < deg; ++r) comp(r, r - 1) = 1.0;
  for (int r = 0; r < deg; ++r) comp(r, deg - 1) = -poly[lo + r] / poly[hi];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);

  const CMat3 k = detail::k_matrix(s, h, xi);
  const FluxSplit xs = flux_split(s, {1.0, 0.0});
  for (int r = 0; r < deg; ++r) {
    const cplx t = detail::polish_root(xs.a_plus, xs.a_minus, k, h.dx, es.eigenvalues()(r));
    if (!std::isfinite(std::abs(t)) || std::abs(t) < 1e-8 || std::abs(t) > 1e8) {
      ++out.spurious_dropped;
      continue;
    }
    const CMat3 m = detail::pencil_at(s, h, k, t);
    Eigen::JacobiSVD<CMat3> svd(m, Eigen::ComputeFullV);
    const CVec3 v = svd.matrixV().col(2);
    const double res = (m * v).norm() / std::max(svd.singularValues()(0), 1e-300);
    if (res > 1e-10) {
      ++out.spurious_dropped;
      continue;
    }
    DiscreteRoot root{t, std::log(t) / h.dx, v, res};
    if (std::abs(std::abs(t) - 1.0) < 1e-8) out.marginal = true;
    (std::abs(t) > 1.0 ? out.outside : out.inside).push_back(root);
  }
  std::sort(out.inside.begin(), out.inside.end(),
            [](const DiscreteRoot& a, const DiscreteRoot& b) { return std::abs(a.t) < std::abs(b.t); });
  return out;
}

enum class RateVariant { Stabilized, Unstabilized, Classical };

inline const char* to_string(RateVariant v) {
  switch (v) {
    case RateVariant::Stabilized: return "stabilized";
    case RateVariant::Unstabilized: return "unstabilized";
    case RateVariant::Classical: return "classical";
  }
  return "?";
}

// Weight of the pressure term dy D+ D- P in the correction condition.
inline double stabilization_kappa(const LinearizationState& s) {
  return s.c_bar / (2.0 * s.rho_bar * s.u_bar);
}

struct RateResult {
  double xi = 0.0;
  double rho = 0.0;
  bool marginal = false;
  bool nyquist_limit = false;  // evaluated as the one-sided limit xi -> pi/dy
  bool mode_count_ok = true;
};

namespace detail {

inline RateResult rate_at(const LinearizationState& s, const MeshSpacing& h, double xi, RateVariant variant,
                          double kappa) {
  RateResult rr;
  rr.xi = xi;
  const DiscreteModeSet ms = discrete_modes(s, h, xi);
  rr.marginal = ms.marginal;
  if (ms.outside.size() != 1 || ms.inside.size() != 2) {
    rr.mode_count_ok = false;
    throw NumericalError("unexpected discrete mode count at xi = " + std::to_string(xi));
  }
  const FluxSplit x = flux_split(s, {1.0, 0.0});
  const CMat3 pp = x.proj_plus.cast<cplx>(), pm = x.proj_minus.cast<cplx>();
  const cplx t1 = ms.outside[0].t;
  const CVec3& v1 = ms.outside[0].v;
  const std::array<cplx, 2> t2{ms.inside[0].t, ms.inside[1].t};
  const std::array<CVec3, 2> v2{ms.inside[0].v, ms.inside[1].v};

  if (variant == RateVariant::Classical) {
    // Omega1 takes the incoming (u - c) characteristic of Omega2's first cell, Omega2 takes the
    // two incoming characteristics of Omega1's last cell.
    const Eigen::RowVector3cd lm = x.left.row(0).cast<cplx>();
    const Eigen::Matrix<cplx, 2, 3> lp = (Eigen::Matrix<double, 2, 3>() << x.left.row(1), x.left.row(2)).finished().cast<cplx>();
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    const cplx d1 = lm * (t1 * v1);
    Eigen::Matrix2cd a2;
    a2.col(0) = lp * (v2[0] / t2[0]);
    a2.col(1) = lp * (v2[1] / t2[1]);
    const auto a2lu = a2.fullPivLu();
    for (int col = 0; col < 3; ++col) {
      CVec3 w1 = col == 0 ? v1 : CVec3::Zero();
      CVec3 w2first = col == 1 ? v2[0] : (col == 2 ? v2[1] : CVec3::Zero());
      m(0, col) = (lm * w2first)(0) / d1;
      const Eigen::Vector2cd n = a2lu.solve(lp * w1);
      m(1, col) = n(0);
      m(2, col) = n(1);
    }
    rr.rho = spectral_radius(m);
    return rr;
  }

  const double u = s.u_bar, v = s.v_bar, c = s.c_bar, rho = s.rho_bar, dy = h.dy;
  const cplx e = std::exp(cplx(0.0, xi * dy));
  const cplx dm = (1.0 - 1.0 / e) / dy, dp = (e - 1.0) / dy;
  const cplx dpy = 0.5 * (c + v) * dm + 0.5 * (c - v) * dp;
  const double kap = variant == RateVariant::Stabilized ? kappa : 0.0;
  auto C = [&](const CVec3& w) { return (s.beta + v * dm) * w(1) - u * dpy * w(2) + kap * dy * dp * dm * w(0); };
  auto Q = [&](const CVec3& w) { return w(0) + rho * u * w(1); };

  // Riemann interface traces
  const CVec3 g1 = (pp + t1 * pm) * v1;
  const std::array<CVec3, 2> g2{(pp / t2[0] + pm) * v2[0], (pp / t2[1] + pm) * v2[1]};

  Eigen::Matrix2cd corr2;
  corr2 << C(g2[0]), C(g2[1]), Q(g2[0]), Q(g2[1]);
  Eigen::Matrix2cd upd2;
  upd2 << g2[0](0), g2[1](0), Q(g2[0]), Q(g2[1]);
  const auto corr2lu = corr2.fullPivLu();
  const auto upd2lu = upd2.fullPivLu();
  const cplx c1 = C(g1);

  auto step = [&](const CVec3& a) {
    const CVec3 w1 = a(0) * g1;
    const CVec3 w2 = a(1) * g2[0] + a(2) * g2[1];
    const cplx gam = -0.5 * (C(w2) - C(w1));
    const cplx at1 = -gam / c1;
    const Eigen::Vector2cd at23 = corr2lu.solve(Eigen::Vector2cd(gam, 0.0));
    const CVec3 wt1 = at1 * g1;
    const CVec3 wt2 = at23(0) * g2[0] + at23(1) * g2[1];
    const cplx delta = 0.5 * (wt1(0) + wt2(0));
    CVec3 n;
    n(0) = (w1(0) + delta) / g1(0);
    const Eigen::Vector2cd n23 = upd2lu.solve(Eigen::Vector2cd(w2(0) + delta, Q(w1) + Q(wt1)));
    n(1) = n23(0);
    n(2) = n23(1);
    return n;
  };
  Eigen::Matrix3cd m;
  for (int col = 0; col < 3; ++col) m.col(col) = step(CVec3::Unit(col));
  // restrict to the invariant subspace P1 = P2 on the interface
  Eigen::Matrix<cplx, 1, 3> comp;
  comp << g1(0), -g2[0](0), -g2[1](0);
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 1, 3>> svd(comp, Eigen::ComputeFullV);
  const Eigen::Matrix<cplx, 3, 2> nb = svd.matrixV().rightCols<2>();
  const Eigen::Matrix2cd mr = nb.adjoint() * m * nb;
  rr.rho = spectral_radius(mr);
  return rr;
}

}  // namespace detail

// At xi = pi/dy the Riemann-trace map is singular; the value reported there is the limit from
// below, flagged.
inline RateResult discrete_convergence_rate(const LinearizationState& s, const MeshSpacing& h, double xi,
                                            RateVariant variant, double kappa = -1.0) {
  if (kappa < 0) kappa = stabilization_kappa(s);
  const double nyq = std::numbers::pi / h.dy;
  if (std::abs(std::abs(xi) - nyq) <= 1e-12 * nyq) {
    RateResult r = detail::rate_at(s, h, std::copysign(nyq * (1.0 - 1e-7), xi), variant, kappa);
    r.xi = xi;
    r.nyquist_limit = true;
    return r;
  }
  return detail::rate_at(s, h, xi, variant, kappa);
}

struct RateCurve {
  RateVariant variant = RateVariant::Stabilized;
  std::vector<RateResult> points;

  [[nodiscard]] double max_rho() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.rho);
    return m;
  }
};

enum class XiSpacing { Uniform, Log };

// n_samples points covering (xi_min, pi/dy]; xi_min = 0 gives the uniform grid k pi/(n dy), k = 1..n.
inline RateCurve rate_curve(const LinearizationState& s, const MeshSpacing& h, RateVariant variant, int n_samples,
                            XiSpacing spacing = XiSpacing::Uniform, double xi_min = 0.0, double kappa = -1.0) {
  require(n_samples >= 2, "rate_curve needs n_samples >= 2");
  const double nyq = std::numbers::pi / h.dy;
  RateCurve c;
  c.variant = variant;
  for (int k = 1; k <= n_samples; ++k) {
    double xi;
    if (spacing == XiSpacing::Uniform) {
      xi = xi_min + (nyq - xi_min) * k / n_samples;
    } else {
      const double lo = xi_min > 0 ? xi_min : nyq * 1e-3;
      xi = lo * std::pow(nyq / lo, static_cast<double>(k - 1) / (n_samples - 1));
    }
    c.points.push_back(discrete_convergence_rate(s, h, xi, variant, kappa));
  }
  return c;
}

}  // namespace eddm
