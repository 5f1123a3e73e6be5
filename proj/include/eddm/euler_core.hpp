#pragma once

#include "eddm/types.hpp"

#include <cmath>

namespace eddm {

struct JacobianPair {
  Mat3 A;
  Mat3 B;
};

struct FluxSplit {
  Mat3 a_plus;
  Mat3 a_minus;
  Mat3 a_abs;
  // spectral projectors onto the outgoing (positive speed) and incoming (negative speed) subspaces
  Mat3 proj_plus;
  Mat3 proj_minus;
  Vec3 speeds;  // (u_n - c, u_n, u_n + c)
  Mat3 right;   // columns: eigenvectors in the order of `speeds`
  Mat3 left;    // rows: dual basis, left * right = I
};

inline JacobianPair jacobians(const LinearizationState& s) {
  require(s.rho_bar > 0 && s.c_bar > 0, "jacobians need rho > 0 and c > 0");
  const double rc2 = s.rho_bar * s.c_bar * s.c_bar;
  const double ir = 1.0 / s.rho_bar;
  JacobianPair j;
  j.A << s.u_bar, rc2, 0.0,
         ir, s.u_bar, 0.0,
         0.0, 0.0, s.u_bar;
  j.B << s.v_bar, 0.0, rc2,
         0.0, s.v_bar, 0.0,
         ir, 0.0, s.v_bar;
  return j;
}

inline void require_unit(const Normal& n) {
  require(std::abs(std::hypot(n.nx, n.ny) - 1.0) <= 1e-12, "normal must be a unit vector");
}

inline NormalFrameState rotate_to_normal(const LinearizationState& s, const Normal& n) {
  require_unit(n);
  return {s.rho_bar, s.u_bar * n.nx + s.v_bar * n.ny, -s.u_bar * n.ny + s.v_bar * n.nx, s.c_bar,
          s.beta};
}

// A_n = nx A + ny B, split with its closed-form eigenbasis:
//   r_-+ = (rho c, -+nx, -+ny) for u_n -+ c,  r_0 = (0, -ny, nx) for u_n.
inline FluxSplit flux_split(const LinearizationState& s, const Normal& n) {
  require_unit(n);
  require(s.subsonic(), "flux_split needs a subsonic state");
  const double un = s.u_bar * n.nx + s.v_bar * n.ny;
  const double rc = s.rho_bar * s.c_bar;
  Mat3 R;
  R << rc, 0.0, rc,
       -n.nx, -n.ny, n.nx,
       -n.ny, n.nx, n.ny;
  Mat3 L;  // inverse of R
  L << 0.5 / rc, -0.5 * n.nx, -0.5 * n.ny,
       0.0, -n.ny, n.nx,
       0.5 / rc, 0.5 * n.nx, 0.5 * n.ny;
  const Vec3 lam(un - s.c_bar, un, un + s.c_bar);
  FluxSplit f;
  f.speeds = lam;
  f.right = R;
  f.left = L;
  Vec3 lp = lam.cwiseMax(0.0), lm = lam.cwiseMin(0.0), pp, pm;
  for (int k = 0; k < 3; ++k) {
    pp(k) = lam(k) > 0 ? 1.0 : 0.0;
    pm(k) = lam(k) < 0 ? 1.0 : 0.0;
  }
  f.a_plus = R * lp.asDiagonal() * L;
  f.a_minus = R * lm.asDiagonal() * L;
  f.a_abs = f.a_plus - f.a_minus;
  f.proj_plus = R * pp.asDiagonal() * L;
  f.proj_minus = R * pm.asDiagonal() * L;
  return f;
}

// Symbol of beta + A dx + B dy with dx -> lambda, dy -> i xi.
inline CMat3 symbol_p_hat(const LinearizationState& s, double xi, cplx lambda) {
  const cplx ixi(0.0, xi);
  const cplx g = s.beta + s.u_bar * lambda + ixi * s.v_bar;
  const double rc2 = s.rho_bar * s.c_bar * s.c_bar;
  CMat3 m;
  m << g, rc2 * lambda, rc2 * ixi,
       lambda / s.rho_bar, g, 0.0,
       ixi / s.rho_bar, 0.0, g;
  return m;
}

inline cplx g_hat(const LinearizationState& s, double xi, cplx lambda) {
  return s.beta + s.u_bar * lambda + cplx(0.0, xi) * s.v_bar;
}

inline cplx l_hat(const LinearizationState& s, double xi, cplx lambda) {
  const cplx i(0.0, 1.0);
  const double b = s.beta, u = s.u_bar, v = s.v_bar, c2 = s.c_bar * s.c_bar;
  return b * b + 2.0 * i * xi * u * v * lambda + 2.0 * b * (u * lambda + i * xi * v) +
         (c2 - v * v) * xi * xi - (c2 - u * u) * lambda * lambda;
}

// Cofactor expansion, no pivoting.
template <class M>
auto det3(const M& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

}  // namespace eddm
