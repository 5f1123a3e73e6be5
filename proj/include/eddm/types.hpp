#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace eddm {

using cplx = std::complex<double>;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using CMat3 = Eigen::Matrix3cd;
using CVec3 = Eigen::Vector3cd;

// Bad input: malformed config, non-subsonic physics, broken preconditions on user data.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular factorization, divergence, non-finite values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

struct Normal {
  double nx = 1.0;
  double ny = 0.0;
};

// Frozen background flow.
struct LinearizationState {
  double rho_bar = 1.0;
  double u_bar = 0.0;
  double v_bar = 0.0;
  double c_bar = 1.0;
  double beta = 1.0;

  [[nodiscard]] double mach_n() const { return u_bar / c_bar; }
  [[nodiscard]] double mach_t() const { return v_bar / c_bar; }
  [[nodiscard]] bool subsonic() const { return u_bar * u_bar + v_bar * v_bar < c_bar * c_bar; }
  [[nodiscard]] bool valid() const { return rho_bar > 0 && c_bar > 0 && beta > 0 && subsonic(); }
  // 0 < u < c, required by the half-plane analysis.
  [[nodiscard]] bool analysis_valid() const { return valid() && u_bar > 0 && u_bar < c_bar; }
};

struct NormalFrameState {
  double rho_bar = 1.0;
  double u_n = 0.0;
  double u_tau = 0.0;
  double c_bar = 1.0;
  double beta = 1.0;
};

}  // namespace eddm
