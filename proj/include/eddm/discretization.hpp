#pragma once

#include "eddm/euler_core.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

namespace eddm {

struct Grid {
  int nx = 80;
  int ny = 20;
  double dx = 0.05;
  double dy = 0.05;
  double x0 = 0.0;
  double y0 = 0.0;
  double dt = 1.0;
  double c_ref = 1.0;

  [[nodiscard]] double dbar_x() const { return dx / (c_ref * dt); }
  [[nodiscard]] double dbar_y() const { return dy / (c_ref * dt); }
  [[nodiscard]] double xc(int i) const { return x0 + (i + 0.5) * dx; }
  [[nodiscard]] double yc(int j) const { return y0 + (j + 0.5) * dy; }
};

enum class YClosure { Wall, Periodic };

// Grid plus one frozen state per cell row (states vary in y only).
// Periodic closure carries a wrap phase: the north neighbour of the top row is the bottom row
// times `wrap`, which gives Bloch-periodic rigs when |wrap| = 1 and wrap != 1.
struct Discretization {
  Grid grid;
  std::vector<LinearizationState> rows;
  std::vector<FluxSplit> xsplit;  // per row, normal (1,0)
  std::vector<FluxSplit> ysplit;  // per horizontal edge, index j = edge below row j, j = 0..ny
  YClosure yclosure = YClosure::Wall;
  cplx wrap = 1.0;

  [[nodiscard]] int nx() const { return grid.nx; }
  [[nodiscard]] int ny() const { return grid.ny; }
  [[nodiscard]] double beta() const { return rows.front().beta; }
  [[nodiscard]] double rho() const { return rows.front().rho_bar; }
  [[nodiscard]] double c() const { return rows.front().c_bar; }
};

// Delta t = CFL min(dx, dy) / (max |V| + c), beta = 1/dt.
inline double cfl_time_step(double cfl, double dx, double dy, const std::vector<LinearizationState>& rows) {
  double smax = 0.0;
  for (const auto& r : rows) smax = std::max(smax, std::hypot(r.u_bar, r.v_bar) + r.c_bar);
  return cfl * std::min(dx, dy) / smax;
}

// rows: states without beta; beta is filled in from the CFL time step.
inline Discretization make_discretization(double lx, double ly, int nx, int ny, double cfl,
                                          std::vector<LinearizationState> rows,
                                          YClosure yc = YClosure::Wall, cplx wrap = 1.0) {
  if (nx < 1 || ny < 1) throw ConfigError("grid needs nx, ny >= 1");
  if (static_cast<int>(rows.size()) != ny) throw ConfigError("one state per cell row expected");
  if (!(lx > 0 && ly > 0 && cfl > 0)) throw ConfigError("extents and CFL must be positive");
  Discretization d;
  d.grid.nx = nx;
  d.grid.ny = ny;
  d.grid.dx = lx / nx;
  d.grid.dy = ly / ny;
  d.grid.dt = cfl_time_step(cfl, d.grid.dx, d.grid.dy, rows);
  d.grid.c_ref = rows.front().c_bar;
  for (int j = 0; j < ny; ++j) {
    auto& r = rows[j];
    r.beta = 1.0 / d.grid.dt;
    if (!r.valid())
      throw ConfigError("non-subsonic or invalid state in cell row " + std::to_string(j));
    if (r.rho_bar != rows.front().rho_bar || r.c_bar != rows.front().c_bar)
      throw ConfigError("rho and c must be uniform");
  }
  d.rows = std::move(rows);
  d.yclosure = yc;
  d.wrap = wrap;
  for (const auto& r : d.rows) d.xsplit.push_back(flux_split(r, {1.0, 0.0}));
  for (int e = 0; e <= ny; ++e) {
    // mean of the two adjacent rows; walls reuse the single adjacent row
    int ja = e - 1, jb = e;
    if (yc == YClosure::Periodic) {
      ja = (e - 1 + ny) % ny;
      jb = e % ny;
    } else {
      ja = std::max(ja, 0);
      jb = std::min(jb, ny - 1);
    }
    LinearizationState m = d.rows[ja];
    m.u_bar = 0.5 * (d.rows[ja].u_bar + d.rows[jb].u_bar);
    m.v_bar = 0.5 * (d.rows[ja].v_bar + d.rows[jb].v_bar);
    d.ysplit.push_back(flux_split(m, {0.0, 1.0}));
  }
  return d;
}

// Cell-averaged (P, U, V), index 3 (i ny + j) + comp.
template <class T>
struct PrimitiveField {
  int nx = 0;
  int ny = 0;
  Eigen::Matrix<T, Eigen::Dynamic, 1> data;

  PrimitiveField() = default;
  PrimitiveField(int nx_, int ny_) : nx(nx_), ny(ny_), data(Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(3 * nx_ * ny_)) {}

  [[nodiscard]] static int index(int i, int j, int ny, int comp) { return 3 * (i * ny + j) + comp; }
  T& operator()(int i, int j, int comp) { return data(index(i, j, ny, comp)); }
  const T& operator()(int i, int j, int comp) const { return data(index(i, j, ny, comp)); }
  [[nodiscard]] double max_norm() const { return data.size() ? data.cwiseAbs().maxCoeff() : 0.0; }
  [[nodiscard]] bool finite() const { return data.allFinite(); }
};

// Interior stencil of a cell row (constant in x): diagonal plus the four neighbour blocks.
struct RowStencil {
  Mat3 diag, east, west, north, south;
};

inline RowStencil row_stencil(const Discretization& d, int j) {
  const auto& g = d.grid;
  const auto& X = d.xsplit[j];
  const auto& N = d.ysplit[j + 1];
  const auto& S = d.ysplit[j];
  RowStencil s;
  s.diag = d.rows[j].beta * Mat3::Identity() + (X.a_plus - X.a_minus) / g.dx + (N.a_plus - S.a_minus) / g.dy;
  s.east = X.a_minus / g.dx;
  s.west = -X.a_plus / g.dx;
  s.north = N.a_minus / g.dy;
  s.south = -S.a_plus / g.dy;
  return s;
}

template <class T>
using SpMat = Eigen::SparseMatrix<T, Eigen::ColMajor, int>;
template <class T>
using Triplets = std::vector<Eigen::Triplet<T, int>>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
T wrap_factor(const Discretization& d, bool north) {
  if constexpr (std::is_same_v<T, double>) {
    if (d.wrap.imag() != 0.0) throw ConfigError("complex wrap phase needs a complex scalar field");
    return d.wrap.real();
  } else {
    return north ? d.wrap : std::conj(d.wrap);
  }
}

template <class T>
void add_block(Triplets<T>& t, int r, int c, const Mat3& b, T scale = T(1)) {
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      if (b(p, q) != 0.0) t.emplace_back(r + p, c + q, scale * b(p, q));
}

// Cells [i0, i1) with zero ghost states on every side that is not periodic. The diagonal already
// contains the outgoing half of each edge flux, so a zero ghost only drops the neighbour block.
template <class T>
void stencil_triplets(const Discretization& d, int i0, int i1, Triplets<T>& t) {
  const int ny = d.ny();
  const bool per = d.yclosure == YClosure::Periodic;
  for (int j = 0; j < ny; ++j) {
    const RowStencil s = row_stencil(d, j);
    for (int i = i0; i < i1; ++i) {
      const int r = 3 * ((i - i0) * ny + j);
      add_block<T>(t, r, r, s.diag);
      if (i + 1 < i1) add_block<T>(t, r, 3 * ((i + 1 - i0) * ny + j), s.east);
      if (i - 1 >= i0) add_block<T>(t, r, 3 * ((i - 1 - i0) * ny + j), s.west);
      if (j + 1 < ny) add_block<T>(t, r, 3 * ((i - i0) * ny + j + 1), s.north);
      else if (per) add_block<T>(t, r, 3 * ((i - i0) * ny), s.north, wrap_factor<T>(d, true));
      if (j - 1 >= 0) add_block<T>(t, r, 3 * ((i - i0) * ny + j - 1), s.south);
      else if (per) add_block<T>(t, r, 3 * ((i - i0) * ny + ny - 1), s.south, wrap_factor<T>(d, false));
    }
  }
}

// Whole-grid operator with the natural (zero incoming ghost) closure on the physical boundary.
template <class T = double>
SpMat<T> assemble_interior(const Discretization& d, int i0 = 0, int i1 = -1) {
  if (i1 < 0) i1 = d.nx();
  const int n = 3 * (i1 - i0) * d.ny();
  Triplets<T> t;
  stencil_triplets<T>(d, i0, i1, t);
  SpMat<T> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

enum class Side { West, East, South, North };

// The assembled closure already is the zero-ghost one; this checks the side is physical and
// returns the operator. Interface sides are handled by the decomposition.
template <class T>
SpMat<T> apply_outer_bc(SpMat<T> op, const Discretization& d, Side side, bool side_is_interface = false) {
  if (side_is_interface) throw std::logic_error("apply_outer_bc on an interface side");
  if ((side == Side::South || side == Side::North) && d.yclosure == YClosure::Periodic)
    throw std::logic_error("apply_outer_bc on a periodic side");
  return op;
}

// Tangential difference operators along a vertical interface (length ny), with the same closure
// as the interior scheme: zero ghost value at walls, wrap phase when periodic.
template <class T>
struct TangentialOps {
  SpMat<T> dm, dp, d_my, d_py, lap;
};

template <class T>
TangentialOps<T> semi_discrete_tangential_ops(const Discretization& d) {
  const int ny = d.ny();
  const double dy = d.grid.dy;
  const bool per = d.yclosure == YClosure::Periodic;
  Triplets<T> tm, tp;
  for (int j = 0; j < ny; ++j) {
    tm.emplace_back(j, j, T(1.0 / dy));
    tp.emplace_back(j, j, T(-1.0 / dy));
    if (j > 0) tm.emplace_back(j, j - 1, T(-1.0 / dy));
    else if (per) tm.emplace_back(0, ny - 1, -wrap_factor<T>(d, false) / dy);
    if (j < ny - 1) tp.emplace_back(j, j + 1, T(1.0 / dy));
    else if (per) tp.emplace_back(ny - 1, 0, wrap_factor<T>(d, true) / dy);
  }
  TangentialOps<T> o;
  o.dm.resize(ny, ny);
  o.dp.resize(ny, ny);
  o.dm.setFromTriplets(tm.begin(), tm.end());
  o.dp.setFromTriplets(tp.begin(), tp.end());
  Vec<T> wp(ny), wm(ny);
  for (int j = 0; j < ny; ++j) {
    wp(j) = T(0.5 * (d.rows[j].c_bar + d.rows[j].v_bar));
    wm(j) = T(0.5 * (d.rows[j].c_bar - d.rows[j].v_bar));
  }
  o.d_my = SpMat<T>(wp.asDiagonal() * o.dm) - SpMat<T>(wm.asDiagonal() * o.dp);
  o.d_py = SpMat<T>(wp.asDiagonal() * o.dm) + SpMat<T>(wm.asDiagonal() * o.dp);
  o.lap = o.dp * o.dm;
  return o;
}

// Sparse LU factorization kept alive for repeated solves.
template <class T>
class LocalSolver {
 public:
  explicit LocalSolver(SpMat<T> m) : m_(std::move(m)), lu_(std::make_unique<Eigen::SparseLU<SpMat<T>>>()) {
    m_.makeCompressed();
    std::vector<double> row_abs(m_.rows(), 0.0);
    for (int c = 0; c < m_.outerSize(); ++c)
      for (typename SpMat<T>::InnerIterator it(m_, c); it; ++it) row_abs[it.row()] += std::abs(it.value());
    for (double r : row_abs) norm_inf_ = std::max(norm_inf_, r);
    lu_->analyzePattern(m_);
    lu_->factorize(m_);
    if (lu_->info() != Eigen::Success) throw NumericalError("sparse LU failed: " + lu_->lastErrorMessage());
  }

  [[nodiscard]] Vec<T> solve(const Vec<T>& rhs) const {
    Vec<T> x = lu_->solve(rhs);
    if (lu_->info() != Eigen::Success || !x.allFinite()) throw NumericalError("local solve failed");
    // normwise backward error, so ill-conditioning alone is not reported as a failure
    const double rn = rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0;
    const double xn = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
    const double res = (m_ * x - rhs).cwiseAbs().maxCoeff();
    if (res > 1e-10 * (norm_inf_ * xn + rn) && res > 1e-300) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "local solve backward error %.3g too large", res / (norm_inf_ * xn + rn));
      throw NumericalError(buf);
    }
    return x;
  }

  [[nodiscard]] const SpMat<T>& matrix() const { return m_; }
  [[nodiscard]] int size() const { return static_cast<int>(m_.rows()); }

 private:
  SpMat<T> m_;
  double norm_inf_ = 0.0;
  std::unique_ptr<Eigen::SparseLU<SpMat<T>>> lu_;
};

template <class T>
PrimitiveField<T> local_solve(const LocalSolver<T>& op, const PrimitiveField<T>& rhs) {
  PrimitiveField<T> out(rhs.nx, rhs.ny);
  out.data = op.solve(rhs.data);
  return out;
}

// Single-domain reference solve of the same discrete system.
template <class T>
PrimitiveField<T> monolithic_solve(const Discretization& d, const PrimitiveField<T>& f) {
  LocalSolver<T> s(assemble_interior<T>(d));
  return local_solve(s, f);
}

}  // namespace eddm
