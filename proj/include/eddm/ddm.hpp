#pragma once

#include "eddm/discrete_fourier.hpp"
#include "eddm/discretization.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace eddm {

// ---------------------------------------------------------------- decomposition

struct Strip {
  int begin = 0;  // first cell column
  int end = 0;    // one past the last column
};

struct Decomposition {
  std::vector<Strip> strips;

  [[nodiscard]] int count() const { return static_cast<int>(strips.size()); }
  [[nodiscard]] int interfaces() const { return count() - 1; }
};

// n strips of near-equal width; interface k sits at column ceil(k nx / n).
inline Decomposition make_strips(const Discretization& d, int n) {
  if (n < 1 || n > d.nx()) throw ConfigError("strip count must lie in [1, nx]");
  Decomposition dec;
  int prev = 0;
  for (int k = 1; k <= n; ++k) {
    const int cut = (k * d.nx() + n - 1) / n;
    dec.strips.push_back({prev, cut});
    prev = cut;
  }
  for (const auto& r : d.rows)
    if (n > 1 && !(r.u_bar > 0)) throw ConfigError("interfaces need u_n > 0 (left-to-right flow)");
  return dec;
}

// ---------------------------------------------------------------- profiles

enum class Profile { Constant, MtCos, MnTanh };

inline Profile parse_profile(const std::string& s) {
  if (s == "constant") return Profile::Constant;
  if (s == "mt_cos") return Profile::MtCos;
  if (s == "mn_tanh") return Profile::MnTanh;
  throw ConfigError("unknown profile '" + s + "'");
}

inline const char* to_string(Profile p) {
  switch (p) {
    case Profile::Constant: return "constant";
    case Profile::MtCos: return "mt_cos";
    case Profile::MnTanh: return "mn_tanh";
  }
  return "?";
}

inline double mt_cos(double y) { return 0.1 * (1.0 + std::cos(std::numbers::pi * y)); }
inline double mn_tanh(double y) { return 0.5 * (0.2 + 0.04 * std::tanh(y / 0.2)); }

// Row states at cell centres y_j; mn and mt are used where the profile does not override them.
// beta is left at its default and set by make_discretization.
inline std::vector<LinearizationState> make_variable_state(Profile p, const Grid& g, double mn, double mt,
                                                           double rho = 1.0, double c = 1.0) {
  std::vector<LinearizationState> rows;
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.yc(j);
    LinearizationState s;
    s.rho_bar = rho;
    s.c_bar = c;
    s.u_bar = (p == Profile::MnTanh ? mn_tanh(y) : mn) * c;
    s.v_bar = (p == Profile::MtCos ? mt_cos(y) : mt) * c;
    if (!s.subsonic()) throw ConfigError("profile gives a non-subsonic state at row " + std::to_string(j));
    rows.push_back(s);
  }
  return rows;
}

// Benchmark rig: [0,lx] x [0,ly], nx x ny, walls in y.
inline Discretization make_rig(int nx, int ny, double lx, double ly, double cfl, Profile p, double mn, double mt,
                               double rho = 1.0, double c = 1.0) {
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.dy = ly / ny;
  return make_discretization(lx, ly, nx, ny, cfl, make_variable_state(p, g, mn, mt, rho, c));
}

// ---------------------------------------------------------------- interface operators

enum class Method { Classical, New };
enum class Stabilization { None, Laplacian };
enum class Ordering { Jacobi, GaussSeidel };

inline Method parse_method(const std::string& s) {
  if (s == "classical") return Method::Classical;
  if (s == "new") return Method::New;
  throw ConfigError("unknown method '" + s + "'");
}
inline const char* to_string(Method m) { return m == Method::Classical ? "classical" : "new"; }
inline Stabilization parse_stabilization(const std::string& s) {
  if (s == "none") return Stabilization::None;
  if (s == "laplacian") return Stabilization::Laplacian;
  throw ConfigError("unknown stabilization '" + s + "'");
}
inline const char* to_string(Stabilization s) { return s == Stabilization::None ? "none" : "laplacian"; }
inline Ordering parse_ordering(const std::string& s) {
  if (s == "jacobi") return Ordering::Jacobi;
  if (s == "gauss_seidel") return Ordering::GaussSeidel;
  throw ConfigError("unknown ordering '" + s + "'");
}
inline const char* to_string(Ordering o) { return o == Ordering::Jacobi ? "jacobi" : "gauss_seidel"; }

// Linear functionals on an interface trace laid out as [P(0..ny-1), U(...), V(...)]:
//   C(W) = (beta + v D-) U - u D_py V + kappa dy D+ D- P     (flux condition)
//   P(W) = P,  Q(W) = P + rho u U.
template <class T>
struct InterfaceOps {
  SpMat<T> C, P, Q;
};

template <class T>
InterfaceOps<T> make_interface_ops(const Discretization& d, Stabilization stab, double kappa_override = -1.0) {
  const int ny = d.ny();
  const auto t = semi_discrete_tangential_ops<T>(d);
  Vec<T> u(ny), v(ny), kap(ny), rhou(ny);
  for (int j = 0; j < ny; ++j) {
    const auto& r = d.rows[j];
    u(j) = r.u_bar;
    v(j) = r.v_bar;
    rhou(j) = r.rho_bar * r.u_bar;
    const double k = kappa_override >= 0 ? kappa_override : stabilization_kappa(r);
    kap(j) = stab == Stabilization::Laplacian ? k * d.grid.dy : 0.0;
  }
  SpMat<T> id(ny, ny);
  id.setIdentity();
  const SpMat<T> cp = kap.asDiagonal() * t.lap;
  const SpMat<T> cu = SpMat<T>(T(d.beta()) * id) + SpMat<T>(v.asDiagonal() * t.dm);
  const SpMat<T> cv = -SpMat<T>(u.asDiagonal() * t.d_py);
  auto hstack = [ny](const SpMat<T>& a, const SpMat<T>& b, const SpMat<T>& c) {
    Triplets<T> tr;
    const SpMat<T>* blk[3] = {&a, &b, &c};
    for (int k = 0; k < 3; ++k)
      for (int col = 0; col < blk[k]->outerSize(); ++col)
        for (typename SpMat<T>::InnerIterator it(*blk[k], col); it; ++it)
          tr.emplace_back(it.row(), k * ny + it.col(), it.value());
    SpMat<T> m(ny, 3 * ny);
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
  };
  SpMat<T> zero(ny, ny);
  InterfaceOps<T> ops;
  ops.C = hstack(cp, cu, cv);
  ops.P = hstack(id, zero, zero);
  ops.Q = hstack(id, SpMat<T>(rhou.asDiagonal() * id), zero);
  return ops;
}

// ---------------------------------------------------------------- run bookkeeping

struct IterationEntry {
  int iter = 0;
  double error_inf = 0.0;
  int solves = 0;  // cumulative, per subdomain
  double wall_seconds = 0.0;
};

struct IterationLog {
  std::vector<IterationEntry> entries;  // entry 0 is the initial error
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  int solves_per_iteration = 1;
  int subdomains = 1;
  std::string failure;  // set when a local solve broke down

  [[nodiscard]] int solves() const { return iterations * solves_per_iteration; }
  [[nodiscard]] int total_solves() const { return solves() * subdomains; }
  [[nodiscard]] double mean_reduction() const {
    if (entries.size() < 2 || entries.front().error_inf <= 0) return 0.0;
    const double r = entries.back().error_inf / entries.front().error_inf;
    return std::pow(r, 1.0 / (entries.size() - 1));
  }
};

struct RunOptions {
  Method method = Method::New;
  Stabilization stabilization = Stabilization::Laplacian;
  double kappa = -1.0;  // < 0: c / (2 rho u) per row
  double tol = 1e-6;
  int max_iter = 500;
  double divergence = 1e6;
  Ordering ordering = Ordering::Jacobi;
  std::uint64_t seed = 20240607;
};

template <class T>
struct Problem {
  PrimitiveField<T> f;      // right-hand side
  PrimitiveField<T> w0;     // initial iterate
  PrimitiveField<T> exact;  // solution of the monolithic system
};

template <class T>
struct RunResult {
  IterationLog log;
  PrimitiveField<T> w;
};

template <class T>
T random_scalar(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if constexpr (std::is_same_v<T, double>) {
    return u(g);
  } else {
    const double re = u(g);
    return T(re, u(g));
  }
}

template <class T>
PrimitiveField<T> random_field(int nx, int ny, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  PrimitiveField<T> w(nx, ny);
  for (int k = 0; k < w.data.size(); ++k) w.data(k) = random_scalar<T>(g);
  return w;
}

// Error equation: f = 0, exact = 0, random start.
template <class T>
Problem<T> homogeneous_problem(const Discretization& d, std::uint64_t seed) {
  Problem<T> p;
  p.f = PrimitiveField<T>(d.nx(), d.ny());
  p.exact = PrimitiveField<T>(d.nx(), d.ny());
  p.w0 = random_field<T>(d.nx(), d.ny(), seed);
  return p;
}

// Random right-hand side, zero start, reference from the single-domain solve.
template <class T>
Problem<T> forced_problem(const Discretization& d, std::uint64_t seed) {
  Problem<T> p;
  p.f = random_field<T>(d.nx(), d.ny(), seed);
  p.w0 = PrimitiveField<T>(d.nx(), d.ny());
  p.exact = monolithic_solve(d, p.f);
  return p;
}

namespace detail {

template <class T>
Vec<T> column_trace(const PrimitiveField<T>& w, int i) {
  Vec<T> t(3 * w.ny);
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < w.ny; ++j) t(c * w.ny + j) = w(i, j, c);
  return t;
}

template <class T>
Vec<T> strip_rhs(const PrimitiveField<T>& f, const Strip& s) {
  const int ny = f.ny;
  return f.data.segment(3 * s.begin * ny, 3 * (s.end - s.begin) * ny);
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class T>
double error_inf(const PrimitiveField<T>& w, const PrimitiveField<T>& exact) {
  return (w.data - exact.data).cwiseAbs().maxCoeff();
}

}  // namespace detail

// ---------------------------------------------------------------- classical method

// Strip with zero-ghost closure everywhere; neighbours enter through the right-hand side as
// A+ W_{left neighbour} and A- W_{right neighbour}.
template <class T>
class ClassicalStrip {
 public:
  ClassicalStrip(const Discretization& d, Strip s) : d_(&d), s_(s), lu_(assemble_interior<T>(d, s.begin, s.end)) {}

  [[nodiscard]] Vec<T> solve(const PrimitiveField<T>& f, const PrimitiveField<T>& w) const {
    const int ny = d_->ny();
    const double dx = d_->grid.dx;
    Vec<T> rhs = detail::strip_rhs(f, s_);
    const int last = 3 * (s_.end - 1 - s_.begin) * ny;
    for (int j = 0; j < ny; ++j) {
      const auto& x = d_->xsplit[j];
      if (s_.begin > 0) {
        Eigen::Matrix<T, 3, 1> wn;
        for (int c = 0; c < 3; ++c) wn(c) = w(s_.begin - 1, j, c);
        rhs.template segment<3>(3 * j) += x.a_plus.cast<T>() * wn / dx;
      }
      if (s_.end < d_->nx()) {
        Eigen::Matrix<T, 3, 1> wn;
        for (int c = 0; c < 3; ++c) wn(c) = w(s_.end, j, c);
        rhs.template segment<3>(last + 3 * j) -= x.a_minus.cast<T>() * wn / dx;
      }
    }
    return lu_.solve(rhs);
  }

  [[nodiscard]] const Strip& strip() const { return s_; }

 private:
  const Discretization* d_;
  Strip s_;
  LocalSolver<T> lu_;
};

template <class T>
RunResult<T> run_classical(const Discretization& d, const Decomposition& dec, const Problem<T>& pb,
                           const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ClassicalStrip<T>> strips;
  strips.reserve(dec.count());
  for (const auto& s : dec.strips) strips.emplace_back(d, s);
  RunResult<T> out;
  out.log.solves_per_iteration = 1;
  out.log.subdomains = dec.count();
  PrimitiveField<T> w = pb.w0;
  const double e0 = detail::error_inf(w, pb.exact);
  out.log.entries.push_back({0, e0, 0, detail::elapsed(t0)});
  const int ny = d.ny();
  for (int k = 1; k <= opt.max_iter; ++k) {
    PrimitiveField<T> wn = w;
    for (const auto& st : strips) {
      const auto& src = opt.ordering == Ordering::GaussSeidel ? wn : w;
      wn.data.segment(3 * st.strip().begin * ny, 3 * (st.strip().end - st.strip().begin) * ny) = st.solve(pb.f, src);
    }
    w = std::move(wn);
    const double e = detail::error_inf(w, pb.exact);
    out.log.iterations = k;
    out.log.entries.push_back({k, e, k, detail::elapsed(t0)});
    if (!std::isfinite(e) || e > opt.divergence * e0) {
      out.log.diverged = true;
      break;
    }
    if (e <= opt.tol * e0) {
      out.log.converged = true;
      break;
    }
  }
  out.w = std::move(w);
  return out;
}

// ---------------------------------------------------------------- new method

// Strip for the correction/update iteration. Interfaces carry Riemann states built from the
// adjacent cell and extra unknowns in the incoming characteristic slots:
//   right side (Omega1 role): T = Pi+ W_last  + a- r-
//   left side  (Omega2 role): T = Pi- W_first + a+ r+ + a0 r0
// The extra unknowns close the edge flux A T; their rows hold the interface conditions.
template <class T>
class NewStrip {
 public:
  NewStrip(const Discretization& d, Strip s, const InterfaceOps<T>& ops)
      : d_(&d), s_(s), ny_(d.ny()), left_(s.begin > 0), right_(s.end < d.nx()) {
    ncell_ = 3 * (s.end - s.begin) * ny_;
    gl_ = left_ ? 2 * ny_ : 0;
    gr_ = right_ ? ny_ : 0;
    n_ = ncell_ + gl_ + gr_;
    Triplets<T> k;
    stencil_triplets<T>(d, s.begin, s.end, k);
    Triplets<T> tl, tr;
    const double dx = d.grid.dx;
    for (int j = 0; j < ny_; ++j) {
      const auto& x = d.xsplit[j];
      const Vec3 rm = x.right.col(0), r0 = x.right.col(1), rp = x.right.col(2);
      const double sm = x.speeds(0), s0 = x.speeds(1), sp = x.speeds(2);
      if (left_) {
        const int ci = 3 * j, g = ncell_ + 2 * j;
        for (int c = 0; c < 3; ++c) {
          for (int q = 0; q < 3; ++q)
            if (x.proj_minus(c, q) != 0.0) tl.emplace_back(c * ny_ + j, ci + q, T(x.proj_minus(c, q)));
          if (rp(c) != 0.0) tl.emplace_back(c * ny_ + j, g, T(rp(c)));
          if (r0(c) != 0.0) tl.emplace_back(c * ny_ + j, g + 1, T(r0(c)));
          // west flux A T: the Pi- part is already on the diagonal
          if (rp(c) != 0.0) k.emplace_back(ci + c, g, T(-sp * rp(c) / dx));
          if (r0(c) != 0.0) k.emplace_back(ci + c, g + 1, T(-s0 * r0(c) / dx));
        }
      }
      if (right_) {
        const int ci = 3 * ((s.end - 1 - s.begin) * ny_ + j), g = ncell_ + gl_ + j;
        for (int c = 0; c < 3; ++c) {
          for (int q = 0; q < 3; ++q)
            if (x.proj_plus(c, q) != 0.0) tr.emplace_back(c * ny_ + j, ci + q, T(x.proj_plus(c, q)));
          if (rm(c) != 0.0) tr.emplace_back(c * ny_ + j, g, T(rm(c)));
          if (rm(c) != 0.0) k.emplace_back(ci + c, g, T(sm * rm(c) / dx));
        }
      }
    }
    tl_.resize(3 * ny_, n_);
    tr_.resize(3 * ny_, n_);
    tl_.setFromTriplets(tl.begin(), tl.end());
    tr_.setFromTriplets(tr.begin(), tr.end());
    // correction: Omega2 side  C = gamma, Q = 0;   Omega1 side  -C = gamma
    corr_.emplace(with_rows(k, {&ops.C, &ops.Q}, -1.0, &ops.C));
    // update:     Omega2 side  P = ., Q = .;       Omega1 side   P = .
    upd_.emplace(with_rows(k, {&ops.P, &ops.Q}, 1.0, &ops.P));
  }

  struct Output {
    Vec<T> cells;
    Vec<T> left_trace;
    Vec<T> right_trace;
  };

  // rhs_left = (first condition, second condition) on the left side, rhs_right on the right side.
  [[nodiscard]] Output solve(bool correction, const Vec<T>* f, const Vec<T>* l0, const Vec<T>* l1,
                             const Vec<T>* r0) const {
    Vec<T> rhs = Vec<T>::Zero(n_);
    if (f) rhs.head(ncell_) = *f;
    if (left_) {
      for (int j = 0; j < ny_; ++j) {
        rhs(ncell_ + 2 * j) = (*l0)(j);
        rhs(ncell_ + 2 * j + 1) = (*l1)(j);
      }
    }
    if (right_) rhs.segment(ncell_ + gl_, ny_) = *r0;
    const Vec<T> x = (correction ? *corr_ : *upd_).solve(rhs);
    Output o;
    o.cells = x.head(ncell_);
    if (left_) o.left_trace = tl_ * x;
    if (right_) o.right_trace = tr_ * x;
    return o;
  }

  [[nodiscard]] const Strip& strip() const { return s_; }
  [[nodiscard]] bool has_left() const { return left_; }
  [[nodiscard]] bool has_right() const { return right_; }
  [[nodiscard]] int unknowns() const { return n_; }

 private:
  SpMat<T> with_rows(const Triplets<T>& k, std::initializer_list<const SpMat<T>*> left_ops, double right_sign,
                     const SpMat<T>* right_op) const {
    Triplets<T> t = k;
    auto append = [&](const SpMat<T>& rows, int row_of_j_stride, int row_offset, double sign) {
      for (int col = 0; col < rows.outerSize(); ++col)
        for (typename SpMat<T>::InnerIterator it(rows, col); it; ++it)
          t.emplace_back(row_offset + row_of_j_stride * static_cast<int>(it.row()), static_cast<int>(it.col()),
                         T(sign) * it.value());
    };
    if (left_) {
      int k2 = 0;
      for (const SpMat<T>* op : left_ops) {
        const SpMat<T> rows = *op * tl_;
        append(rows, 2, ncell_ + k2, 1.0);
        ++k2;
      }
    }
    if (right_) {
      const SpMat<T> rows = *right_op * tr_;
      append(rows, 1, ncell_ + gl_, right_sign);
    }
    SpMat<T> m(n_, n_);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }

  const Discretization* d_;
  Strip s_;
  int ny_;
  bool left_, right_;
  int ncell_ = 0, gl_ = 0, gr_ = 0, n_ = 0;
  SpMat<T> tl_, tr_;
  std::optional<LocalSolver<T>> corr_, upd_;
};

// Interface iterate: for interface i, `right[i]` is the trace of strip i (Omega1 role) and
// `left[i]` the trace of strip i+1 (Omega2 role).
template <class T>
struct InterfaceData {
  std::vector<Vec<T>> right, left;
};

template <class T>
class NewDdm {
 public:
  NewDdm(const Discretization& d, const Decomposition& dec, Stabilization stab, double kappa = -1.0,
         Ordering ord = Ordering::Jacobi)
      : d_(&d), dec_(dec), ops_(make_interface_ops<T>(d, stab, kappa)), ord_(ord) {
    strips_.reserve(dec.count());
    for (const auto& s : dec.strips) strips_.emplace_back(d, s, ops_);
  }

  // Edge-adjacent cell values with the two pressures replaced by their mean.
  [[nodiscard]] InterfaceData<T> initial_traces(const PrimitiveField<T>& w) const {
    InterfaceData<T> id;
    const int ny = d_->ny();
    for (int i = 0; i < dec_.interfaces(); ++i) {
      const int b = dec_.strips[i].end;
      Vec<T> r = detail::column_trace(w, b - 1), l = detail::column_trace(w, b);
      const Vec<T> p = T(0.5) * (r.head(ny) + l.head(ny));
      r.head(ny) = p;
      l.head(ny) = p;
      id.right.push_back(r);
      id.left.push_back(l);
    }
    return id;
  }

  void check_compatible(const InterfaceData<T>& id) const {
    const int ny = d_->ny();
    for (int i = 0; i < dec_.interfaces(); ++i) {
      const double scale = std::max({1.0, id.right[i].cwiseAbs().maxCoeff(), id.left[i].cwiseAbs().maxCoeff()});
      if ((id.right[i].head(ny) - id.left[i].head(ny)).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::logic_error("new DDM needs equal interface pressures on both sides initially");
    }
  }

  // One correction + update sweep. Returns the new interface data; the field is written to w.
  InterfaceData<T> iterate(const InterfaceData<T>& in, const PrimitiveField<T>& f, PrimitiveField<T>& w) const {
    const int ni = dec_.interfaces(), ns = dec_.count();
    std::vector<Vec<T>> gam(ni), delta(ni), cl(ni), cr(ni);
    for (int i = 0; i < ni; ++i) gam[i] = T(-0.5) * (ops_.C * in.left[i] - ops_.C * in.right[i]);
    const Vec<T> zero = Vec<T>::Zero(d_->ny());
    for (int s = 0; s < ns; ++s) {
      const auto& st = strips_[s];
      const auto o = st.solve(true, nullptr, st.has_left() ? &gam[s - 1] : nullptr, &zero,
                              st.has_right() ? &gam[s] : nullptr);
      if (st.has_left()) cl[s - 1] = o.left_trace;
      if (st.has_right()) cr[s] = o.right_trace;
    }
    for (int i = 0; i < ni; ++i) delta[i] = T(0.5) * (ops_.P * cr[i] + ops_.P * cl[i]);
    InterfaceData<T> out;
    out.right.resize(ni);
    out.left.resize(ni);
    const int ny = d_->ny();
    for (int s = 0; s < ns; ++s) {
      const auto& st = strips_[s];
      const Vec<T> fs = detail::strip_rhs(f, st.strip());
      Vec<T> l0, l1, r0;
      if (st.has_left()) {
        const int i = s - 1;
        l0 = ops_.P * in.left[i] + delta[i];
        // Gauss-Seidel: the upstream strip has already produced its new trace
        l1 = ord_ == Ordering::GaussSeidel ? Vec<T>(ops_.Q * out.right[i])
                                           : Vec<T>(ops_.Q * in.right[i] + ops_.Q * cr[i]);
      }
      if (st.has_right()) r0 = ops_.P * in.right[s] + delta[s];
      const auto o = st.solve(false, &fs, st.has_left() ? &l0 : nullptr, st.has_left() ? &l1 : nullptr,
                              st.has_right() ? &r0 : nullptr);
      w.data.segment(3 * st.strip().begin * ny, o.cells.size()) = o.cells;
      if (st.has_left()) out.left[s - 1] = o.left_trace;
      if (st.has_right()) out.right[s] = o.right_trace;
    }
    return out;
  }

  [[nodiscard]] const InterfaceOps<T>& ops() const { return ops_; }
  [[nodiscard]] const std::vector<NewStrip<T>>& strips() const { return strips_; }
  [[nodiscard]] const Decomposition& decomposition() const { return dec_; }

 private:
  const Discretization* d_;
  Decomposition dec_;
  InterfaceOps<T> ops_;
  Ordering ord_;
  std::vector<NewStrip<T>> strips_;
};

template <class T>
RunResult<T> run_new(const Discretization& d, const Decomposition& dec, const Problem<T>& pb, const RunOptions& opt,
                     const InterfaceData<T>* start = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  NewDdm<T> ddm(d, dec, opt.stabilization, opt.kappa, opt.ordering);
  RunResult<T> out;
  out.log.solves_per_iteration = 2;
  out.log.subdomains = dec.count();
  PrimitiveField<T> w = pb.w0;
  InterfaceData<T> id = start ? *start : ddm.initial_traces(w);
  ddm.check_compatible(id);
  const double e0 = detail::error_inf(w, pb.exact);
  out.log.entries.push_back({0, e0, 0, detail::elapsed(t0)});
  if (dec.count() == 1) {
    // no interface: a single update solve is the answer
    id = ddm.iterate(id, pb.f, w);
    out.log.iterations = 1;
    out.log.solves_per_iteration = 1;
    out.log.entries.push_back({1, detail::error_inf(w, pb.exact), 1, detail::elapsed(t0)});
    out.log.converged = true;
    out.w = std::move(w);
    return out;
  }
  for (int k = 1; k <= opt.max_iter; ++k) {
    id = ddm.iterate(id, pb.f, w);
    const double e = detail::error_inf(w, pb.exact);
    out.log.iterations = k;
    out.log.entries.push_back({k, e, 2 * k, detail::elapsed(t0)});
    if (!std::isfinite(e) || e > opt.divergence * e0) {
      out.log.diverged = true;
      break;
    }
    if (e <= opt.tol * e0) {
      out.log.converged = true;
      break;
    }
  }
  out.w = std::move(w);
  return out;
}

template <class T>
RunResult<T> run_to_convergence(const Discretization& d, const Decomposition& dec, const Problem<T>& pb,
                                const RunOptions& opt) {
  return opt.method == Method::Classical ? run_classical(d, dec, pb, opt) : run_new(d, dec, pb, opt);
}

// Spectral radius of one new-DDM sweep acting on interface data with P1 = P2, built column by
// column from the actual strip solves (homogeneous problem).
template <class T>
double interface_map_radius(const Discretization& d, const Decomposition& dec, Stabilization stab,
                            double kappa = -1.0) {
  NewDdm<T> ddm(d, dec, stab, kappa);
  const int ny = d.ny(), ni = dec.interfaces(), blk = 3 * ny, n = 2 * blk * ni;
  if (ni == 0) return 0.0;
  // coordinates: per interface, shared P (ny), U1, V1, U2, V2
  const int m = 5 * ny * ni;
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> basis = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, m);
  for (int i = 0; i < ni; ++i) {
    const int r = 2 * blk * i, l = r + blk, c = 5 * ny * i;
    for (int j = 0; j < ny; ++j) {
      basis(r + j, c + j) = 1.0;
      basis(l + j, c + j) = 1.0;
      basis(r + ny + j, c + ny + j) = 1.0;
      basis(r + 2 * ny + j, c + 2 * ny + j) = 1.0;
      basis(l + ny + j, c + 3 * ny + j) = 1.0;
      basis(l + 2 * ny + j, c + 4 * ny + j) = 1.0;
    }
  }
  PrimitiveField<T> f(d.nx(), d.ny()), w(d.nx(), d.ny());
  Eigen::MatrixXcd map(m, m);
  for (int col = 0; col < m; ++col) {
    InterfaceData<T> id;
    for (int i = 0; i < ni; ++i) {
      id.right.push_back(basis.col(col).segment(2 * blk * i, blk));
      id.left.push_back(basis.col(col).segment(2 * blk * i + blk, blk));
    }
    const auto o = ddm.iterate(id, f, w);
    for (int i = 0; i < ni; ++i) {
      const int c = 5 * ny * i;
      for (int j = 0; j < ny; ++j) {
        map(c + j, col) = cplx(o.right[i](j));
        map(c + ny + j, col) = cplx(o.right[i](ny + j));
        map(c + 2 * ny + j, col) = cplx(o.right[i](2 * ny + j));
        map(c + 3 * ny + j, col) = cplx(o.left[i](ny + j));
        map(c + 4 * ny + j, col) = cplx(o.left[i](2 * ny + j));
      }
    }
  }
  return detail::spectral_radius(map);
}

// ---------------------------------------------------------------- Bloch single-mode rig

// Three cell rows with a Bloch wrap e^{3 i theta}, theta = xi dy, so that a field e^{i theta j}
// is y-periodic up to the phase. Two strips of `half` cells each.
struct BlochRig {
  Discretization disc;
  Decomposition dec;
  double theta = 0.0;
};

inline BlochRig make_bloch_rig(double mn, double mt, double theta, int half = 200, double h = 0.05,
                               double cfl = 100.0) {
  const int ny = 3;
  std::vector<LinearizationState> rows(ny);
  for (auto& r : rows) {
    r.u_bar = mn;
    r.v_bar = mt;
  }
  BlochRig rig;
  rig.theta = theta;
  rig.disc = make_discretization(2 * half * h, ny * h, 2 * half, ny, cfl, rows, YClosure::Periodic,
                                 std::exp(cplx(0.0, ny * theta)));
  rig.dec = make_strips(rig.disc, 2);
  return rig;
}

struct BlochMeasurement {
  double observed = 0.0;  // geometric-mean reduction per iteration over [skip, last]
  std::vector<double> errors;
};

// Seeds W[i][j] = w_i e^{i theta j} with random complex w_i and runs the new method until the
// error drops below `floor` times the initial one (well above round-off). The first `skip`
// iterations carry the start-up transient and are excluded from the mean.
inline BlochMeasurement measure_bloch_rate(const BlochRig& rig, int max_iter = 60, double floor = 1e-11,
                                           int skip = 2, std::uint64_t seed = 7,
                                           Stabilization stab = Stabilization::Laplacian) {
  const auto& d = rig.disc;
  std::mt19937_64 g(seed);
  Problem<cplx> pb;
  pb.f = PrimitiveField<cplx>(d.nx(), d.ny());
  pb.exact = pb.f;
  pb.w0 = pb.f;
  for (int i = 0; i < d.nx(); ++i) {
    cplx wi[3];
    for (auto& x : wi) x = random_scalar<cplx>(g);
    for (int j = 0; j < d.ny(); ++j)
      for (int c = 0; c < 3; ++c) pb.w0(i, j, c) = wi[c] * std::exp(cplx(0.0, rig.theta * j));
  }
  RunOptions opt;
  opt.stabilization = stab;
  opt.max_iter = max_iter;
  opt.tol = floor;
  const auto r = run_new(d, rig.dec, pb, opt);
  BlochMeasurement m;
  for (const auto& e : r.log.entries) m.errors.push_back(e.error_inf);
  const int last = static_cast<int>(m.errors.size()) - 1;
  if (last > skip && m.errors[skip] > 0)
    m.observed = std::pow(m.errors[last] / m.errors[skip], 1.0 / (last - skip));
  return m;
}

}  // namespace eddm
