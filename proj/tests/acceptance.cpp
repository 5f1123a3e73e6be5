// One PASS/FAIL line per acceptance criterion; nonzero exit when any fails.
#include "eddm/harness/experiments.hpp"
#include "eddm/harness/verify.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace eddm;
using namespace eddm::harness;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LinearizationState rig_state(double mn) {
  const ExperimentConfig c;
  return c.discretization(mn).rows.front();
}

Outcome criterion1() {
  const auto r = check_smith_identity(200, 1);
  return {r.pass, r.detail};
}

Outcome criterion2() {
  const auto r = check_two_step(100, 2);
  return {r.pass, r.detail};
}

// Rig wavenumbers k pi / Ly, k = 1..ny; the upper half of the band is k >= ny / 2.
Outcome criterion3() {
  const ExperimentConfig c;
  const MeshSpacing h{c.lx / c.nx, c.ly / c.ny};
  bool ok = true;
  std::string d;
  for (double mn : {0.001, 0.01, 0.1}) {
    const auto s = rig_state(mn);
    double st_max = 0, un_upper = 0;
    for (int k = 1; k <= c.ny; ++k) {
      const double xi = k * M_PI / c.ly;
      st_max = std::max(st_max, discrete_convergence_rate(s, h, xi, RateVariant::Stabilized).rho);
      if (2 * k >= c.ny)
        un_upper = std::max(un_upper, discrete_convergence_rate(s, h, xi, RateVariant::Unstabilized).rho);
    }
    ok = ok && st_max < 1.0 && un_upper > 1.0;
    d += "Mn=" + fmt(mn) + ": stabilized max " + fmt(st_max, 4) + ", unstabilized upper-band max " +
         fmt(un_upper, 4) + "; ";
  }
  return {ok, d};
}

Outcome criterion4() {
  const std::pair<double, double> pairs[] = {{0.001, 2.0}, {0.01, 1.5}, {0.1, 0.94}, {0.1, 2.5}, {0.8, 0.3}};
  bool ok = true;
  std::string d;
  for (const auto& [mn, theta] : pairs) {
    const auto rig = make_bloch_rig(mn, 0.0, theta, 400);
    const double obs = measure_bloch_rate(rig).observed;
    const double pred =
        discrete_convergence_rate(rig.disc.rows[0], {rig.disc.grid.dx, rig.disc.grid.dy}, theta / rig.disc.grid.dy,
                                  RateVariant::Stabilized)
            .rho;
    const bool pass = std::abs(obs - pred) <= 0.1 * pred;
    ok = ok && pass;
    d += "(" + fmt(mn) + ", theta " + fmt(theta) + ") observed " + fmt(obs, 4) + " predicted " + fmt(pred, 4) + "; ";
  }
  return {ok, d};
}

std::string solves_list(const BenchmarkTable& t, bool neu) {
  std::string s;
  for (const auto& r : t.rows) s += (s.empty() ? "" : ",") + count_cell(neu ? r.neu : r.classical);
  return "{" + s + "}";
}

Outcome criterion5() {
  const auto t = reproduce_tables("table1", ExperimentConfig{}).front();
  const int ref_new[] = {18, 16, 14, 16, 16, 14, 14, 14, 12, 14};
  const int ref_cls[] = {67, 66, 55, 41, 32, 25, 20, 16, 13, 15};
  bool a = true, b = true;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    a = a && r.neu.converged && std::abs(r.neu.solves() - ref_new[k]) <= 6;
    b = b && r.classical.converged && std::abs(r.classical.solves() - ref_cls[k]) <= 0.25 * ref_cls[k];
  }
  const auto& r0 = t.rows.front();
  const bool c = r0.neu.converged && r0.classical.converged && 3 * r0.neu.solves() <= r0.classical.solves();
  return {a && b && c, std::string("(a) ") + (a ? "ok" : "no") + " (b) " + (b ? "ok" : "no") + " (c) " +
                           (c ? "ok" : "no") + "; new " + solves_list(t, true) + " classical " + solves_list(t, false)};
}

Outcome criterion6() {
  const auto ts = reproduce_tables("mesh", ExperimentConfig{});
  bool ok = true;
  std::string d;
  for (const auto& t : ts) {
    int lo = 1 << 30, hi = -1;
    bool conv = true;
    for (const auto& r : t.rows) {
      conv = conv && r.neu.converged;
      lo = std::min(lo, r.neu.solves());
      hi = std::max(hi, r.neu.solves());
    }
    const int limit = t.rows.front().mn < 0.01 ? 4 : 6;
    ok = ok && conv && hi - lo <= limit;
    d += t.name + " new " + solves_list(t, true) + (conv ? " spread " + std::to_string(hi - lo) : "") + "; ";
  }
  return {ok, d};
}

Outcome criterion7() {
  const ExperimentConfig c;
  const Discretization d = c.discretization(0.3);
  const auto pb = forced_problem<double>(d, c.seed);
  bool ok = true;
  std::string det;
  for (int n : {2, 3}) {
    const auto dec = make_strips(d, n);
    for (Method m : {Method::Classical, Method::New}) {
      RunOptions o = c.run_options(m);
      o.tol = 1e-12;
      o.max_iter = 2000;
      const auto r = run_to_convergence(d, dec, pb, o);
      const double err = eddm::detail::error_inf(r.w, pb.exact);
      const bool pass = r.log.converged && err <= 1e-8;
      ok = ok && pass;
      det += std::to_string(n) + " strips " + to_string(m) + ": " + (r.log.converged ? "converged" : "not converged") +
             ", max error " + fmt(err, 3) + "; ";
    }
  }
  return {ok, det};
}

Outcome criterion8() {
  const auto t = reproduce_tables("table2", ExperimentConfig{}).front();
  const int ref_new[] = {16, 16, 14, 14, 14, 14, 12, 12, 12, 14};
  bool a = true, b = true;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& r = t.rows[k];
    a = a && r.neu.converged && std::abs(r.neu.solves() - ref_new[k]) <= 6;
    if (r.mn <= 0.5) b = b && r.neu.converged && r.classical.converged && r.neu.solves() <= r.classical.solves();
  }
  return {a && b, std::string("counts ") + (a ? "ok" : "no") + ", new <= classical " + (b ? "ok" : "no") + "; new " +
                      solves_list(t, true) + " classical " + solves_list(t, false)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 Smith determinant identity", criterion1},   {"2 continuous two-step convergence", criterion2},
      {"3 stabilization necessity", criterion3},      {"4 Fourier-solver consistency", criterion4},
      {"5 constant-state count table", criterion5},         {"6 mesh robustness", criterion6},
      {"7 multi-domain correctness", criterion7},     {"8 variable-state runs", criterion8}};
  const double budget[] = {1, 1, 10, 30, 300, 300, 60, 300};
  int failed = 0;
  int k = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = seconds_since(t0);
    if (s > budget[k]) {
      o.pass = false;
      o.detail += "runtime over budget; ";
    }
    std::printf("%s  criterion %s  [%.2f s]  %s\n", o.pass ? "PASS" : "FAIL", name, s, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
    ++k;
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
