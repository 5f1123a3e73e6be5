#include "eddm/harness/experiments.hpp"
#include "eddm/harness/verify.hpp"
#include "eddm/symbol_analysis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace eddm;
using namespace eddm::harness;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::vector<double> mn;
  std::string variant;
  std::string method;
  std::string preset = "table1";
};

ExperimentConfig load(const Globals& g) {
  KeyValueConfig kv = g.config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(g.config_path);
  for (const auto& o : g.overrides) kv.apply_override(o);
  if (!g.mn.empty()) {
    std::string s;
    for (std::size_t k = 0; k < g.mn.size(); ++k) s += (k ? "," : "") + fmt(g.mn[k], 17);
    kv.set("physics.mach_n", s);
  }
  if (!g.variant.empty()) kv.set("analysis.variant", g.variant);
  if (!g.method.empty()) kv.set("algorithm.method", g.method);
  ExperimentConfig c = resolve(kv);
  if (!g.out.empty()) c.output_dir = g.out;
  return c;
}

std::string tag(double mn) { return "mn" + fmt(mn); }

int analyze_continuous(const ExperimentConfig& c) {
  std::vector<double> xs = c.xi_continuous.empty() ? signed_log_xis(20) : c.xi_continuous;
  bool ok = true;
  for (double mn : c.mach_n) {
    const Discretization d = c.discretization(mn);
    LinearizationState s = d.rows.front();
    s.u_bar = mn * c.c;
    std::vector<std::vector<std::string>> rows;
    double worst = 0.0;
    for (double xi : xs) {
      if (xi == 0.0) continue;  // excluded: the interface flux of the first iterate vanishes there
      const auto r = continuous_two_step_check(s, xi, cplx(1.0, 0.0));
      worst = std::max(worst, r.residual);
      rows.push_back({fmt(xi, 15), fmt(std::abs(r.alpha2[0]), 6), fmt(std::abs(r.alpha2[1]), 6),
                      fmt(std::abs(r.alpha2[2]), 6), fmt(r.residual, 6)});
    }
    write_csv(fs::path(c.output_dir) / ("continuous_" + tag(mn) + ".csv"), echo(c, &d),
              {"xi", "abs_alpha1_2", "abs_alpha2_2", "abs_alpha3_2", "residual"}, rows);
    const bool pass = worst <= 1e-12;
    ok = ok && pass;
    std::printf("mn=%-6s two-step residual max %.3e  %s\n", fmt(mn).c_str(), worst, pass ? "ok" : "FAIL");
  }
  return ok ? kOk : kNumerical;
}

int analyze_discrete(const ExperimentConfig& c) {
  std::vector<RateVariant> vs;
  if (c.variant == "all") vs = {RateVariant::Stabilized, RateVariant::Unstabilized, RateVariant::Classical};
  else if (c.variant == "stabilized") vs = {RateVariant::Stabilized};
  else if (c.variant == "unstabilized") vs = {RateVariant::Unstabilized};
  else vs = {RateVariant::Classical};
  for (double mn : c.mach_n) {
    if (c.profile != Profile::Constant) throw ConfigError("discrete Fourier analysis needs a constant state");
    const Discretization d = c.discretization(mn);
    const LinearizationState s = d.rows.front();
    const MeshSpacing h{d.grid.dx, d.grid.dy};
    std::vector<std::vector<std::string>> rows;
    std::vector<Series> series;
    for (RateVariant v : vs) {
      const RateCurve rc = rate_curve(s, h, v, c.xi_samples, c.xi_spacing, c.xi_min, c.kappa);
      Series sr{to_string(v), {}, {}};
      for (const auto& p : rc.points) {
        std::string flags;
        if (p.rho > 1) flags += "rho>1;";
        if (p.marginal) flags += "marginal;";
        if (p.nyquist_limit) flags += "nyquist_limit;";
        rows.push_back({fmt(p.xi, 15), fmt(p.rho, 15), to_string(v), flags});
        sr.x.push_back(p.xi);
        sr.y.push_back(p.rho);
      }
      series.push_back(sr);
      std::printf("mn=%-6s %-12s max rho %.6g%s\n", fmt(mn).c_str(), to_string(v), rc.max_rho(),
                  rc.max_rho() > 1 ? "  [rho > 1 flagged]" : "");
    }
    const fs::path base = fs::path(c.output_dir) / ("rates_" + tag(mn));
    Echo e = echo(c, &d);
    write_csv(fs::path(base.string() + ".csv"), e, {"xi", "rho", "variant", "flags"}, rows);
    emit_plot(base, {"Discrete convergence rate, Mn = " + fmt(mn), "xi", "rho", true, 1.0}, series, e, "xi", "rho",
              false);
  }
  return kOk;
}

nlohmann::json log_json(const IterationLog& l) {
  nlohmann::json j;
  j["converged"] = l.converged;
  j["diverged"] = l.diverged;
  j["iterations"] = l.iterations;
  j["solves_per_subdomain"] = l.solves();
  j["total_solves"] = l.total_solves();
  j["mean_reduction"] = l.mean_reduction();
  j["final_error"] = l.entries.back().error_inf;
  j["wall_seconds"] = l.entries.back().wall_seconds;
  return j;
}

int solve(const ExperimentConfig& c) {
  bool failed = false;
  for (double mn : c.mach_n) {
    const Discretization d = c.discretization(mn);
    Echo e = echo(c, &d);
    std::vector<Series> series;
    nlohmann::json report;
    for (const auto& [k, v] : e) report["config"][k] = v;
    for (Method m : c.methods()) {
      const IterationLog l = run_cell(c, d, m);
      if (!l.failure.empty()) throw NumericalError(std::string(to_string(m)) + ": " + l.failure);
      std::vector<std::vector<std::string>> rows;
      Series sr{to_string(m), {}, {}};
      for (const auto& en : l.entries) {
        rows.push_back({std::to_string(en.iter), fmt(en.error_inf, 12), std::to_string(en.solves)});
        sr.x.push_back(en.solves);
        sr.y.push_back(en.error_inf);
      }
      series.push_back(sr);
      write_csv(fs::path(c.output_dir) / ("history_" + std::string(to_string(m)) + "_" + tag(mn) + ".csv"), e,
                {"iter", "error_inf", "solves"}, rows);
      report["runs"][to_string(m)] = log_json(l);
      std::printf("mn=%-6s %-9s %s solves=%d iterations=%d final=%.3e\n", fmt(mn).c_str(), to_string(m),
                  l.converged ? "converged" : (l.diverged ? "DIVERGED " : "capped   "), l.solves(), l.iterations,
                  l.entries.back().error_inf);
      if (!l.converged && !c.expect_divergence) failed = true;
    }
    emit_plot(fs::path(c.output_dir) / ("history_" + tag(mn)),
              {"Convergence history, Mn = " + fmt(mn), "subdomain solves", "max-norm error", true, std::nullopt},
              series, e, "solves", "error_inf");
    auto f = open_output(fs::path(c.output_dir) / ("report_" + tag(mn) + ".json"));
    f << report.dump(2) << '\n';
  }
  return failed ? kNumerical : kOk;
}

int sweep(const ExperimentConfig& c) {
  const auto ms = c.methods();
  const int n = static_cast<int>(c.mach_n.size());
  const auto logs = ordered_pool(n, [&](int k) {
    const Discretization d = c.discretization(c.mach_n[k]);
    std::vector<IterationLog> out;
    for (Method m : ms) out.push_back(run_cell(c, d, m));
    return out;
  });
  std::vector<std::vector<std::string>> rows;
  std::vector<Series> series(ms.size());
  bool failed = false;
  for (int k = 0; k < n; ++k) {
    std::string cls, neu;
    bool conv = true;
    for (std::size_t q = 0; q < ms.size(); ++q) {
      const auto& l = logs[k][q];
      conv = conv && l.converged;
      (ms[q] == Method::Classical ? cls : neu) = count_cell(l);
      series[q].name = to_string(ms[q]);
      if (l.converged) {
        series[q].x.push_back(c.mach_n[k]);
        series[q].y.push_back(l.solves());
      }
      if (!l.converged && !c.expect_divergence) failed = true;
    }
    rows.push_back({fmt(c.mach_n[k]), cls, neu, conv ? "true" : "false"});
    std::printf("mn=%-6s classical=%-8s new=%-8s\n", fmt(c.mach_n[k]).c_str(), cls.c_str(), neu.c_str());
  }
  const Echo e = echo(c);
  write_csv(fs::path(c.output_dir) / "sweep.csv", e, {"mn", "classical_solves", "new_solves", "converged"}, rows);
  bool any = false;
  for (const auto& s : series) any = any || !s.x.empty();
  if (any)
    emit_plot(fs::path(c.output_dir) / "sweep_plot", {"Subdomain solves", "Mn", "solves", false, std::nullopt}, series,
              e, "mn", "solves");
  return failed ? kNumerical : kOk;
}

int table(const ExperimentConfig& c, const std::string& preset) {
  const auto tables = reproduce_tables(preset, c);
  bool failed = false;
  for (const auto& t : tables) {
    write_table(fs::path(c.output_dir) / (t.name + ".csv"), t);
    std::printf("%s\n%-8s %14s %14s %10s %10s\n", t.name.c_str(), t.key_name.c_str(), "classical", "new",
                "ref_cls", "ref_new");
    Series sc{"classical", {}, {}}, sn{"new", {}, {}}, rc{"ref classical", {}, {}}, rn{"ref new", {}, {}};
    for (const auto& r : t.rows) {
      std::printf("%-8s %14s %14s %10s %10s\n", fmt(r.key).c_str(), count_cell(r.classical).c_str(),
                  count_cell(r.neu).c_str(), r.ref ? std::to_string(r.ref->classical).c_str() : "-",
                  r.ref ? std::to_string(r.ref->neu).c_str() : "-");
      if (r.classical.converged) {
        sc.x.push_back(r.key);
        sc.y.push_back(r.classical.solves());
      }
      if (r.neu.converged) {
        sn.x.push_back(r.key);
        sn.y.push_back(r.neu.solves());
      }
      if (r.ref) {
        rc.x.push_back(r.key);
        rc.y.push_back(r.ref->classical);
        rn.x.push_back(r.key);
        rn.y.push_back(r.ref->neu);
      }
    }
    Echo e = echo(t.config);
    e.emplace_back("table", t.name);
    std::vector<Series> ser;
    for (auto* s : {&sc, &sn, &rc, &rn})
      if (!s->x.empty()) ser.push_back(*s);
    emit_plot(fs::path(c.output_dir) / (t.name + "_plot"), {t.name + ": subdomain solves", t.key_name, "solves", false, std::nullopt}, ser,
              e, t.key_name, "solves");
    if (t.any_new_diverged() && !c.expect_divergence) {
      std::printf("  new method did not converge in at least one cell\n");
      failed = true;
    }
  }
  return failed ? kNumerical : kOk;
}

int verify(const ExperimentConfig& c) {
  const auto res = run_verify_suite();
  std::vector<std::vector<std::string>> rows;
  bool ok = true;
  for (const auto& r : res) {
    std::printf("%-4s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    rows.push_back({r.name, r.pass ? "pass" : "fail", r.detail});
    ok = ok && r.pass;
  }
  write_csv(fs::path(c.output_dir) / "verify.csv", echo(c), {"check", "result", "detail"}, rows);
  return ok ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain decomposition for the linearized Euler equations"};
  app.require_subcommand(1);
  Globals g;
  auto add_common = [&](CLI::App* s) {
    s->add_option("-c,--config", g.config_path, "key-value config file");
    s->add_option("-s,--set", g.overrides, "override, section.key=value")->take_all();
    s->add_option("-o,--out", g.out, "output directory (overrides EDDM_OUTPUT_DIR and output.dir)");
    s->add_option("--mn", g.mn, "normal Mach number(s)")->delimiter(',');
  };
  auto* ac = app.add_subcommand("analyze-continuous", "two-step residuals of the continuous algorithm");
  auto* ad = app.add_subcommand("analyze-discrete", "discrete Fourier convergence rates");
  auto* so = app.add_subcommand("solve", "run the DDM iterations, write histories");
  auto* sw = app.add_subcommand("sweep", "solve counts over the Mach list");
  auto* tb = app.add_subcommand("table", "reproduce a benchmark table");
  auto* ve = app.add_subcommand("verify", "invariant suite");
  for (auto* s : {ac, ad, so, sw, tb, ve}) add_common(s);
  ad->add_option("--variant", g.variant, "stabilized | unstabilized (none) | classical | all");
  so->add_option("--method", g.method, "classical | new | both");
  sw->add_option("--method", g.method, "classical | new | both");
  tb->add_option("--preset", g.preset, "table1 | table2 | table3 | mesh | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  try {
    const ExperimentConfig c = load(g);
    if (*ac) return analyze_continuous(c);
    if (*ad) return analyze_discrete(c);
    if (*so) return solve(c);
    if (*sw) return sweep(c);
    if (*tb) return table(c, g.preset);
    if (*ve) return verify(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kConfig;
}
