#pragma once

#include "eddm/harness/config.hpp"
#include "eddm/harness/output.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#ifndef EDDM_DATA_DIR
#define EDDM_DATA_DIR "data"
#endif

namespace eddm::harness {

// ---------------------------------------------------------------- reference counts

struct ReferenceRow {
  std::string table;
  double key = 0.0;
  int classical = 0;
  int neu = 0;
};

inline std::filesystem::path data_dir() {
  if (const char* e = std::getenv("EDDM_DATA_DIR"); e && *e) return e;
  return EDDM_DATA_DIR;
}

inline std::vector<ReferenceRow> load_reference(const std::filesystem::path& p = data_dir() / "reference_counts.csv") {
  std::ifstream f(p);
  if (!f) throw ConfigError("cannot open reference data '" + p.string() + "'");
  std::vector<ReferenceRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    ReferenceRow r;
    std::string k, c, n;
    if (!std::getline(ss, r.table, ',') || !std::getline(ss, k, ',') || !std::getline(ss, c, ',') ||
        !std::getline(ss, n, ','))
      throw ConfigError("malformed reference row '" + line + "'");
    r.key = std::stod(k);
    r.classical = std::stoi(c);
    r.neu = std::stoi(n);
    rows.push_back(r);
  }
  return rows;
}

inline std::optional<ReferenceRow> find_reference(const std::vector<ReferenceRow>& rows, const std::string& table,
                                                  double key) {
  for (const auto& r : rows)
    if (r.table == table && std::abs(r.key - key) <= 1e-9 * std::max(1.0, std::abs(key))) return r;
  return std::nullopt;
}

// ---------------------------------------------------------------- runs

// A local solve that breaks down marks the cell instead of aborting the whole sweep.
inline IterationLog run_cell(const ExperimentConfig& c, const Discretization& d, Method m) {
  const Decomposition dec = make_strips(d, c.strips);
  const auto pb = homogeneous_problem<double>(d, c.seed);
  try {
    return run_to_convergence(d, dec, pb, c.run_options(m)).log;
  } catch (const NumericalError& e) {
    IterationLog l;
    l.diverged = true;
    l.failure = e.what();
    l.subdomains = dec.count();
    return l;
  }
}

// Evaluates fn(k) for k in [0, n) on a small pool; results come back in index order.
template <class F>
auto ordered_pool(int n, F fn) {
  using R = decltype(fn(0));
  std::vector<std::optional<R>> out(n);
  const int width = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  for (int start = 0; start < n; start += width) {
    std::vector<std::future<R>> fut;
    for (int k = start; k < std::min(n, start + width); ++k) fut.push_back(std::async(std::launch::async, fn, k));
    for (int k = start; k < std::min(n, start + width); ++k) out[k] = fut[k - start].get();
  }
  std::vector<R> r;
  r.reserve(n);
  for (auto& o : out) r.push_back(std::move(*o));
  return r;
}

struct TableRow {
  double key = 0.0;  // Mach number, or h for the mesh table
  double mn = 0.0;
  IterationLog classical;
  IterationLog neu;
  std::optional<ReferenceRow> ref;
};

struct BenchmarkTable {
  std::string name;
  std::string key_name = "mn";
  std::vector<TableRow> rows;
  ExperimentConfig config;

  [[nodiscard]] bool any_new_diverged() const {
    for (const auto& r : rows)
      if (!r.neu.converged) return true;
    return false;
  }
};

inline std::vector<std::string> preset_names() { return {"table1", "table2", "table3", "mesh"}; }

// A preset fixes the rig; the caller's config supplies algorithm settings and output location.
inline std::vector<BenchmarkTable> reproduce_tables(const std::string& preset, const ExperimentConfig& base) {
  const auto ref = load_reference();
  std::vector<BenchmarkTable> out;
  auto mach_table = [&](const std::string& name, Profile p, int strips) {
    BenchmarkTable t;
    t.name = name;
    t.config = base;
    t.config.profile = p;
    t.config.strips = strips;
    t.config.mach_t = 0.0;
    t.config.nx = 80;
    t.config.ny = 20;
    t.config.lx = 4.0;
    t.config.ly = 1.0;
    t.config.mach_n = {0.001, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    const auto& c = t.config;
    const int n = static_cast<int>(c.mach_n.size());
    t.rows = ordered_pool(n, [&](int k) {
      TableRow r;
      r.key = r.mn = c.mach_n[k];
      const Discretization d = c.discretization(r.mn);
      r.classical = run_cell(c, d, Method::Classical);
      r.neu = run_cell(c, d, Method::New);
      r.ref = find_reference(ref, name, r.key);
      return r;
    });
    out.push_back(std::move(t));
  };
  auto mesh_table = [&](double mn) {
    BenchmarkTable t;
    t.name = "mesh_mn" + fmt(mn);
    t.key_name = "h";
    t.config = base;
    t.config.profile = Profile::Constant;
    t.config.strips = 2;
    t.config.mach_t = 0.0;
    t.config.mach_n = {mn};
    const std::vector<double> hs{0.1, 0.05, 0.025};
    t.rows = ordered_pool(3, [&](int k) {
      ExperimentConfig c = t.config;
      c.nx = static_cast<int>(std::lround(4.0 / hs[k]));
      c.ny = static_cast<int>(std::lround(1.0 / hs[k]));
      TableRow r;
      r.key = hs[k];
      r.mn = mn;
      const Discretization d = c.discretization(mn);
      r.classical = run_cell(c, d, Method::Classical);
      r.neu = run_cell(c, d, Method::New);
      r.ref = find_reference(ref, t.name, r.key);
      return r;
    });
    out.push_back(std::move(t));
  };
  const bool all = preset == "all";
  if (all || preset == "table1") mach_table("table1", Profile::Constant, 2);
  if (all || preset == "table2") mach_table("table2", Profile::MtCos, 2);
  if (all || preset == "table3") mach_table("table3", Profile::Constant, 3);
  if (all || preset == "mesh") {
    mesh_table(0.001);
    mesh_table(0.1);
  }
  if (out.empty()) throw ConfigError("unknown preset '" + preset + "' (table1, table2, table3, mesh, all)");
  return out;
}

// Cell text: solve count, or "div"/"cap"/"fail" when the run did not converge.
inline std::string count_cell(const IterationLog& l) {
  if (l.converged) return std::to_string(l.solves());
  if (!l.failure.empty()) return "fail";
  return l.diverged ? "div@" + std::to_string(l.solves()) : "cap@" + std::to_string(l.solves());
}

inline void write_table(const std::filesystem::path& p, const BenchmarkTable& t) {
  Echo e = echo(t.config);
  e.emplace_back("table", t.name);
  e.emplace_back("initial_guess", "uniform random in [-1,1], P averaged on interfaces (new method)");
  e.emplace_back("counts", "per-subdomain solves; classical = iterations, new = 2 x iterations");
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : t.rows)
    rows.push_back({fmt(r.key), count_cell(r.classical), count_cell(r.neu),
                    (r.classical.converged && r.neu.converged) ? "true" : "false",
                    r.classical.converged ? "true" : "false", r.neu.converged ? "true" : "false",
                    r.ref ? std::to_string(r.ref->classical) : "", r.ref ? std::to_string(r.ref->neu) : ""});
  write_csv(p, e,
            {t.key_name, "classical_solves", "new_solves", "converged", "classical_converged", "new_converged",
             "ref_classical", "ref_new"},
            rows);
}

}  // namespace eddm::harness
