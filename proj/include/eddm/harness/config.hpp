#pragma once

#include "eddm/ddm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace eddm::harness {

// Flat "key = value" text grouped under [section] headers; '#' and ';' start comments.
// Keys are addressed as "section.key".
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>") {
    KeyValueConfig c;
    std::string line, section;
    int ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      const auto cut = line.find_first_of("#;");
      if (cut != std::string::npos) line.erase(cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(ln) + ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) throw ConfigError(origin + ":" + std::to_string(ln) + ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(ln) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(ln) + ": empty key");
      c.set((section.empty() ? "" : section + ".") + key, trim(line.substr(eq + 1)));
    }
    return c;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    return parse(f, path);
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  // "section.key=value"
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  [[nodiscard]] bool has(const std::string& key) const { return kv_.count(key) != 0; }
  [[nodiscard]] const std::map<std::string, std::string>& entries() const { return kv_; }

  [[nodiscard]] std::string str(const std::string& key, const std::string& def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
  }
  [[nodiscard]] double num(const std::string& key, double def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : to_double(key, it->second);
  }
  [[nodiscard]] long integer(const std::string& key, long def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    const double v = to_double(key, it->second);
    if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError(key + ": expected an integer");
    return static_cast<long>(v);
  }
  [[nodiscard]] std::vector<double> list(const std::string& key, const std::vector<double>& def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
  }

  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

 private:
  static double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw ConfigError(key + ": '" + v + "' is not a number");
    return d;
  }

  std::map<std::string, std::string> kv_;
};

struct ExperimentConfig {
  // grid
  double lx = 4.0;
  double ly = 1.0;
  int nx = 80;
  int ny = 20;
  // physics
  std::vector<double> mach_n{0.001, 0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  double mach_t = 0.0;
  Profile profile = Profile::Constant;
  double cfl = 100.0;
  double rho = 1.0;
  double c = 1.0;
  // decomposition
  int strips = 2;
  // algorithm
  std::string method = "both";  // classical | new | both
  Stabilization stabilization = Stabilization::Laplacian;
  double kappa = -1.0;
  double tol = 1e-6;
  int max_iter = 500;
  double divergence = 1e6;
  Ordering ordering = Ordering::Jacobi;
  std::uint64_t seed = 20240607;
  bool expect_divergence = false;
  // analysis
  int xi_samples = 20;
  XiSpacing xi_spacing = XiSpacing::Uniform;
  double xi_min = 0.0;
  std::string variant = "all";  // stabilized | unstabilized | classical | all
  std::vector<double> xi_continuous{};  // empty: log sweep +-1e-2..1e2
  // output
  std::string output_dir = "out";

  [[nodiscard]] RunOptions run_options(Method m) const {
    RunOptions o;
    o.method = m;
    o.stabilization = stabilization;
    o.kappa = kappa;
    o.tol = tol;
    o.max_iter = max_iter;
    o.divergence = divergence;
    o.ordering = ordering;
    o.seed = seed;
    return o;
  }

  [[nodiscard]] std::vector<Method> methods() const {
    if (method == "both") return {Method::Classical, Method::New};
    return {parse_method(method)};
  }

  [[nodiscard]] Discretization discretization(double mn) const {
    return make_rig(nx, ny, lx, ly, cfl, profile, mn, mach_t, rho, c);
  }
};

inline const char* env_output_dir() { return std::getenv("EDDM_OUTPUT_DIR"); }

inline ExperimentConfig resolve(const KeyValueConfig& kv) {
  static const char* known[] = {
      "grid.lx", "grid.ly", "grid.nx", "grid.ny", "physics.mach_n", "physics.mach_t", "physics.profile",
      "physics.cfl", "physics.rho", "physics.c", "decomposition.strips", "algorithm.method",
      "algorithm.stabilization", "algorithm.kappa", "algorithm.tol", "algorithm.max_iter", "algorithm.divergence",
      "algorithm.ordering", "algorithm.seed", "algorithm.expect_divergence", "analysis.xi_samples",
      "analysis.xi_spacing", "analysis.xi_min", "analysis.variant", "analysis.xi_continuous", "output.dir"};
  for (const auto& [k, v] : kv.entries())
    if (std::find(std::begin(known), std::end(known), k) == std::end(known)) throw ConfigError("unknown key '" + k + "'");

  ExperimentConfig c;
  c.lx = kv.num("grid.lx", c.lx);
  c.ly = kv.num("grid.ly", c.ly);
  c.nx = static_cast<int>(kv.integer("grid.nx", c.nx));
  c.ny = static_cast<int>(kv.integer("grid.ny", c.ny));
  c.mach_n = kv.list("physics.mach_n", c.mach_n);
  c.mach_t = kv.num("physics.mach_t", c.mach_t);
  c.profile = parse_profile(kv.str("physics.profile", to_string(c.profile)));
  c.cfl = kv.num("physics.cfl", c.cfl);
  c.rho = kv.num("physics.rho", c.rho);
  c.c = kv.num("physics.c", c.c);
  c.strips = static_cast<int>(kv.integer("decomposition.strips", c.strips));
  c.method = kv.str("algorithm.method", c.method);
  if (c.method != "both") parse_method(c.method);
  c.stabilization = parse_stabilization(kv.str("algorithm.stabilization", to_string(c.stabilization)));
  const std::string kap = kv.str("algorithm.kappa", "auto");
  c.kappa = kap == "auto" ? -1.0 : kv.num("algorithm.kappa", -1.0);
  c.tol = kv.num("algorithm.tol", c.tol);
  c.max_iter = static_cast<int>(kv.integer("algorithm.max_iter", c.max_iter));
  c.divergence = kv.num("algorithm.divergence", c.divergence);
  c.ordering = parse_ordering(kv.str("algorithm.ordering", to_string(c.ordering)));
  c.seed = static_cast<std::uint64_t>(kv.integer("algorithm.seed", static_cast<long>(c.seed)));
  const std::string ed = kv.str("algorithm.expect_divergence", "false");
  if (ed != "true" && ed != "false") throw ConfigError("algorithm.expect_divergence must be true or false");
  c.expect_divergence = ed == "true";
  c.xi_samples = static_cast<int>(kv.integer("analysis.xi_samples", c.xi_samples));
  const std::string sp = kv.str("analysis.xi_spacing", "uniform");
  if (sp != "uniform" && sp != "log") throw ConfigError("analysis.xi_spacing must be uniform or log");
  c.xi_spacing = sp == "log" ? XiSpacing::Log : XiSpacing::Uniform;
  c.xi_min = kv.num("analysis.xi_min", c.xi_min);
  c.variant = kv.str("analysis.variant", c.variant);
  if (c.variant == "none") c.variant = "unstabilized";
  if (c.variant == "laplacian") c.variant = "stabilized";
  if (c.variant != "stabilized" && c.variant != "unstabilized" && c.variant != "classical" && c.variant != "all")
    throw ConfigError("analysis.variant must be stabilized, unstabilized, classical or all");
  if (kv.has("analysis.xi_continuous")) c.xi_continuous = kv.list("analysis.xi_continuous", {});
  c.output_dir = kv.str("output.dir", c.output_dir);
  if (const char* env = env_output_dir(); env && *env) c.output_dir = env;

  if (c.nx < 2 || c.ny < 2) throw ConfigError("grid needs nx, ny >= 2");
  if (!(c.lx > 0 && c.ly > 0)) throw ConfigError("grid extents must be positive");
  if (c.strips < 1 || c.strips > c.nx) throw ConfigError("decomposition.strips out of range");
  if (!(c.cfl > 0) || !(c.rho > 0) || !(c.c > 0)) throw ConfigError("cfl, rho, c must be positive");
  if (!(c.tol > 0 && c.tol < 1)) throw ConfigError("algorithm.tol must lie in (0, 1)");
  if (c.max_iter < 1) throw ConfigError("algorithm.max_iter must be >= 1");
  if (c.xi_samples < 2) throw ConfigError("analysis.xi_samples must be >= 2");
  for (double mn : c.mach_n) {
    if (!(mn > 0 && mn < 1)) throw ConfigError("mach_n values must lie in (0, 1)");
    if (mn * mn + c.mach_t * c.mach_t >= 1) throw ConfigError("non-subsonic physics: mach_n^2 + mach_t^2 >= 1");
  }
  return c;
}

// Fully resolved configuration plus the derived time step for one Mach value, one "key = value" per line.
inline std::vector<std::pair<std::string, std::string>> echo(const ExperimentConfig& c,
                                                             const Discretization* d = nullptr) {
  auto f = [](double x) {
    std::ostringstream o;
    o.precision(12);
    o << x;
    return o.str();
  };
  std::string mns;
  for (std::size_t k = 0; k < c.mach_n.size(); ++k) mns += (k ? "," : "") + f(c.mach_n[k]);
  std::vector<std::pair<std::string, std::string>> e{
      {"grid.lx", f(c.lx)},
      {"grid.ly", f(c.ly)},
      {"grid.nx", std::to_string(c.nx)},
      {"grid.ny", std::to_string(c.ny)},
      {"physics.mach_n", mns},
      {"physics.mach_t", f(c.mach_t)},
      {"physics.profile", to_string(c.profile)},
      {"physics.cfl", f(c.cfl)},
      {"physics.rho", f(c.rho)},
      {"physics.c", f(c.c)},
      {"decomposition.strips", std::to_string(c.strips)},
      {"algorithm.method", c.method},
      {"algorithm.stabilization", to_string(c.stabilization)},
      {"algorithm.kappa", c.kappa < 0 ? "auto(c/(2 rho u))" : f(c.kappa)},
      {"algorithm.tol", f(c.tol)},
      {"algorithm.max_iter", std::to_string(c.max_iter)},
      {"algorithm.divergence", f(c.divergence)},
      {"algorithm.ordering", to_string(c.ordering)},
      {"algorithm.seed", std::to_string(c.seed)},
      {"algorithm.expect_divergence", c.expect_divergence ? "true" : "false"},
      {"analysis.xi_samples", std::to_string(c.xi_samples)},
      {"analysis.xi_spacing", c.xi_spacing == XiSpacing::Log ? "log" : "uniform"},
      {"analysis.xi_min", f(c.xi_min)},
      {"analysis.variant", c.variant},
      {"output.dir", c.output_dir},
  };
  if (d) {
    e.emplace_back("derived.dx", f(d->grid.dx));
    e.emplace_back("derived.dy", f(d->grid.dy));
    e.emplace_back("derived.dt", f(d->grid.dt));
    e.emplace_back("derived.beta", f(d->beta()));
    e.emplace_back("derived.dbar_x", f(d->grid.dbar_x()));
    e.emplace_back("derived.dbar_y", f(d->grid.dbar_y()));
  }
  return e;
}

}  // namespace eddm::harness
