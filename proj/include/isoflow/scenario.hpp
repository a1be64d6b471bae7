#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isoflow/kernel.hpp"
#include "isoflow/medium.hpp"
#include "isoflow/solver.hpp"

namespace isoflow {

struct KernelSpec {
  std::string family = "gaussian";
  double sigma = 1.0;   // gaussian
  double scale = 1.0;   // laplace
  double radius = 1.0;  // uniform-ball
  std::vector<double> radii, values;  // table
  double trunc_tol = default_trunc_tol;
  bool renormalize = true;

  bool operator==(const KernelSpec&) const = default;
};

struct MediumSpec {
  std::string family = "constant";
  double value = 1.0;      // constant
  double amplitude = 1.0;  // power-decay, gaussian-decay, exponential-decay
  double exponent = 2.0;   // power-decay
  double sigma = 1.0;      // gaussian-decay
  double scale = 1.0;      // exponential-decay
  std::vector<double> radii, values;  // custom
  std::string tail = "unknown";       // custom
  double trust_radius = 0.0;          // custom
  std::optional<double> floor;

  bool operator==(const MediumSpec&) const = default;
};

struct GridSpec {
  int dim = 1;
  double half_extent = 10.0;
  int points = 201;

  bool operator==(const GridSpec&) const = default;
};

struct InitialSpec {
  std::string family = "gaussian-bump";
  double value = 1.0;      // constant, indicator
  double amplitude = 1.0;  // gaussian-bump, quadratic, power-growth
  double width = 1.0;      // gaussian-bump
  double lower = -1.0, upper = 1.0;  // indicator (per axis)
  double exponent = 2.0;   // power-growth
  std::vector<double> radii, values;  // table

  bool operator==(const InitialSpec&) const = default;
};

struct SolverSpec {
  std::string scheme = "exponential";
  double dt = 1e-2;
  double t_end = 1.0;
  std::string boundary = "mask";
  std::optional<double> mask_radius;
  int snapshot_every = 1;
  double picard_tol = 1e-12;
  std::vector<int> approx_n;
  std::optional<double> alpha0;

  bool operator==(const SolverSpec&) const = default;
};

struct OutputSpec {
  std::string csv;
  std::string snapshot_dir;
  bool weighted_mean = false;
  double lp_p = 2.0;
  double lp_radius = 1.0;

  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  std::string name = "unnamed";
  /// "check" scenarios back an asserted property; "explore" ones only record output.
  std::string kind = "check";
  KernelSpec kernel;
  MediumSpec medium;
  GridSpec grid;
  InitialSpec initial;
  SolverSpec solver;
  OutputSpec outputs;

  bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------- construction

inline Kernel build_kernel(const KernelSpec& k, int dim) {
  if (k.family == "gaussian") return Kernel::gaussian(k.sigma, dim);
  if (k.family == "laplace") return Kernel::laplace(k.scale, dim);
  if (k.family == "uniform-ball") return Kernel::uniform_ball(k.radius, dim);
  if (k.family == "table") return Kernel::tabulated(k.radii, k.values, dim);
  throw ConfigError("kernel: unknown family '" + k.family + "'");
}

inline TailClass parse_tail(const std::string& s) {
  if (s == "integrable") return TailClass::integrable;
  if (s == "nonintegrable") return TailClass::nonintegrable;
  if (s == "unknown") return TailClass::unknown;
  throw ConfigError("medium: tail must be integrable, nonintegrable or unknown");
}

inline Medium build_medium(const MediumSpec& m, int dim) {
  Medium out = [&] {
    if (m.family == "constant") return Medium::constant(m.value, dim);
    if (m.family == "power-decay") return Medium::power_decay(m.amplitude, m.exponent, dim);
    if (m.family == "gaussian-decay") return Medium::gaussian_decay(m.amplitude, m.sigma, dim);
    if (m.family == "exponential-decay") return Medium::exponential_decay(m.amplitude, m.scale, dim);
    if (m.family == "custom") return Medium::custom(m.radii, m.values, parse_tail(m.tail), m.trust_radius, dim);
    throw ConfigError("medium: unknown family '" + m.family + "'");
  }();
  return m.floor ? out.floored(*m.floor) : out;
}

inline Grid build_grid(const GridSpec& g) { return Grid::make(g.dim, g.half_extent, g.points); }

namespace detail {

inline double table_lookup(const std::vector<double>& r, const std::vector<double>& v, double x) {
  if (x >= r.back()) return v.back();
  const auto it = std::upper_bound(r.begin(), r.end(), x);
  const std::size_t j = std::size_t(it - r.begin());
  const double t = (x - r[j - 1]) / (r[j] - r[j - 1]);
  return v[j - 1] + t * (v[j] - v[j - 1]);
}

}  // namespace detail

/// True when the initial family grows without bound.
inline bool initial_unbounded(const InitialSpec& s) {
  return s.family == "quadratic" || (s.family == "power-growth" && s.exponent > 0.0);
}

inline Field build_initial(const InitialSpec& s, const Grid& g) {
  if (s.family == "constant") return Field(g, s.value);
  if (s.family == "gaussian-bump")
    return Field::from_function(g, [&](const Point& x) { return s.amplitude * std::exp(-norm2(x) / (s.width * s.width)); });
  if (s.family == "indicator")
    return Field::from_function(g, [&](const Point& x) {
      for (int d = 0; d < g.dim; ++d)
        if (x[d] < s.lower || x[d] > s.upper) return 0.0;
      return s.value;
    });
  if (s.family == "quadratic")
    return Field::from_function(g, [&](const Point& x) { return s.amplitude * (1.0 + norm2(x)); });
  if (s.family == "power-growth")
    return Field::from_function(g, [&](const Point& x) { return s.amplitude * (1.0 + std::pow(norm(x), s.exponent)); });
  if (s.family == "table") {
    if (s.radii.empty() || s.radii.size() != s.values.size() || s.radii.front() != 0.0)
      throw ConfigError("initial: table needs matching radii and values starting at r = 0");
    for (std::size_t i = 1; i < s.radii.size(); ++i)
      if (!(s.radii[i] > s.radii[i - 1])) throw ConfigError("initial: table radii must increase");
    return Field::from_function(g, [&](const Point& x) { return detail::table_lookup(s.radii, s.values, norm(x)); });
  }
  throw ConfigError("initial: unknown family '" + s.family + "'");
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "exponential") return Scheme::exponential;
  if (s == "euler") return Scheme::euler;
  if (s == "picard-oracle") return Scheme::picard_oracle;
  throw ConfigError("solver: unknown scheme '" + s + "'");
}

inline Boundary build_boundary(const Scenario& sc) {
  if (sc.solver.boundary == "zero-extend") {
    if (sc.solver.mask_radius) throw ConfigError("solver: mask_radius given with boundary = zero-extend");
    return Boundary::zero_extend();
  }
  if (sc.solver.boundary == "mask") return Boundary::mask(sc.solver.mask_radius.value_or(sc.grid.half_extent));
  throw ConfigError("solver: boundary must be mask or zero-extend");
}

inline SolverConfig build_solver_config(const Scenario& sc) {
  SolverConfig c;
  c.scheme = parse_scheme(sc.solver.scheme);
  c.dt = sc.solver.dt;
  c.t_end = sc.solver.t_end;
  c.boundary = build_boundary(sc);
  c.snapshot_every = sc.solver.snapshot_every;
  c.floor_alpha = sc.medium.floor;
  c.picard_tol = sc.solver.picard_tol;
  return c;
}

/// Everything a run needs, built once from a validated scenario.
struct Setup {
  Grid grid;
  Kernel kernel;
  Stencil stencil;
  Medium medium;
  MediumClassification classification;
  Field u0;
  SolverConfig solver;
};

/// Cross-field validation; throws ConfigError naming the offending field.
inline Setup build_setup(const Scenario& sc) {
  auto field = [](const std::string& where, auto&& make) {
    try {
      return make();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  };
  Grid g = field("grid", [&] { return build_grid(sc.grid); });
  Kernel k = field("kernel", [&] { return build_kernel(sc.kernel, g.dim); });
  Stencil s = field("kernel", [&] { return discretize(k, g.spacing(), sc.kernel.renormalize, sc.kernel.trunc_tol); });
  if (2 * s.reach() + 1 > g.points)
    throw ConfigError("kernel: stencil width " + std::to_string(2 * s.reach() + 1) + " exceeds grid points " +
                      std::to_string(g.points) + " (enlarge the grid or shrink the kernel)");
  Medium m = field("medium", [&] { return build_medium(sc.medium, g.dim); });
  const auto cls = m.classify();
  if (cls.integrable == TailClass::unknown)
    throw ConfigError("medium: classification unknown; declare tail = integrable or nonintegrable");
  if (sc.outputs.weighted_mean && !cls.is_integrable())
    throw ConfigError("outputs.weighted_mean: E_ρ undefined, medium is not integrable");
  Field u0 = field("initial", [&] { return build_initial(sc.initial, g); });
  SolverConfig cfg = field("solver", [&] { return build_solver_config(sc); });

  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("solver.dt: must be positive");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("solver.t_end: must be >= 0");
  field("solver.t_end", [&] { return step_count(cfg.t_end, cfg.dt); });
  if (cfg.snapshot_every < 1) throw ConfigError("solver.snapshot_every: must be >= 1");
  if (cfg.boundary.is_mask() && !(*cfg.boundary.mask_radius > 0.0))
    throw ConfigError("solver.mask_radius: must be positive");
  if (cfg.scheme == Scheme::euler) {
    const double limit = stability_dt(m, g);
    if (cfg.dt > limit * (1.0 + 1e-12))
      throw ConfigError("solver.dt: " + std::to_string(cfg.dt) + " exceeds euler stability_dt = " +
                        std::to_string(limit) + " (min rho on the grid)");
  }
  if (cfg.scheme == Scheme::picard_oracle && !sc.solver.approx_n.empty())
    throw ConfigError("solver.approx_n: approximation runs need a time-stepping scheme");
  if (!sc.solver.approx_n.empty()) {
    for (std::size_t i = 0; i < sc.solver.approx_n.size(); ++i)
      if (sc.solver.approx_n[i] < 1 || (i > 0 && sc.solver.approx_n[i] <= sc.solver.approx_n[i - 1]))
        throw ConfigError("solver.approx_n: must be positive and strictly increasing");
  }
  if (initial_unbounded(sc.initial)) {
    if (sc.initial.family == "power-growth" && sc.initial.exponent > 2.0)
      throw ConfigError("initial.exponent: growth faster than |x|^2 is outside the well-posedness class");
    const auto base = build_medium([&] {
      MediumSpec b = sc.medium;
      b.floor.reset();
      return b;
    }(), g.dim).classify();
    if (!base.decay_floor)
      throw ConfigError("medium: unbounded initial data need rho >= eta / (1 + |x|^gamma) with gamma <= 2");
  }
  if (!(sc.outputs.lp_p >= 1.0)) throw ConfigError("outputs.lp_p: must be >= 1");
  if (!(sc.outputs.lp_radius > 0.0)) throw ConfigError("outputs.lp_radius: must be positive");
  if (sc.kind != "check" && sc.kind != "explore") throw ConfigError("class: must be check or explore");
  return Setup{g, std::move(k), std::move(s), std::move(m), cls, std::move(u0), cfg};
}

// ---------------------------------------------------------------- text form

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

inline std::string fmt(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Entry {
  std::string value;
  int line;
};

// One section's key/value pairs; keys are consumed as they are read so leftovers can be reported.
class Section {
 public:
  Section(std::string name, int line) : name_(std::move(name)), line_(line) {}

  void add(const std::string& key, std::string value, int line) {
    if (auto it = entries_.find(key); it != entries_.end())
      throw ConfigError("duplicate key '" + key + "' in [" + name_ + "] (first at line " +
                            std::to_string(it->second.line) + ")",
                        line);
    entries_.emplace(key, Entry{std::move(value), line});
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string str(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing key '" + key + "' in [" + name_ + "]", line_);
    last_line_ = it->second.line;
    std::string v = it->second.value;
    entries_.erase(it);
    return v;
  }

  std::string str(const std::string& key, const std::string& fallback) { return has(key) ? str(key) : fallback; }

  double num(const std::string& key) {
    const std::string v = str(key);
    return to_double(v, key);
  }

  double num(const std::string& key, double fallback) { return has(key) ? num(key) : fallback; }

  std::optional<double> opt_num(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return num(key);
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      str(key);
    }
    const std::string v = str(key);
    std::size_t pos = 0;
    int out = 0;
    try {
      out = std::stoi(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || v.empty()) throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'", last_line_);
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'", last_line_);
  }

  std::vector<double> list(const std::string& key) {
    std::istringstream in(str(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(tok, key));
    return out;
  }

  std::vector<int> int_list(const std::string& key) {
    std::vector<int> out;
    for (double v : list(key)) {
      if (v != std::floor(v)) throw ConfigError("key '" + key + "': expected integers", last_line_);
      out.push_back(int(v));
    }
    return out;
  }

  void finish() const {
    if (entries_.empty()) return;
    const auto& [key, e] = *entries_.begin();
    throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", e.line);
  }

  int line() const { return line_; }

 private:
  double to_double(const std::string& v, const std::string& key) const {
    std::size_t pos = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != v.size() || v.empty()) throw ConfigError("key '" + key + "': expected a number, got '" + v + "'", last_line_);
    return out;
  }

  std::string name_;
  int line_;
  int last_line_ = 0;
  std::map<std::string, Entry> entries_;
};

}  // namespace detail

inline const std::vector<std::string>& scenario_sections() {
  static const std::vector<std::string> names{"kernel", "medium", "grid", "initial", "solver", "outputs"};
  return names;
}

/// Parses the sectioned key = value form. Comments start with '#'.
inline Scenario parse_scenario_text(const std::string& text) {
  using detail::Section;
  detail::Section top("top", 0);
  std::map<std::string, Section> sections;
  Section* current = &top;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", lineno);
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      const auto& known = scenario_sections();
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError("unknown section [" + name + "]", lineno);
      if (sections.count(name)) throw ConfigError("duplicate section [" + name + "]", lineno);
      current = &sections.emplace(name, Section(name, lineno)).first->second;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineno);
    current->add(key, value, lineno);
  }
  for (const auto& name : scenario_sections())
    if (!sections.count(name)) throw ConfigError("missing section [" + name + "]");

  Scenario sc;
  sc.name = top.str("name", sc.name);
  sc.kind = top.str("class", sc.kind);
  top.finish();

  {
    Section& s = sections.at("kernel");
    auto& k = sc.kernel;
    k.family = s.str("family");
    if (k.family == "gaussian")
      k.sigma = s.num("sigma");
    else if (k.family == "laplace")
      k.scale = s.num("scale");
    else if (k.family == "uniform-ball")
      k.radius = s.num("radius");
    else if (k.family == "table") {
      k.radii = s.list("radii");
      k.values = s.list("values");
    } else
      throw ConfigError("kernel: unknown family '" + k.family + "'", s.line());
    k.trunc_tol = s.num("trunc_tol", k.trunc_tol);
    k.renormalize = s.boolean("renormalize", k.renormalize);
    s.finish();
  }
  {
    Section& s = sections.at("medium");
    auto& m = sc.medium;
    m.family = s.str("family");
    if (m.family == "constant")
      m.value = s.num("value");
    else if (m.family == "power-decay") {
      m.amplitude = s.num("amplitude");
      m.exponent = s.num("exponent");
    } else if (m.family == "gaussian-decay") {
      m.amplitude = s.num("amplitude");
      m.sigma = s.num("sigma");
    } else if (m.family == "exponential-decay") {
      m.amplitude = s.num("amplitude");
      m.scale = s.num("scale");
    } else if (m.family == "custom") {
      m.radii = s.list("radii");
      m.values = s.list("values");
      m.tail = s.str("tail");
      m.trust_radius = s.num("trust_radius", 0.0);
    } else
      throw ConfigError("medium: unknown family '" + m.family + "'", s.line());
    m.floor = s.opt_num("floor");
    s.finish();
  }
  {
    Section& s = sections.at("grid");
    sc.grid.dim = s.integer("dim");
    sc.grid.half_extent = s.num("half_extent");
    sc.grid.points = s.integer("points");
    s.finish();
  }
  {
    Section& s = sections.at("initial");
    auto& u = sc.initial;
    u.family = s.str("family");
    if (u.family == "constant")
      u.value = s.num("value");
    else if (u.family == "gaussian-bump") {
      u.amplitude = s.num("amplitude");
      u.width = s.num("width");
    } else if (u.family == "indicator") {
      u.value = s.num("value", u.value);
      u.lower = s.num("lower");
      u.upper = s.num("upper");
    } else if (u.family == "quadratic")
      u.amplitude = s.num("amplitude", u.amplitude);
    else if (u.family == "power-growth") {
      u.amplitude = s.num("amplitude", u.amplitude);
      u.exponent = s.num("exponent");
    } else if (u.family == "table") {
      u.radii = s.list("radii");
      u.values = s.list("values");
    } else
      throw ConfigError("initial: unknown family '" + u.family + "'", s.line());
    s.finish();
  }
  {
    Section& s = sections.at("solver");
    auto& v = sc.solver;
    v.scheme = s.str("scheme");
    v.dt = s.num("dt");
    v.t_end = s.num("t_end");
    v.boundary = s.str("boundary");
    v.mask_radius = s.opt_num("mask_radius");
    v.snapshot_every = s.integer("snapshot_every", v.snapshot_every);
    v.picard_tol = s.num("picard_tol", v.picard_tol);
    if (s.has("approx_n")) v.approx_n = s.int_list("approx_n");
    v.alpha0 = s.opt_num("alpha0");
    s.finish();
  }
  {
    Section& s = sections.at("outputs");
    auto& o = sc.outputs;
    o.csv = s.str("csv", "");
    o.snapshot_dir = s.str("snapshot_dir", "");
    o.weighted_mean = s.boolean("weighted_mean", false);
    o.lp_p = s.num("lp_p", o.lp_p);
    o.lp_radius = s.num("lp_radius", o.lp_radius);
    s.finish();
  }
  return sc;
}

inline Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

/// Canonical text form; parse_scenario_text(emit_scenario(s)) == s.
inline std::string emit_scenario(const Scenario& sc) {
  using detail::fmt;
  std::ostringstream o;
  o << "name = " << sc.name << "\n";
  o << "class = " << sc.kind << "\n";

  const auto& k = sc.kernel;
  o << "\n[kernel]\nfamily = " << k.family << "\n";
  if (k.family == "gaussian") o << "sigma = " << fmt(k.sigma) << "\n";
  if (k.family == "laplace") o << "scale = " << fmt(k.scale) << "\n";
  if (k.family == "uniform-ball") o << "radius = " << fmt(k.radius) << "\n";
  if (k.family == "table") o << "radii = " << fmt(k.radii) << "\nvalues = " << fmt(k.values) << "\n";
  o << "trunc_tol = " << fmt(k.trunc_tol) << "\nrenormalize = " << (k.renormalize ? "true" : "false") << "\n";

  const auto& m = sc.medium;
  o << "\n[medium]\nfamily = " << m.family << "\n";
  if (m.family == "constant") o << "value = " << fmt(m.value) << "\n";
  if (m.family == "power-decay") o << "amplitude = " << fmt(m.amplitude) << "\nexponent = " << fmt(m.exponent) << "\n";
  if (m.family == "gaussian-decay") o << "amplitude = " << fmt(m.amplitude) << "\nsigma = " << fmt(m.sigma) << "\n";
  if (m.family == "exponential-decay") o << "amplitude = " << fmt(m.amplitude) << "\nscale = " << fmt(m.scale) << "\n";
  if (m.family == "custom")
    o << "radii = " << fmt(m.radii) << "\nvalues = " << fmt(m.values) << "\ntail = " << m.tail
      << "\ntrust_radius = " << fmt(m.trust_radius) << "\n";
  if (m.floor) o << "floor = " << fmt(*m.floor) << "\n";

  o << "\n[grid]\ndim = " << sc.grid.dim << "\nhalf_extent = " << fmt(sc.grid.half_extent)
    << "\npoints = " << sc.grid.points << "\n";

  const auto& u = sc.initial;
  o << "\n[initial]\nfamily = " << u.family << "\n";
  if (u.family == "constant") o << "value = " << fmt(u.value) << "\n";
  if (u.family == "gaussian-bump") o << "amplitude = " << fmt(u.amplitude) << "\nwidth = " << fmt(u.width) << "\n";
  if (u.family == "indicator")
    o << "value = " << fmt(u.value) << "\nlower = " << fmt(u.lower) << "\nupper = " << fmt(u.upper) << "\n";
  if (u.family == "quadratic") o << "amplitude = " << fmt(u.amplitude) << "\n";
  if (u.family == "power-growth") o << "amplitude = " << fmt(u.amplitude) << "\nexponent = " << fmt(u.exponent) << "\n";
  if (u.family == "table") o << "radii = " << fmt(u.radii) << "\nvalues = " << fmt(u.values) << "\n";

  const auto& v = sc.solver;
  o << "\n[solver]\nscheme = " << v.scheme << "\ndt = " << fmt(v.dt) << "\nt_end = " << fmt(v.t_end)
    << "\nboundary = " << v.boundary << "\n";
  if (v.mask_radius) o << "mask_radius = " << fmt(*v.mask_radius) << "\n";
  o << "snapshot_every = " << v.snapshot_every << "\npicard_tol = " << fmt(v.picard_tol) << "\n";
  if (!v.approx_n.empty()) o << "approx_n = " << fmt(v.approx_n) << "\n";
  if (v.alpha0) o << "alpha0 = " << fmt(*v.alpha0) << "\n";

  const auto& out = sc.outputs;
  o << "\n[outputs]\n";
  if (!out.csv.empty()) o << "csv = " << out.csv << "\n";
  if (!out.snapshot_dir.empty()) o << "snapshot_dir = " << out.snapshot_dir << "\n";
  o << "weighted_mean = " << (out.weighted_mean ? "true" : "false") << "\nlp_p = " << fmt(out.lp_p)
    << "\nlp_radius = " << fmt(out.lp_radius) << "\n";
  return o.str();
}

/// 64-bit FNV-1a of the canonical text form.
inline std::uint64_t config_hash(const Scenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : emit_scenario(sc)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string config_hash_hex(const Scenario& sc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(sc)));
  return buf;
}

/// Sets one field from a "section.key" (or bare solver key) path, as used by sweeps.
inline Scenario with_parameter(const Scenario& sc, const std::string& path, const std::string& value) {
  std::string text = emit_scenario(sc);
  std::string section = "solver", key = path;
  if (const auto dot = path.find('.'); dot != std::string::npos) {
    section = path.substr(0, dot);
    key = path.substr(dot + 1);
  }
  std::istringstream in(text);
  std::ostringstream out;
  std::string line, current;
  bool replaced = false;
  auto flush_missing = [&] {
    if (current == section && !replaced) {
      out << key << " = " << value << "\n";
      replaced = true;
    }
  };
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (!t.empty() && t.front() == '[') {
      flush_missing();
      current = t.substr(1, t.size() - 2);
    } else if (current == section && t.rfind(key + " =", 0) == 0) {
      out << key << " = " << value << "\n";
      replaced = true;
      continue;
    }
    out << line << "\n";
  }
  flush_missing();
  return parse_scenario_text(out.str());
}

}  // namespace isoflow
