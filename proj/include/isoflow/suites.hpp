#pragma once

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "isoflow/convolution.hpp"
#include "isoflow/diagnostics.hpp"
#include "isoflow/solver.hpp"
#include "isoflow/verify.hpp"

namespace isoflow::verify {

struct Check {
  std::string name;
  bool passed = false;
  double metric = 0.0;
};

inline std::string format_check(const Check& c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", c.metric);
  return "CHECK " + c.name + (c.passed ? " PASS " : " FAIL ") + buf;
}

/// min over r >= 0 of (1 + r^2) / (1 + r^gamma) for 0 <= gamma <= 2: the factor by which
/// eta / (1 + |x|^gamma) can undershoot eta / (1 + |x|^2) near the origin.
inline double barrier_factor(double gamma) {
  if (gamma >= 2.0) return 1.0;
  auto f = [gamma](double r) { return (1.0 + r * r) / (1.0 + std::pow(r, gamma)); };
  const auto [r, v] = boost::math::tools::brent_find_minima(f, 0.0, 1.0, 50);
  (void)r;
  return std::min(v, f(0.0));
}

inline std::vector<Check> suite_conservation() {
  const Grid g = Grid::make(1, 20.0, 401);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Medium m = Medium::power_decay(1.0, 2.0);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  std::vector<Check> out;
  for (Scheme sch : {Scheme::exponential, Scheme::euler}) {
    const double dt = sch == Scheme::euler ? 0.9 * stability_dt(m, g) : 1e-2;
    const Integrator integ(g, m, s, Boundary::mask(20.0), sch, dt);
    const Trajectory tr = simulate(u0, integ, 1000 * dt, 100);
    const double m0 = mass(tr.snapshots.front().u, integ.rho(), integ.op().mask());
    double drift = 0.0;
    for (const auto& sn : tr.snapshots) drift = std::max(drift, std::abs(mass(sn.u, integ.rho(), integ.op().mask()) - m0) / m0);
    out.push_back({"conservation." + to_string(sch), drift <= 1e-11, drift});
  }
  return out;
}

inline std::vector<Check> suite_comparison() {
  const Grid g = Grid::make(1, 20.0, 201);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
  std::vector<Check> out;
  for (const auto& [label, boundary] : {std::pair{"mask", Boundary::mask(20.0)}, std::pair{"zero-extend", Boundary::zero_extend()}}) {
    const Integrator integ(g, Medium::power_decay(1.0, 2.0), s, boundary, Scheme::exponential, 0.05);
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      Field a(g), b(g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        a[i] = U(rng);
        b[i] = a[i] + (P(rng) < 0.3 ? 0.0 : P(rng));
      }
      const auto rep = comparison_harness(a, b, integ, 1.0, 5);
      worst = std::max(worst, std::max(rep.max_violation, rep.bound_violation) / std::max(rep.scale, 1e-300));
      ok = ok && rep.passed;
    }
    out.push_back({std::string("comparison.") + label, ok, worst});
  }
  return out;
}

inline std::vector<Check> suite_supersolution() {
  const Grid g = Grid::make(1, 20.0, 401);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const double sm = stencil_second_moment(s, g.spacing());
  std::vector<Check> out;
  for (double gamma : {0.0, 1.0, 2.0}) {
    const Medium m = Medium::power_decay(1.0, gamma);
    const double eta = m.classify().decay_floor->eta;
    const std::string tag = "gamma" + std::to_string(int(gamma));
    const double r_lemma = supersolution_residual(1.0, sm / eta, m, s, g, 0.0).min_residual;
    out.push_back({"supersolution.lambda_V_over_eta." + tag, r_lemma >= -1e-10, r_lemma});
    const double r_half = supersolution_residual(1.0, 0.5 * sm / eta, m, s, g, 0.0).min_residual;
    out.push_back({"supersolution.sharpness_half_lambda." + tag, r_half < 0.0, r_half});
    const double c = barrier_factor(gamma);
    const double r_fixed = supersolution_residual(1.0, sm / (c * eta), m, s, g, 0.0).min_residual;
    out.push_back({"supersolution.lambda_V_over_c_eta." + tag, r_fixed >= -1e-10, r_fixed});
  }
  return out;
}

inline std::vector<Check> suite_quadratic() {
  std::vector<Check> out;
  struct Case {
    const char* name;
    Kernel k;
    Grid g;
  };
  const std::vector<Case> cases{{"gaussian", Kernel::gaussian(1.0), Grid::make(1, 30.0, 601)},
                                {"laplace", Kernel::laplace(0.5), Grid::make(1, 30.0, 601)},
                                {"uniform-ball", Kernel::uniform_ball(1.0), Grid::make(1, 10.0, 201)},
                                {"gaussian-2d", Kernel::gaussian(1.0, 2), Grid::make(2, 12.0, 97)}};
  for (const auto& c : cases) {
    const Stencil s = discretize(c.k, c.g.spacing());
    const auto rep = quadratic_identity(s, c.g, Point{0.37, c.g.dim == 2 ? -0.21 : 0.0});
    const double mismatch = std::abs(rep.mean_value - rep.second_moment) / rep.second_moment;
    out.push_back({std::string("quadratic.") + c.name, rep.relative_spread <= 1e-10 && mismatch <= 1e-10,
                   std::max(rep.relative_spread, mismatch)});
  }
  return out;
}

inline std::vector<Check> suite_nullspace() {
  std::vector<Check> out;
  for (int M : {21, 41, 81}) {
    const Grid g = Grid::make(1, 5.0, M);
    const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
    const auto rep = steady_state_nullspace(s, DomainMask::whole(g));
    out.push_back({"nullspace.connected.M" + std::to_string(M), rep.dimension == 1 && rep.basis_residual <= 1e-10,
                   double(rep.dimension)});
  }
  {
    const Grid g = Grid::make(2, 5.0, 21);
    const Stencil s = discretize(Kernel::gaussian(1.0, 2), g.spacing());
    const auto rep = steady_state_nullspace(s, DomainMask::whole(g));
    out.push_back({"nullspace.connected.2d", rep.dimension == 1 && rep.basis_residual <= 1e-10, double(rep.dimension)});
  }
  {
    const Grid g = Grid::make(1, 5.0, 41);
    const Stencil s = discretize(Kernel::uniform_ball(1.0), g.spacing());
    const auto split = DomainMask::from_predicate(g, [](const Point& x) { return std::abs(x[0]) > 1.6 || std::abs(x[0]) < 0.4; });
    const auto rep = steady_state_nullspace(s, split);
    out.push_back({"nullspace.split.1d", rep.dimension == rep.components && rep.components == 3, double(rep.dimension)});
  }
  return out;
}

inline std::vector<Check> suite_oracle() {
  const Grid g = Grid::make(1, 4.0, 41);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Medium m = Medium::power_decay(1.0, 2.0).floored(0.3);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  double prev = INFINITY, ratio = 0.0, bound = 0.0;
  bool improving = true;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const Integrator integ(g, m, s, Boundary::zero_extend(), Scheme::exponential, dt);
    const Field ue = simulate(u0, integ, 1.0, 1 << 30).final_field();
    PicardOptions po;
    po.dt = dt;
    const auto pr = picard_solve(u0, m, s, 1.0, 1e-13, po);
    double diff = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(pr.u[i] - ue[i]));
    improving = improving && diff < prev;
    prev = diff;
    ratio = std::max(ratio, pr.measured_ratio / pr.contraction_bound);
    bound = std::max(bound, pr.contraction_bound);
  }
  return {{"oracle.agreement", prev <= 1e-3 && improving, prev}, {"oracle.contraction", ratio <= 1.0 && bound < 1.0, ratio}};
}

inline std::vector<Check> suite_fft() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N01;
  const Grid g = Grid::make(1, 40.0, 401);
  std::vector<Check> out;
  for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(0.5), Kernel::uniform_ball(2.0)}) {
    const Stencil s = discretize(k, g.spacing());
    const FftConvolver fc(g, s);
    double worst = 0.0;
    for (int r = 0; r < 10; ++r) {
      Field f(g);
      for (double& v : f.values) v = N01(rng);
      const Field a = convolve_direct(f, s), b = fc.apply(f);
      double d = 0.0, n = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        n = std::max(n, std::abs(a[i]));
      }
      worst = std::max(worst, d / n);
    }
    out.push_back({"fft." + k.family_name(), worst <= 1e-10, worst});
  }
  return out;
}

inline std::vector<Check> suite_lyapunov() {
  const Grid g = Grid::make(1, 10.0, 201);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Medium m = Medium::power_decay(1.0, 2.0);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const Integrator integ(g, m, s, Boundary::mask(10.0), Scheme::exponential, 1e-3);
  const Trajectory tr = simulate(u0, integ, 2.0, 50);
  const auto rep = lyapunov_identity_check(tr, integ.rho(), s, integ.op().mask());
  const auto bud = dissipation_budget(tr, integ.rho(), s, integ.op().mask());
  return {{"lyapunov.monotone", rep.monotonicity_violation <= 1e-12, rep.monotonicity_violation},
          {"lyapunov.derivative_identity", rep.derivative_residual <= 2e-2, rep.derivative_residual},
          {"lyapunov.energy_identity", rep.energy_residual <= 2e-2, rep.energy_residual},
          {"lyapunov.dissipation_budget", bud.max_ratio <= 1.01, bud.max_ratio}};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"conservation", "comparison", "supersolution", "quadratic",
                                              "nullspace",    "oracle",     "fft",           "lyapunov"};
  return names;
}

inline std::vector<Check> run_suite(const std::string& name) {
  if (name == "conservation") return suite_conservation();
  if (name == "comparison") return suite_comparison();
  if (name == "supersolution") return suite_supersolution();
  if (name == "quadratic") return suite_quadratic();
  if (name == "nullspace") return suite_nullspace();
  if (name == "oracle") return suite_oracle();
  if (name == "fft") return suite_fft();
  if (name == "lyapunov") return suite_lyapunov();
  throw ConfigError("unknown verification suite '" + name + "'");
}

}  // namespace isoflow::verify
