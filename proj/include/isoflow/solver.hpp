#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "isoflow/diagnostics.hpp"
#include "isoflow/medium.hpp"
#include "isoflow/operator.hpp"

namespace isoflow {

enum class Scheme { euler, exponential, picard_oracle };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::euler: return "euler";
    case Scheme::exponential: return "exponential";
    default: return "picard-oracle";
  }
}

struct SolverConfig {
  Scheme scheme = Scheme::exponential;
  double dt = 1e-2;
  double t_end = 1.0;
  Boundary boundary = Boundary::zero_extend();
  int snapshot_every = 1;
  std::optional<double> floor_alpha;
  double picard_tol = 1e-12;

  bool operator==(const SolverConfig&) const = default;
};

/// Largest forward Euler step that keeps u+ = (1 - dt/rho) u + (dt/rho) J*u a convex combination.
inline double stability_dt(const Field& rho) { return *std::min_element(rho.values.begin(), rho.values.end()); }

inline double stability_dt(const Medium& m, const Grid& g) { return stability_dt(m.sample(g)); }

/// One-step map for a fixed (medium, stencil, boundary, dt). Coefficients that depend only on
/// dt are computed once.
class Integrator {
 public:
  Integrator(const Grid& grid, const Medium& medium, const Stencil& stencil, const Boundary& boundary, Scheme scheme,
             double dt)
      : op_(grid, stencil, boundary), rho_(medium.sample(grid)), scheme_(scheme), dt_(dt) {
    init();
  }

  Integrator(NonlocalOperator op, Field rho, Scheme scheme, double dt)
      : op_(std::move(op)), rho_(std::move(rho)), scheme_(scheme), dt_(dt) {
    require_same_grid(rho_, Field(op_.grid()), "integrator");
    init();
  }

  const NonlocalOperator& op() const { return op_; }
  const Field& rho() const { return rho_; }
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }

  Field step(const Field& u) const {
    require_same_grid(u, rho_, "step");
    if (dt_ == 0.0) return u;
    return scheme_ == Scheme::euler ? step_euler(u) : step_exponential(u);
  }

 private:
  void init() {
    if (!(dt_ >= 0.0) || !std::isfinite(dt_)) throw ValidationError("step: dt must be finite and >= 0");
    if (scheme_ == Scheme::picard_oracle)
      throw ValidationError("step: the Picard oracle is a whole-trajectory solver, use picard_solve");
    if (scheme_ == Scheme::euler) {
      const double limit = stability_dt(rho_);
      if (dt_ > limit * (1.0 + 1e-12))
        throw NumericalAbort("euler: dt = " + std::to_string(dt_) + " exceeds stability_dt = " + std::to_string(limit));
      return;
    }
    // decay = exp(-kappa dt / rho); phi = rho (1 - decay) / kappa, the effective step of the
    // integrating-factor update u+ = u + (phi / rho) (J*u - kappa u).
    const std::size_t n = rho_.size();
    decay_.resize(n);
    phi_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double kappa = op_.kappa()[i];
      const double z = kappa * dt_ / rho_[i];
      decay_[i] = std::exp(-z);
      phi_[i] = rho_[i] * (-std::expm1(-z)) / kappa;
    }
  }

  Field step_euler(const Field& u) const {
    Field out = u;
    const Field Lu = op_.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (op_.interior(i)) out[i] = u[i] + dt_ * Lu[i] / rho_[i];
    return out;
  }

  Field step_exponential(const Field& u) const {
    Field out = u;
    if (!op_.mask()) {
      const Field conv = op_.convolve(u);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = decay_[i] * u[i] + (1.0 - decay_[i]) * conv[i];
      return out;
    }
    // Under a mask each exchange x <-> y is weighted by min(phi(x), phi(y)): a symmetric factor
    // keeps sum rho u invariant, and min(.) <= phi(x) keeps the update a convex combination.
    const Field flux = op_.pair_sum(u, [this](std::size_t x, std::size_t y) { return std::min(phi_[x], phi_[y]); });
    for (std::size_t i = 0; i < u.size(); ++i)
      if (op_.interior(i)) out[i] = u[i] + flux[i] / rho_[i];
    return out;
  }

  NonlocalOperator op_;
  Field rho_;
  Scheme scheme_;
  double dt_;
  std::vector<double> decay_;
  std::vector<double> phi_;
};

/// u+ = u + (dt / rho) L u with L the boundary-mode operator.
inline Field step_euler(const Field& u, const Medium& m, const Stencil& s, double dt, const Boundary& boundary) {
  return Integrator(u.grid, m, s, boundary, Scheme::euler, dt).step(u);
}

/// Integrating-factor step with the convolution frozen over the step.
inline Field step_exponential(const Field& u, const Medium& m, const Stencil& s, double dt, const Boundary& boundary) {
  if (!(dt > 0.0)) throw ValidationError("step_exponential: dt must be positive");
  return Integrator(u.grid, m, s, boundary, Scheme::exponential, dt).step(u);
}

inline long step_count(double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw ValidationError("solver: need dt > 0 and t_end >= 0");
  const double ratio = t_end / dt;
  const long n = std::lround(ratio);
  if (std::abs(ratio - double(n)) > 1e-9 * std::max(1.0, ratio))
    throw ValidationError("solver: t_end must be a multiple of dt");
  return n;
}

using Recorder = std::function<DiagnosticsRecord(double, const Field&)>;

/// Marches from u0 to t_end, keeping a snapshot (and a record, if a recorder is given) every
/// snapshot_every steps plus the final state. Snapshot times are k * dt exactly.
inline Trajectory simulate(const Field& u0, const Integrator& integ, double t_end, int snapshot_every,
                           const Recorder& record = {}) {
  if (snapshot_every < 1) throw ValidationError("solver: snapshot_every must be >= 1");
  const long steps = step_count(t_end, integ.dt());
  Trajectory traj;
  Field u = u0;
  if (integ.op().mask())
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!integ.op().interior(i)) u[i] = 0.0;
  auto keep = [&](long k) {
    const double t = double(k) * integ.dt();
    if (record) traj.diagnostics.push_back(record(t, u));
    traj.snapshots.push_back(Snapshot{t, u});
  };
  keep(0);
  for (long k = 1; k <= steps; ++k) {
    u = integ.step(u);
    if (!u.all_finite()) throw NumericalAbort("non-finite value after step", k);
    if (k % snapshot_every == 0 || k == steps) keep(k);
  }
  return traj;
}

struct PicardResult {
  Field u;
  /// Window length t0 and the contraction constant 2 t0 / rho0 it guarantees.
  double window = 0.0;
  double contraction_bound = 0.0;
  /// Largest observed ratio of successive iterate differences (L1, max over the window mesh).
  double measured_ratio = 0.0;
  int windows = 0;
  int max_iterations = 0;
};

struct PicardOptions {
  double dt = 1e-3;
  /// Floor applied to the medium; the medium must be bounded below for the contraction estimate.
  std::optional<double> floor_alpha;
  Boundary boundary = Boundary::zero_extend();
  int max_iterations = 500;
  /// Cap on nodes x time samples held per window.
  std::size_t storage_cap = std::size_t{1} << 24;
};

/// Fixed-point iteration w <- u0 + (1/rho) int_0^t (J*w - w) ds on successive windows of length
/// t0 < rho0 / 2 (left-endpoint rule on the dt mesh). Returns u(t_end).
inline PicardResult picard_solve(const Field& u0, const Medium& m, const Stencil& s, double t_end, double tol,
                                 const PicardOptions& opts = {}) {
  const Medium floored = opts.floor_alpha ? m.floored(*opts.floor_alpha) : m;
  const Field rho = floored.sample(u0.grid);
  const double rho0 = stability_dt(rho);
  const long total = step_count(t_end, opts.dt);
  const long per_window = std::max(1L, static_cast<long>(std::floor(0.4 * rho0 / opts.dt)));
  PicardResult res;
  res.window = double(per_window) * opts.dt;
  res.contraction_bound = 2.0 * res.window / rho0;
  if (!(res.contraction_bound < 1.0))
    throw ValidationError("picard: dt too large for a contracting window (2 t0 / rho0 >= 1)");
  if (u0.size() * std::size_t(per_window + 1) > opts.storage_cap)
    throw ValidationError("picard: grid too large for the window storage cap");

  const NonlocalOperator op(u0.grid, s, opts.boundary);
  const auto q = quadrature_weights(u0.grid);
  auto l1 = [&](const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += q[i] * std::abs(a[i] - b[i]);
    return acc;
  };

  Field start = u0;
  if (op.mask())
    for (std::size_t i = 0; i < start.size(); ++i)
      if (!op.interior(i)) start[i] = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i) scale += q[i] * std::abs(start[i]);

  long done = 0;
  while (done < total) {
    const long n = std::min(per_window, total - done);
    std::vector<Field> w(std::size_t(n + 1), start);
    double prev = -1.0;
    int it = 0;
    for (;; ++it) {
      if (it >= opts.max_iterations) throw NumericalAbort("picard: no convergence within the iteration cap");
      std::vector<Field> next(std::size_t(n + 1), start);
      Field integral(start.grid, 0.0);
      for (long j = 1; j <= n; ++j) {
        const Field L = op.apply(w[std::size_t(j - 1)]);
        for (std::size_t i = 0; i < L.size(); ++i) integral[i] += opts.dt * L[i];
        Field& nj = next[std::size_t(j)];
        for (std::size_t i = 0; i < nj.size(); ++i)
          if (op.interior(i)) nj[i] = start[i] + integral[i] / rho[i];
      }
      double diff = 0.0;
      for (long j = 0; j <= n; ++j) diff = std::max(diff, l1(next[std::size_t(j)], w[std::size_t(j)]));
      if (prev > 1e-12 * std::max(scale, 1e-300) && diff > 0.0)
        res.measured_ratio = std::max(res.measured_ratio, diff / prev);
      w = std::move(next);
      prev = diff;
      if (diff < tol) break;
    }
    res.max_iterations = std::max(res.max_iterations, it + 1);
    start = w[std::size_t(n)];
    if (!start.all_finite()) throw NumericalAbort("picard: non-finite iterate", done + n);
    done += n;
    ++res.windows;
  }
  res.u = std::move(start);
  return res;
}

/// One member of the monotone approximation family: data u0 chi_{B_n}, medium max(rho, alpha_n).
struct ApproxMember {
  int n = 0;
  double alpha = 0.0;
  Trajectory trajectory;
};

struct ApproxOptions {
  SolverConfig solver;
  /// alpha_n = alpha0 2^{-n}; defaults to rho(0).
  std::optional<double> alpha0;
  /// Builds a recorder for a member (optional).
  std::function<Recorder(const Integrator&, const Field& u0n)> make_recorder;
};

inline Field truncate_to_ball(const Field& u0, double radius) {
  Field out = u0;
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (norm2(out.grid.point(i)) > r2) out[i] = 0.0;
  return out;
}

inline std::vector<ApproxMember> monotone_approx_run(const Field& u0, const Medium& m, const Stencil& s,
                                                     const std::vector<int>& n_list, double t_probe,
                                                     const ApproxOptions& opts) {
  if (n_list.empty()) throw ValidationError("approximation: empty n list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ValidationError("approximation: n list must be increasing");
  const double alpha0 = opts.alpha0.value_or(m.eval(Point{0.0, 0.0}));
  std::vector<ApproxMember> out;
  for (int n : n_list) {
    ApproxMember mem;
    mem.n = n;
    mem.alpha = floor_alpha(alpha0, n);
    const Medium mn = m.floored(mem.alpha);
    const Field u0n = truncate_to_ball(u0, double(n));
    const Integrator integ(u0.grid, mn, s, opts.solver.boundary, opts.solver.scheme, opts.solver.dt);
    const Recorder rec = opts.make_recorder ? opts.make_recorder(integ, u0n) : Recorder{};
    mem.trajectory = simulate(u0n, integ, t_probe, opts.solver.snapshot_every, rec);
    out.push_back(std::move(mem));
  }
  return out;
}

struct MonotonicityReport {
  /// max over consecutive members, snapshots and nodes of (u_n - u_{n+1})^+
  double max_violation = 0.0;
  std::size_t violating_pairs = 0;
};

/// Checks u_{n+1} >= u_n pointwise at every common snapshot.
inline MonotonicityReport check_monotone(const std::vector<ApproxMember>& members, double tol = 1e-12) {
  MonotonicityReport rep;
  for (std::size_t a = 0; a + 1 < members.size(); ++a) {
    const auto& lo = members[a].trajectory.snapshots;
    const auto& hi = members[a + 1].trajectory.snapshots;
    const std::size_t n = std::min(lo.size(), hi.size());
    bool bad = false;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < lo[k].u.size(); ++i) {
        const double v = lo[k].u[i] - hi[k].u[i];
        if (v > 0.0) rep.max_violation = std::max(rep.max_violation, v);
        if (v > tol) bad = true;
      }
    if (bad) ++rep.violating_pairs;
  }
  return rep;
}

}  // namespace isoflow
