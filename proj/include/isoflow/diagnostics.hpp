#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "isoflow/medium.hpp"
#include "isoflow/operator.hpp"
#include "isoflow/trajectory.hpp"

namespace isoflow {

/// int rho u over the box, or over the mask with full cells.
inline double mass(const Field& u, const Field& rho, const DomainMask* mask = nullptr) {
  return integrate(u, &rho, mask);
}

inline double mass(const Field& u, const Medium& m, const DomainMask* mask = nullptr) {
  return mass(u, m.sample(u.grid), mask);
}

/// F[u] = h^N sum_x sum_k w_k (u(x) - u(x - k h))^2.
///
/// With a mask both x and x - k h range over interior nodes. Without one the sum runs over the
/// whole lattice with u = 0 off the grid, which is what makes d/dt int rho u^2 = -F hold exactly
/// for the semi-discrete zero-extended system.
inline double lyapunov_F(const Field& u, const Stencil& s, const DomainMask* mask = nullptr) {
  detail::require_fit(u, s);
  const Grid& g = u.grid;
  const int M = g.points;
  const double cell = g.cell_volume();
  const auto in = mask ? mask->flags() : std::span<const unsigned char>{};
  auto inside = [&](std::size_t i) { return !mask || in[i] != 0; };
  double total = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) {
    if (!inside(x)) continue;
    const auto ix = g.multi_index(x);
    const double ux = u[x];
    double acc = 0.0;
    double off_grid_mass = 0.0;
    for (const auto& e : s.entries()) {
      const int j0 = ix[0] - e.offset[0];
      const int j1 = ix[1] - e.offset[1];
      const bool on_grid = j0 >= 0 && j0 < M && (g.dim == 1 || (j1 >= 0 && j1 < M));
      if (!on_grid) {
        off_grid_mass += e.weight;
        continue;
      }
      const std::size_t y = g.flat_index(j0, j1);
      if (!inside(y)) continue;
      const double d = ux - u[y];
      acc += e.weight * d * d;
    }
    // Without a mask, each off-grid neighbour contributes (u(x) - 0)^2 twice: once as (x, y)
    // and once as the mirrored pair (y, x) with y off the grid.
    if (!mask) acc += 2.0 * off_grid_mass * ux * ux;
    total += acc;
  }
  return cell * total;
}

inline double weighted_energy(const Field& u, const Field& rho, const DomainMask* mask = nullptr) {
  Field sq = u;
  for (double& v : sq.values) v *= v;
  return integrate(sq, &rho, mask);
}

/// int rho |u - c| over a region (mask quadrature).
inline double dist_L1rho(const Field& u, const Field& rho, double c, const DomainMask& region) {
  Field d = u;
  for (double& v : d.values) v = std::abs(v - c);
  return integrate(d, &rho, &region);
}

/// Evaluates DiagnosticsRecords for one run configuration.
class DiagnosticsEvaluator {
 public:
  struct Options {
    /// Constant the solution is compared against (E_rho or 0); NaN disables dist_L1rho.
    double target = std::numeric_limits<double>::quiet_NaN();
    double lp_p = 2.0;
    double lp_radius = 1.0;
  };

  /// region: where sup/inf/dist are evaluated (the mask, or a trust ball under zero extension).
  DiagnosticsEvaluator(const NonlocalOperator& op, Field rho, DomainMask region, Options opts)
      : op_(&op), rho_(std::move(rho)), region_(std::move(region)), opts_(opts) {}

  const DomainMask& region() const { return region_; }
  const Options& options() const { return opts_; }

  DiagnosticsRecord operator()(double t, const Field& u) const {
    DiagnosticsRecord r;
    r.t = t;
    const DomainMask* mask = op_->mask();
    r.mass = mass(u, rho_, mask);
    r.lyapunov_F = lyapunov_F(u, op_->stencil(), mask);
    const Field Lu = op_->apply(u);
    double diss = 0.0;
    const auto q = quadrature_weights(u.grid, mask ? mask : nullptr);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (op_->interior(i)) diss += q[i] * Lu[i] * Lu[i] / rho_[i];
    r.dissipation = 4.0 * diss;
    r.weighted_energy = weighted_energy(u, rho_, mask);
    r.sup_u = -INFINITY;
    r.inf_u = INFINITY;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!region_.contains(i)) continue;
      r.sup_u = std::max(r.sup_u, u[i]);
      r.inf_u = std::min(r.inf_u, u[i]);
    }
    r.dist_L1rho = std::isnan(opts_.target) ? opts_.target : dist_L1rho(u, rho_, opts_.target, region_);
    const double c = std::isnan(opts_.target) ? 0.0 : opts_.target;
    r.lp_local = lp_local_distance(u, c, opts_.lp_p, opts_.lp_radius);
    r.u_at_origin = u.at_origin();
    return r;
  }

 private:
  const NonlocalOperator* op_;
  Field rho_;
  DomainMask region_;
  Options opts_;
};

namespace detail {

// Snapshot time derivative: central differences inside, second-order one-sided at the ends.
inline std::vector<Field> snapshot_time_derivative(const Trajectory& traj, double delta) {
  const auto& s = traj.snapshots;
  const std::size_t n = s.size();
  std::vector<Field> ut;
  ut.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Field d(s[k].u.grid);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (k == 0)
        d[i] = (-3.0 * s[0].u[i] + 4.0 * s[1].u[i] - s[2].u[i]) / (2.0 * delta);
      else if (k == n - 1)
        d[i] = (3.0 * s[n - 1].u[i] - 4.0 * s[n - 2].u[i] + s[n - 3].u[i]) / (2.0 * delta);
      else
        d[i] = (s[k + 1].u[i] - s[k - 1].u[i]) / (2.0 * delta);
    }
    ut.push_back(std::move(d));
  }
  return ut;
}

inline double uniform_spacing(const Trajectory& traj) {
  const auto& s = traj.snapshots;
  if (s.size() < 3) throw ValidationError("identity check: need at least 3 snapshots");
  const double delta = s[1].t - s[0].t;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (std::abs((s[k].t - s[k - 1].t) - delta) > 1e-9 * std::max(1.0, delta))
      throw ValidationError("identity check: snapshots are not uniformly spaced");
  return delta;
}

}  // namespace detail

struct LyapunovIdentityReport {
  /// max_k |dF/dt + 4 int rho u_t^2| / max_k 4 int rho u_t^2
  double derivative_residual = 0.0;
  /// max_k |d/dt int rho u^2 + F| / max_k F
  double energy_residual = 0.0;
  /// max_k (F_{k+1} - F_k)^+ relative to F_0
  double monotonicity_violation = 0.0;
  std::vector<double> F;
};

/// Checks dF/dt = -4 int rho u_t^2 and d/dt int rho u^2 = -F along recorded snapshots, with u_t
/// estimated from the snapshots themselves.
inline LyapunovIdentityReport lyapunov_identity_check(const Trajectory& traj, const Field& rho, const Stencil& s,
                                                      const DomainMask* mask = nullptr) {
  const double delta = detail::uniform_spacing(traj);
  const auto& snaps = traj.snapshots;
  const std::size_t n = snaps.size();
  const DomainMask whole = DomainMask::whole(rho.grid);
  const DomainMask* region = mask ? mask : &whole;
  const auto ut = detail::snapshot_time_derivative(traj, delta);

  LyapunovIdentityReport rep;
  std::vector<double> energy(n), diss(n);
  for (std::size_t k = 0; k < n; ++k) {
    rep.F.push_back(lyapunov_F(snaps[k].u, s, mask));
    energy[k] = weighted_energy(snaps[k].u, rho, region);
    diss[k] = 4.0 * weighted_energy(ut[k], rho, region);
  }
  double max_diss = 0.0, max_F = 0.0, res_der = 0.0, res_int = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    max_diss = std::max(max_diss, diss[k]);
    max_F = std::max(max_F, rep.F[k]);
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double dF = (rep.F[k + 1] - rep.F[k - 1]) / (2.0 * delta);
    const double dE = (energy[k + 1] - energy[k - 1]) / (2.0 * delta);
    res_der = std::max(res_der, std::abs(dF + diss[k]));
    res_int = std::max(res_int, std::abs(dE + rep.F[k]));
  }
  rep.derivative_residual = max_diss > 0.0 ? res_der / max_diss : res_der;
  rep.energy_residual = max_F > 0.0 ? res_int / max_F : res_int;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double inc = rep.F[k + 1] - rep.F[k];
    if (inc > 0.0) rep.monotonicity_violation = std::max(rep.monotonicity_violation, rep.F[0] > 0 ? inc / rep.F[0] : inc);
  }
  return rep;
}

struct DissipationBudget {
  std::vector<double> t;
  /// int_t^T int rho u_t^2 ds for each window start t
  std::vector<double> budget;
  /// F(t) / 4
  std::vector<double> bound;
  /// max over t of budget / bound (0 when every bound vanishes)
  double max_ratio = 0.0;
};

/// Time quadrature (trapezoid) of int rho u_t^2 over [t_k, T], against F(t_k)/4.
inline DissipationBudget dissipation_budget(const Trajectory& traj, const Field& rho, const Stencil& s,
                                            const DomainMask* mask = nullptr) {
  const double delta = detail::uniform_spacing(traj);
  const auto& snaps = traj.snapshots;
  const std::size_t n = snaps.size();
  const DomainMask whole = DomainMask::whole(rho.grid);
  const DomainMask* region = mask ? mask : &whole;
  const auto ut = detail::snapshot_time_derivative(traj, delta);
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = weighted_energy(ut[k], rho, region);

  DissipationBudget out;
  out.t.resize(n);
  out.budget.assign(n, 0.0);
  out.bound.resize(n);
  for (std::size_t k = n - 1; k-- > 0;) out.budget[k] = out.budget[k + 1] + 0.5 * delta * (d[k] + d[k + 1]);
  for (std::size_t k = 0; k < n; ++k) {
    out.t[k] = snaps[k].t;
    out.bound[k] = 0.25 * lyapunov_F(snaps[k].u, s, mask);
    if (out.bound[k] > 0.0) out.max_ratio = std::max(out.max_ratio, out.budget[k] / out.bound[k]);
  }
  return out;
}

}  // namespace isoflow
