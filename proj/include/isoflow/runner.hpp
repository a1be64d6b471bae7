#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "isoflow/diagnostics.hpp"
#include "isoflow/scenario.hpp"
#include "isoflow/snapshot.hpp"
#include "isoflow/solver.hpp"

namespace isoflow {

/// One trajectory of a run: the plain run (n = 0) or one member of an approximation family.
struct MemberRun {
  int n = 0;
  double alpha = 0.0;
  /// Constant the diagnostics measure distance to (NaN when E_rho is undefined).
  double target = std::numeric_limits<double>::quiet_NaN();
  Trajectory trajectory;
};

struct RunResult {
  Scenario scenario;
  std::string hash;
  MediumClassification classification;
  /// Radius of the region where sup/inf/dist are evaluated.
  double region_radius = 0.0;
  std::vector<MemberRun> members;
};

/// Radius inside which zero extension has not yet disturbed the solution: L - R_trunc - 2 sqrt(V t_end).
inline double trust_radius(const Grid& g, const Stencil& s, double t_end) {
  return g.half_extent - s.truncation_radius() - 2.0 * std::sqrt(stencil_second_moment(s, g.spacing()) * t_end);
}

namespace detail {

inline DomainMask diagnostics_region(const Setup& st, double& radius) {
  if (st.solver.boundary.is_mask()) {
    radius = *st.solver.boundary.mask_radius;
    return DomainMask::ball(st.grid, radius);
  }
  radius = trust_radius(st.grid, st.stencil, st.solver.t_end);
  if (!(radius >= st.grid.spacing()))
    throw ConfigError("solver: trust region is empty under zero extension (enlarge the grid or shorten t_end)");
  return DomainMask::ball(st.grid, radius);
}

inline double diagnostics_target(const Setup& st, const NonlocalOperator& op, const Field& rho, const Field& u0) {
  if (!st.classification.is_integrable()) return std::numeric_limits<double>::quiet_NaN();
  if (const DomainMask* mk = op.mask()) {
    Field u = u0;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!mk->contains(i)) u[i] = 0.0;
    return mass(u, rho, mk) / integrate(rho, nullptr, mk);
  }
  return weighted_mean(st.medium, u0).value;
}

// Picard runs march window by window between snapshot times.
inline Trajectory simulate_picard(const Setup& st, const Field& u0, const Recorder& record) {
  const long steps = step_count(st.solver.t_end, st.solver.dt);
  PicardOptions po;
  po.dt = st.solver.dt;
  po.boundary = st.solver.boundary;
  Trajectory traj;
  Field u = u0;
  const NonlocalOperator op(st.grid, st.stencil, st.solver.boundary);
  if (op.mask())
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!op.interior(i)) u[i] = 0.0;
  auto keep = [&](long k) {
    const double t = double(k) * st.solver.dt;
    if (record) traj.diagnostics.push_back(record(t, u));
    traj.snapshots.push_back(Snapshot{t, u});
  };
  keep(0);
  long done = 0;
  while (done < steps) {
    const long n = std::min<long>(st.solver.snapshot_every, steps - done);
    u = picard_solve(u, st.medium, st.stencil, double(n) * st.solver.dt, st.solver.picard_tol, po).u;
    done += n;
    keep(done);
  }
  return traj;
}

}  // namespace detail

/// Runs a validated scenario: a single trajectory, or one per approximation index n.
inline RunResult run(const Scenario& sc) {
  const Setup st = build_setup(sc);
  RunResult res;
  res.scenario = sc;
  res.hash = config_hash_hex(sc);
  res.classification = st.classification;
  const DomainMask region = detail::diagnostics_region(st, res.region_radius);

  DiagnosticsEvaluator::Options dopt;
  dopt.lp_p = sc.outputs.lp_p;
  dopt.lp_radius = sc.outputs.lp_radius;

  auto run_one = [&](const Medium& m, const Field& u0, MemberRun& mem) {
    if (st.solver.scheme == Scheme::picard_oracle) {
      const NonlocalOperator op(st.grid, st.stencil, st.solver.boundary);
      const Field rho = m.sample(st.grid);
      dopt.target = mem.target = detail::diagnostics_target(st, op, rho, u0);
      const DiagnosticsEvaluator eval(op, rho, region, dopt);
      Setup local = st;
      local.medium = m;
      mem.trajectory = detail::simulate_picard(local, u0, std::cref(eval));
      return;
    }
    const Integrator integ(st.grid, m, st.stencil, st.solver.boundary, st.solver.scheme, st.solver.dt);
    dopt.target = mem.target = detail::diagnostics_target(st, integ.op(), integ.rho(), u0);
    const DiagnosticsEvaluator eval(integ.op(), integ.rho(), region, dopt);
    mem.trajectory = simulate(u0, integ, st.solver.t_end, st.solver.snapshot_every, std::cref(eval));
  };

  if (sc.solver.approx_n.empty()) {
    MemberRun mem;
    mem.alpha = sc.medium.floor.value_or(0.0);
    run_one(st.medium, st.u0, mem);
    res.members.push_back(std::move(mem));
    return res;
  }
  const double alpha0 = sc.solver.alpha0.value_or(st.medium.eval(Point{0.0, 0.0}));
  for (int n : sc.solver.approx_n) {
    MemberRun mem;
    mem.n = n;
    mem.alpha = floor_alpha(alpha0, n);
    run_one(st.medium.floored(mem.alpha), truncate_to_ball(st.u0, double(n)), mem);
    res.members.push_back(std::move(mem));
  }
  return res;
}

inline const char* csv_columns() {
  return "t,mass,lyapunov_F,sup_u,inf_u,dist_L1rho_to_E,lp_local_p,lp_local_val,u_at_origin";
}

inline void write_csv(std::ostream& out, const RunResult& res, const MemberRun& mem) {
  const auto& sc = res.scenario;
  char buf[512];
  out << "# isoflow scenario=" << sc.name << " class=" << sc.kind << " hash=" << res.hash << "\n";
  std::snprintf(buf, sizeof buf, "# medium=%s classification=%s total_mass=%.17g target=%.17g region_radius=%.17g\n",
                sc.medium.family.c_str(), to_string(res.classification.integrable).c_str(),
                res.classification.total_mass, mem.target, res.region_radius);
  out << buf;
  if (!sc.solver.approx_n.empty()) {
    std::snprintf(buf, sizeof buf, "# member n=%d alpha=%.17g\n", mem.n, mem.alpha);
    out << buf;
  }
  out << csv_columns() << "\n";
  for (const auto& r : mem.trajectory.diagnostics) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass,
                  r.lyapunov_F, r.sup_u, r.inf_u, r.dist_L1rho, sc.outputs.lp_p, r.lp_local, r.u_at_origin);
    out << buf;
  }
}

inline std::string member_suffix(const RunResult& res, const MemberRun& mem) {
  return res.scenario.solver.approx_n.empty() ? std::string{} : "_n" + std::to_string(mem.n);
}

/// Writes every snapshot of every member as <dir>/<name>[_n<k>]_<index>.isof.
inline void write_snapshots(const std::string& dir, const RunResult& res) {
  std::filesystem::create_directories(dir);
  for (const auto& mem : res.members) {
    const auto& snaps = mem.trajectory.snapshots;
    for (std::size_t k = 0; k < snaps.size(); ++k) {
      char idx[16];
      std::snprintf(idx, sizeof idx, "%06zu", k);
      write_snapshot(dir + "/" + res.scenario.name + member_suffix(res, mem) + "_" + idx + ".isof", snaps[k]);
    }
  }
}

}  // namespace isoflow
