#pragma once

#include <optional>
#include <vector>

#include "isoflow/grid.hpp"

namespace isoflow {

/// Boundary semantics of the discrete operator: zero extension outside the box, or the Neumann
/// truncation to a ball (exchange only between interior nodes).
struct Boundary {
  std::optional<double> mask_radius;

  static Boundary zero_extend() { return {}; }
  static Boundary mask(double radius) { return Boundary{radius}; }
  bool is_mask() const { return mask_radius.has_value(); }
  bool operator==(const Boundary&) const = default;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double lyapunov_F = 0.0;
  /// 4 * int rho (u_t)^2, u_t taken from the operator.
  double dissipation = 0.0;
  double weighted_energy = 0.0;
  double sup_u = 0.0;
  double inf_u = 0.0;
  double dist_L1rho = 0.0;
  double lp_local = 0.0;
  double u_at_origin = 0.0;
};

struct Snapshot {
  double t;
  Field u;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;

  const Field& final_field() const { return snapshots.back().u; }
  double final_time() const { return snapshots.back().t; }
};

}  // namespace isoflow
