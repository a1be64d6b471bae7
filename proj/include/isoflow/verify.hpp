#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "isoflow/diagnostics.hpp"
#include "isoflow/solver.hpp"

namespace isoflow::verify {

struct ComparisonReport {
  /// max over snapshots and nodes of (u_sub - u_super)^+
  double max_violation = 0.0;
  /// max |u| over both trajectories; violations are judged relative to it
  double scale = 0.0;
  double violation_time = 0.0;
  std::size_t violation_node = 0;
  /// min(u0) <= u <= max(u0) (with 0 included under zero extension) at every node and snapshot
  double bound_violation = 0.0;
  bool passed = true;
};

/// Runs the ordered pair through the same integrator and checks the ordering everywhere.
inline ComparisonReport comparison_harness(const Field& u0_sub, const Field& u0_super, const Integrator& integ,
                                           double t_end, int snapshot_every = 1, double rel_tol = 1e-12) {
  require_same_grid(u0_sub, u0_super, "comparison");
  for (std::size_t i = 0; i < u0_sub.size(); ++i)
    if (u0_sub[i] > u0_super[i]) throw ValidationError("comparison: initial data are not ordered");
  const Trajectory lo = simulate(u0_sub, integ, t_end, snapshot_every);
  const Trajectory hi = simulate(u0_super, integ, t_end, snapshot_every);

  ComparisonReport rep;
  auto bounds = [&](const Field& u0) {
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < u0.size(); ++i) {
      if (!integ.op().interior(i)) continue;
      mn = std::min(mn, u0[i]);
      mx = std::max(mx, u0[i]);
    }
    if (!integ.op().mask()) {
      mn = std::min(mn, 0.0);
      mx = std::max(mx, 0.0);
    }
    return std::pair{mn, mx};
  };
  const auto [lo_min, lo_max] = bounds(u0_sub);
  const auto [hi_min, hi_max] = bounds(u0_super);
  for (const auto* tr : {&lo, &hi})
    for (const auto& s : tr->snapshots)
      for (double v : s.u.values) rep.scale = std::max(rep.scale, std::abs(v));
  for (std::size_t k = 0; k < lo.snapshots.size(); ++k) {
    const Field& a = lo.snapshots[k].u;
    const Field& b = hi.snapshots[k].u;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double v = a[i] - b[i];
      if (v > rep.max_violation) {
        rep.max_violation = v;
        rep.violation_time = lo.snapshots[k].t;
        rep.violation_node = i;
      }
      if (!integ.op().interior(i)) continue;
      rep.bound_violation = std::max({rep.bound_violation, lo_min - a[i], a[i] - lo_max, hi_min - b[i], b[i] - hi_max});
    }
  }
  const double tol = rel_tol * std::max(rep.scale, std::numeric_limits<double>::min());
  rep.passed = rep.max_violation <= tol && rep.bound_violation <= tol;
  return rep;
}

/// Interior nodes: those whose full stencil lies on the grid.
inline DomainMask stencil_interior(const Grid& g, const Stencil& s) {
  const int K = s.reach(), M = g.points;
  return DomainMask::from_predicate(g, [&](const Point& x) {
    for (int d = 0; d < g.dim; ++d) {
      const int i = static_cast<int>(std::lround(x[d] / g.spacing())) + g.center();
      if (i - K < 0 || i + K > M - 1) return false;
    }
    return true;
  });
}

struct SupersolutionResidual {
  /// rho lambda U - (J*U - U), zero off the interior
  Field residual;
  DomainMask interior;
  double min_residual = 0.0;
};

/// Residual of the barrier U(x, t) = A e^{lambda t} (1 + |x|^2) at time t, on stencil-interior
/// nodes. Requires the medium to admit a decay floor with gamma <= 2.
inline SupersolutionResidual supersolution_residual(double A, double lambda, const Medium& m, const Stencil& s,
                                                    const Grid& grid, double t) {
  const auto cls = m.classify();
  if (!cls.decay_floor) throw ValidationError("supersolution: medium has no decay floor with gamma <= 2");
  const double amp = A * std::exp(lambda * t);
  const Field U = Field::from_function(grid, [&](const Point& x) { return amp * (1.0 + norm2(x)); });
  const Field JU = convolve_direct(U, s);
  DomainMask interior = stencil_interior(grid, s);
  Field r(grid);
  double mn = INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!interior.contains(i)) continue;
    r[i] = m.eval(grid.point(i)) * lambda * U[i] - (JU[i] - U[i]);
    mn = std::min(mn, r[i]);
  }
  return SupersolutionResidual{std::move(r), std::move(interior), mn};
}

struct QuadraticIdentityReport {
  double mean_value = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  /// (max - min) / |mean|
  double relative_spread = 0.0;
  double second_moment = 0.0;
  std::size_t interior_nodes = 0;
};

/// (J*q - q)(x) for q(x) = |x - shift|^2 on stencil-interior nodes; constant and equal to the
/// stencil second moment when the stencil is symmetric with unit mass.
inline QuadraticIdentityReport quadratic_identity(const Stencil& s, const Grid& grid, const Point& shift = {0.0, 0.0}) {
  const Field q = Field::from_function(grid, [&](const Point& x) {
    const Point d{x[0] - shift[0], x[1] - shift[1]};
    return norm2(d);
  });
  const Field Jq = convolve_direct(q, s);
  const int K = s.reach(), M = grid.points;
  QuadraticIdentityReport rep;
  rep.second_moment = stencil_second_moment(s, grid.spacing());
  rep.min_value = INFINITY;
  rep.max_value = -INFINITY;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.multi_index(i);
    bool ok = idx[0] - K >= 0 && idx[0] + K <= M - 1;
    if (grid.dim == 2) ok = ok && idx[1] - K >= 0 && idx[1] + K <= M - 1;
    if (!ok) continue;
    const double v = Jq[i] - q[i];
    rep.min_value = std::min(rep.min_value, v);
    rep.max_value = std::max(rep.max_value, v);
    sum += v;
    ++rep.interior_nodes;
  }
  if (rep.interior_nodes == 0) throw ValidationError("quadratic identity: no stencil-interior nodes");
  rep.mean_value = sum / double(rep.interior_nodes);
  rep.relative_spread = (rep.max_value - rep.min_value) / std::abs(rep.mean_value);
  return rep;
}

/// Dense masked operator over interior nodes: A[x][y] = w(x - y) for y != x, A[x][x] = -sum.
struct MaskedOperatorMatrix {
  std::vector<std::size_t> nodes;
  Eigen::MatrixXd A;
};

inline constexpr std::size_t nullspace_node_cap = 4096;

inline MaskedOperatorMatrix materialize_masked_operator(const Stencil& s, const DomainMask& mask) {
  const Grid& g = mask.grid();
  MaskedOperatorMatrix out;
  std::vector<long> slot(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask.contains(i)) {
      slot[i] = long(out.nodes.size());
      out.nodes.push_back(i);
    }
  if (out.nodes.size() > nullspace_node_cap)
    throw ValidationError("nullspace: mask has " + std::to_string(out.nodes.size()) + " nodes, cap is " +
                          std::to_string(nullspace_node_cap));
  const std::size_t n = out.nodes.size();
  out.A = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t a = 0; a < n; ++a) {
    const auto ix = g.multi_index(out.nodes[a]);
    double row = 0.0;
    for (const auto& e : s.entries()) {
      if (e.offset[0] == 0 && e.offset[1] == 0) continue;
      const int j0 = ix[0] - e.offset[0], j1 = ix[1] - e.offset[1];
      if (j0 < 0 || j0 >= g.points || (g.dim == 2 && (j1 < 0 || j1 >= g.points))) continue;
      const long b = slot[g.flat_index(j0, j1)];
      if (b < 0) continue;
      out.A(Eigen::Index(a), b) = e.weight;
      row += e.weight;
    }
    out.A(Eigen::Index(a), Eigen::Index(a)) = -row;
  }
  return out;
}

/// Number of connected components of the mask under "y within the stencil support of x".
inline std::size_t stencil_components(const Stencil& s, const DomainMask& mask) {
  const Grid& g = mask.grid();
  std::vector<int> comp(g.size(), -1);
  std::size_t count = 0;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!mask.contains(start) || comp[start] >= 0) continue;
    std::deque<std::size_t> queue{start};
    comp[start] = int(count);
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      const auto ix = g.multi_index(x);
      for (const auto& e : s.entries()) {
        const int j0 = ix[0] - e.offset[0], j1 = ix[1] - e.offset[1];
        if (j0 < 0 || j0 >= g.points || (g.dim == 2 && (j1 < 0 || j1 >= g.points))) continue;
        const std::size_t y = g.flat_index(j0, j1);
        if (!mask.contains(y) || comp[y] >= 0) continue;
        comp[y] = int(count);
        queue.push_back(y);
      }
    }
    ++count;
  }
  return count;
}

struct NullspaceReport {
  std::size_t nodes = 0;
  std::size_t dimension = 0;
  std::size_t components = 0;
  /// max |A 1|
  double constant_residual = 0.0;
  /// Distance of the computed null space from span{component indicators} (projector norm).
  double basis_residual = 0.0;
  double smallest_nonzero_eigenvalue = 0.0;
};

/// Numerical null space of the masked operator via a symmetric eigendecomposition.
inline NullspaceReport steady_state_nullspace(const Stencil& s, const DomainMask& mask, double rel_tol = 1e-10) {
  const auto mat = materialize_masked_operator(s, mask);
  const Eigen::Index n = mat.A.rows();
  NullspaceReport rep;
  rep.nodes = std::size_t(n);
  rep.components = stencil_components(s, mask);
  for (Eigen::Index a = 0; a < n; ++a) {
    double off = 0.0;
    for (Eigen::Index b = 0; b < n; ++b)
      if (b != a) off += mat.A(a, b);
    rep.constant_residual = std::max(rep.constant_residual, std::abs(off + mat.A(a, a)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat.A);
  if (eig.info() != Eigen::Success) throw std::runtime_error("nullspace: eigensolver failed");
  const auto& vals = eig.eigenvalues();
  const double scale = vals.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> null_idx;
  double smallest = INFINITY;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(vals(i)) <= rel_tol * scale)
      null_idx.push_back(i);
    else
      smallest = std::min(smallest, std::abs(vals(i)));
  }
  rep.dimension = null_idx.size();
  rep.smallest_nonzero_eigenvalue = smallest;

  // Orthonormal basis of component indicators; compare projectors.
  std::vector<int> comp(std::size_t(n), -1);
  {
    const Grid& g = mask.grid();
    std::vector<long> slot(g.size(), -1);
    for (Eigen::Index a = 0; a < n; ++a) slot[mat.nodes[std::size_t(a)]] = a;
    int c = 0;
    for (Eigen::Index a = 0; a < n; ++a) {
      if (comp[std::size_t(a)] >= 0) continue;
      std::deque<Eigen::Index> queue{a};
      comp[std::size_t(a)] = c;
      while (!queue.empty()) {
        const Eigen::Index x = queue.front();
        queue.pop_front();
        for (Eigen::Index b = 0; b < n; ++b)
          if (b != x && mat.A(x, b) != 0.0 && comp[std::size_t(b)] < 0) {
            comp[std::size_t(b)] = c;
            queue.push_back(b);
          }
      }
      ++c;
    }
  }
  Eigen::MatrixXd indicators = Eigen::MatrixXd::Zero(n, Eigen::Index(rep.components));
  for (Eigen::Index a = 0; a < n; ++a) indicators(a, comp[std::size_t(a)]) = 1.0;
  for (Eigen::Index c = 0; c < indicators.cols(); ++c) indicators.col(c).normalize();
  Eigen::MatrixXd basis(n, Eigen::Index(null_idx.size()));
  for (std::size_t k = 0; k < null_idx.size(); ++k) basis.col(Eigen::Index(k)) = eig.eigenvectors().col(null_idx[k]);
  const Eigen::MatrixXd P1 = basis * basis.transpose();
  const Eigen::MatrixXd P2 = indicators * indicators.transpose();
  rep.basis_residual = (P1 - P2).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace isoflow::verify
