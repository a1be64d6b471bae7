#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isoflow/error.hpp"

namespace isoflow {

/// A point in R^N, N <= 2. Unused coordinates are zero.
using Point = std::array<double, 2>;

inline double norm2(const Point& x) { return x[0] * x[0] + x[1] * x[1]; }
inline double norm(const Point& x) { return std::sqrt(norm2(x)); }

/// Uniform tensor grid on [-L, L]^N with M nodes per axis (M odd, origin is a node).
struct Grid {
  int dim = 1;
  double half_extent = 1.0;
  int points = 3;

  static Grid make(int dim, double half_extent, int points) {
    if (dim != 1 && dim != 2) throw ValidationError("grid: dim must be 1 or 2");
    if (!(half_extent > 0.0) || !std::isfinite(half_extent))
      throw ValidationError("grid: half_extent must be positive");
    if (points < 3 || points % 2 == 0)
      throw ValidationError("grid: points per axis must be odd and >= 3");
    return Grid{dim, half_extent, points};
  }

  double spacing() const { return 2.0 * half_extent / (points - 1); }
  double cell_volume() const { return dim == 1 ? spacing() : spacing() * spacing(); }
  int center() const { return (points - 1) / 2; }

  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(points)
                    : static_cast<std::size_t>(points) * static_cast<std::size_t>(points);
  }

  /// Coordinate of node i along an axis; exactly antisymmetric about the center node.
  double coord(int i) const { return (i - center()) * spacing(); }

  std::array<int, 2> multi_index(std::size_t flat) const {
    if (dim == 1) return {static_cast<int>(flat), 0};
    return {static_cast<int>(flat / points), static_cast<int>(flat % points)};
  }

  std::size_t flat_index(int i0, int i1 = 0) const {
    return dim == 1 ? static_cast<std::size_t>(i0)
                    : static_cast<std::size_t>(i0) * points + static_cast<std::size_t>(i1);
  }

  Point point(std::size_t flat) const {
    auto idx = multi_index(flat);
    return {coord(idx[0]), dim == 2 ? coord(idx[1]) : 0.0};
  }

  std::size_t origin_index() const { return flat_index(center(), dim == 2 ? center() : 0); }

  bool operator==(const Grid&) const = default;
};

/// Scalar samples on a grid, row-major.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ValidationError("field: value count does not match grid");
  }

  static Field from_function(const Grid& g, const std::function<double(const Point&)>& f) {
    Field out(g);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f(g.point(i));
    return out;
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double at_origin() const { return values[grid.origin_index()]; }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

inline void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!(a.grid == b.grid)) throw ValidationError(std::string(what) + ": grid mismatch");
}

/// Set of interior nodes. Built from a ball (the Neumann truncation domain) or an explicit node set.
class DomainMask {
 public:
  static DomainMask ball(const Grid& g, double radius) {
    if (!(radius > 0.0) || radius > g.half_extent * (1.0 + 1e-12))
      throw ValidationError("mask: radius must be in (0, L]");
    std::vector<unsigned char> inside(g.size(), 0);
    const double r2 = radius * radius * (1.0 + 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) inside[i] = norm2(g.point(i)) <= r2 ? 1 : 0;
    return DomainMask(g, std::move(inside), radius);
  }

  static DomainMask from_predicate(const Grid& g, const std::function<bool(const Point&)>& pred) {
    std::vector<unsigned char> inside(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) inside[i] = pred(g.point(i)) ? 1 : 0;
    return DomainMask(g, std::move(inside), std::nullopt);
  }

  static DomainMask whole(const Grid& g) {
    return DomainMask(g, std::vector<unsigned char>(g.size(), 1), std::nullopt);
  }

  const Grid& grid() const { return grid_; }
  bool contains(std::size_t i) const { return inside_[i] != 0; }
  std::optional<double> radius() const { return radius_; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(inside_.begin(), inside_.end(), 1)); }
  std::span<const unsigned char> flags() const { return inside_; }

 private:
  DomainMask(const Grid& g, std::vector<unsigned char> inside, std::optional<double> radius)
      : grid_(g), inside_(std::move(inside)), radius_(radius) {
    if (count() == 0) throw ValidationError("mask: empty interior");
  }

  Grid grid_;
  std::vector<unsigned char> inside_;
  std::optional<double> radius_;
};

namespace detail {

// Trapezoid factor along one axis: 1/2 at the two box endpoints.
inline double endpoint_factor(const Grid& g, int i) {
  return (i == 0 || i == g.points - 1) ? 0.5 : 1.0;
}

}  // namespace detail

/// Quadrature weight of each node. Box integrals use trapezoid endpoint half-weights so that
/// constants integrate exactly; under a mask every interior node carries a full cell h^N.
inline std::vector<double> quadrature_weights(const Grid& g, const DomainMask* mask = nullptr) {
  std::vector<double> w(g.size(), 0.0);
  const double cell = g.cell_volume();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (mask) {
      w[i] = mask->contains(i) ? cell : 0.0;
    } else {
      auto idx = g.multi_index(i);
      double f = detail::endpoint_factor(g, idx[0]);
      if (g.dim == 2) f *= detail::endpoint_factor(g, idx[1]);
      w[i] = cell * f;
    }
  }
  return w;
}

/// Quadrature of f (times an optional weight field) over the box or over a mask.
inline double integrate(const Field& f, const Field* weight = nullptr, const DomainMask* mask = nullptr) {
  if (weight) require_same_grid(f, *weight, "integrate");
  if (mask && !(mask->grid() == f.grid)) throw ValidationError("integrate: mask grid mismatch");
  const auto q = quadrature_weights(f.grid, mask);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (q[i] == 0.0) continue;
    sum += q[i] * f[i] * (weight ? (*weight)[i] : 1.0);
  }
  return sum;
}

/// (integral over |x| <= r of |f - c|^p)^(1/p). Nodes on the sphere |x| = r get half weight.
inline double lp_local_distance(const Field& f, double c, double p, double radius) {
  if (!(p >= 1.0)) throw ValidationError("lp_local_distance: p must be >= 1");
  if (!(radius > 0.0) || radius > f.grid.half_extent * (1.0 + 1e-12))
    throw ValidationError("lp_local_distance: radius must be in (0, L]");
  const Grid& g = f.grid;
  const double cell = g.cell_volume();
  const double tol = 1e-9 * g.spacing();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = norm(g.point(i));
    if (r > radius + tol) continue;
    const double w = (std::abs(r - radius) <= tol) ? 0.5 : 1.0;
    sum += w * cell * std::pow(std::abs(f[i] - c), p);
  }
  return std::pow(sum, 1.0 / p);
}

}  // namespace isoflow
