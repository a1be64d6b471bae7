#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/grid.hpp"

namespace isoflow {

namespace detail {

inline double unit_sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

inline void require_dim(int dim) {
  if (dim != 1 && dim != 2) throw ValidationError("kernel: dim must be 1 or 2");
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("kernel: ") + name + " must be positive");
}

}  // namespace detail

struct GaussianKernel {
  double sigma;
};
struct LaplaceKernel {
  double scale;
};
struct UniformBallKernel {
  double radius;
};
/// Radial profile J(r) sampled at increasing radii starting at 0; linear in between, zero beyond.
struct TabulatedKernel {
  std::vector<double> radii;
  std::vector<double> values;
};

using KernelFamily = std::variant<GaussianKernel, LaplaceKernel, UniformBallKernel, TabulatedKernel>;

struct KernelMoments {
  double mass = 0.0;
  Point mean{0.0, 0.0};
  /// Total second moment: integral of |s|^2 J(s).
  double second_moment = 0.0;
  /// Zero for closed forms; quadrature bound for tabulated profiles.
  double error_bound = 0.0;
};

/// Radial probability density J on R^N. Immutable once built; parameters are validated here so
/// that eval is total.
class Kernel {
 public:
  static constexpr double mass_tolerance = 1e-6;

  static Kernel gaussian(double sigma, int dim = 1) {
    detail::require_positive(sigma, "sigma");
    return Kernel(GaussianKernel{sigma}, dim);
  }
  static Kernel laplace(double scale, int dim = 1) {
    detail::require_positive(scale, "scale");
    return Kernel(LaplaceKernel{scale}, dim);
  }
  static Kernel uniform_ball(double radius, int dim = 1) {
    detail::require_positive(radius, "radius");
    return Kernel(UniformBallKernel{radius}, dim);
  }
  static Kernel tabulated(std::vector<double> radii, std::vector<double> values, int dim = 1) {
    if (radii.size() < 2 || radii.size() != values.size())
      throw ValidationError("kernel: tabulated profile needs >= 2 matching (radius, value) samples");
    if (radii.front() != 0.0) throw ValidationError("kernel: tabulated radii must start at 0");
    for (std::size_t i = 1; i < radii.size(); ++i)
      if (!(radii[i] > radii[i - 1])) throw ValidationError("kernel: tabulated radii must increase");
    for (double v : values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("kernel: tabulated values must be >= 0");
    Kernel k(TabulatedKernel{std::move(radii), std::move(values)}, dim);
    const auto m = k.moments_unchecked();
    if (std::abs(m.mass - 1.0) > mass_tolerance)
      throw ValidationError("kernel: tabulated profile has mass " + std::to_string(m.mass) + ", expected 1");
    return k;
  }

  int dim() const { return dim_; }
  const KernelFamily& family() const { return family_; }

  std::string family_name() const {
    struct V {
      std::string operator()(const GaussianKernel&) const { return "gaussian"; }
      std::string operator()(const LaplaceKernel&) const { return "laplace"; }
      std::string operator()(const UniformBallKernel&) const { return "uniform-ball"; }
      std::string operator()(const TabulatedKernel&) const { return "tabulated"; }
    };
    return std::visit(V{}, family_);
  }

  /// J as a function of the radius |x|.
  double radial(double r) const {
    using std::numbers::pi;
    struct V {
      int n;
      double r;
      double operator()(const GaussianKernel& g) const {
        const double s2 = g.sigma * g.sigma;
        const double norm = n == 1 ? std::sqrt(2.0 * pi * s2) : 2.0 * pi * s2;
        return std::exp(-r * r / (2.0 * s2)) / norm;
      }
      double operator()(const LaplaceKernel& l) const {
        const double norm = n == 1 ? 2.0 * l.scale : 2.0 * pi * l.scale * l.scale;
        return std::exp(-r / l.scale) / norm;
      }
      double operator()(const UniformBallKernel& u) const {
        if (r > u.radius) return 0.0;
        return n == 1 ? 1.0 / (2.0 * u.radius) : 1.0 / (pi * u.radius * u.radius);
      }
      double operator()(const TabulatedKernel& t) const {
        if (r >= t.radii.back()) return r == t.radii.back() ? t.values.back() : 0.0;
        const auto it = std::upper_bound(t.radii.begin(), t.radii.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - t.radii.begin()) - 1;
        const double a = (r - t.radii[i]) / (t.radii[i + 1] - t.radii[i]);
        return (1.0 - a) * t.values[i] + a * t.values[i + 1];
      }
    };
    return std::visit(V{dim_, r}, family_);
  }

  double eval(const Point& x) const { return radial(norm(x)); }

  /// Radius of the support for compactly supported families, +inf otherwise.
  double support_radius() const {
    if (auto* u = std::get_if<UniformBallKernel>(&family_)) return u->radius;
    if (auto* t = std::get_if<TabulatedKernel>(&family_)) return t->radii.back();
    return INFINITY;
  }

  /// Kernel mass outside the ball of radius R.
  double tail_mass(double R) const {
    struct V {
      int n;
      double R;
      double operator()(const GaussianKernel& g) const {
        const double z = R / g.sigma;
        return n == 1 ? std::erfc(z / std::numbers::sqrt2) : std::exp(-0.5 * z * z);
      }
      double operator()(const LaplaceKernel& l) const {
        const double z = R / l.scale;
        return n == 1 ? std::exp(-z) : std::exp(-z) * (1.0 + z);
      }
      double operator()(const UniformBallKernel& u) const {
        if (R >= u.radius) return 0.0;
        return 1.0 - std::pow(R / u.radius, n);
      }
      double operator()(const TabulatedKernel& t) const { return R >= t.radii.back() ? 0.0 : 1.0; }
    };
    return std::visit(V{dim_, R}, family_);
  }

  KernelMoments moments() const { return moments_unchecked(); }

 private:
  Kernel(KernelFamily f, int dim) : family_(std::move(f)), dim_(dim) { detail::require_dim(dim); }

  KernelMoments moments_unchecked() const {
    KernelMoments m;
    m.mass = 1.0;
    const double n = dim_;
    if (auto* g = std::get_if<GaussianKernel>(&family_)) {
      m.second_moment = n * g->sigma * g->sigma;
    } else if (auto* l = std::get_if<LaplaceKernel>(&family_)) {
      // b^2 * Gamma(N+2) / Gamma(N)
      m.second_moment = l->scale * l->scale * n * (n + 1.0);
    } else if (auto* u = std::get_if<UniformBallKernel>(&family_)) {
      m.second_moment = n * u->radius * u->radius / (n + 2.0);
    } else {
      const auto& t = std::get<TabulatedKernel>(family_);
      // Three-point Gauss-Legendre per segment: exact for the piecewise polynomials involved
      // (linear profile times r^{N+1}, degree <= 4).
      static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
      static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      double mass = 0.0, second = 0.0, abs_sum = 0.0;
      for (std::size_t i = 0; i + 1 < t.radii.size(); ++i) {
        const double a = t.radii[i], b = t.radii[i + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int q = 0; q < 3; ++q) {
          const double r = mid + half * nodes[q];
          const double j = t.values[i] + (t.values[i + 1] - t.values[i]) * (r - a) / (b - a);
          const double base = weights[q] * half * j * std::pow(r, n - 1.0);
          mass += base;
          second += base * r * r;
          abs_sum += std::abs(base) * (1.0 + r * r);
        }
      }
      const double area = detail::unit_sphere_area(dim_);
      m.mass = area * mass;
      m.second_moment = area * second / m.mass;
      m.error_bound = 64.0 * std::numeric_limits<double>::epsilon() * area * abs_sum;
    }
    return m;
  }

  KernelFamily family_;
  int dim_;
};

inline double eval(const Kernel& k, const Point& x) { return k.eval(x); }
inline KernelMoments moments(const Kernel& k) { return k.moments(); }

struct StencilEntry {
  std::array<int, 2> offset{0, 0};
  double weight = 0.0;
};

/// Discrete carrier of J: nonnegative weights on integer offsets, symmetric under negation.
class Stencil {
 public:
  Stencil() = default;

  /// Builds from explicit entries; offsets must lie within [-reach, reach]^N.
  static Stencil from_entries(int dim, double spacing, std::vector<StencilEntry> entries, double truncation_radius,
                              bool renormalized) {
    detail::require_dim(dim);
    if (!(spacing > 0.0)) throw ValidationError("stencil: spacing must be positive");
    Stencil s;
    s.dim_ = dim;
    s.spacing_ = spacing;
    s.truncation_radius_ = truncation_radius;
    s.renormalized_ = renormalized;
    int reach = 0;
    for (const auto& e : entries) {
      if (!(e.weight >= 0.0)) throw ValidationError("stencil: weights must be nonnegative");
      if (dim == 1 && e.offset[1] != 0) throw ValidationError("stencil: 1D offsets must have zero second component");
      reach = std::max({reach, std::abs(e.offset[0]), std::abs(e.offset[1])});
    }
    s.reach_ = reach;
    const int width = 2 * reach + 1;
    s.dense_.assign(dim == 1 ? width : static_cast<std::size_t>(width) * width, 0.0);
    for (const auto& e : entries) s.dense_[s.dense_index(e.offset[0], e.offset[1])] += e.weight;
    s.rebuild_entries();
    for (const auto& e : s.entries_)
      if (s.weight(-e.offset[0], -e.offset[1]) != e.weight)
        throw ValidationError("stencil: weights must be symmetric under offset negation");
    return s;
  }

  /// Builds from a dense (2 reach + 1)^N weight array in row-major offset order.
  static Stencil from_dense(int dim, double spacing, int reach, std::vector<double> dense, double truncation_radius,
                            bool renormalized) {
    detail::require_dim(dim);
    const std::size_t w = static_cast<std::size_t>(2 * reach + 1);
    if (reach < 0 || dense.size() != (dim == 1 ? w : w * w)) throw ValidationError("stencil: dense size mismatch");
    Stencil s;
    s.dim_ = dim;
    s.spacing_ = spacing;
    s.truncation_radius_ = truncation_radius;
    s.renormalized_ = renormalized;
    s.reach_ = reach;
    s.dense_ = std::move(dense);
    s.rebuild_entries();
    return s;
  }

  static Stencil delta(int dim, double spacing) {
    return from_entries(dim, spacing, {StencilEntry{{0, 0}, 1.0}}, 0.0, true);
  }

  int dim() const { return dim_; }
  int reach() const { return reach_; }
  int width() const { return 2 * reach_ + 1; }
  double spacing() const { return spacing_; }
  double truncation_radius() const { return truncation_radius_; }
  bool renormalized() const { return renormalized_; }
  const std::vector<StencilEntry>& entries() const { return entries_; }
  const std::vector<double>& dense() const { return dense_; }

  double weight(int k0, int k1 = 0) const {
    if (std::abs(k0) > reach_ || std::abs(k1) > reach_ || (dim_ == 1 && k1 != 0)) return 0.0;
    return dense_[dense_index(k0, k1)];
  }

  double sum() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.weight;
    return s;
  }

  std::size_t dense_index(int k0, int k1) const {
    const int w = width();
    return dim_ == 1 ? static_cast<std::size_t>(k0 + reach_)
                     : static_cast<std::size_t>(k0 + reach_) * w + static_cast<std::size_t>(k1 + reach_);
  }

 private:
  void rebuild_entries() {
    entries_.clear();
    const int w = width();
    const int outer = w;
    const int inner = dim_ == 1 ? 1 : w;
    for (int a = 0; a < outer; ++a)
      for (int b = 0; b < inner; ++b) {
        const std::size_t idx = static_cast<std::size_t>(a) * inner + b;
        if (dense_[idx] != 0.0)
          entries_.push_back(StencilEntry{{a - reach_, dim_ == 1 ? 0 : b - reach_}, dense_[idx]});
      }
  }

  int dim_ = 1;
  int reach_ = 0;
  double spacing_ = 1.0;
  double truncation_radius_ = 0.0;
  bool renormalized_ = false;
  std::vector<double> dense_{1.0};
  std::vector<StencilEntry> entries_;
};

enum class StencilPolicy { renormalize, raw };

inline constexpr double default_trunc_tol = 1e-12;
inline constexpr std::size_t default_stencil_cap = std::size_t{1} << 22;

/// Smallest radius whose discarded kernel mass is <= trunc_tol.
inline double truncation_radius(const Kernel& k, double trunc_tol) {
  const double support = k.support_radius();
  if (std::isfinite(support)) return support;
  double hi = 1.0;
  while (k.tail_mass(hi) > trunc_tol) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (k.tail_mass(mid) > trunc_tol ? lo : hi) = mid;
  }
  return hi;
}

/// Midpoint discretization h^N J(k h) over the truncation ball. Nodes falling exactly on the
/// support boundary of a compact kernel get half weight.
inline Stencil discretize(const Kernel& kernel, double spacing, bool renormalize = true,
                          double trunc_tol = default_trunc_tol, std::size_t max_offsets = default_stencil_cap) {
  if (!(spacing > 0.0)) throw ValidationError("discretize: spacing must be positive");
  if (!(trunc_tol > 0.0 && trunc_tol < 1.0)) throw ValidationError("discretize: trunc_tol must be in (0, 1)");
  const int n = kernel.dim();
  const double radius = truncation_radius(kernel, trunc_tol);
  const double reach_real = std::floor(radius / spacing * (1.0 + 1e-12));
  const double width = 2.0 * reach_real + 1.0;
  if (std::pow(width, n) > static_cast<double>(max_offsets))
    throw ValidationError("discretize: stencil needs " + std::to_string(std::pow(width, n)) +
                          " offsets (cap " + std::to_string(max_offsets) +
                          "); use a coarser spacing or a larger trunc_tol");
  const int reach = static_cast<int>(reach_real);
  const bool compact = std::isfinite(kernel.support_radius());
  const double cell = std::pow(spacing, n);
  const double h2 = spacing * spacing;
  const double limit2 = radius * radius * (1.0 + 1e-12);

  const int w = 2 * reach + 1;
  std::vector<double> dense(n == 1 ? w : static_cast<std::size_t>(w) * w, 0.0);
  auto dense_index = [&](int k0, int k1) {
    return n == 1 ? static_cast<std::size_t>(k0 + reach)
                  : static_cast<std::size_t>(k0 + reach) * w + static_cast<std::size_t>(k1 + reach);
  };
  // One evaluation per squared integer norm keeps the weights exactly radial.
  std::vector<double> by_norm(static_cast<std::size_t>(n * reach * reach + 1), -1.0);
  const int k1max = n == 1 ? 0 : reach;
  for (int k0 = -reach; k0 <= reach; ++k0)
    for (int k1 = -k1max; k1 <= k1max; ++k1) {
      const int q = k0 * k0 + k1 * k1;
      const double r2 = h2 * q;
      if (r2 > limit2) continue;
      double& cached = by_norm[static_cast<std::size_t>(q)];
      if (cached < 0.0) {
        const double r = std::sqrt(r2);
        double v = cell * kernel.radial(r);
        if (compact && std::abs(r - radius) <= 1e-9 * spacing) v *= 0.5;
        cached = v;
      }
      dense[dense_index(k0, k1)] = cached;
    }
  if (renormalize) {
    double total = 0.0;
    for (double v : dense) total += v;
    if (!(total > 0.0)) throw ValidationError("discretize: stencil has zero mass at this spacing");
    for (double& v : dense) v /= total;
  }
  return Stencil::from_dense(n, spacing, reach, std::move(dense), radius, renormalize);
}

inline Stencil discretize(const Kernel& kernel, double spacing, StencilPolicy policy,
                          double trunc_tol = default_trunc_tol) {
  return discretize(kernel, spacing, policy == StencilPolicy::renormalize, trunc_tol);
}

/// Discrete second moment: sum of w_k |k h|^2.
inline double stencil_second_moment(const Stencil& s, double spacing) {
  double m = 0.0;
  for (const auto& e : s.entries()) {
    const double q = double(e.offset[0]) * e.offset[0] + double(e.offset[1]) * e.offset[1];
    m += e.weight * q * spacing * spacing;
  }
  return m;
}

inline double stencil_second_moment(const Stencil& s) { return stencil_second_moment(s, s.spacing()); }

}  // namespace isoflow
