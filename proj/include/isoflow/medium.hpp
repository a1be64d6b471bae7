#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/grid.hpp"

namespace isoflow {

struct ConstantMedium {
  double value;
};
/// a / (1 + |x|^beta)
struct PowerDecayMedium {
  double amplitude;
  double exponent;
};
/// a exp(-|x|^2 / (2 sigma^2))
struct GaussianDecayMedium {
  double amplitude;
  double sigma;
};
/// a exp(-|x| / b)
struct ExponentialDecayMedium {
  double amplitude;
  double scale;
};

enum class TailClass { integrable, nonintegrable, unknown };

inline std::string to_string(TailClass t) {
  switch (t) {
    case TailClass::integrable: return "integrable";
    case TailClass::nonintegrable: return "nonintegrable";
    default: return "unknown";
  }
}

/// Radial table rho(r), linear in between samples and held at the last value beyond them.
/// The tail class is declared by the user and never inferred.
struct CustomMedium {
  std::vector<double> radii;
  std::vector<double> values;
  TailClass tail = TailClass::unknown;
  /// Radius of the ball on which the mass is computed by quadrature.
  double trust_radius = 0.0;
};

using MediumFamily =
    std::variant<ConstantMedium, PowerDecayMedium, GaussianDecayMedium, ExponentialDecayMedium, CustomMedium>;

/// rho(x) >= eta / (1 + |x|^gamma)
struct DecayFloor {
  double eta;
  double gamma;
};

struct MediumClassification {
  TailClass integrable = TailClass::unknown;
  /// +inf when not integrable, NaN when unknown.
  double total_mass = std::numeric_limits<double>::quiet_NaN();
  double mass_error = 0.0;
  std::optional<DecayFloor> decay_floor;

  bool is_integrable() const { return integrable == TailClass::integrable; }
};

/// The positive continuous density rho(x), optionally lifted by a floor max(rho, alpha).
class Medium {
 public:
  static Medium constant(double c, int dim = 1) {
    positive(c, "value");
    return Medium(ConstantMedium{c}, dim);
  }
  static Medium power_decay(double amplitude, double exponent, int dim = 1) {
    positive(amplitude, "amplitude");
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) throw ValidationError("medium: exponent must be >= 0");
    return Medium(PowerDecayMedium{amplitude, exponent}, dim);
  }
  static Medium gaussian_decay(double amplitude, double sigma, int dim = 1) {
    positive(amplitude, "amplitude");
    positive(sigma, "sigma");
    return Medium(GaussianDecayMedium{amplitude, sigma}, dim);
  }
  static Medium exponential_decay(double amplitude, double scale, int dim = 1) {
    positive(amplitude, "amplitude");
    positive(scale, "scale");
    return Medium(ExponentialDecayMedium{amplitude, scale}, dim);
  }
  static Medium custom(std::vector<double> radii, std::vector<double> values, TailClass tail, double trust_radius,
                       int dim = 1) {
    if (radii.empty() || radii.size() != values.size())
      throw ValidationError("medium: custom table needs matching radii and values");
    if (radii.front() != 0.0) throw ValidationError("medium: custom radii must start at 0");
    for (std::size_t i = 1; i < radii.size(); ++i)
      if (!(radii[i] > radii[i - 1])) throw ValidationError("medium: custom radii must increase");
    for (double v : values) positive(v, "table value");
    if (tail == TailClass::integrable) positive(trust_radius, "trust_radius");
    return Medium(CustomMedium{std::move(radii), std::move(values), tail, trust_radius}, dim);
  }

  int dim() const { return dim_; }
  const MediumFamily& family() const { return family_; }
  std::optional<double> floor_alpha() const { return floor_; }

  std::string family_name() const {
    struct V {
      std::string operator()(const ConstantMedium&) const { return "constant"; }
      std::string operator()(const PowerDecayMedium&) const { return "power-decay"; }
      std::string operator()(const GaussianDecayMedium&) const { return "gaussian-decay"; }
      std::string operator()(const ExponentialDecayMedium&) const { return "exponential-decay"; }
      std::string operator()(const CustomMedium&) const { return "custom"; }
    };
    return std::visit(V{}, family_);
  }

  /// Unfloored profile as a function of |x|.
  double base_radial(double r) const {
    struct V {
      double r;
      double operator()(const ConstantMedium& m) const { return m.value; }
      double operator()(const PowerDecayMedium& m) const { return m.amplitude / (1.0 + std::pow(r, m.exponent)); }
      double operator()(const GaussianDecayMedium& m) const {
        return m.amplitude * std::exp(-r * r / (2.0 * m.sigma * m.sigma));
      }
      double operator()(const ExponentialDecayMedium& m) const { return m.amplitude * std::exp(-r / m.scale); }
      double operator()(const CustomMedium& m) const {
        if (r >= m.radii.back()) return m.values.back();
        const auto it = std::upper_bound(m.radii.begin(), m.radii.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - m.radii.begin()) - 1;
        const double a = (r - m.radii[i]) / (m.radii[i + 1] - m.radii[i]);
        return (1.0 - a) * m.values[i] + a * m.values[i + 1];
      }
    };
    return std::visit(V{r}, family_);
  }

  double radial(double r) const {
    const double v = base_radial(r);
    return floor_ ? std::max(v, *floor_) : v;
  }

  double eval(const Point& x) const { return radial(norm(x)); }

  /// x -> max(rho(x), alpha). Flooring twice keeps the larger floor.
  Medium floored(double alpha) const {
    positive(alpha, "floor alpha");
    Medium m = *this;
    m.floor_ = floor_ ? std::max(*floor_, alpha) : alpha;
    return m;
  }

  Field sample(const Grid& g) const {
    if (g.dim != dim_) throw ValidationError("medium: grid dimension differs from medium dimension");
    return Field::from_function(g, [this](const Point& x) { return eval(x); });
  }

  MediumClassification classify() const {
    using std::numbers::pi;
    const double n = dim_;
    const double area = dim_ == 1 ? 2.0 : 2.0 * pi;
    MediumClassification c;
    if (auto* m = std::get_if<ConstantMedium>(&family_)) {
      c.integrable = TailClass::nonintegrable;
      c.total_mass = INFINITY;
      c.decay_floor = DecayFloor{m->value, 0.0};
    } else if (auto* m = std::get_if<PowerDecayMedium>(&family_)) {
      if (m->exponent > n) {
        c.integrable = TailClass::integrable;
        // integral of r^{N-1}/(1+r^beta) over (0, inf) = (pi/beta) / sin(N pi / beta)
        c.total_mass = area * m->amplitude * (pi / m->exponent) / std::sin(n * pi / m->exponent);
      } else {
        c.integrable = TailClass::nonintegrable;
        c.total_mass = INFINITY;
      }
      if (m->exponent <= 2.0) c.decay_floor = DecayFloor{m->amplitude, m->exponent};
    } else if (auto* m = std::get_if<GaussianDecayMedium>(&family_)) {
      c.integrable = TailClass::integrable;
      c.total_mass = m->amplitude * std::pow(2.0 * pi * m->sigma * m->sigma, n / 2.0);
    } else if (auto* m = std::get_if<ExponentialDecayMedium>(&family_)) {
      c.integrable = TailClass::integrable;
      // a b^N |S^{N-1}| Gamma(N)
      c.total_mass = m->amplitude * std::pow(m->scale, n) * area * std::tgamma(n);
    } else {
      const auto& cm = std::get<CustomMedium>(family_);
      c.integrable = cm.tail;
      if (cm.tail == TailClass::integrable) {
        c.total_mass = radial_mass(cm.trust_radius, /*floored=*/false);
        c.mass_error = INFINITY;  // tail beyond the trust radius is declared, not measured
      } else if (cm.tail == TailClass::nonintegrable) {
        c.total_mass = INFINITY;
      }
    }
    if (floor_) {
      c.integrable = TailClass::nonintegrable;
      c.total_mass = INFINITY;
      c.mass_error = 0.0;
      if (c.decay_floor)
        c.decay_floor->eta = std::max(c.decay_floor->eta, *floor_);
      else
        c.decay_floor = DecayFloor{*floor_, 0.0};
    }
    return c;
  }

 private:
  Medium(MediumFamily f, int dim) : family_(std::move(f)), dim_(dim) {
    if (dim != 1 && dim != 2) throw ValidationError("medium: dim must be 1 or 2");
  }

  static void positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("medium: ") + name + " must be positive");
  }

  // Composite Simpson in the radius over [0, R].
  double radial_mass(double R, bool floored) const {
    const int n = 20000;
    const double h = R / n;
    auto f = [&](double r) { return (floored ? radial(r) : base_radial(r)) * (dim_ == 1 ? 1.0 : r); };
    double s = f(0.0) + f(R);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return (dim_ == 1 ? 2.0 : 2.0 * std::numbers::pi) * s * h / 3.0;
  }

  MediumFamily family_;
  int dim_;
  std::optional<double> floor_;
};

inline double eval_rho(const Medium& m, const Point& x) { return m.eval(x); }
inline MediumClassification classify(const Medium& m) { return m.classify(); }
inline Medium floor(const Medium& m, double alpha) { return m.floored(alpha); }

/// Default floor sequence alpha_n = alpha_0 2^{-n}.
inline double floor_alpha(double alpha0, int n) { return alpha0 * std::ldexp(1.0, -n); }

struct WeightedMean {
  double value;
  /// sup|u0| * (rho mass off the box) / (rho mass on the box)
  double tail_bound;
};

/// E_rho(u0) = int u0 rho / int rho over the grid box.
inline WeightedMean weighted_mean(const Medium& m, const Field& u0) {
  const auto c = m.classify();
  if (!c.is_integrable()) throw ValidationError("E_ρ undefined: medium is not integrable");
  const Field rho = m.sample(u0.grid);
  const double num = integrate(u0, &rho);
  const double den = integrate(rho);
  double sup = 0.0;
  for (double v : u0.values) sup = std::max(sup, std::abs(v));
  const double off_box = std::max(c.total_mass - den, 0.0);
  return WeightedMean{num / den, sup * off_box / den};
}

}  // namespace isoflow
