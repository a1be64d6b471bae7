#pragma once

#include <memory>
#include <optional>

#include "isoflow/convolution.hpp"
#include "isoflow/trajectory.hpp"

namespace isoflow {

/// The discrete operator u -> J*u - kappa u under a boundary mode. Under zero extension
/// kappa = 1; under a mask kappa(x) is the in-domain kernel mass (J * chi)(x).
class NonlocalOperator {
 public:
  /// Stencils with at least this many nonzero taps use the FFT path under zero extension.
  static constexpr std::size_t fft_threshold = 48;

  NonlocalOperator(const Grid& grid, Stencil stencil, const Boundary& boundary)
      : grid_(grid), stencil_(std::move(stencil)), boundary_(boundary), kappa_(grid, 1.0) {
    detail::require_fit(Field(grid), stencil_);
    if (boundary.is_mask()) {
      mask_.emplace(DomainMask::ball(grid, *boundary.mask_radius));
      kappa_ = convolve_masked(Field(grid, 1.0), stencil_, *mask_);
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (mask_->contains(i) && !(kappa_[i] > 0.0))
          throw ValidationError("operator: isolated node with zero in-domain kernel mass");
    } else if (stencil_.entries().size() >= fft_threshold) {
      fft_ = std::make_shared<const FftConvolver>(grid, stencil_);
    }
  }

  NonlocalOperator(const Grid& grid, Stencil stencil, DomainMask mask)
      : grid_(grid), stencil_(std::move(stencil)), kappa_(grid, 1.0) {
    detail::require_fit(Field(grid), stencil_);
    if (!(mask.grid() == grid)) throw ValidationError("operator: mask grid mismatch");
    boundary_ = Boundary::mask(mask.radius().value_or(grid.half_extent));
    mask_.emplace(std::move(mask));
    kappa_ = convolve_masked(Field(grid, 1.0), stencil_, *mask_);
  }

  const Grid& grid() const { return grid_; }
  const Stencil& stencil() const { return stencil_; }
  const Boundary& boundary() const { return boundary_; }
  const DomainMask* mask() const { return mask_ ? &*mask_ : nullptr; }
  const Field& kappa() const { return kappa_; }
  bool interior(std::size_t i) const { return !mask_ || mask_->contains(i); }

  Field convolve(const Field& u) const {
    if (mask_) return convolve_masked(u, stencil_, *mask_);
    if (fft_) return fft_->apply(u);
    return convolve_direct(u, stencil_);
  }

  /// J*u - kappa u. Under a mask this is evaluated as sum_y w(x-y) (u(y) - u(x)) so that
  /// constants map to zero exactly; nodes outside the mask map to zero.
  Field apply(const Field& u) const {
    if (mask_) return pair_sum(u, [](std::size_t, std::size_t) { return 1.0; });
    Field out = convolve(u);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= u[i];
    return out;
  }

  /// sum over interior y != x of c(x, y) w(x - y) (u(y) - u(x)), for interior x.
  template <class PairFactor>
  Field pair_sum(const Field& u, PairFactor&& factor) const {
    if (!mask_) throw ValidationError("operator: pair_sum requires a mask");
    const Grid& g = grid_;
    const int M = g.points, K = stencil_.reach(), W = stencil_.width();
    const auto& w = stencil_.dense();
    const auto in = mask_->flags();
    Field out(g);
    if (g.dim == 1) {
      for (int i = 0; i < M; ++i) {
        if (!in[i]) continue;
        const int kmin = std::max(-K, i - (M - 1)), kmax = std::min(K, i);
        double acc = 0.0;
        for (int k = kmin; k <= kmax; ++k) {
          const int j = i - k;
          if (k == 0 || !in[j]) continue;
          acc += factor(std::size_t(i), std::size_t(j)) * w[k + K] * (u.values[j] - u.values[i]);
        }
        out.values[i] = acc;
      }
      return out;
    }
    for (int i0 = 0; i0 < M; ++i0) {
      const int a0 = std::max(-K, i0 - (M - 1)), b0 = std::min(K, i0);
      for (int i1 = 0; i1 < M; ++i1) {
        const std::size_t x = g.flat_index(i0, i1);
        if (!in[x]) continue;
        const int a1 = std::max(-K, i1 - (M - 1)), b1 = std::min(K, i1);
        const double ux = u.values[x];
        double acc = 0.0;
        for (int k0 = a0; k0 <= b0; ++k0) {
          const std::size_t row = static_cast<std::size_t>(i0 - k0) * M;
          const double* wrow = &w[static_cast<std::size_t>(k0 + K) * W + K];
          for (int k1 = a1; k1 <= b1; ++k1) {
            const std::size_t y = row + static_cast<std::size_t>(i1 - k1);
            if (y == x || !in[y] || wrow[k1] == 0.0) continue;
            acc += factor(x, y) * wrow[k1] * (u.values[y] - ux);
          }
        }
        out.values[x] = acc;
      }
    }
    return out;
  }

 private:
  Grid grid_;
  Stencil stencil_;
  Boundary boundary_;
  std::optional<DomainMask> mask_;
  Field kappa_;
  std::shared_ptr<const FftConvolver> fft_;
};

}  // namespace isoflow
