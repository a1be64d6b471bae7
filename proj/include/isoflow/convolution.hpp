#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/grid.hpp"
#include "isoflow/kernel.hpp"

namespace isoflow {

namespace detail {

inline void require_fit(const Field& f, const Stencil& s) {
  if (s.dim() != f.grid.dim) throw ValidationError("convolve: stencil and grid dimensions differ");
  if (s.reach() > f.grid.points - 1 || s.truncation_radius() > 2.0 * f.grid.half_extent * (1.0 + 1e-12))
    throw ValidationError("convolve: stencil is wider than the grid");
}

}  // namespace detail

/// (J*f)(x) = sum_k w_k f(x - k h) with samples outside the grid treated as zero.
inline Field convolve_direct(const Field& f, const Stencil& s) {
  detail::require_fit(f, s);
  const Grid& g = f.grid;
  const int M = g.points, K = s.reach(), W = s.width();
  const auto& w = s.dense();
  Field out(g);
  if (g.dim == 1) {
    for (int i = 0; i < M; ++i) {
      const int kmin = std::max(-K, i - (M - 1)), kmax = std::min(K, i);
      double acc = 0.0;
      for (int k = kmin; k <= kmax; ++k) acc += w[k + K] * f.values[i - k];
      out.values[i] = acc;
    }
    return out;
  }
  for (int i0 = 0; i0 < M; ++i0) {
    const int a0 = std::max(-K, i0 - (M - 1)), b0 = std::min(K, i0);
    for (int i1 = 0; i1 < M; ++i1) {
      const int a1 = std::max(-K, i1 - (M - 1)), b1 = std::min(K, i1);
      double acc = 0.0;
      for (int k0 = a0; k0 <= b0; ++k0) {
        const double* wrow = &w[static_cast<std::size_t>(k0 + K) * W + K];
        const double* frow = &f.values[static_cast<std::size_t>(i0 - k0) * M + i1];
        for (int k1 = a1; k1 <= b1; ++k1) acc += wrow[k1] * frow[-k1];
      }
      out.values[g.flat_index(i0, i1)] = acc;
    }
  }
  return out;
}

/// Convolution restricted to a domain: for interior x, sum over interior y of w(x - y) f(y).
/// Zero outside the mask.
inline Field convolve_masked(const Field& f, const Stencil& s, const DomainMask& mask) {
  detail::require_fit(f, s);
  if (!(mask.grid() == f.grid)) throw ValidationError("convolve: mask grid mismatch");
  const Grid& g = f.grid;
  const int M = g.points, K = s.reach(), W = s.width();
  const auto& w = s.dense();
  const auto in = mask.flags();
  Field out(g);
  if (g.dim == 1) {
    for (int i = 0; i < M; ++i) {
      if (!in[i]) continue;
      const int kmin = std::max(-K, i - (M - 1)), kmax = std::min(K, i);
      double acc = 0.0;
      for (int k = kmin; k <= kmax; ++k)
        if (in[i - k]) acc += w[k + K] * f.values[i - k];
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
      double acc = 0.0;
      for (int k0 = a0; k0 <= b0; ++k0) {
        const std::size_t row = static_cast<std::size_t>(i0 - k0) * M;
        for (int k1 = a1; k1 <= b1; ++k1) {
          const std::size_t y = row + static_cast<std::size_t>(i1 - k1);
          if (in[y]) acc += w[static_cast<std::size_t>(k0 + K) * W + (k1 + K)] * f.values[y];
        }
      }
      out.values[x] = acc;
    }
  }
  return out;
}

namespace detail {

// The FFTW planner is not thread-safe; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using fftw_buffer = std::unique_ptr<T[], FftwFree>;

template <class T>
fftw_buffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return fftw_buffer<T>(p);
}

// Smallest 2^a 3^b 5^c 7^d >= n.
inline int next_fast_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace detail

/// Zero-padded FFT convolution for a fixed (grid, stencil) pair. Plans and the kernel spectrum are
/// built once; apply() allocates its own work buffers and may be called concurrently.
class FftConvolver {
 public:
  FftConvolver(const Grid& grid, const Stencil& stencil) : grid_(grid) {
    detail::require_fit(Field(grid), stencil);
    const int K = stencil.reach();
    padded_ = detail::next_fast_size(grid.points + 2 * K);
    const std::size_t n_real = grid.dim == 1 ? padded_ : std::size_t(padded_) * padded_;
    spectral_size_ = grid.dim == 1 ? padded_ / 2 + 1 : std::size_t(padded_) * (padded_ / 2 + 1);

    auto real = detail::fftw_alloc<double>(n_real);
    auto spec = detail::fftw_alloc<fftw_complex>(spectral_size_);
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      if (grid.dim == 1) {
        forward_ = fftw_plan_dft_r2c_1d(padded_, real.get(), spec.get(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(padded_, spec.get(), real.get(), FFTW_ESTIMATE);
      } else {
        forward_ = fftw_plan_dft_r2c_2d(padded_, padded_, real.get(), spec.get(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_2d(padded_, padded_, spec.get(), real.get(), FFTW_ESTIMATE);
      }
    }
    if (!forward_ || !backward_) throw std::runtime_error("fft: plan creation failed");

    // Stencil placed with negative offsets wrapped, so circular convolution lands at index i.
    std::fill(real.get(), real.get() + n_real, 0.0);
    for (const auto& e : stencil.entries()) {
      const int a = (e.offset[0] + padded_) % padded_;
      const int b = (e.offset[1] + padded_) % padded_;
      real[grid.dim == 1 ? a : std::size_t(a) * padded_ + b] = e.weight;
    }
    fftw_execute_dft_r2c(forward_, real.get(), spec.get());
    kernel_.resize(spectral_size_);
    const double scale = 1.0 / static_cast<double>(n_real);
    for (std::size_t i = 0; i < spectral_size_; ++i)
      kernel_[i] = std::complex<double>(spec[i][0], spec[i][1]) * scale;
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  ~FftConvolver() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }

  const Grid& grid() const { return grid_; }
  int padded_size() const { return padded_; }

  Field apply(const Field& f) const {
    if (!(f.grid == grid_)) throw ValidationError("fft convolve: grid mismatch");
    const int M = grid_.points;
    const std::size_t n_real = grid_.dim == 1 ? padded_ : std::size_t(padded_) * padded_;
    auto real = detail::fftw_alloc<double>(n_real);
    auto spec = detail::fftw_alloc<fftw_complex>(spectral_size_);
    std::fill(real.get(), real.get() + n_real, 0.0);
    if (grid_.dim == 1) {
      std::copy(f.values.begin(), f.values.end(), real.get());
    } else {
      for (int i = 0; i < M; ++i)
        std::copy_n(&f.values[std::size_t(i) * M], M, real.get() + std::size_t(i) * padded_);
    }
    fftw_execute_dft_r2c(forward_, real.get(), spec.get());
    for (std::size_t i = 0; i < spectral_size_; ++i) {
      const std::complex<double> v = std::complex<double>(spec[i][0], spec[i][1]) * kernel_[i];
      spec[i][0] = v.real();
      spec[i][1] = v.imag();
    }
    fftw_execute_dft_c2r(backward_, spec.get(), real.get());
    Field out(grid_);
    if (grid_.dim == 1) {
      std::copy_n(real.get(), M, out.values.begin());
    } else {
      for (int i = 0; i < M; ++i)
        std::copy_n(real.get() + std::size_t(i) * padded_, M, &out.values[std::size_t(i) * M]);
    }
    return out;
  }

 private:
  Grid grid_;
  int padded_ = 0;
  std::size_t spectral_size_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<std::complex<double>> kernel_;
};

/// One-shot FFT convolution with zero extension; agrees with convolve_direct to rounding.
inline Field convolve_fft(const Field& f, const Stencil& s) { return FftConvolver(f.grid, s).apply(f); }

}  // namespace isoflow
