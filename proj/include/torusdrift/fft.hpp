#pragma once
// Spectral operations on periodic grids backed by FFTW's complex transform.
// Plan creation in FFTW is not thread safe, so every plan is made and
// destroyed under a global mutex; execution happens outside it.

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "torusdrift/grid.hpp"

namespace torusdrift {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

namespace detail {

inline std::vector<std::complex<double>> fft_forward(const GridFunction& g) {
  const std::size_t total = g.v.size();
  std::vector<std::complex<double>> in(total), out(total);
  for (std::size_t i = 0; i < total; ++i) in[i] = g.v[i];
  int dims[3];
  for (int a = 0; a < g.d; ++a) dims[a] = static_cast<int>(g.n_axis());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    plan = fftw_plan_dft(g.d, dims, reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()),
                         FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline GridFunction fft_inverse(std::vector<std::complex<double>> c, int d, int level) {
  GridFunction g = make_grid(d, level);
  const std::size_t total = g.v.size();
  if (c.size() != total) throw std::invalid_argument("fft_inverse: size mismatch");
  std::vector<std::complex<double>> out(total);
  int dims[3];
  for (int a = 0; a < d; ++a) dims[a] = static_cast<int>(g.n_axis());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    plan = fftw_plan_dft(d, dims, reinterpret_cast<fftw_complex*>(c.data()),
                         reinterpret_cast<fftw_complex*>(out.data()),
                         FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lk(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) g.v[i] = out[i].real() * scale;
  return g;
}

// signed frequency of row-major bin j on an axis of n points
inline int bin_freq(std::size_t j, std::size_t n) {
  return j < n / 2 + (n & 1) ? static_cast<int>(j) : static_cast<int>(j) - static_cast<int>(n);
}

}  // namespace detail

// Applies a spectral multiplier: out-hat(k) = mult(k) * in-hat(k), where
// mult maps the signed integer frequency vector to a complex factor.
template <class M>
GridFunction spectral_filter(const GridFunction& g, M&& mult) {
  auto c = detail::fft_forward(g);
  const std::size_t n = g.n_axis();
  int k[3] = {0, 0, 0};
  std::size_t j[3] = {0, 0, 0};
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::size_t rem = i;
    for (int a = g.d - 1; a >= 0; --a) {
      j[a] = rem % n;
      rem /= n;
      k[a] = detail::bin_freq(j[a], n);
    }
    c[i] *= mult(k);
  }
  return detail::fft_inverse(std::move(c), g.d, g.level);
}

// d'th partial derivative; the Nyquist bin is dropped since its derivative
// has no real representation on the grid.
inline GridFunction spectral_derivative(const GridFunction& g, int axis) {
  const int n2 = static_cast<int>(g.n_axis() / 2);
  const bool even = (g.n_axis() % 2) == 0;
  return spectral_filter(g, [axis, n2, even](const int* k) {
    if (even && (k[axis] == -n2 || k[axis] == n2)) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(0.0, 2.0 * M_PI * k[axis]);
  });
}

inline std::vector<GridFunction> spectral_gradient(const GridFunction& g) {
  std::vector<GridFunction> out;
  out.reserve(g.d);
  for (int a = 0; a < g.d; ++a) out.push_back(spectral_derivative(g, a));
  return out;
}

// Solves (1/2) Laplace(u) = f - mean(f) with mean(u) = 0.
inline GridFunction inverse_half_laplacian(const GridFunction& f) {
  return spectral_filter(f, [](const int* k) {
    double k2 = 0.0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<double>(k[a]) * k[a];
    if (k2 == 0.0) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(-1.0 / (2.0 * M_PI * M_PI * k2), 0.0);
  });
}

// Removes the mean.
inline GridFunction project_zero_mean(const GridFunction& g) {
  GridFunction out = g;
  const double m = grid_integral(g);
  for (double& t : out.v) t -= m;
  return out;
}

}  // namespace torusdrift
