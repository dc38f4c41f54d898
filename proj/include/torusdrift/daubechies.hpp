#pragma once
// Daubechies filters and dyadic evaluation tables.
//
// Filters come from spectral factorization of the binomial symbol: the roots
// of z^{N-1} P((2-z-1/z)/4) are found with Durand-Kerner iteration and the
// minimum-phase half is kept. Tables hold the scaling function phi and the
// mother psi sampled at j/2^L over their common support [0, 2N-1]; values at
// dyadic points are exact because the two-scale relation is applied as an
// exact refinement starting from the integer-point eigenvector. Derivative
// tables are centered finite differences of the value tables.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace torusdrift {

namespace detail {

using cpoly = std::vector<std::complex<double>>;  // coeffs, low degree first

inline cpoly cpoly_mul(const cpoly& a, const cpoly& b) {
  cpoly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline std::complex<double> cpoly_eval(const cpoly& p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

inline std::vector<std::complex<double>> durand_kerner(cpoly p) {
  const std::size_t deg = p.size() - 1;
  const std::complex<double> lead = p.back();
  for (auto& c : p) c /= lead;
  std::vector<std::complex<double>> r(deg);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> acc = 1.0;
  for (std::size_t i = 0; i < deg; ++i) {
    acc *= seed;
    r[i] = acc;
  }
  for (int it = 0; it < 600; ++it) {
    double moved = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) denom *= r[i] - r[j];
      const std::complex<double> step = cpoly_eval(p, r[i]) / denom;
      r[i] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-15) break;
  }
  return r;
}

}  // namespace detail

// Orthonormal Daubechies scaling filter with N vanishing moments, 2N taps,
// sum sqrt(2), minimum-phase (energy at the front).
inline std::vector<double> daubechies_filter(int N) {
  if (N < 1 || N > 10)
    throw std::invalid_argument("daubechies_filter: N must lie in [1,10]");
  if (N == 1) {
    const double r = 1.0 / std::sqrt(2.0);
    return {r, r};
  }
  using detail::cpoly;

  // R(z) = z^{N-1} P((2-z-1/z)/4) = sum_k C(N-1+k,k) (-1/4)^k z^{N-1-k} (z-1)^{2k}
  cpoly R(2 * N - 1, 0.0);
  double binom = 1.0;  // C(N-1+k, k)
  for (int k = 0; k <= N - 1; ++k) {
    if (k > 0) binom = binom * (N - 1 + k) / k;
    cpoly term = {1.0};
    const cpoly zm1 = {-1.0, 1.0};
    for (int j = 0; j < 2 * k; ++j) term = detail::cpoly_mul(term, zm1);
    const double scale = binom * std::pow(-0.25, k);
    for (std::size_t j = 0; j < term.size(); ++j)
      R[static_cast<std::size_t>(N - 1 - k) + j] += scale * term[j];
  }

  const auto roots = detail::durand_kerner(R);
  cpoly q = {1.0};
  for (const auto& z : roots)
    if (std::abs(z) < 1.0) q = detail::cpoly_mul(q, {-z, 1.0});
  const std::complex<double> q1 = detail::cpoly_eval(q, 1.0);
  for (auto& c : q) c /= q1;

  cpoly m0 = q;
  for (int j = 0; j < N; ++j) m0 = detail::cpoly_mul(m0, {0.5, 0.5});

  std::vector<double> h(2 * N);
  for (int k = 0; k < 2 * N; ++k) h[k] = std::sqrt(2.0) * m0[k].real();

  double front = 0.0, back = 0.0;
  for (int k = 0; k < N; ++k) {
    front += h[k] * h[k];
    back += h[2 * N - 1 - k] * h[2 * N - 1 - k];
  }
  if (back > front) std::reverse(h.begin(), h.end());
  return h;
}

// phi and psi sampled at j / 2^L for j = 0 .. (2N-1) 2^L, plus centered
// finite-difference derivative tables on the same grid.
struct WaveletTables {
  int N = 4;
  int L = 14;
  std::vector<double> phi, psi, dphi, dpsi;

  int support() const { return 2 * N - 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(support()) * (std::size_t(1) << L) + 1;
  }
};

inline WaveletTables build_wavelet_tables(int N, int L) {
  if (L < 1 || L > 22) throw std::invalid_argument("wavelet tables: bad L");
  const std::vector<double> h = daubechies_filter(N);
  const int taps = 2 * N;
  const int sup = 2 * N - 1;
  WaveletTables t;
  t.N = N;
  t.L = L;

  // phi at the integers: eigenvector of A(i,j) = sqrt(2) h_{2i-j} at
  // eigenvalue 1, normalized to sum 1 (partition of unity at integers)
  std::vector<double> vals;
  if (N == 1) {
    vals = {1.0, 0.0};  // Haar: phi = 1 on [0,1)
  } else {
    const int n = sup - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < sup; ++i)
      for (int j = 1; j < sup; ++j) {
        const int k = 2 * i - j;
        if (k >= 0 && k < taps) A(i - 1, j - 1) = std::sqrt(2.0) * h[k];
      }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0))
        best = i;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    v /= v.sum();
    vals.assign(sup + 1, 0.0);
    for (int i = 1; i < sup; ++i) vals[i] = v[i - 1];
  }

  // exact dyadic refinement: phi(j/2^{m+1}) = sqrt(2) sum_k h_k phi(j/2^m - k)
  for (int m = 0; m < L; ++m) {
    const std::size_t old_mesh = std::size_t(1) << m;
    std::vector<double> next(static_cast<std::size_t>(sup) * old_mesh * 2 + 1, 0.0);
    for (std::size_t j = 0; j < next.size(); ++j) {
      double s = 0.0;
      for (int k = 0; k < taps; ++k) {
        const long long idx = static_cast<long long>(j) - static_cast<long long>(k) * static_cast<long long>(old_mesh);
        if (idx >= 0 && idx < static_cast<long long>(vals.size())) s += h[k] * vals[static_cast<std::size_t>(idx)];
      }
      next[j] = std::sqrt(2.0) * s;
    }
    vals.swap(next);
  }
  t.phi = std::move(vals);

  // psi(j/2^L) = sqrt(2) sum_k g_k phi(2j/2^L - k), g_k = (-1)^k h_{2N-1-k}
  const std::size_t mesh = std::size_t(1) << L;
  t.psi.assign(t.phi.size(), 0.0);
  for (std::size_t j = 0; j < t.psi.size(); ++j) {
    double s = 0.0;
    for (int k = 0; k < taps; ++k) {
      const double g = ((k & 1) ? -1.0 : 1.0) * h[2 * N - 1 - k];
      const long long idx = 2 * static_cast<long long>(j) - static_cast<long long>(k) * static_cast<long long>(mesh);
      if (idx >= 0 && idx < static_cast<long long>(t.phi.size())) s += g * t.phi[static_cast<std::size_t>(idx)];
    }
    t.psi[j] = std::sqrt(2.0) * s;
  }

  const auto center_diff = [&](const std::vector<double>& f) {
    std::vector<double> d(f.size());
    const double inv2h = 0.5 * static_cast<double>(mesh);
    for (std::size_t j = 0; j < f.size(); ++j) {
      const double right = (j + 1 < f.size()) ? f[j + 1] : 0.0;
      const double left = (j >= 1) ? f[j - 1] : 0.0;
      d[j] = (right - left) * inv2h;
    }
    return d;
  };
  t.dphi = center_diff(t.phi);
  t.dpsi = center_diff(t.psi);
  return t;
}

// linear interpolation in a table over [0, support]; zero outside
inline double table_interp(const std::vector<double>& tab, int L, double sup,
                           double x) {
  if (x <= 0.0 || x >= sup) return 0.0;
  const double tpos = x * static_cast<double>(std::size_t(1) << L);
  const double fl = std::floor(tpos);
  const std::size_t j = static_cast<std::size_t>(fl);
  const double fr = tpos - fl;
  return tab[j] * (1.0 - fr) + tab[j + 1] * fr;
}

}  // namespace torusdrift
