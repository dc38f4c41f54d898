#pragma once

#include <array>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "torusdrift/basis.hpp"
#include "torusdrift/diffusion.hpp"
#include "torusdrift/rng.hpp"

namespace torusdrift {

enum class GaussianPriorKind { matern, wavelet_series };

struct GaussianPriorSpec {
  GaussianPriorKind kind = GaussianPriorKind::matern;
  double s = 2.0;
  // matern: max frequency K (0 derives it from the spectral-mass rule);
  // wavelet_series: max level J
  int band = 0;
  double T = 1.0;
  int d = 1;
  int wavelet_order = 4;
};

struct PExpPriorSpec {
  double p = 1.0;
  double s = 2.0;
  int J = 2;
  double T = 1.0;
  int d = 1;
  int wavelet_order = 4;
};

inline double matern_fourier_coeff(const std::array<int, 3>& k, double s, int d) {
  double k2 = 0.0;
  for (int a = 0; a < 3; ++a) k2 += double(k[a]) * double(k[a]);
  return std::pow(2.0 * M_PI, d) / std::pow(1.0 + 4.0 * M_PI * M_PI * k2, s + 1.0);
}

// Smallest K whose omitted spectral mass is below 1e-6 of the full
// constant-free mass; the k=0 term is not part of the sampled series.
inline int matern_default_band(double s, int d) {
  if (d < 1 || d > 3) throw std::invalid_argument("matern_default_band: d must be 1, 2, or 3");
  const int j_max = d == 1 ? 512 : (d == 2 ? 180 : 60);
  std::vector<double> shell(static_cast<std::size_t>(j_max) + 1, 0.0);
  std::array<int, 3> k{0, 0, 0};
  const int lo = -j_max, hi = j_max;
  auto accumulate = [&](int kx, int ky, int kz) {
    k = {kx, ky, kz};
    const int sup = std::max({std::abs(kx), std::abs(ky), std::abs(kz)});
    if (sup == 0) return;
    shell[static_cast<std::size_t>(sup)] +=
        std::pow(1.0 + 4.0 * M_PI * M_PI * (double(kx) * kx + double(ky) * ky + double(kz) * kz),
                 -(s + 1.0));
  };
  if (d == 1) {
    for (int kx = lo; kx <= hi; ++kx) accumulate(kx, 0, 0);
  } else if (d == 2) {
    for (int kx = lo; kx <= hi; ++kx)
      for (int ky = lo; ky <= hi; ++ky) accumulate(kx, ky, 0);
  } else {
    for (int kx = lo; kx <= hi; ++kx)
      for (int ky = lo; ky <= hi; ++ky)
        for (int kz = lo; kz <= hi; ++kz) accumulate(kx, ky, kz);
  }
  double total = 0.0;
  for (double m : shell) total += m;
  double tail = total;
  for (int K = 1; K <= j_max; ++K) {
    tail -= shell[static_cast<std::size_t>(K)];
    if (tail < 1e-6 * total) return K;
  }
  throw std::runtime_error("matern_default_band: band search did not converge");
}

// Truncation rule 2^J ~= T^{1/(2s+d)}
inline int level_for_horizon(double T, double s, int d) {
  if (!(T > 0.0)) throw std::invalid_argument("level_for_horizon: T must be positive");
  const long J = std::lround(std::log2(T) / (2.0 * s + d));
  return J < 0 ? 0 : static_cast<int>(J);
}

inline void validate_prior_spec(const GaussianPriorSpec& spec) {
  if (spec.d < 1 || spec.d > 3)
    throw std::invalid_argument("gaussian prior: d must be 1, 2, or 3");
  if (!(spec.T > 0.0)) throw std::invalid_argument("gaussian prior: T must be positive");
  const double s_min = spec.d / 2.0 + std::max(spec.d / 2.0 - 1.0, 0.0);
  if (!(spec.s > s_min))
    throw std::invalid_argument("gaussian prior: smoothness must exceed " + std::to_string(s_min) +
                                " in dimension " + std::to_string(spec.d));
  if (spec.band < 0) throw std::invalid_argument("gaussian prior: band limit must be nonnegative");
}

inline void validate_prior_spec(const PExpPriorSpec& spec) {
  if (spec.d < 1 || spec.d > 3) throw std::invalid_argument("p-exp prior: d must be 1, 2, or 3");
  if (!(spec.T > 0.0)) throw std::invalid_argument("p-exp prior: T must be positive");
  if (!(spec.p >= 1.0 && spec.p <= 2.0))
    throw std::invalid_argument("p-exp prior: p must lie in [1, 2]");
  if (spec.J < 0) throw std::invalid_argument("p-exp prior: J must be nonnegative");
  const double s_min = std::max(spec.d / 2.0, 2.0) + spec.d / spec.p - 1.0;
  if (!(spec.s > s_min))
    std::cerr << "warning: p-exp prior smoothness " << spec.s
              << " is outside the theory range (needs s > " << s_min << ")\n";
}

inline int resolved_band(const GaussianPriorSpec& spec) {
  if (spec.kind == GaussianPriorKind::matern && spec.band == 0)
    return matern_default_band(spec.s, spec.d);
  return spec.band;
}

inline BasisPtr make_prior_basis(const GaussianPriorSpec& spec) {
  validate_prior_spec(spec);
  if (spec.kind == GaussianPriorKind::matern) return make_fourier_basis(spec.d, resolved_band(spec));
  return make_daubechies_basis(spec.d, spec.band, spec.wavelet_order);
}

inline BasisPtr make_prior_basis(const PExpPriorSpec& spec) {
  validate_prior_spec(spec);
  return make_daubechies_basis(spec.d, spec.J, spec.wavelet_order);
}

// Coefficient variances of the Gaussian prior at the given indices.
inline Eigen::VectorXd gaussian_prior_variances(const GaussianPriorSpec& spec,
                                                const std::vector<BasisIndex>& indices) {
  validate_prior_spec(spec);
  const double rescale = std::pow(spec.T, -double(spec.d) / (2.0 * spec.s + spec.d));
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const BasisIndex& ix = indices[i];
    if (ix.is_constant)
      throw std::invalid_argument("gaussian_prior_variances: the constant carries no prior mass");
    double v;
    if (spec.kind == GaussianPriorKind::matern) {
      if (ix.level >= 0)
        throw std::invalid_argument("gaussian_prior_variances: matern prior needs Fourier indices");
      v = matern_fourier_coeff(ix.k, spec.s, spec.d);
    } else {
      if (ix.level < 0)
        throw std::invalid_argument("gaussian_prior_variances: series prior needs wavelet indices");
      v = std::pow(2.0, -2.0 * ix.level * (spec.s + 1.0));
    }
    out[static_cast<Eigen::Index>(i)] = rescale * v;
  }
  return out;
}

// Penalty weights w_lr with penalty (1/p) sum w_lr |B_lr|^p; the sampler's
// coefficient scale is w_lr^{-1/p}.
inline Eigen::VectorXd pexp_penalty_weights(const PExpPriorSpec& spec,
                                            const std::vector<BasisIndex>& indices) {
  validate_prior_spec(spec);
  const double scale = std::pow(spec.T, double(spec.d) / (2.0 * spec.s + spec.d));
  const double expo = spec.s + 1.0 + spec.d / 2.0 - spec.d / spec.p;
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const BasisIndex& ix = indices[i];
    if (ix.is_constant)
      throw std::invalid_argument("pexp_penalty_weights: the constant carries no prior mass");
    if (ix.level < 0)
      throw std::invalid_argument("pexp_penalty_weights: p-exp prior needs wavelet indices");
    out[static_cast<Eigen::Index>(i)] = scale * std::pow(2.0, spec.p * ix.level * expo);
  }
  return out;
}

inline CoefficientVector sample_gaussian_coefficients(const GaussianPriorSpec& spec,
                                                      const BasisPtr& desc, Rng& rng) {
  validate_prior_spec(spec);
  const bool matern = spec.kind == GaussianPriorKind::matern;
  if (matern && desc->kind != BasisKind::fourier)
    throw std::invalid_argument("sample_gaussian_coefficients: matern prior needs a Fourier basis");
  if (!matern && desc->kind != BasisKind::daubechies)
    throw std::invalid_argument("sample_gaussian_coefficients: series prior needs a wavelet basis");
  if (desc->d != spec.d)
    throw std::invalid_argument("sample_gaussian_coefficients: dimension mismatch");
  const int limit = matern ? resolved_band(spec) : spec.band;
  if ((matern ? desc->K : desc->J) < limit)
    throw std::invalid_argument("sample_gaussian_coefficients: basis does not cover the prior band");

  CoefficientVector c = make_coefficients(desc);
  const double rescale = std::pow(spec.T, -double(spec.d) / (2.0 * spec.s + spec.d));
  for (std::size_t i = 0; i < c.indices.size(); ++i) {
    const BasisIndex& ix = c.indices[i];
    if (ix.is_constant) continue;
    double var;
    if (matern) {
      if (std::max({std::abs(ix.k[0]), std::abs(ix.k[1]), std::abs(ix.k[2])}) > limit) continue;
      var = rescale * matern_fourier_coeff(ix.k, spec.s, spec.d);
    } else {
      if (ix.level > limit) continue;
      var = rescale * std::pow(2.0, -2.0 * ix.level * (spec.s + 1.0));
    }
    c.values[static_cast<Eigen::Index>(i)] = std::sqrt(var) * rng.normal();
  }
  return c;
}

inline Potential sample_gaussian_prior(const GaussianPriorSpec& spec, Rng& rng) {
  return make_potential(sample_gaussian_coefficients(spec, make_prior_basis(spec), rng));
}

inline double sample_pexp_scalar(double p, Rng& rng) { return rng.pexp(p); }

inline CoefficientVector sample_pexp_coefficients(const PExpPriorSpec& spec, const BasisPtr& desc,
                                                  Rng& rng) {
  validate_prior_spec(spec);
  if (desc->kind != BasisKind::daubechies)
    throw std::invalid_argument("sample_pexp_coefficients: p-exp prior needs a wavelet basis");
  if (desc->d != spec.d) throw std::invalid_argument("sample_pexp_coefficients: dimension mismatch");
  if (desc->J < spec.J)
    throw std::invalid_argument("sample_pexp_coefficients: basis does not cover the prior levels");

  CoefficientVector c = make_coefficients(desc);
  const double scale = std::pow(spec.T, double(spec.d) / (2.0 * spec.s + spec.d));
  const double expo = spec.s + 1.0 + spec.d / 2.0 - spec.d / spec.p;
  for (std::size_t i = 0; i < c.indices.size(); ++i) {
    const BasisIndex& ix = c.indices[i];
    if (ix.is_constant || ix.level > spec.J) continue;
    const double w = std::pow(scale, -1.0 / spec.p) * std::pow(2.0, -double(ix.level) * expo);
    c.values[static_cast<Eigen::Index>(i)] = w * sample_pexp_scalar(spec.p, rng);
  }
  return c;
}

inline Potential sample_pexp_prior(const PExpPriorSpec& spec, Rng& rng) {
  return make_potential(sample_pexp_coefficients(spec, make_prior_basis(spec), rng));
}

// Log prior density up to an additive constant:
// -(T^{d/(2s+d)}/p) sum 2^{pl(s+1+d/2-d/p)} |B_lr|^p
inline double log_prior_density(const PExpPriorSpec& spec, const CoefficientVector& coeffs) {
  validate_prior_spec(spec);
  if (coeffs.desc->kind != BasisKind::daubechies)
    throw std::domain_error("log_prior_density: p-exp prior needs wavelet coefficients");
  const double scale = std::pow(spec.T, double(spec.d) / (2.0 * spec.s + spec.d));
  const double expo = spec.s + 1.0 + spec.d / 2.0 - spec.d / spec.p;
  double penalty = 0.0;
  for (std::size_t i = 0; i < coeffs.indices.size(); ++i) {
    const double v = coeffs.values[static_cast<Eigen::Index>(i)];
    const BasisIndex& ix = coeffs.indices[i];
    if (ix.is_constant || ix.level > spec.J) {
      if (v != 0.0)
        throw std::domain_error("log_prior_density: coefficient outside the prior's support");
      continue;
    }
    penalty += std::pow(2.0, spec.p * ix.level * expo) * std::pow(std::fabs(v), spec.p);
  }
  return -scale / spec.p * penalty;
}

}  // namespace torusdrift
