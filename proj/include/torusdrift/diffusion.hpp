#pragma once
// Potentials B on the torus, their gradient drifts, invariant densities
// mu_B = e^{2B} / Z, the generator L_b = (1/2) Laplace + b . grad, and a
// spectral Poisson solver for L_b u = f.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "torusdrift/basis.hpp"
#include "torusdrift/fft.hpp"
#include "torusdrift/grid.hpp"

namespace torusdrift {

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// B with cached value and gradient grids. The cached values are centered
// (grid mean removed), which is the identifiable representative of B.
struct Potential {
  CoefficientVector coeffs;
  int grid_level = 0;
  double mean_offset = 0.0;  // grid mean removed from the cached values
  GridFunction B;
  std::vector<GridFunction> gradB;
};

inline int default_potential_level(const BasisPtr& desc) {
  if (desc->d == 1) {
    int need = 3;
    if (desc->kind == BasisKind::fourier)
      while ((1 << need) <= 2 * desc->K + 1) ++need;
    return std::max(13, need);
  }
  return desc->d == 2 ? 9 : 7;
}

inline Potential make_potential(CoefficientVector coeffs, int grid_level = 0) {
  const auto& desc = coeffs.desc;
  if (!desc) throw std::invalid_argument("make_potential: empty descriptor");
  for (std::size_t i = 0; i < coeffs.indices.size(); ++i)
    if (coeffs.indices[i].is_constant &&
        std::fabs(coeffs.values[static_cast<Eigen::Index>(i)]) > 1e-12)
      throw std::invalid_argument("make_potential: constant coefficient must be 0");
  if (grid_level == 0) grid_level = default_potential_level(desc);

  Potential P;
  P.grid_level = grid_level;
  P.B = make_grid(desc->d, grid_level);
  P.gradB.assign(static_cast<std::size_t>(desc->d), make_grid(desc->d, grid_level));
  double x[3], g[3];
  for (std::size_t i = 0; i < P.B.v.size(); ++i) {
    grid_node(P.B, i, x);
    double val = 0.0;
    for (int a = 0; a < desc->d; ++a) g[a] = 0.0;
    for (std::size_t j = 0; j < coeffs.indices.size(); ++j) {
      const double c = coeffs.values[static_cast<Eigen::Index>(j)];
      if (c == 0.0) continue;
      val += c * eval_basis(desc, coeffs.indices[j], x);
      double gj[3];
      eval_gradient(desc, coeffs.indices[j], x, gj);
      for (int a = 0; a < desc->d; ++a) g[a] += c * gj[a];
    }
    P.B.v[i] = val;
    for (int a = 0; a < desc->d; ++a) P.gradB[static_cast<std::size_t>(a)].v[i] = g[a];
  }
  P.mean_offset = grid_integral(P.B);
  for (double& t : P.B.v) t -= P.mean_offset;
  P.coeffs = std::move(coeffs);
  return P;
}

// analytic/table differentiation of the basis expansion
inline void grad_potential(const Potential& P, const double* x, double* out) {
  const auto& desc = P.coeffs.desc;
  for (int a = 0; a < desc->d; ++a) out[a] = 0.0;
  double g[3];
  for (std::size_t j = 0; j < P.coeffs.indices.size(); ++j) {
    const double c = P.coeffs.values[static_cast<Eigen::Index>(j)];
    if (c == 0.0) continue;
    eval_gradient(desc, P.coeffs.indices[j], x, g);
    for (int a = 0; a < desc->d; ++a) out[a] += c * g[a];
  }
}

inline double potential_value(const Potential& P, const double* x) {
  return synthesize(P.coeffs, x) - P.mean_offset;
}

// fast path for simulation: periodic multilinear interpolation of the
// cached gradient grids
inline void drift_interp(const Potential& P, const double* x, double* out) {
  for (std::size_t a = 0; a < P.gradB.size(); ++a)
    out[a] = grid_interp(P.gradB[a], x);
}

struct InvariantDensity {
  GridFunction mu;
  double Z = 1.0;
};

inline InvariantDensity invariant_density(const GridFunction& Bgrid) {
  InvariantDensity out;
  out.mu = Bgrid;
  for (std::size_t i = 0; i < out.mu.v.size(); ++i)
    out.mu.v[i] = std::exp(2.0 * Bgrid.v[i]);
  out.Z = grid_integral(out.mu);
  for (double& t : out.mu.v) t /= out.Z;
  return out;
}

inline InvariantDensity invariant_density(const Potential& P, int level = 0) {
  if (level == 0 || level == P.grid_level) return invariant_density(P.B);
  GridFunction Bg = make_grid(P.B.d, level);
  double x[3];
  for (std::size_t i = 0; i < Bg.v.size(); ++i) {
    grid_node(Bg, i, x);
    Bg.v[i] = synthesize(P.coeffs, x);
  }
  const double mean = grid_integral(Bg);
  for (double& t : Bg.v) t -= mean;
  return invariant_density(Bg);
}

struct DriftField {
  int d = 1;
  std::string tag = "general";
  std::function<void(const double*, double*)> b;
};

inline DriftField gradient_drift(const Potential& P) {
  DriftField f;
  f.d = P.B.d;
  f.tag = "gradient";
  f.b = [&P](const double* x, double* out) { grad_potential(P, x, out); };
  return f;
}

// L_b u = (1/2) Laplace(u) + b . grad(u), derivatives taken spectrally
inline GridFunction apply_generator(const DriftField& b, const GridFunction& u) {
  if (b.d != u.d) throw std::invalid_argument("apply_generator: dimension mismatch");
  GridFunction out = spectral_filter(u, [](const int* k) {
    double k2 = 0.0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<double>(k[a]) * k[a];
    return std::complex<double>(-2.0 * M_PI * M_PI * k2, 0.0);
  });
  const auto grad = spectral_gradient(u);
  double x[3], bv[3];
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    grid_node(u, i, x);
    b.b(x, bv);
    for (int a = 0; a < u.d; ++a) out.v[i] += bv[a] * grad[static_cast<std::size_t>(a)].v[i];
  }
  return out;
}

// Solves L_b u = f with mean(u) = 0 by the damped-free fixed point
// u <- (1/2 Laplace)^{-1} (f - b . grad u), acting on the zero-mean part.
// The mean defect c = integral(f - b . grad u) converges to the mu_b-mean of
// f, so a caller that failed to center f is detected after convergence.
inline GridFunction solve_poisson(const DriftField& b, const GridFunction& f) {
  if (b.d != f.d) throw std::invalid_argument("solve_poisson: dimension mismatch");
  // pre-sample b on the grid
  std::vector<GridFunction> bg(static_cast<std::size_t>(f.d), make_grid(f.d, f.level));
  double x[3], bv[3];
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    grid_node(f, i, x);
    b.b(x, bv);
    for (int a = 0; a < f.d; ++a) bg[static_cast<std::size_t>(a)].v[i] = bv[a];
  }

  GridFunction u = make_grid(f.d, f.level);
  GridFunction rhs = f;
  double defect = 0.0;
  const double fnorm = grid_l2_norm(f);
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    GridFunction next = inverse_half_laplacian(rhs);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) {
      const double dv = next.v[i] - u.v[i];
      diff2 += dv * dv;
      norm2 += next.v[i] * next.v[i];
    }
    if (!std::isfinite(diff2) || !std::isfinite(norm2))
      throw SolverError("solve_poisson: iteration diverged (drift too strong)");
    u = std::move(next);
    // rebuild rhs = f - b . grad u and its mean defect
    const auto grad = spectral_gradient(u);
    double mean = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) {
      double dot = 0.0;
      for (int a = 0; a < f.d; ++a)
        dot += bg[static_cast<std::size_t>(a)].v[i] * grad[static_cast<std::size_t>(a)].v[i];
      rhs.v[i] = f.v[i] - dot;
      mean += rhs.v[i];
    }
    defect = mean / static_cast<double>(f.v.size());
    if (diff2 <= 1e-24 * std::max(norm2, 1e-300)) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw SolverError("solve_poisson: no convergence; last mean defect " +
                      std::to_string(defect));
  if (std::fabs(defect) > 1e-8 * std::max(1.0, fnorm))
    throw std::invalid_argument(
        "solve_poisson: f is not centered under the invariant measure (defect " +
        std::to_string(defect) + ")");
  return u;
}

}  // namespace torusdrift
