#pragma once
// Orthonormal bases on the torus [0,1)^d: the real Fourier system and
// periodized tensor-product Daubechies wavelets.
//
// Wavelet enumeration: level -1 holds the constant function (the periodized
// father at level 0 sums to 1 by partition of unity). Level l in {0..J}
// holds 2^{ld} elements, the tensor products of level-l mother wavelets over
// all per-axis translates. Fourier enumeration: k = 0 is the constant; each
// half-space frequency (first nonzero component positive) contributes a
// cosine and a sine element, each scaled by sqrt(2). Both orderings sort by
// scale (wavelet level, Fourier sup-norm shell) so prefixes of the index
// list realize every smaller band limit.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusdrift/daubechies.hpp"
#include "torusdrift/grid.hpp"

namespace torusdrift {

enum class BasisKind { fourier, daubechies };

struct BasisIndex {
  // wavelet fields
  int level = -1;
  std::uint64_t translate = 0;
  // fourier fields
  std::array<int, 3> k{0, 0, 0};
  bool sine = false;
  // the identifiability-excluded element (l = -1 resp. k = 0)
  bool is_constant = false;
};

class BasisDescriptor {
 public:
  BasisKind kind = BasisKind::fourier;
  int d = 1;
  int N = 4;       // vanishing moments (daubechies)
  int L_max = 14;  // log2 table resolution (daubechies)
  int J = 0;       // wavelet max level
  int K = 0;       // fourier max sup-norm frequency

  const std::vector<BasisIndex>& indices() const { return indices_; }
  const WaveletTables& tables() const {
    if (kind != BasisKind::daubechies)
      throw std::logic_error("basis: tables exist only for wavelets");
    return tables_;
  }

  friend std::shared_ptr<const BasisDescriptor> make_fourier_basis(int, int);
  friend std::shared_ptr<const BasisDescriptor> make_daubechies_basis(int, int,
                                                                      int, int);

 private:
  std::vector<BasisIndex> indices_;
  WaveletTables tables_;
};

using BasisPtr = std::shared_ptr<const BasisDescriptor>;

inline std::shared_ptr<const BasisDescriptor> make_fourier_basis(int d, int K) {
  if (d < 1 || d > 3) throw std::invalid_argument("basis: d must be 1, 2 or 3");
  if (K < 0) throw std::invalid_argument("basis: K must be >= 0");
  auto desc = std::make_shared<BasisDescriptor>();
  desc->kind = BasisKind::fourier;
  desc->d = d;
  desc->K = K;

  BasisIndex zero;
  zero.is_constant = true;
  desc->indices_.push_back(zero);

  for (int shell = 1; shell <= K; ++shell) {
    const int lo = -shell, hi = shell;
    // lexicographic walk over the box [-shell, shell]^d
    std::vector<std::array<int, 3>> ks;
    std::array<int, 3> cur{lo, lo, lo};
    for (int a = d; a < 3; ++a) cur[a] = 0;
    for (;;) {
      int sup = 0;
      for (int a = 0; a < d; ++a) sup = std::max(sup, std::abs(cur[a]));
      if (sup == shell) {
        int first = 0;
        for (int a = 0; a < d; ++a)
          if (cur[a] != 0) {
            first = cur[a];
            break;
          }
        if (first > 0) ks.push_back(cur);
      }
      int a = d - 1;
      for (; a >= 0; --a) {
        if (cur[a] < hi) {
          ++cur[a];
          break;
        }
        cur[a] = lo;
      }
      if (a < 0) break;
    }
    for (const auto& kk : ks) {
      BasisIndex ci;
      ci.k = kk;
      ci.sine = false;
      desc->indices_.push_back(ci);
      BasisIndex si;
      si.k = kk;
      si.sine = true;
      desc->indices_.push_back(si);
    }
  }
  return desc;
}

inline std::shared_ptr<const BasisDescriptor> make_daubechies_basis(
    int d, int J, int N = 4, int L_max = 0) {
  if (d < 1 || d > 3) throw std::invalid_argument("basis: d must be 1, 2 or 3");
  if (J < 0) throw std::invalid_argument("basis: J must be >= 0");
  if (L_max == 0) L_max = std::max(J + 8, 14);
  if (L_max < J + 6)
    throw std::invalid_argument("basis: table resolution must be >= J + 6");
  auto desc = std::make_shared<BasisDescriptor>();
  desc->kind = BasisKind::daubechies;
  desc->d = d;
  desc->N = N;
  desc->L_max = L_max;
  desc->J = J;
  desc->tables_ = build_wavelet_tables(N, L_max);

  BasisIndex cst;
  cst.level = -1;
  cst.is_constant = true;
  desc->indices_.push_back(cst);
  for (int l = 0; l <= J; ++l) {
    const std::uint64_t count = std::uint64_t(1) << (l * d);
    for (std::uint64_t r = 0; r < count; ++r) {
      BasisIndex idx;
      idx.level = l;
      idx.translate = r;
      desc->indices_.push_back(idx);
    }
  }
  return desc;
}

// number of basis elements with level <= J (wavelets) or shell <= J (fourier)
inline std::size_t dimension(const BasisPtr& desc, int J) {
  if (J < 0) throw std::invalid_argument("dimension: J must be >= 0");
  if (desc->kind == BasisKind::daubechies) {
    if (J > desc->J) throw std::invalid_argument("dimension: J beyond descriptor");
    std::size_t n = 1;
    for (int l = 0; l <= J; ++l) n += std::size_t(1) << (l * desc->d);
    return n;
  }
  if (J > desc->K) throw std::invalid_argument("dimension: K beyond descriptor");
  std::size_t box = 1;
  for (int a = 0; a < desc->d; ++a) box *= static_cast<std::size_t>(2 * J + 1);
  return box;
}

namespace detail {

// periodized 1-D mother wavelet (value or derivative table) at level l,
// translate r: 2^{l/2} sum_m tab(2^l (x+m) - r), with the derivative's extra
// 2^l chain factor applied by the caller
inline double periodized_eval(const WaveletTables& t, const std::vector<double>& tab,
                              int l, std::int64_t r, double x) {
  const double scale = static_cast<double>(std::int64_t(1) << l);
  const double sup = static_cast<double>(t.support());
  const double y = scale * reduce_mod1(x) - static_cast<double>(r);
  // need y + scale*m in (0, sup)
  const double m_lo = std::ceil((-y) / scale);
  const double m_hi = std::floor((sup - y) / scale);
  double acc = 0.0;
  for (double m = m_lo; m <= m_hi; m += 1.0)
    acc += table_interp(tab, t.L, sup, y + scale * m);
  return std::sqrt(scale) * acc;
}

inline void translate_digits(std::uint64_t r, int l, int d, std::int64_t* out) {
  const std::uint64_t base = std::uint64_t(1) << l;
  for (int a = d - 1; a >= 0; --a) {
    out[a] = static_cast<std::int64_t>(r % base);
    r /= base;
  }
}

inline void check_index(const BasisDescriptor& desc, const BasisIndex& idx) {
  if (desc.kind == BasisKind::daubechies) {
    if (idx.level < -1 || idx.level > desc.J)
      throw std::out_of_range("basis: level out of range");
    const std::uint64_t count =
        idx.level < 0 ? 1 : std::uint64_t(1) << (idx.level * desc.d);
    if (idx.translate >= count)
      throw std::out_of_range("basis: translate out of range");
  } else {
    for (int a = 0; a < desc.d; ++a)
      if (std::abs(idx.k[a]) > desc.K)
        throw std::out_of_range("basis: frequency out of range");
    for (int a = desc.d; a < 3; ++a)
      if (idx.k[a] != 0) throw std::out_of_range("basis: frequency out of range");
  }
}

}  // namespace detail

inline double eval_basis(const BasisPtr& desc, const BasisIndex& idx,
                         const double* x) {
  detail::check_index(*desc, idx);
  if (desc->kind == BasisKind::fourier) {
    bool zero = true;
    double dot = 0.0;
    for (int a = 0; a < desc->d; ++a) {
      dot += idx.k[a] * reduce_mod1(x[a]);
      zero = zero && idx.k[a] == 0;
    }
    if (zero) return idx.sine ? 0.0 : 1.0;
    const double ang = 2.0 * M_PI * dot;
    return std::sqrt(2.0) * (idx.sine ? std::sin(ang) : std::cos(ang));
  }
  if (idx.level < 0) return 1.0;
  const auto& t = desc->tables();
  std::int64_t r[3];
  detail::translate_digits(idx.translate, idx.level, desc->d, r);
  double prod = 1.0;
  for (int a = 0; a < desc->d; ++a)
    prod *= detail::periodized_eval(t, t.psi, idx.level, r[a], x[a]);
  return prod;
}

inline void eval_gradient(const BasisPtr& desc, const BasisIndex& idx,
                          const double* x, double* out) {
  detail::check_index(*desc, idx);
  const int d = desc->d;
  if (desc->kind == BasisKind::fourier) {
    bool zero = true;
    double dot = 0.0;
    for (int a = 0; a < d; ++a) {
      dot += idx.k[a] * reduce_mod1(x[a]);
      zero = zero && idx.k[a] == 0;
    }
    if (zero) {
      for (int a = 0; a < d; ++a) out[a] = 0.0;
      return;
    }
    const double ang = 2.0 * M_PI * dot;
    const double base =
        std::sqrt(2.0) * 2.0 * M_PI * (idx.sine ? std::cos(ang) : -std::sin(ang));
    for (int a = 0; a < d; ++a) out[a] = base * idx.k[a];
    return;
  }
  if (idx.level < 0) {
    for (int a = 0; a < d; ++a) out[a] = 0.0;
    return;
  }
  const auto& t = desc->tables();
  std::int64_t r[3];
  detail::translate_digits(idx.translate, idx.level, d, r);
  double vals[3], ders[3];
  const double chain = static_cast<double>(std::int64_t(1) << idx.level);
  for (int a = 0; a < d; ++a) {
    vals[a] = detail::periodized_eval(t, t.psi, idx.level, r[a], x[a]);
    ders[a] = chain * detail::periodized_eval(t, t.dpsi, idx.level, r[a], x[a]);
  }
  for (int a = 0; a < d; ++a) {
    double prod = ders[a];
    for (int b = 0; b < d; ++b)
      if (b != a) prod *= vals[b];
    out[a] = prod;
  }
}

struct CoefficientVector {
  BasisPtr desc;
  std::vector<BasisIndex> indices;
  Eigen::VectorXd values;
};

// zero coefficients over the full canonical index list
inline CoefficientVector make_coefficients(const BasisPtr& desc) {
  CoefficientVector c;
  c.desc = desc;
  c.indices = desc->indices();
  c.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c.indices.size()));
  return c;
}

inline double synthesize(const CoefficientVector& c, const double* x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < c.indices.size(); ++i)
    acc += c.values[static_cast<Eigen::Index>(i)] * eval_basis(c.desc, c.indices[i], x);
  return acc;
}

// samples every basis element once per grid node; used by projections and
// whenever a coefficient vector has to become a grid
inline GridFunction synthesize_grid(const CoefficientVector& c, int level) {
  GridFunction g = make_grid(c.desc->d, level);
  double x[3];
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    grid_node(g, i, x);
    g.v[i] = synthesize(c, x);
  }
  return g;
}

// L2(grid) projection onto span{basis elements up to J}: assembles the
// discrete Gram matrix and solves it, so projecting a function already in the
// span reproduces its coefficients to machine precision.
inline CoefficientVector project(const BasisPtr& desc, int J,
                                 const GridFunction& f) {
  if (f.d != desc->d) throw std::invalid_argument("project: dimension mismatch");
  if (desc->kind == BasisKind::daubechies && f.level < J + 2)
    throw std::invalid_argument("project: grid coarser than 2^{J+2} per axis");
  if (desc->kind == BasisKind::fourier && (std::size_t(1) << f.level) <= std::size_t(2 * J))
    throw std::invalid_argument("project: grid aliases the requested band");
  const std::size_t m = dimension(desc, J);
  CoefficientVector out;
  out.desc = desc;
  out.indices.assign(desc->indices().begin(),
                     desc->indices().begin() + static_cast<std::ptrdiff_t>(m));

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(m));
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::VectorXd phi(static_cast<Eigen::Index>(m));
  double x[3];
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    grid_node(f, i, x);
    for (std::size_t j = 0; j < m; ++j)
      phi[static_cast<Eigen::Index>(j)] = eval_basis(desc, out.indices[j], x);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(phi, 1.0);
    q.noalias() += f.v[i] * phi;
  }
  const double scale = 1.0 / static_cast<double>(f.v.size());
  gram *= scale;
  q *= scale;
  out.values = gram.selfadjointView<Eigen::Lower>().llt().solve(q);
  return out;
}

template <class F>
CoefficientVector project(const BasisPtr& desc, int J, F&& f, int grid_level) {
  return project(desc, J, grid_fill(desc->d, grid_level, std::forward<F>(f)));
}

// ( sum_l 2^{ql(t + d/2 - d/p)} (sum_r |c_lr|^p)^{q/p} )^{1/q}, max at infinity
inline double besov_norm(const CoefficientVector& c, double t, double p, double q) {
  const auto& desc = *c.desc;
  if (desc.kind != BasisKind::daubechies)
    throw std::invalid_argument("besov_norm: wavelet descriptors only");
  if (p < 1.0 || q < 1.0) throw std::invalid_argument("besov_norm: p,q >= 1");
  const double dd = desc.d;
  const double inner_exp = t + 0.5 * dd - (std::isinf(p) ? 0.0 : dd / p);

  double outer_sum = 0.0, outer_max = 0.0;
  int lo_level = 0, hi_level = -1;
  for (const auto& idx : c.indices) {
    lo_level = std::min(lo_level, idx.level);
    hi_level = std::max(hi_level, idx.level);
  }
  for (int l = lo_level; l <= hi_level; ++l) {
    double inner_sum = 0.0, inner_max = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < c.indices.size(); ++i) {
      if (c.indices[i].level != l) continue;
      seen = true;
      const double a = std::fabs(c.values[static_cast<Eigen::Index>(i)]);
      inner_sum += std::isinf(p) ? 0.0 : std::pow(a, p);
      inner_max = std::max(inner_max, a);
    }
    if (!seen) continue;
    const double block =
        std::isinf(p) ? inner_max : std::pow(inner_sum, 1.0 / p);
    const double weighted = std::pow(2.0, l * inner_exp) * block;
    outer_sum += std::isinf(q) ? 0.0 : std::pow(weighted, q);
    outer_max = std::max(outer_max, weighted);
  }
  return std::isinf(q) ? outer_max : std::pow(outer_sum, 1.0 / q);
}

}  // namespace torusdrift
