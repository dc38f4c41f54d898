#pragma once
// Scalar functions on the torus [0,1)^d sampled on uniform dyadic grids,
// with periodic multilinear interpolation and trapezoid quadrature (which,
// on a periodic uniform grid, is just the mean of the samples).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusdrift/json_io.hpp"

namespace torusdrift {

struct GridFunction {
  int d = 1;
  int level = 0;  // 2^level points per axis
  std::vector<double> v;  // row-major, axis 0 slowest

  std::size_t n_axis() const { return std::size_t(1) << level; }
  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s <<= level;
    return s;
  }
};

inline GridFunction make_grid(int d, int level) {
  if (d < 1 || d > 3) throw std::invalid_argument("grid: d must be 1, 2 or 3");
  if (level < 0 || level > 24) throw std::invalid_argument("grid: bad level");
  GridFunction g;
  g.d = d;
  g.level = level;
  g.v.assign(g.size(), 0.0);
  return g;
}

// coordinates of node `idx` (row-major), written into x[0..d)
inline void grid_node(const GridFunction& g, std::size_t idx, double* x) {
  const std::size_t n = g.n_axis();
  for (int a = g.d - 1; a >= 0; --a) {
    x[a] = static_cast<double>(idx % n) / static_cast<double>(n);
    idx /= n;
  }
}

template <class F>
GridFunction grid_fill(int d, int level, F&& f) {
  GridFunction g = make_grid(d, level);
  double x[3];
  for (std::size_t i = 0; i < g.v.size(); ++i) {
    grid_node(g, i, x);
    g.v[i] = f(x);
  }
  return g;
}

inline double grid_integral(const GridFunction& g) {
  double s = 0.0;
  for (double t : g.v) s += t;
  return s / static_cast<double>(g.v.size());
}

inline double grid_inner(const GridFunction& a, const GridFunction& b) {
  if (a.d != b.d || a.level != b.level)
    throw std::invalid_argument("grid_inner: mismatched grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
  return s / static_cast<double>(a.v.size());
}

inline double grid_lq_norm(const GridFunction& g, double q) {
  double s = 0.0;
  for (double t : g.v) s += std::pow(std::fabs(t), q);
  return std::pow(s / static_cast<double>(g.v.size()), 1.0 / q);
}

inline double grid_l2_norm(const GridFunction& g) {
  double s = 0.0;
  for (double t : g.v) s += t * t;
  return std::sqrt(s / static_cast<double>(g.v.size()));
}

inline double reduce_mod1(double x) { return x - std::floor(x); }

// periodic multilinear interpolation at x (any reals; reduced mod 1 here)
inline double grid_interp(const GridFunction& g, const double* x) {
  const std::size_t n = g.n_axis();
  std::size_t i0[3];
  double fr[3];
  for (int a = 0; a < g.d; ++a) {
    const double t = reduce_mod1(x[a]) * static_cast<double>(n);
    const double fl = std::floor(t);
    i0[a] = static_cast<std::size_t>(fl) & (n - 1);
    fr[a] = t - fl;
  }
  double acc = 0.0;
  const int corners = 1 << g.d;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < g.d; ++a) {
      const int hi = (c >> a) & 1;
      w *= hi ? fr[a] : (1.0 - fr[a]);
      const std::size_t ia = (i0[a] + (hi ? 1 : 0)) & (n - 1);
      idx = idx * n + ia;
    }
    acc += w * g.v[idx];
  }
  return acc;
}

// Raw little-endian f64 dump with a JSON sidecar carrying (d, level).
inline void write_grid(const GridFunction& g, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("write_grid: cannot open " + path);
  bin.write(reinterpret_cast<const char*>(g.v.data()),
            static_cast<std::streamsize>(g.v.size() * sizeof(double)));
  json meta;
  meta["d"] = g.d;
  meta["level"] = g.level;
  meta["count"] = g.v.size();
  write_json_file(meta, path + ".json");
}

inline GridFunction read_grid(const std::string& path) {
  const json meta = read_json_file(path + ".json");
  GridFunction g = make_grid(meta.at("d").get<int>(), meta.at("level").get<int>());
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw std::runtime_error("read_grid: cannot open " + path);
  bin.read(reinterpret_cast<char*>(g.v.data()),
           static_cast<std::streamsize>(g.v.size() * sizeof(double)));
  if (static_cast<std::size_t>(bin.gcount()) != g.v.size() * sizeof(double))
    throw std::runtime_error("read_grid: truncated file " + path);
  return g;
}

}  // namespace torusdrift
