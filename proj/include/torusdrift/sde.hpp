#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusdrift/diffusion.hpp"
#include "torusdrift/grid.hpp"
#include "torusdrift/rng.hpp"

namespace torusdrift {

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  double T = 1.0;
  double dt = 1e-3;
  std::vector<double> x0;
  std::uint64_t seed = 0;
  double burn_in = 0.0;
};

struct PathRecord {
  int d = 1;
  double dt = 1e-3;
  std::vector<double> x0;
  std::vector<double> positions;  // row-major, n_points x d, unwrapped
  std::uint64_t seed = 0;

  std::size_t n_points() const { return positions.size() / static_cast<std::size_t>(d); }
  const double* point(std::size_t i) const {
    return positions.data() + i * static_cast<std::size_t>(d);
  }
};

inline double realized_horizon(const PathRecord& path) {
  return static_cast<double>(path.n_points() - 1) * path.dt;
}

namespace detail {

inline std::uint64_t step_count(double T, double dt) {
  const double q = T / dt;
  // Nudge past representation error so an integer ratio is not truncated.
  const double nudged = q + q * 4.0 * std::numeric_limits<double>::epsilon() + 1e-12;
  return static_cast<std::uint64_t>(std::floor(nudged));
}

inline void check_sim_config(const Potential& P, const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (!(cfg.T >= cfg.dt)) throw std::invalid_argument("simulate: T must be at least dt");
  if (cfg.T / cfg.dt > 1e9) throw std::invalid_argument("simulate: more than 1e9 steps requested");
  if (!(cfg.burn_in >= 0.0)) throw std::invalid_argument("simulate: burn-in must be nonnegative");
  const int d = P.coeffs.desc->d;
  if (static_cast<int>(cfg.x0.size()) != d)
    throw std::invalid_argument("simulate: x0 dimension does not match the potential");
  for (double v : cfg.x0)
    if (!std::isfinite(v)) throw std::invalid_argument("simulate: x0 must be finite");
}

}  // namespace detail

inline PathRecord simulate(const Potential& P, const SimConfig& cfg) {
  detail::check_sim_config(P, cfg);
  const int d = P.coeffs.desc->d;
  const std::uint64_t n_burn = cfg.burn_in > 0.0 ? detail::step_count(cfg.burn_in, cfg.dt) : 0;
  const std::uint64_t n_steps = detail::step_count(cfg.T, cfg.dt);
  const double sqrt_dt = std::sqrt(cfg.dt);

  Rng rng(cfg.seed);
  double x[3] = {0.0, 0.0, 0.0};
  double b[3];
  for (int a = 0; a < d; ++a) x[a] = cfg.x0[a];

  auto advance = [&](std::uint64_t step) {
    drift_interp(P, x, b);
    for (int a = 0; a < d; ++a) {
      x[a] += b[a] * cfg.dt + sqrt_dt * rng.normal();
      if (!std::isfinite(x[a]))
        throw SimulationError("simulate: non-finite state at step " + std::to_string(step));
    }
  };

  for (std::uint64_t i = 0; i < n_burn; ++i) advance(i);

  PathRecord path;
  path.d = d;
  path.dt = cfg.dt;
  path.x0.assign(x, x + d);
  path.seed = cfg.seed;
  path.positions.resize((n_steps + 1) * static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) path.positions[a] = x[a];
  for (std::uint64_t i = 0; i < n_steps; ++i) {
    advance(i);
    double* out = path.positions.data() + (i + 1) * static_cast<std::size_t>(d);
    for (int a = 0; a < d; ++a) out[a] = x[a];
  }
  return path;
}

// Left-Riemann quadrature over the path's step grid; f sees points reduced to [0,1)^d.
template <class F>
double time_integral(const PathRecord& path, F&& f) {
  const std::size_t n = path.n_points();
  double acc = 0.0;
  double y[3];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double* p = path.point(i);
    for (int a = 0; a < path.d; ++a) y[a] = reduce_mod1(p[a]);
    acc += f(static_cast<const double*>(y));
  }
  return acc * path.dt;
}

// Left-point Ito sum; g writes d components into its second argument.
template <class G>
double ito_integral(const PathRecord& path, G&& g) {
  const std::size_t n = path.n_points();
  double acc = 0.0;
  double y[3];
  double gv[3];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double* p = path.point(i);
    const double* q = path.point(i + 1);
    for (int a = 0; a < path.d; ++a) y[a] = reduce_mod1(p[a]);
    g(static_cast<const double*>(y), gv);
    for (int a = 0; a < path.d; ++a) acc += gv[a] * (q[a] - p[a]);
  }
  return acc;
}

template <class F>
double ergodic_average(const PathRecord& path, F&& f) {
  return time_integral(path, std::forward<F>(f)) / realized_horizon(path);
}

inline void write_path(const PathRecord& path, const std::string& file) {
  std::ofstream bin(file, std::ios::binary);
  if (!bin) throw std::runtime_error("write_path: cannot open " + file);
  const char magic[4] = {'T', 'D', 'F', '1'};
  bin.write(magic, 4);
  const std::uint32_t d32 = static_cast<std::uint32_t>(path.d);
  const std::uint64_t n = path.n_points();
  bin.write(reinterpret_cast<const char*>(&d32), sizeof d32);
  bin.write(reinterpret_cast<const char*>(&path.dt), sizeof path.dt);
  bin.write(reinterpret_cast<const char*>(&n), sizeof n);
  bin.write(reinterpret_cast<const char*>(path.x0.data()),
            static_cast<std::streamsize>(path.x0.size() * sizeof(double)));
  bin.write(reinterpret_cast<const char*>(&path.seed), sizeof path.seed);
  bin.write(reinterpret_cast<const char*>(path.positions.data()),
            static_cast<std::streamsize>(path.positions.size() * sizeof(double)));
  if (!bin) throw std::runtime_error("write_path: write failed for " + file);
}

inline PathRecord read_path(const std::string& file) {
  std::ifstream bin(file, std::ios::binary);
  if (!bin) throw std::runtime_error("read_path: cannot open " + file);
  char magic[4];
  bin.read(magic, 4);
  if (bin.gcount() != 4 || std::memcmp(magic, "TDF1", 4) != 0)
    throw std::runtime_error("read_path: " + file + " is not a TDF1 path file");
  std::uint32_t d32 = 0;
  std::uint64_t n = 0;
  PathRecord path;
  bin.read(reinterpret_cast<char*>(&d32), sizeof d32);
  bin.read(reinterpret_cast<char*>(&path.dt), sizeof path.dt);
  bin.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!bin || d32 < 1 || d32 > 3 || n < 1 || n > (1ull << 31))
    throw std::runtime_error("read_path: corrupt header in " + file);
  path.d = static_cast<int>(d32);
  path.x0.resize(d32);
  bin.read(reinterpret_cast<char*>(path.x0.data()),
           static_cast<std::streamsize>(d32 * sizeof(double)));
  bin.read(reinterpret_cast<char*>(&path.seed), sizeof path.seed);
  path.positions.resize(n * d32);
  bin.read(reinterpret_cast<char*>(path.positions.data()),
           static_cast<std::streamsize>(path.positions.size() * sizeof(double)));
  if (static_cast<std::size_t>(bin.gcount()) != path.positions.size() * sizeof(double))
    throw std::runtime_error("read_path: truncated file " + file);
  return path;
}

}  // namespace torusdrift
