#include "torusdrift/sde.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "torusdrift/basis.hpp"
#include "torusdrift/diffusion.hpp"
#include "torusdrift/rng.hpp"

using namespace torusdrift;

namespace {

Potential zero_potential(int d) {
  auto desc = make_fourier_basis(d, 1);
  return make_potential(make_coefficients(desc));
}

// B = amp * sqrt(2) cos(2 pi x) in one dimension
Potential cosine_potential(double amp) {
  auto desc = make_fourier_basis(1, 2);
  auto c = make_coefficients(desc);
  for (std::size_t i = 0; i < c.indices.size(); ++i)
    if (c.indices[i].k[0] == 1 && !c.indices[i].sine && !c.indices[i].is_constant)
      c.values[static_cast<Eigen::Index>(i)] = amp;
  return make_potential(std::move(c));
}

Potential cosine_potential_2d(double amp) {
  auto desc = make_fourier_basis(2, 1);
  auto c = make_coefficients(desc);
  for (std::size_t i = 0; i < c.indices.size(); ++i) {
    const BasisIndex& ix = c.indices[i];
    if (!ix.is_constant && !ix.sine && std::abs(ix.k[0]) + std::abs(ix.k[1]) == 1)
      c.values[static_cast<Eigen::Index>(i)] = amp;
  }
  return make_potential(std::move(c));
}

double quadratic_variation(const PathRecord& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.n_points(); ++i)
    for (int a = 0; a < p.d; ++a) {
      const double inc = p.point(i + 1)[a] - p.point(i)[a];
      acc += inc * inc;
    }
  return acc;
}

}  // namespace

TEST_CASE("simulate rejects invalid configurations") {
  Potential P = zero_potential(1);
  CHECK_THROWS_AS(simulate(P, SimConfig{1.0, 0.0, {0.5}, 1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(simulate(P, SimConfig{1.0, -1e-3, {0.5}, 1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(simulate(P, SimConfig{1e-4, 1e-3, {0.5}, 1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(simulate(P, SimConfig{2e6, 1e-3, {0.5}, 1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(simulate(P, SimConfig{1.0, 1e-3, {0.5, 0.5}, 1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(simulate(P, SimConfig{1.0, 1e-3, {0.5}, 1, -1.0}), std::invalid_argument);
  const double bad = std::nan("");
  CHECK_THROWS_AS(simulate(P, SimConfig{1.0, 1e-3, {bad}, 1, 0.0}), std::invalid_argument);
}

TEST_CASE("path length and start point") {
  Potential P = zero_potential(1);
  PathRecord p = simulate(P, SimConfig{1.0, 0.25, {0.3}, 2, 0.0});
  CHECK(p.n_points() == 5);
  CHECK(p.point(0)[0] == 0.3);
  CHECK(p.x0[0] == 0.3);
  CHECK(realized_horizon(p) == 1.0);

  PathRecord q = simulate(P, SimConfig{1.0, 0.3, {0.3}, 2, 0.0});
  CHECK(q.n_points() == 4);  // floor(1/0.3) + 1

  PathRecord r = simulate(P, SimConfig{10.0, 1e-2, {0.3}, 2, 0.0});
  CHECK(r.n_points() == 1001);
}

TEST_CASE("simulation is deterministic in the configuration") {
  Potential P = cosine_potential(0.3);
  SimConfig cfg{2.0, 1e-3, {0.4}, 77, 0.0};
  PathRecord a = simulate(P, cfg);
  PathRecord b = simulate(P, cfg);
  REQUIRE(a.positions.size() == b.positions.size());
  CHECK(a.positions == b.positions);
  CHECK(a.seed == b.seed);

  cfg.seed = 78;
  PathRecord c = simulate(P, cfg);
  CHECK(a.positions != c.positions);
}

TEST_CASE("driftless displacement is centered with variance T") {
  Potential P = zero_potential(1);
  const double T = 10.0;
  const int R = 2000;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < R; ++r) {
    SimConfig cfg{T, 1e-2, {0.5}, derive_seed(102, 0, static_cast<std::uint64_t>(r)), 0.0};
    PathRecord p = simulate(P, cfg);
    const double v = p.point(p.n_points() - 1)[0] - 0.5;
    s1 += v;
    s2 += v * v;
  }
  const double mean_all = s1 / R;
  const double var = s2 / R - mean_all * mean_all;
  CHECK(std::fabs(var - T) < 0.1 * T);

  // first 500 replicates carry the mean check at its own tolerance
  double s500 = 0.0;
  {
    double acc = 0.0;
    for (int r = 0; r < 500; ++r) {
      SimConfig cfg{T, 1e-2, {0.5}, derive_seed(102, 0, static_cast<std::uint64_t>(r)), 0.0};
      PathRecord p = simulate(P, cfg);
      acc += p.point(p.n_points() - 1)[0] - 0.5;
    }
    s500 = acc / 500;
  }
  CHECK(std::fabs(s500) < 3.0 * std::sqrt(T / 500));
}

TEST_CASE("quadratic variation matches unit diffusivity") {
  Potential P1 = cosine_potential(0.5);
  PathRecord p = simulate(P1, SimConfig{10.0, 1e-3, {0.2}, 907, 0.0});
  double qv = quadratic_variation(p) / (1 * realized_horizon(p));
  CHECK(qv > 0.95);
  CHECK(qv < 1.05);

  PathRecord ph = simulate(P1, SimConfig{10.0, 5e-4, {0.2}, 909, 0.0});
  qv = quadratic_variation(ph) / (1 * realized_horizon(ph));
  CHECK(qv > 0.95);
  CHECK(qv < 1.05);

  Potential P2 = cosine_potential_2d(0.3);
  PathRecord q = simulate(P2, SimConfig{5.0, 1e-3, {0.2, 0.7}, 908, 0.0});
  qv = quadratic_variation(q) / (2 * realized_horizon(q));
  CHECK(qv > 0.95);
  CHECK(qv < 1.05);
}

TEST_CASE("time integral is a left Riemann sum") {
  Potential P = zero_potential(1);
  PathRecord p = simulate(P, SimConfig{3.0, 1e-3, {0.1}, 31, 0.0});
  const double one = time_integral(p, [](const double*) { return 1.0; });
  CHECK(one == realized_horizon(p));
  CHECK(std::fabs(one - 3.0) <= 1e-3 + 1e-12);
  CHECK(time_integral(p, [](const double*) { return 0.0; }) == 0.0);

  // the integrand sees points reduced to [0,1)
  double max_seen = -1.0, min_seen = 2.0;
  time_integral(p, [&](const double* x) {
    max_seen = std::max(max_seen, x[0]);
    min_seen = std::min(min_seen, x[0]);
    return 0.0;
  });
  CHECK(min_seen >= 0.0);
  CHECK(max_seen < 1.0);
}

TEST_CASE("ito integral of a constant field satisfies the isometry") {
  Potential P = zero_potential(2);
  const double T = 10.0;
  const int R = 1000;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < R; ++r) {
    SimConfig cfg{T, 1e-2, {0.25, 0.75}, derive_seed(203, 1, static_cast<std::uint64_t>(r)), 0.0};
    PathRecord p = simulate(P, cfg);
    CHECK(ito_integral(p, [](const double*, double* g) { g[0] = g[1] = 0.0; }) == 0.0);
    const double I = ito_integral(p, [](const double*, double* g) {
      g[0] = 0.6;
      g[1] = 0.8;
    });
    s1 += I;
    s2 += I * I;
  }
  const double mean = s1 / R;
  const double var = s2 / R - mean * mean;
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(T / R));
  CHECK(std::fabs(var - T) < 0.1 * T);
}

TEST_CASE("ito integral of a gradient tracks the chain rule remainder") {
  // for g = grad h under zero drift, the integral equals
  // h(X_T) - h(X_0) - (1/2) int lap h ds up to a remainder of size sqrt(T dt)
  Potential P = zero_potential(1);
  const double T = 5.0;
  const int R = 300;
  auto h = [](double x) { return std::sin(2 * M_PI * x) / (2 * M_PI); };
  auto run = [&](double dt) {
    double s1 = 0.0, s2 = 0.0;
    for (int r = 0; r < R; ++r) {
      SimConfig cfg{T, dt, {0.2}, derive_seed(301, 2, static_cast<std::uint64_t>(r)), 0.0};
      PathRecord p = simulate(P, cfg);
      const double I = ito_integral(
          p, [](const double* x, double* g) { g[0] = std::cos(2 * M_PI * x[0]); });
      const double lap = time_integral(
          p, [](const double* x) { return -2 * M_PI * std::sin(2 * M_PI * x[0]); });
      const double rhs = h(p.point(p.n_points() - 1)[0]) - h(p.point(0)[0]) - 0.5 * lap;
      s1 += I - rhs;
      s2 += (I - rhs) * (I - rhs);
    }
    return std::pair<double, double>(s1 / R, std::sqrt(s2 / R));
  };
  auto [mean_c, rms_c] = run(2e-3);
  auto [mean_f, rms_f] = run(5e-4);
  CHECK(rms_c > 0.5 * M_PI * std::sqrt(T * 2e-3));
  CHECK(rms_c < 1.5 * M_PI * std::sqrt(T * 2e-3));
  CHECK(rms_c / rms_f > 1.4);  // quartering dt should halve the remainder
  CHECK(rms_c / rms_f < 2.8);
  CHECK(std::fabs(mean_c) < 4.0 * rms_c / std::sqrt(double(R)));
  CHECK(std::fabs(mean_f) < 4.0 * rms_f / std::sqrt(double(R)));
}

TEST_CASE("ergodic averages of constants and centered test functions") {
  Potential P0 = zero_potential(2);
  PathRecord p = simulate(P0, SimConfig{500.0, 2e-3, {0.3, 0.8}, 501, 0.0});
  CHECK(ergodic_average(p, [](const double*) { return 1.0; }) == 1.0);
  const double avg =
      ergodic_average(p, [](const double* x) { return std::cos(2 * M_PI * x[0]); });
  CHECK(std::fabs(avg) <= 0.05);
}

TEST_CASE("ergodic average approaches the invariant-measure integral") {
  Potential P = cosine_potential(0.5);
  auto phi = [](const double* x) {
    const double s = std::sin(M_PI * (x[0] - 0.3));
    return std::exp(-s * s / 0.05);
  };
  InvariantDensity inv = invariant_density(P);
  double truth = 0.0;
  for (std::size_t i = 0; i < inv.mu.v.size(); ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(inv.mu.v.size());
    truth += phi(&x) * inv.mu.v[i];
  }
  truth /= static_cast<double>(inv.mu.v.size());

  PathRecord p = simulate(P, SimConfig{1000.0, 1e-3, {0.1}, 401, 0.0});
  CHECK(std::fabs(ergodic_average(p, phi) - truth) < 0.05);
}

TEST_CASE("ergodic error shrinks when the horizon grows tenfold") {
  Potential P = cosine_potential(0.5);
  InvariantDensity inv = invariant_density(P);
  double truth = 0.0;
  for (std::size_t i = 0; i < inv.mu.v.size(); ++i)
    truth += std::cos(2 * M_PI * static_cast<double>(i) / static_cast<double>(inv.mu.v.size())) *
             inv.mu.v[i];
  truth /= static_cast<double>(inv.mu.v.size());

  auto mean_abs_err = [&](double T) {
    double acc = 0.0;
    for (int r = 0; r < 20; ++r) {
      SimConfig cfg{T, 2e-3, {0.4}, derive_seed(602, 3, static_cast<std::uint64_t>(r)), 0.0};
      PathRecord p = simulate(P, cfg);
      acc += std::fabs(
          ergodic_average(p, [](const double* x) { return std::cos(2 * M_PI * x[0]); }) - truth);
    }
    return acc / 20;
  };
  CHECK(mean_abs_err(1000.0) < mean_abs_err(100.0));
}

TEST_CASE("time integrals are stable under noise refinement") {
  // refine a fixed driving noise by conditional midpoints and rerun the
  // scheme at dt/2; the integral should move by O(dt), i.e. the median
  // level-to-level change decays with log-slope about -1
  Potential P = cosine_potential(0.25);
  auto em = [&](double x0, double dt, const std::vector<double>& dW) {
    PathRecord path;
    path.d = 1;
    path.dt = dt;
    path.x0 = {x0};
    path.positions.reserve(dW.size() + 1);
    path.positions.push_back(x0);
    double y = x0, b[1];
    for (double w : dW) {
      drift_interp(P, &y, b);
      y += b[0] * dt + w;
      path.positions.push_back(y);
    }
    return path;
  };
  auto refine = [](const std::vector<double>& dW, double dt, Rng& rng) {
    std::vector<double> out(dW.size() * 2);
    for (std::size_t i = 0; i < dW.size(); ++i) {
      const double first = 0.5 * dW[i] + 0.5 * std::sqrt(dt) * rng.normal();
      out[2 * i] = first;
      out[2 * i + 1] = dW[i] - first;
    }
    return out;
  };
  auto f = [](const double* x) { return std::cos(2 * M_PI * x[0]); };

  const double T = 2.0, dt0 = 4e-3;
  const std::size_t n = static_cast<std::size_t>(T / dt0 + 0.5);
  const int levels = 5, R = 80;
  std::vector<std::vector<double>> diffs(levels - 1);
  for (int r = 0; r < R; ++r) {
    Rng rng(derive_seed(701, 4, static_cast<std::uint64_t>(r)));
    std::vector<double> w(n);
    for (auto& v : w) v = std::sqrt(dt0) * rng.normal();
    double step = dt0;
    double prev = time_integral(em(0.15, step, w), f);
    for (int l = 0; l + 1 < levels; ++l) {
      w = refine(w, step, rng);
      step /= 2;
      const double cur = time_integral(em(0.15, step, w), f);
      diffs[l].push_back(std::fabs(prev - cur));
      prev = cur;
    }
  }
  std::vector<double> med(levels - 1);
  for (int l = 0; l + 1 < levels; ++l) {
    auto& v = diffs[l];
    std::nth_element(v.begin(), v.begin() + R / 2, v.end());
    med[l] = v[R / 2];
  }
  for (int l = 0; l + 2 < levels; ++l) CHECK(med[l + 1] < med[l]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int l = 0; l + 1 < levels; ++l) {
    const double y = std::log2(med[l]);
    sx += l;
    sy += y;
    sxx += double(l) * l;
    sxy += l * y;
  }
  const int m = levels - 1;
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope > -1.4);
  CHECK(slope < -0.6);
}

TEST_CASE("burn-in advances the chain before recording") {
  Potential P = cosine_potential(0.3);
  PathRecord full = simulate(P, SimConfig{4.0, 1e-3, {0.4}, 55, 0.0});
  PathRecord tail = simulate(P, SimConfig{3.0, 1e-3, {0.4}, 55, 1.0});
  REQUIRE(tail.n_points() == 3001);
  CHECK(tail.x0[0] == full.point(1000)[0]);
  bool match = true;
  for (std::size_t i = 0; i < tail.n_points(); ++i)
    match = match && tail.point(i)[0] == full.point(1000 + i)[0];
  CHECK(match);
}

TEST_CASE("path files round-trip bit for bit") {
  namespace fs = std::filesystem;
  Potential P = cosine_potential(0.3);
  PathRecord p = simulate(P, SimConfig{1.0, 1e-3, {0.6}, 99, 0.0});
  const fs::path file = fs::temp_directory_path() / "td_test_path.tdf";
  write_path(p, file.string());
  PathRecord q = read_path(file.string());
  CHECK(q.d == p.d);
  CHECK(q.dt == p.dt);
  CHECK(q.seed == p.seed);
  CHECK(q.x0 == p.x0);
  CHECK(q.positions == p.positions);

  // a second write of the loaded record produces an identical file
  const fs::path file2 = fs::temp_directory_path() / "td_test_path2.tdf";
  write_path(q, file2.string());
  std::ifstream a(file, std::ios::binary), b(file2, std::ios::binary);
  std::vector<char> ba((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::vector<char> bb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(ba == bb);

  {
    std::ofstream bad(file2, std::ios::binary);
    bad.write("JUNK", 4);
  }
  CHECK_THROWS(read_path(file2.string()));

  {
    std::ofstream trunc(file2, std::ios::binary | std::ios::trunc);
    trunc.write(ba.data(), static_cast<std::streamsize>(ba.size() / 2));
  }
  CHECK_THROWS(read_path(file2.string()));

  fs::remove(file);
  fs::remove(file2);
}

TEST_CASE("drift blow-up raises a simulation error naming the step") {
  Potential P = cosine_potential(1e308);
  try {
    simulate(P, SimConfig{1.0, 1e-3, {0.2}, 5, 0.0});
    FAIL("expected a simulation error");
  } catch (const SimulationError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}
