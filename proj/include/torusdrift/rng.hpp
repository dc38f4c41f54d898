#pragma once
// Counter-based RNG (Philox4x32-10) plus the derived variates the project
// needs (uniform, normal, gamma, p-exponential). Everything random flows
// through this type so that runs are reproducible bit-for-bit regardless of
// platform, thread count, or standard library.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace torusdrift {

namespace detail {

struct PhiloxState {
  std::array<std::uint32_t, 4> ctr;
  std::array<std::uint32_t, 2> key;
};

inline void philox_round(PhiloxState& s) {
  constexpr std::uint64_t M0 = 0xD2511F53ull;
  constexpr std::uint64_t M1 = 0xCD9E8D57ull;
  const std::uint64_t p0 = M0 * s.ctr[0];
  const std::uint64_t p1 = M1 * s.ctr[2];
  const std::array<std::uint32_t, 4> out = {
      static_cast<std::uint32_t>(p1 >> 32) ^ s.ctr[1] ^ s.key[0],
      static_cast<std::uint32_t>(p1),
      static_cast<std::uint32_t>(p0 >> 32) ^ s.ctr[3] ^ s.key[1],
      static_cast<std::uint32_t>(p0)};
  s.ctr = out;
  s.key[0] += 0x9E3779B9u;  // Weyl sequence key schedule
  s.key[1] += 0xBB67AE85u;
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::uint64_t key,
                                                  std::uint64_t ctr_lo,
                                                  std::uint64_t ctr_hi) {
  PhiloxState s;
  s.ctr = {static_cast<std::uint32_t>(ctr_lo),
           static_cast<std::uint32_t>(ctr_lo >> 32),
           static_cast<std::uint32_t>(ctr_hi),
           static_cast<std::uint32_t>(ctr_hi >> 32)};
  s.key = {static_cast<std::uint32_t>(key),
           static_cast<std::uint32_t>(key >> 32)};
  for (int i = 0; i < 10; ++i) philox_round(s);
  return s.ctr;
}

// SplitMix64 finalizer, used to derive per-cell seeds in the harness.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return detail::mix64(base ^ detail::mix64(a ^ detail::mix64(b)));
}

// One Rng is one independent stream, selected by (seed, stream). The stream
// index occupies the high counter words, so distinct streams never overlap.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint32_t next_u32() {
    if (avail_ == 0) {
      block_ = detail::philox4x32_10(seed_, counter_++, stream_);
      avail_ = 4;
    }
    return block_[4 - avail_--];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // uniform on [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0,1], safe to pass to log
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; the second variate of each pair is cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0)
      return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // symmetric scalar with density proportional to exp(-|x|^p / p), p in [1,2];
  // magnitude via the gamma transform |x| = (p V)^{1/p}, V ~ Gamma(1/p, 1),
  // then an independent fair sign
  double pexp(double p) {
    if (!(p >= 1.0 && p <= 2.0))
      throw std::invalid_argument("pexp: p must lie in [1,2]");
    const double v = gamma(1.0 / p);
    const double mag = std::pow(p * v, 1.0 / p);
    return (next_u64() & 1ull) ? mag : -mag;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int avail_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace torusdrift
