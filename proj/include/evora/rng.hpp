#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "evora/types.hpp"

namespace evora {

// SplitMix64 finalizer. Also used as the mixing step of the documented
// seed-derivation chain (see derive_seed).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Seed derivation: child = mix(mix(mix(mix(base ^ fnv1a(tag)) ^ a) ^ b) ^ c).
// Extending a run with more indices never reshuffles earlier streams.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                    std::uint64_t a = 0, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(base ^ fnv1a64(tag));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

// Stateless uniform in [0,1) from a hash; used for per-cell traction map
// sampling so that values do not depend on evaluation order or windowing.
inline double hash_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                           std::uint64_t c, std::uint64_t d = 0) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(a));
  h = splitmix64(h ^ splitmix64(b + 0x9E3779B97F4A7C15ULL));
  h = splitmix64(h ^ splitmix64(c + 0x2545F4914F6CDD1DULL));
  h = splitmix64(h ^ d);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// xoshiro256++ with Marsaglia polar normals and Marsaglia-Tsang gammas.
// Hand-rolled so that draws are reproducible across platforms and standard
// library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x = splitmix64(x);
      word = x;
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // (0, 1]
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) {  // [0, n)
    return static_cast<int>(static_cast<double>(n) * uniform());
  }

  // Ziggurat normal (Marsaglia & Tsang 2000, 128 layers).
  double normal() {
    const ZigTables& z = zig_tables();
    for (;;) {
      const auto hz = static_cast<std::int32_t>(next_u64() >> 32);
      const int iz = hz & 127;
      if (std::abs(static_cast<std::int64_t>(hz)) < z.kn[iz]) {
        return hz * z.wn[iz];
      }
      if (iz == 0) {  // tail
        double x, y;
        do {
          x = -std::log(uniform_pos()) / kZigR;
          y = -std::log(uniform_pos());
        } while (y + y < x * x);
        return hz > 0 ? kZigR + x : -(kZigR + x);
      }
      const double x = hz * z.wn[iz];
      if (z.fn[iz] + uniform() * (z.fn[iz - 1] - z.fn[iz]) <
          std::exp(-0.5 * x * x)) {
        return x;
      }
    }
  }

  // Marsaglia-Tsang; shape < 1 handled by the boost trick.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Dirichlet draw via normalized independent Gamma(beta_b, 1) variates.
  void dirichlet(const Vec& beta, Vec& out) {
    out.resize(beta.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      out[i] = gamma(beta[i]);
      total += out[i];
    }
    if (total <= 0.0) {  // all-underflow corner; fall back to uniform
      out.setConstant(1.0 / static_cast<double>(beta.size()));
      return;
    }
    out /= total;
  }

  // Index draw from a probability vector (sums to ~1).
  int categorical(const Vec& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  static constexpr double kZigR = 3.442619855899;

  struct ZigTables {
    std::int64_t kn[128];
    double wn[128];
    double fn[128];
  };

  static const ZigTables& zig_tables() {
    static const ZigTables tables = [] {
      ZigTables z{};
      double dn = kZigR, tn = kZigR;
      const double vn = 9.91256303526217e-3;
      const double m1 = 2147483648.0;
      const double q = vn / std::exp(-0.5 * dn * dn);
      z.kn[0] = static_cast<std::int64_t>((dn / q) * m1);
      z.kn[1] = 0;
      z.wn[0] = q / m1;
      z.wn[127] = dn / m1;
      z.fn[0] = 1.0;
      z.fn[127] = std::exp(-0.5 * dn * dn);
      for (int i = 126; i >= 1; --i) {
        dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
        z.kn[i + 1] = static_cast<std::int64_t>((dn / tn) * m1);
        tn = dn;
        z.fn[i] = std::exp(-0.5 * dn * dn);
        z.wn[i] = dn / m1;
      }
      return z;
    }();
    return tables;
  }

  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace evora
