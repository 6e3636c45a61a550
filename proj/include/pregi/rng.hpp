#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pregi {

/// splitmix64; used to derive independent stream seeds from a master seed.
inline uint64_t hash_seed(uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0)
{
  return hash_seed(hash_seed(hash_seed(master ^ hash_seed(a)) ^ hash_seed(b)) ^ hash_seed(c));
}

/// Deterministic distributions on top of mt19937_64. The standard
/// distribution classes are implementation-defined, so they are avoided
/// anywhere reproducibility across toolchains matters.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform()
  {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal()
  {
    if (have_cached_)
    {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * M_PI * u2);
    have_cached_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n) { return static_cast<uint64_t>(uniform() * n) % n; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace pregi
