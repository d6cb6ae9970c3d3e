#pragma once

#include <cmath>
#include <cstdint>

#include "gsure/common.hpp"

namespace gsure {

/// Deterministic pseudo-random generator used everywhere in the library.
///
/// The integer stream is SplitMix64 (Steele, Lea & Flood's reference
/// constants), chosen so any language can reproduce the exact byte stream:
///
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform() maps the top 53 bits to (0,1] via ((bits >> 11) + 1) * 2^-53,
/// normal() applies the Box-Muller transform to consecutive uniform pairs
/// (caching the sine branch).  Child streams for parallel-safe trial fanout
/// are seeded with the (index+1)-th raw output of the parent seed's stream,
/// so results depend on the trial index and never on execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in (0, 1].
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Vector of independent +-1 entries (unit variance, bounded).
  Vector rademacher_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v[i] = (next_u64() >> 63) ? 1.0 : -1.0;
    return v;
  }

  /// Gamma draw with integer shape k >= 1 (sum of k exponentials).
  double gamma_integer_shape(int k, double rate) {
    if (k < 1 || rate <= 0.0)
      throw Error("invalid-argument", "gamma needs integer shape >= 1, rate > 0");
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += -std::log(uniform());
    return acc / rate;
  }

  /// Derived stream for trial `index`; see class comment.  SplitMix64's
  /// additive state makes the (index+1)-th output available in O(1).
  Rng child(std::uint64_t index) const {
    Rng g(state_ + index * 0x9E3779B97F4A7C15ULL);
    return Rng(g.next_u64());
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace gsure
