#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rlex {

// splitmix64 step, used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** generator with hand-rolled distributions.
///
/// All sampling is implemented here rather than with <random> distributions
/// so that identical seeds produce identical streams on every platform and
/// in any reimplementation of this library. Gamma variates use the
/// Marsaglia-Tsang method, normals use Box-Muller, Beta uses the Gamma
/// ratio.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  // Derives an independent stream for run `run_index` of a seeded sweep.
  static Rng for_run(std::uint64_t seed, std::uint64_t run_index) {
    std::uint64_t sm = run_index + 0x632be59bd9b4e019ULL;
    return Rng(seed ^ splitmix64(sm));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n) by rejection.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return static_cast<int>(draw % bound);
  }

  bool bernoulli(double p) { return next_double() < p; }

  double normal() {
    // Box-Muller; the second variate is discarded to keep the stream a pure
    // function of the call sequence.
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Gamma(shape, 1), shape > 0.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
      double u;
      do {
        u = next_double();
      } while (u <= 0.0);
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta: parameters must be positive");
    const double ga = gamma(a);
    const double gb = gamma(b);
    return ga / (ga + gb);
  }

  // Index draw from an unnormalised weight vector by linear scan.
  template <typename Container>
  int categorical(const Container& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("categorical: weights must have positive sum");
    double u = next_double() * total;
    int i = 0;
    const int last = static_cast<int>(weights.size()) - 1;
    for (double w : weights) {
      if (i == last) break;
      u -= w;
      if (u < 0.0) break;
      ++i;
    }
    return i;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace rlex
