#ifndef RINP_RNG_HPP
#define RINP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace rinp {

// Seeded generator with hand-rolled transforms so traces are reproducible
// across standard library implementations.
struct Rng {
  std::mt19937_64 eng;

  explicit Rng(std::uint64_t seed) : eng(seed) {}

  // [0, 1)
  double uniform() {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double exponential(double rate) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  // Box-Muller; consumes exactly two uniforms per call.
  double normal(double mu, double sigma) {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    return mu + sigma * z;
  }

  double lognormal(double mu, double sigma) {
    return std::exp(normal(mu, sigma));
  }
};

}  // namespace rinp

#endif
