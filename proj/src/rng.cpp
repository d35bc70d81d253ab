#include "switchdiff/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace switchdiff {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

double draw_exponential(SplitMix64& gen, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  double u = gen.uniform01();
  if (u == 0.0) u = 0x1.0p-54;
  return -std::log1p(-u) / rate;
}

double draw_normal(SplitMix64& gen) {
  double u1 = gen.uniform01();
  if (u1 == 0.0) u1 = 0x1.0p-54;
  const double u2 = gen.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

double draw_gamma(SplitMix64& gen, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("gamma shape and rate must be positive");
  if (shape < 1.0) {
    // Boost through shape + 1: X = Gamma(shape+1) * U^(1/shape).
    double u = gen.uniform01();
    if (u == 0.0) u = 0x1.0p-54;
    return draw_gamma(gen, shape + 1.0, rate) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double z = draw_normal(gen);
    const double t = 1.0 + c * z;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    double u = gen.uniform01();
    if (u == 0.0) u = 0x1.0p-54;
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v))
      return d * v / rate;
  }
}

int draw_categorical(SplitMix64& gen, const double* weights, int len) {
  const double u = gen.uniform01();
  double acc = 0.0;
  for (int i = 0; i < len; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return len - 1;  // guards against cumulative rounding just below 1
}

}  // namespace switchdiff
