#pragma once

#include <cstdint>

namespace switchdiff {

/// SplitMix64 (Steele, Lea, Flood 2014).  Chosen for the sampling layer
/// because it is a tiny, well-known 64-bit generator whose output is fully
/// determined by the seed, with no platform-dependent state.  Every draw in
/// the library flows through this type, so a (seed, call-order) pair pins the
/// result bit-for-bit across runs and machines.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) using the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// 64-bit finalizer used for seed derivation (the SplitMix64 output stage).
std::uint64_t mix64(std::uint64_t x);

/// Deterministic per-stream seed: mix64(master + GOLDEN * (index + 1)).
/// Streams for distinct indices are independent for all practical purposes
/// and reproducible from (master, index) alone.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index);

/// Inverse-CDF exponential draw, -log(1 - u)/rate.  Strictly positive: the
/// (probability 2^-53) draw u == 0 is nudged to half an ulp.
double draw_exponential(SplitMix64& gen, double rate);

/// Standard normal via Box-Muller (two uniforms per call, sine branch
/// discarded).  Used only inside the gamma sampler.
double draw_normal(SplitMix64& gen);

/// Gamma(shape, rate) via Marsaglia-Tsang squeeze (Marsaglia & Tsang 2000);
/// shape < 1 is boosted through Gamma(shape + 1) * U^(1/shape).  Rejection
/// consumes a variable but seed-determined number of draws, so results stay
/// reproducible for a fixed (seed, call-order).
double draw_gamma(SplitMix64& gen, double shape, double rate);

/// Index in [0, len) distributed by the given nonnegative weights (assumed
/// to sum to ~1); one uniform consumed.
int draw_categorical(SplitMix64& gen, const double* weights, int len);

}  // namespace switchdiff
