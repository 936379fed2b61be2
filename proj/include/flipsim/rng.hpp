#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace flipsim {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// SplitMix64 finalizer, used for seed derivation only.
inline std::uint64_t split_mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named random streams. Every stochastic quantity draws from its own stream
// so any single source can be frozen in tests without disturbing the others.
enum class Stream : std::uint64_t {
  Channel = 1,
  Noise = 2,
  Attacker = 3,
  Pilot = 4,
  Data = 5,
};

// Fold an ordered tuple of identifiers (master seed, stream id, sweep index,
// block index, frame index, ...) into one 64-bit stream seed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = 0x243f6a8885a308d3ULL;
  for (std::uint64_t v : parts) acc = split_mix64(split_mix64(acc) ^ v);
  return acc;
}

inline std::uint64_t stream_seed(std::uint64_t master, Stream s,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = derive_seed({master, static_cast<std::uint64_t>(s)});
  for (std::uint64_t v : parts) acc = split_mix64(split_mix64(acc) ^ v);
  return acc;
}

// mt19937_64 engine with hand-rolled output transforms. The standard pins
// the engine but not the distributions, so uniform/normal conversions are
// done here to keep results identical across toolchains.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased uniform integer in [0, bound).
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t scale = UINT64_MAX / bound;
    const std::uint64_t limit = scale * bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v / scale;
  }

  // Standard normal pair (Box-Muller).
  void gaussian_pair(double& a, double& b) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    a = r * std::cos(kTwoPi * u2);
    b = r * std::sin(kTwoPi * u2);
  }

  double gaussian() {
    double a, b;
    gaussian_pair(a, b);
    return a;
  }

  // Circularly-symmetric complex Gaussian with total variance `var`
  // (each component carries var/2).
  cplx cgaussian(double var) {
    double a, b;
    gaussian_pair(a, b);
    const double s = std::sqrt(0.5 * var);
    return {s * a, s * b};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace flipsim
