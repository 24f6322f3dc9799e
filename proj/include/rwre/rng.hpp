#pragma once
// Deterministic random number streams.
//
// One engine is used everywhere: xoshiro256++ seeded through splitmix64.
// Streams are derived from a master seed and a stream id, so experiments can
// hand every replication (or every walker) its own independent generator and
// stay byte-reproducible no matter how work is scheduled.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rwre {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  // Seed of the derived stream, exposed so manifests can record it.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
    std::uint64_t x = master ^ (0xd1342543de82ef95ULL * (stream_id + 1));
    return splitmix64(x);
  }

  // Independent stream: mixes the id into the seed before state expansion.
  static Rng stream(std::uint64_t master, std::uint64_t stream_id) {
    return Rng(derive_seed(master, stream_id));
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
    have_spare_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0,1): never returns 0, safe under log().
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  double exponential() { return -std::log(uniform01()); }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Marsaglia polar method with one cached spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through
  // Gamma(shape+1) * U^{1/shape}.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
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
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Knuth product method; fine for the small means used here.
  int poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      int k = 0;
      double prod = uniform01();
      while (prod > limit) {
        ++k;
        prod *= uniform01();
      }
      return k;
    }
    // Split large means to keep the product in range.
    return poisson(mean / 2.0) + poisson(mean - mean / 2.0);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rwre
