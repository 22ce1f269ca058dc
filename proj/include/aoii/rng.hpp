#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace aoii {

// Deterministic random stream. A 64-bit seed fully determines the sequence on
// every platform: only raw engine words are consumed (std::*_distribution is
// implementation-defined and never used). Replication r of a run with seed s
// draws from the substream with seed s + r.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(scramble(seed)) {}

  static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(seed + index);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Index into a probability row. Rounding slack in the row sum is absorbed
  // by the last cell with positive mass, so a row summing to 1 within
  // tolerance can never fail to produce an index.
  template <class Row>
  int categorical(const Row& probs) {
    const double u = next_double();
    double cum = 0.0;
    int last_positive = -1;
    const int n = static_cast<int>(probs.size());
    for (int i = 0; i < n; ++i) {
      const double p = probs[i];
      if (p > 0.0) {
        last_positive = i;
        cum += p;
        if (u < cum) return i;
      }
    }
    assert(last_positive >= 0);
    return last_positive;
  }

 private:
  // splitmix64 scramble so that nearby seeds give unrelated streams.
  static std::uint64_t scramble(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace aoii
