#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>

namespace rcrl {

// Seeded random source with pinned value mappings. All distributions are
// computed from raw engine words here instead of std::*_distribution so that
// draws are identical across standard libraries and survive checkpointing
// (no hidden distribution state).
class RngState {
public:
  explicit RngState(uint64_t seed = 0) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller. One value per call; the second root is
  // discarded so there is no cached state to serialize.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent stream derived from (seed, stream) via splitmix64.
  static RngState derive(uint64_t seed, uint64_t stream) {
    return RngState(splitmix64(seed ^ splitmix64(stream)));
  }

  static uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  void save(std::ostream& os) const { os << eng_; }
  void load(std::istream& is) { is >> eng_; }

  bool operator==(const RngState& o) const { return eng_ == o.eng_; }

private:
  std::mt19937_64 eng_;
};

}  // namespace rcrl
