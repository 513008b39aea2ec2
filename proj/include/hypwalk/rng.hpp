#pragma once

#include <cmath>
#include <cstdint>

namespace hypwalk {

// splitmix64 step (Steele, Lea, Flood). Used both as a mixer and as the
// per-stream generator: one stream per (seed, stream_index) pair, so results
// do not depend on how work is split across threads.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    // decorrelate (seed, stream) before use; two mixing rounds are enough to
    // break the additive structure of nearby stream indices
    std::uint64_t s = seed ^ 0x6a09e667f3bcc909ULL;
    splitmix64(s);
    s ^= stream * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL;
    splitmix64(s);
    state_ = s;
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1), 53 random bits; fixed algorithm for cross-platform
  // reproducibility (no std::uniform_real_distribution)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // exponential(1); argument of log stays in (0, 1]
  double next_exponential() { return -std::log(1.0 - next_double()); }

  // index into a cumulative distribution: returns smallest i with u < cdf[i]
  int next_index(const double* cdf, int n) {
    double u = next_double();
    for (int i = 0; i < n; ++i) {
      if (u < cdf[i]) return i;
    }
    return n - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace hypwalk
