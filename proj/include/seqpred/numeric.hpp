#pragma once

#include <cmath>
#include <cstdint>

namespace seqpred {

// Neumaier-compensated accumulator. Sums of many tiny expectation terms
// (2^n prefix weights) lose digits under naive addition.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Per-sample seed derived from (seed, index); makes sample streams
// independent of scheduling and worker count.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(index + 1));
}

// Uniform double in [0, 1) from 53 random bits; avoids the
// implementation-defined behaviour of std::uniform_real_distribution.
inline double uniform_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace seqpred
