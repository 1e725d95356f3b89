#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace pforge {

/// SplitMix64 finalizer. Used both as a seed expander and as the mixing
/// function of the counter-based generator below.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed for a named stage or stream.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t parent, const char* label);

/// Stateless generator: every (key, counter) pair maps to a fixed uniform
/// number, so results do not depend on evaluation order or thread schedule.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ ^ splitmix64(counter));
  }
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Fills an rows x cols matrix with standard normal draws from `gen`.
Eigen::MatrixXd gaussian_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols);

}  // namespace pforge
