#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sro {

using Scalar = double;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

template <typename T>
using VecT = Eigen::Vector<T, Eigen::Dynamic>;
template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

// Error taxonomy used across the library. The CLI maps ArgumentError /
// SchemaError / IoError to exit code 2 and the rest to exit code 1.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG wrapper. All randomness in the library flows through
// this type so that runs are reproducible bit-for-bit; the draw functions
// avoid std::uniform_*_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [0, n), n > 0
  int below(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  // uniform in [lo, hi] inclusive
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }

  // Independent stream derived from this rng's seed; drawing from the child
  // does not advance the parent.
  Rng child(std::uint64_t tag) const {
    return Rng(splitmix64(seed_ ^ (tag * 0x9e3779b97f4a7c15ULL)));
  }

  // Fisher-Yates with our own draws (std::shuffle is implementation-defined).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sro
