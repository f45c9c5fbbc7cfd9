#pragma once

#include <cstdint>
#include <random>

#include "energynet/math.hpp"

namespace energynet {

/// Seeded random source. Every stochastic operation takes one explicitly,
/// so a fixed seed reproduces results bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64() { return engine_(); }
  double uniform() { return std::generate_canonical<double, 53>(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  double normal(double mean = 0.0, double stddev = 1.0);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  /// Independent child stream `stream`, derived from one draw of this
  /// generator. Children of the same draw are stable regardless of the
  /// order in which they are consumed.
  Rng split(std::uint64_t base, std::uint64_t stream) const;

  /// Elementwise Bernoulli draws with the given probabilities.
  Vector bernoulli(const Vector& probs);
  Matrix bernoulli(const Matrix& probs);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev);

 private:
  std::mt19937_64 engine_;
};

}  // namespace energynet
