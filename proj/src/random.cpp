#include "energynet/random.hpp"

namespace energynet {

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

double Rng::normal(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Rng Rng::split(std::uint64_t base, std::uint64_t stream) const {
  Rng child;
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  child.engine_.seed(seq);
  return child;
}

Vector Rng::bernoulli(const Vector& probs) {
  Vector out(probs.size());
  for (Eigen::Index i = 0; i < probs.size(); ++i) out[i] = uniform() < probs[i] ? 1.0 : 0.0;
  return out;
}

Matrix Rng::bernoulli(const Matrix& probs) {
  Matrix out(probs.rows(), probs.cols());
  // Row-major draw order so that a batch row gets the same bits as the
  // equivalent Vector call.
  for (Eigen::Index r = 0; r < probs.rows(); ++r)
    for (Eigen::Index c = 0; c < probs.cols(); ++c) out(r, c) = uniform() < probs(r, c) ? 1.0 : 0.0;
  return out;
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = dist(engine_);
  return out;
}

}  // namespace energynet
