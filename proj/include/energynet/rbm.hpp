#pragma once

#include <utility>
#include <vector>

#include "energynet/math.hpp"
#include "energynet/random.hpp"

namespace energynet {

/// A vector whose entries are exactly 0 or 1.
class BinaryVector {
 public:
  BinaryVector() = default;
  /// Throws InvalidArgument if any entry is not exactly 0 or 1.
  explicit BinaryVector(Vector bits);
  BinaryVector(std::initializer_list<double> bits);

  static BinaryVector zeros(Eigen::Index n) { return BinaryVector(Vector::Zero(n)); }
  /// The `index`-th configuration of length n, bit i = (index >> i) & 1.
  static BinaryVector from_index(std::uint64_t index, Eigen::Index n);

  const Vector& bits() const { return bits_; }
  operator const Vector&() const { return bits_; }  // NOLINT: read-only view
  Eigen::Index size() const { return bits_.size(); }
  double operator[](Eigen::Index i) const { return bits_[i]; }

  friend bool operator==(const BinaryVector& a, const BinaryVector& b) { return a.bits_ == b.bits_; }

 private:
  Vector bits_;
};

/// Throws InvalidArgument unless every entry of `m` is 0 or 1.
void require_binary(const Matrix& m, const char* what);

/// Parameters of a finite binary RBM: W is D x K, b_v has D entries and
/// b_h has K entries.
struct RbmParams {
  Matrix w;
  Vector b_v;
  Vector b_h;

  RbmParams() = default;
  /// Validates shapes and finiteness.
  RbmParams(Matrix w, Vector b_v, Vector b_h);

  static RbmParams zeros(Eigen::Index d, Eigen::Index k);
  /// Gaussian weights (mean 0, stddev `stddev`), zero biases.
  static RbmParams random_init(Eigen::Index d, Eigen::Index k, Rng& rng, double stddev = 0.01);

  Eigen::Index visible_size() const { return b_v.size(); }
  Eigen::Index hidden_size() const { return b_h.size(); }

  /// Throws DimensionError / NumericError when an invariant is broken.
  void validate() const;

  friend bool operator==(const RbmParams&, const RbmParams&) = default;
};

/// Same-shaped container for a parameter gradient or sufficient statistic.
struct RbmGradient {
  Matrix w;
  Vector b_v;
  Vector b_h;

  static RbmGradient zeros(Eigen::Index d, Eigen::Index k);
  RbmGradient& operator+=(const RbmGradient& o);
  RbmGradient& operator-=(const RbmGradient& o);
  RbmGradient& operator*=(double s);
  friend RbmGradient operator-(RbmGradient a, const RbmGradient& b) { return a -= b; }
};

/// Enumeration ceiling for exact oracles: D + K <= 24.
inline constexpr int kMaxEnumerationBits = 24;

/// E(v,h) = -v.b_v - h.b_h - v^T W h.
double energy(const BinaryVector& v, const BinaryVector& h, const RbmParams& params);

/// Free energy with hidden units summed out:
/// F(v) = -v.b_v - sum_k softplus(W_k^T v + b_h,k). Accepts real-valued v.
double free_energy(const Vector& v, const RbmParams& params);

/// Free energy of every row of `batch`.
Vector free_energy_batch(const Matrix& batch, const RbmParams& params);

/// log Z by exhaustive enumeration. Throws IntractableError when D + K > 24.
double exact_log_partition(const RbmParams& params);

/// log P(v) = -F(v) - log_z.
double log_prob(const BinaryVector& v, const RbmParams& params, double log_z);

/// sigma(W^T v + b_h).
Vector cond_hidden(const Vector& v, const RbmParams& params);
/// sigma(W h + b_v).
Vector cond_visible(const Vector& h, const RbmParams& params);
/// Row-wise conditionals for a batch (rows are examples).
Matrix cond_hidden_batch(const Matrix& v, const RbmParams& params);
Matrix cond_visible_batch(const Matrix& h, const RbmParams& params);

struct GibbsSample {
  BinaryVector v;
  BinaryVector h;
};

/// h' ~ P(h|v), then v' ~ P(v|h').
GibbsSample gibbs_step(const BinaryVector& v, const RbmParams& params, Rng& rng);

/// Mean over the batch of v h^T, v and P(h|v), using hidden probabilities.
RbmGradient positive_statistics(const RbmParams& params, const Matrix& batch);

/// Negative-phase statistics of CD-k: chains start at each batch row and run
/// k full Gibbs steps; statistics use the final visible sample and its
/// hidden probabilities.
RbmGradient cd_negative_statistics(const RbmParams& params, const Matrix& batch, int k, Rng& rng);

/// Model expectation of the sufficient statistics, by enumeration over v.
RbmGradient exact_model_statistics(const RbmParams& params);

/// Gradient of the mean exact log-likelihood of `batch`.
RbmGradient exact_loglik_gradient(const RbmParams& params, const Matrix& batch);

/// Mean exact log-likelihood of the batch rows.
double exact_mean_loglik(const RbmParams& params, const Matrix& batch);

/// One CD-k step: params + lr * (positive - negative), batch-averaged.
RbmParams cd_k_update(const RbmParams& params, const Matrix& batch, int k, double lr, Rng& rng);

/// Stacks binary vectors as the rows of a matrix.
Matrix to_batch(const std::vector<BinaryVector>& rows);

}  // namespace energynet
