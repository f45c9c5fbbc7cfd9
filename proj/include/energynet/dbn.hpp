#pragma once

#include <cstdint>
#include <vector>

#include "energynet/rbm.hpp"

namespace energynet {

/// Greedily stacked RBMs. Layer i's hidden size equals layer i+1's visible
/// size; the top pair is undirected and lower layers generate downward.
class Dbn {
 public:
  Dbn() = default;
  /// Throws DimensionError naming the first incompatible layer.
  explicit Dbn(std::vector<RbmParams> layers);

  const std::vector<RbmParams>& layers() const { return layers_; }
  std::size_t depth() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }
  const RbmParams& layer(std::size_t i) const { return layers_.at(i); }
  const RbmParams& top() const { return layers_.back(); }

  /// [n_0, n_1, ..., n_L]; empty for an empty stack.
  std::vector<int> layer_sizes() const;

  /// Appends a layer whose visible size must match the current top.
  void push_back(RbmParams layer);
  /// Copy with one more layer on top.
  Dbn with_layer(RbmParams layer) const;

  friend bool operator==(const Dbn&, const Dbn&) = default;

 private:
  std::vector<RbmParams> layers_;
};

struct AisConfig {
  int n_temps = 1000;  ///< intermediate distributions, including both ends
  int n_chains = 64;
  std::uint64_t seed = 0;
  int threads = 1;  ///< results do not depend on this value

  void validate() const;
};

struct AisEstimate {
  double log_z = 0.0;
  double std_error = 0.0;  ///< standard error of log_z, delta method over chains
};

/// Annealed importance sampling from the uniform RBM (zero weights and
/// biases, log Z0 = (D + K) log 2) to `params`, along the linear schedule
/// p_t ~ exp(-t E), t = 0 .. 1, with hidden units summed out analytically.
/// A chain whose weight becomes non-finite is restarted once; a second
/// failure throws NumericError.
AisEstimate ais_log_partition(const RbmParams& params, const AisConfig& cfg);

/// Samples h(i) ~ P(h | h(i-1)) through layers 0..up_to.
BinaryVector propagate_sample(const BinaryVector& v, const Dbn& dbn, std::size_t up_to, Rng& rng);

/// Batch version over layers 0..up_to. With `mean_field`, probabilities are
/// passed up instead of samples.
Matrix propagate_batch(const Matrix& data, const Dbn& dbn, std::size_t up_to, Rng& rng, bool mean_field = false);

struct LikelihoodEstimate {
  double mean = 0.0;     ///< mean per-example lower bound, nats
  double std_error = 0.0;  ///< Monte Carlo plus top-partition standard error
  double top_log_z = 0.0;
  double top_log_z_stderr = 0.0;
};

/// Variational lower bound on log P(v) for each row of `data`, averaged:
/// E_Q[log P(v, h)] + H(Q) with Q the feed-forward factorial posterior,
/// estimated with `n_mc` samples per example. Hidden entropies are computed
/// in closed form given the sampled parent. The top RBM uses `top_log_z`.
/// For a one-layer stack the value is exact and no randomness is consumed.
LikelihoodEstimate estimate_dbn_loglik(const Dbn& dbn, const Matrix& data, double top_log_z,
                                       double top_log_z_stderr, int n_mc, Rng& rng);

/// Same, with the top partition function estimated by AIS.
LikelihoodEstimate estimate_dbn_loglik(const Dbn& dbn, const Matrix& data, const AisConfig& cfg, int n_mc, Rng& rng);

/// Mean per-example lower bound in nats, AIS for the top layer.
double dbn_loglik_lower_bound(const Dbn& dbn, const Matrix& data, const AisConfig& cfg, int n_mc, Rng& rng);

/// log P(x | h) under the directed conditional sigma(W h + b_v) of `layer`.
double log_cond_visible(const Vector& x, const Vector& h, const RbmParams& layer);

/// Entropy of the factorial distribution sigma(logits), nats.
double bernoulli_entropy(const Vector& logits);

}  // namespace energynet
