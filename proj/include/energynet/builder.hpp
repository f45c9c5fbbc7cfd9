#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "energynet/capacity.hpp"
#include "energynet/dbn.hpp"
#include "energynet/error.hpp"
#include "energynet/irbm.hpp"

namespace energynet {

/// Knobs of the layer-growing build.
struct BuildConfig {
  int max_layers = 10;           ///< T
  double gamma_threshold = 0.1;  ///< Gamma; a layer stops growing once n/c <= Gamma
  double beta = 1.01;
  PenaltyConvention penalty = PenaltyConvention::kAbsolute;
  int cd_k = 1;
  double lr = 0.01;
  int batch_size = 20;
  int min_checks = 50;       ///< gamma counts as +inf before this many updates
  long max_steps = 100000;   ///< hard cap on updates per layer
  AisConfig ais;
  int n_mc = 10;             ///< posterior samples per example in the likelihood bound
  /// Weight of the complexity term; unset means m (the training-set size).
  std::optional<double> mdl_weight;
  double lambda = 1.0;       ///< Lambda_k for every layer
  double norm_p = 2.0;       ///< q = p / (p - 1)
  bool mean_field = false;   ///< pass probabilities between layers instead of samples
  /// Start each layer's visible biases at the logits of the input marginals
  /// instead of zero.
  bool init_visible_bias = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One (step c, n, gamma) point of a layer's growth.
struct GrowthPoint {
  long step = 0;
  int n = 0;
  double gamma = 0.0;
};

/// A layer failed to converge within BuildConfig::max_steps.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<GrowthPoint> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<GrowthPoint>& trace() const { return trace_; }

 private:
  std::vector<GrowthPoint> trace_;
};

struct LayerTraining {
  IRbmState state;
  double gamma = 0.0;  ///< final n / c, <= Gamma
  long steps = 0;
  /// Points at every growth event plus the final step.
  std::vector<GrowthPoint> trace;
};

inline constexpr double kMarginalClamp = 0.01;

/// log(p / (1 - p)) of each column mean, with p clamped to [0.01, 0.99].
Vector marginal_logits(const Matrix& data);

/// Grows one iRBM on `input` until its average growth n/c falls to Gamma.
/// After update s (1-based), gamma = n / (s - 1): the step counter is bumped
/// before the ratio is taken. gamma is +inf while s < min_checks.
LayerTraining train_new_layer(const Matrix& input, const BuildConfig& cfg, Rng& rng);

/// Maps every row through all layers of `dbn` (identity for an empty stack).
Matrix propagate_dataset(const Matrix& data, const Dbn& dbn, Rng& rng, bool mean_field = false);

enum class LayerDecision { kAccept, kReject };

struct BuildRecord {
  int layer = 0;              ///< t, 1-based
  int n = 0;                  ///< candidate width
  double gamma = 0.0;
  long steps = 0;
  double loglik_per_example = 0.0;
  double loglik_stderr = 0.0;
  double neg_loglik_total = 0.0;  ///< -m * mean bound
  double complexity = 0.0;        ///< Rademacher bound of the candidate network
  double mdl_weight = 0.0;
  double description_length = 0.0;
  std::vector<int> architecture;  ///< [n_0, ..., candidate]
  LayerDecision decision = LayerDecision::kAccept;
};

struct BuildReport {
  std::vector<int> accepted_sizes;  ///< hidden widths of the returned DBN
  std::vector<BuildRecord> records;

  /// Throws Error if accepted M values are not strictly decreasing, a
  /// record has gamma > Gamma, or accepted_sizes disagrees with the records.
  void check(const BuildConfig& cfg) const;
};

struct BuildResult {
  Dbn dbn;
  BuildReport report;
};

/// Greedy layer-wise build: train a candidate iRBM on the representation
/// of the accepted stack, score the candidate network by
/// M = -m * bound + weight * rademacher_bound, accept iff M drops below the
/// previous accepted M (the first layer always passes), stop at the first
/// rejection or after T layers.
BuildResult build_network(const Matrix& data, const BuildConfig& cfg, Rng& rng);

const char* to_string(LayerDecision d);

}  // namespace energynet
