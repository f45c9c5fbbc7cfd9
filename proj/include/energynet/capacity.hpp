#pragma once

#include <limits>
#include <vector>

namespace energynet {

/// Layer widths [n_0, n_1, ..., n_l] of a feedforward network without its
/// output layer; n_0 is the input dimension.
struct Architecture {
  std::vector<int> layer_sizes;

  /// Throws InvalidArgument unless there are >= 2 entries, all >= 1.
  void validate() const;
  int hidden_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int input_size() const { return layer_sizes.front(); }
  long total_hidden_units() const;
};

/// Constants of the layer-wise Rademacher bound.
struct CapacityParams {
  std::vector<double> lambdas;  ///< norm bound per hidden layer, > 0
  double p = 2.0;               ///< norm exponent in [1, inf]
  double r_inf = 1.0;           ///< max |feature| over the sample
  long m = 1;                   ///< sample size

  /// Dual exponent with 1/p + 1/q = 1; p = 1 gives q = inf.
  double q() const;
  void validate() const;

  /// Lambda = `lambda` for `layers` layers, otherwise defaults.
  static CapacityParams uniform(int layers, double lambda, double p, double r_inf, long m);
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dual of a norm exponent. Throws InvalidArgument outside [1, inf].
double dual_exponent(double p);

/// n^(1/q), exactly 1 when q is infinite.
double width_factor(double n, double q);

/// 2^(k-1) r_inf (prod_{j=1..k} Lambda_j n_{j-1}^(1/q)) sqrt(2 log(2 n_0) / m),
/// with k the number of hidden layers of `arch`.
double rademacher_bound(const Architecture& arch, const CapacityParams& cap);

/// neg_log_lik_total + weight * complexity.
double description_length(double neg_log_lik_total, double complexity, double weight);

}  // namespace energynet
