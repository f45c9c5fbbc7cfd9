#pragma once

#include <cstdint>
#include <vector>

#include "energynet/data.hpp"
#include "energynet/dbn.hpp"

namespace energynet {

enum class Activation { kRelu, kSigmoid };

/// Affine map x -> x W + b with W of shape in x out.
struct DenseLayer {
  Matrix w;
  Vector b;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feedforward classifier: hidden layers with a shared activation, then a
/// linear output layer of width n_classes followed by softmax.
struct Mlp {
  std::vector<DenseLayer> hidden;
  DenseLayer output;
  Activation activation = Activation::kRelu;

  int input_size() const;
  int num_classes() const { return static_cast<int>(output.b.size()); }
  /// [n_0, hidden sizes..., n_classes].
  std::vector<int> layer_sizes() const;
  void validate() const;

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

/// Hidden layers copied from the DBN (W and b_h of each RBM); output layer
/// Gaussian with stddev 0.01 and zero bias.
Mlp init_from_dbn(const Dbn& dbn, int n_classes, Rng& rng, Activation activation = Activation::kRelu);

/// Only the sizes transfer: hidden weights Gaussian with stddev 1/sqrt(fan_in),
/// zero biases, output layer as in init_from_dbn.
Mlp init_from_sizes(const std::vector<int>& layer_sizes, int n_classes, Rng& rng,
                    Activation activation = Activation::kRelu);

/// Row-wise softmax class probabilities.
Matrix predict_proba(const Mlp& mlp, const Matrix& x);
Matrix predict_log_proba(const Mlp& mlp, const Matrix& x);

/// Same shapes as Mlp, holding d(loss)/d(param).
struct MlpGradient {
  std::vector<DenseLayer> hidden;
  DenseLayer output;
};

struct LossAndGradient {
  double loss = 0.0;  ///< mean softmax cross-entropy
  MlpGradient grad;
};

/// Mean cross-entropy of `x` against `labels` and its exact gradient.
LossAndGradient loss_and_gradient(const Mlp& mlp, const Matrix& x, const std::vector<int>& labels);
double mean_loss(const Mlp& mlp, const Matrix& x, const std::vector<int>& labels);

struct TrainHyper {
  double lr = 0.01;
  int batch_size = 32;
  int epochs = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  Mlp mlp;                          ///< best checkpoint by full training loss
  std::vector<double> epoch_losses; ///< entry 0 is the loss at init
  int best_epoch = 0;
};

/// Minibatch SGD on softmax cross-entropy with reshuffling every epoch.
/// Returns the checkpoint with the lowest training loss, init included.
TrainResult train_supervised(const Mlp& mlp, const Dataset& data, const TrainHyper& hyper);

struct Evaluation {
  double accuracy = 0.0;
  double mean_nll = 0.0;
  long n = 0;
};

/// Argmax accuracy (ties go to the lowest class index) and mean NLL.
Evaluation evaluate(const Mlp& mlp, const Dataset& data);

/// Index of the largest entry, first one on ties.
int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace energynet
