#include "energynet/finetune.hpp"

#include <numeric>
#include <string>

#include "energynet/error.hpp"

namespace energynet {

namespace {

Matrix affine(const Matrix& x, const DenseLayer& layer) {
  Matrix pre = x * layer.w;
  pre.rowwise() += layer.b.transpose();
  return pre;
}

Matrix activate(const Matrix& pre, Activation act) {
  if (act == Activation::kRelu) return pre.cwiseMax(0.0);
  return sigmoid(pre);
}

// d(activation)/d(pre), evaluated from the pre-activation and the output.
Matrix activation_slope(const Matrix& pre, const Matrix& out, Activation act) {
  if (act == Activation::kRelu) return (pre.array() > 0.0).cast<double>().matrix();
  return out.cwiseProduct((1.0 - out.array()).matrix());
}

// Row-wise log-softmax.
Matrix log_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Vector row = logits.row(r).transpose();
    out.row(r) = (row.array() - log_sum_exp(row)).matrix().transpose();
  }
  return out;
}

void check_labels(const std::vector<int>& labels, Eigen::Index rows, int n_classes) {
  if (static_cast<Eigen::Index>(labels.size()) != rows)
    throw InvalidArgument("classifier: " + std::to_string(labels.size()) + " labels for " + std::to_string(rows) +
                          " rows");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= n_classes)
      throw InvalidArgument("classifier: label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " is outside [0, " + std::to_string(n_classes) + ")");
}

DenseLayer output_layer(int in, int n_classes, Rng& rng) {
  return {rng.normal_matrix(in, n_classes, 0.01), Vector::Zero(n_classes)};
}

}  // namespace

int Mlp::input_size() const {
  return static_cast<int>(hidden.empty() ? output.w.rows() : hidden.front().w.rows());
}

std::vector<int> Mlp::layer_sizes() const {
  std::vector<int> sizes{input_size()};
  for (const auto& l : hidden) sizes.push_back(static_cast<int>(l.b.size()));
  sizes.push_back(num_classes());
  return sizes;
}

void Mlp::validate() const {
  Eigen::Index width = input_size();
  auto check = [&](const DenseLayer& l, const std::string& name) {
    if (l.w.rows() != width || l.w.cols() != l.b.size())
      throw DimensionError("Mlp: " + name + " has shape " + std::to_string(l.w.rows()) + "x" +
                           std::to_string(l.w.cols()) + ", bias " + std::to_string(l.b.size()) + ", input width " +
                           std::to_string(width));
    if (!l.w.allFinite() || !l.b.allFinite()) throw NumericError("Mlp: non-finite parameter in " + name);
    width = l.b.size();
  };
  for (std::size_t i = 0; i < hidden.size(); ++i) check(hidden[i], "hidden layer " + std::to_string(i));
  check(output, "output layer");
  if (num_classes() < 2) throw InvalidArgument("Mlp: need at least 2 classes");
}

Mlp init_from_dbn(const Dbn& dbn, int n_classes, Rng& rng, Activation activation) {
  if (dbn.empty()) throw InvalidArgument("init_from_dbn: the DBN has no layers");
  if (n_classes < 2) throw InvalidArgument("init_from_dbn: need at least 2 classes");
  Mlp mlp;
  mlp.activation = activation;
  for (const auto& layer : dbn.layers()) mlp.hidden.push_back({layer.w, layer.b_h});
  mlp.output = output_layer(static_cast<int>(dbn.top().hidden_size()), n_classes, rng);
  return mlp;
}

Mlp init_from_sizes(const std::vector<int>& layer_sizes, int n_classes, Rng& rng, Activation activation) {
  if (layer_sizes.size() < 2) throw InvalidArgument("init_from_sizes: need an input size and a hidden layer");
  if (n_classes < 2) throw InvalidArgument("init_from_sizes: need at least 2 classes");
  Mlp mlp;
  mlp.activation = activation;
  for (std::size_t i = 1; i < layer_sizes.size(); ++i) {
    const int in = layer_sizes[i - 1];
    const int out = layer_sizes[i];
    mlp.hidden.push_back({rng.normal_matrix(in, out, 1.0 / std::sqrt(static_cast<double>(in))), Vector::Zero(out)});
  }
  mlp.output = output_layer(layer_sizes.back(), n_classes, rng);
  return mlp;
}

Matrix predict_log_proba(const Mlp& mlp, const Matrix& x) {
  if (x.cols() != mlp.input_size())
    throw DimensionError("predict: input width " + std::to_string(x.cols()) + ", expected " +
                         std::to_string(mlp.input_size()));
  Matrix a = x;
  for (const auto& l : mlp.hidden) a = activate(affine(a, l), mlp.activation);
  return log_softmax(affine(a, mlp.output));
}

Matrix predict_proba(const Mlp& mlp, const Matrix& x) { return predict_log_proba(mlp, x).array().exp().matrix(); }

LossAndGradient loss_and_gradient(const Mlp& mlp, const Matrix& x, const std::vector<int>& labels) {
  if (x.rows() == 0) throw InvalidArgument("loss_and_gradient: empty batch");
  if (x.cols() != mlp.input_size()) throw DimensionError("loss_and_gradient: input width mismatch");
  check_labels(labels, x.rows(), mlp.num_classes());

  std::vector<Matrix> acts{x};
  std::vector<Matrix> pres;
  for (const auto& l : mlp.hidden) {
    pres.push_back(affine(acts.back(), l));
    acts.push_back(activate(pres.back(), mlp.activation));
  }
  const Matrix logp = log_softmax(affine(acts.back(), mlp.output));
  const double inv = 1.0 / static_cast<double>(x.rows());

  LossAndGradient out;
  Matrix delta = logp.array().exp().matrix();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    out.loss -= logp(r, y);
    delta(r, y) -= 1.0;
  }
  out.loss *= inv;
  delta *= inv;

  out.grad.output = {acts.back().transpose() * delta, delta.colwise().sum().transpose()};
  Matrix back = delta * mlp.output.w.transpose();
  out.grad.hidden.resize(mlp.hidden.size());
  for (std::size_t i = mlp.hidden.size(); i-- > 0;) {
    const Matrix d_pre = back.cwiseProduct(activation_slope(pres[i], acts[i + 1], mlp.activation));
    out.grad.hidden[i] = {acts[i].transpose() * d_pre, d_pre.colwise().sum().transpose()};
    if (i > 0) back = d_pre * mlp.hidden[i].w.transpose();
  }
  return out;
}

double mean_loss(const Mlp& mlp, const Matrix& x, const std::vector<int>& labels) {
  check_labels(labels, x.rows(), mlp.num_classes());
  const Matrix logp = predict_log_proba(mlp, x);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) loss -= logp(r, labels[static_cast<std::size_t>(r)]);
  return loss / static_cast<double>(x.rows());
}

void TrainHyper::validate() const {
  if (!(lr >= 0.0 && lr <= 1.0)) throw InvalidArgument("TrainHyper: lr must lie in [0, 1]");
  if (batch_size < 1) throw InvalidArgument("TrainHyper: batch_size must be >= 1");
  if (epochs < 0) throw InvalidArgument("TrainHyper: epochs must be >= 0");
}

TrainResult train_supervised(const Mlp& mlp, const Dataset& data, const TrainHyper& hyper) {
  hyper.validate();
  mlp.validate();
  data.validate();
  if (!data.has_labels()) throw InvalidArgument("train_supervised: the dataset has no labels");
  check_labels(data.labels, data.features.rows(), mlp.num_classes());

  Rng rng(hyper.seed);
  TrainResult result;
  result.mlp = mlp;
  Mlp current = mlp;
  double best = mean_loss(current, data.features, data.labels);
  result.epoch_losses.push_back(best);

  const long m = data.size();
  std::vector<long> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0L);
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    for (long start = 0; start < m; start += hyper.batch_size) {
      const long count = std::min<long>(hyper.batch_size, m - start);
      Matrix xb(count, data.dim());
      std::vector<int> yb(static_cast<std::size_t>(count));
      for (long j = 0; j < count; ++j) {
        const long src = order[static_cast<std::size_t>(start + j)];
        xb.row(j) = data.features.row(src);
        yb[static_cast<std::size_t>(j)] = data.labels[static_cast<std::size_t>(src)];
      }
      const LossAndGradient lg = loss_and_gradient(current, xb, yb);
      for (std::size_t l = 0; l < current.hidden.size(); ++l) {
        current.hidden[l].w -= hyper.lr * lg.grad.hidden[l].w;
        current.hidden[l].b -= hyper.lr * lg.grad.hidden[l].b;
      }
      current.output.w -= hyper.lr * lg.grad.output.w;
      current.output.b -= hyper.lr * lg.grad.output.b;
    }
    const double loss = mean_loss(current, data.features, data.labels);
    result.epoch_losses.push_back(loss);
    if (loss < best) {
      best = loss;
      result.mlp = current;
      result.best_epoch = epoch;
    }
  }
  return result;
}

int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (Eigen::Index i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = static_cast<int>(i);
  return best;
}

Evaluation evaluate(const Mlp& mlp, const Dataset& data) {
  data.validate();
  if (!data.has_labels()) throw InvalidArgument("evaluate: the dataset has no labels");
  check_labels(data.labels, data.features.rows(), mlp.num_classes());
  const Matrix logp = predict_log_proba(mlp, data.features);
  Evaluation ev;
  ev.n = data.size();
  long correct = 0;
  double nll = 0.0;
  for (Eigen::Index r = 0; r < logp.rows(); ++r) {
    const int y = data.labels[static_cast<std::size_t>(r)];
    if (argmax(logp.row(r)) == y) ++correct;
    nll -= logp(r, y);
  }
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.n);
  ev.mean_nll = nll / static_cast<double>(ev.n);
  return ev;
}

}  // namespace energynet
