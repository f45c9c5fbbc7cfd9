#include "energynet/dbn.hpp"

#include <algorithm>
#include <string>
#include <thread>

#include "energynet/error.hpp"

namespace energynet {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Bernoulli draws where row r uses rngs[r].
Matrix sample_rows(const Matrix& probs, std::vector<Rng>& rngs) {
  Matrix out(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Rng& rng = rngs[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < probs.cols(); ++c) out(r, c) = rng.uniform() < probs(r, c) ? 1.0 : 0.0;
  }
  return out;
}

double softplus_scaled_sum(const Matrix& pre, Eigen::Index row, double t) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < pre.cols(); ++c) s += softplus(t * pre(row, c));
  return s;
}

// Log importance weights of one block of AIS chains.
Vector run_ais_chains(const RbmParams& params, int n_temps, std::vector<Rng> rngs) {
  const auto n = static_cast<Eigen::Index>(rngs.size());
  const auto d = params.visible_size();
  Matrix v = sample_rows(Matrix::Constant(n, d, 0.5), rngs);
  Vector lw = Vector::Zero(n);
  double t_prev = 0.0;
  for (int j = 1; j < n_temps; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n_temps - 1);
    Matrix pre = v * params.w;
    pre.rowwise() += params.b_h.transpose();
    const Vector vis = v * params.b_v;
    for (Eigen::Index r = 0; r < n; ++r)
      lw[r] += (t - t_prev) * vis[r] + softplus_scaled_sum(pre, r, t) - softplus_scaled_sum(pre, r, t_prev);
    t_prev = t;
    if (j == n_temps - 1) break;
    const Matrix h = sample_rows(sigmoid(Matrix(t * pre)), rngs);
    Matrix pv = h * params.w.transpose();
    pv.rowwise() += params.b_v.transpose();
    v = sample_rows(sigmoid(Matrix(t * pv)), rngs);
  }
  return lw;
}

}  // namespace

Dbn::Dbn(std::vector<RbmParams> layers) {
  for (auto& layer : layers) push_back(std::move(layer));
}

std::vector<int> Dbn::layer_sizes() const {
  std::vector<int> sizes;
  if (layers_.empty()) return sizes;
  sizes.push_back(static_cast<int>(layers_.front().visible_size()));
  for (const auto& l : layers_) sizes.push_back(static_cast<int>(l.hidden_size()));
  return sizes;
}

void Dbn::push_back(RbmParams layer) {
  layer.validate();
  if (!layers_.empty() && layers_.back().hidden_size() != layer.visible_size())
    throw DimensionError("Dbn: layer " + std::to_string(layers_.size()) + " has visible size " +
                         std::to_string(layer.visible_size()) + " but layer " + std::to_string(layers_.size() - 1) +
                         " has hidden size " + std::to_string(layers_.back().hidden_size()));
  layers_.push_back(std::move(layer));
}

Dbn Dbn::with_layer(RbmParams layer) const {
  Dbn out = *this;
  out.push_back(std::move(layer));
  return out;
}

void AisConfig::validate() const {
  if (n_temps < 2) throw InvalidArgument("AisConfig: n_temps must be >= 2");
  if (n_chains < 1) throw InvalidArgument("AisConfig: n_chains must be >= 1");
  if (threads < 1) throw InvalidArgument("AisConfig: threads must be >= 1");
}

AisEstimate ais_log_partition(const RbmParams& params, const AisConfig& cfg) {
  cfg.validate();
  params.validate();
  Rng root(cfg.seed);
  const std::uint64_t base = root.next_u64();
  const auto n = static_cast<std::size_t>(cfg.n_chains);

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), n);
  const std::size_t block = (n + workers - 1) / workers;
  Vector lw(static_cast<Eigen::Index>(n));
  auto run_block = [&](std::size_t begin, std::size_t end) {
    std::vector<Rng> rngs;
    for (std::size_t c = begin; c < end; ++c) rngs.push_back(root.split(base, c));
    lw.segment(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin)) =
        run_ais_chains(params, cfg.n_temps, std::move(rngs));
  };
  if (workers == 1) {
    run_block(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t b = 0; b < n; b += block) pool.emplace_back(run_block, b, std::min(n, b + block));
    for (auto& th : pool) th.join();
  }

  for (std::size_t c = 0; c < n; ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    if (std::isfinite(lw[i])) continue;
    lw[i] = run_ais_chains(params, cfg.n_temps, {root.split(base, n + c)})[0];
    if (!std::isfinite(lw[i]))
      throw NumericError("AIS: chain " + std::to_string(c) + " produced a non-finite weight after a restart");
  }

  const double log_z0 = static_cast<double>(params.visible_size() + params.hidden_size()) * kLog2;
  const double lse = log_sum_exp(lw);
  const double count = static_cast<double>(n);
  AisEstimate out;
  out.log_z = log_z0 + lse - std::log(count);
  if (n > 1) {
    // Delta method: sd(w) / (mean(w) sqrt(n)), with w rescaled by its max.
    const double mx = lw.maxCoeff();
    const Vector w = (lw.array() - mx).exp().matrix();
    const double mean = w.mean();
    const double var = (w.array() - mean).square().sum() / (count - 1.0);
    out.std_error = std::sqrt(var) / (mean * std::sqrt(count));
  }
  return out;
}

BinaryVector propagate_sample(const BinaryVector& v, const Dbn& dbn, std::size_t up_to, Rng& rng) {
  if (up_to >= dbn.depth())
    throw InvalidArgument("propagate_sample: up_to = " + std::to_string(up_to) + " but the DBN has " +
                          std::to_string(dbn.depth()) + " layers");
  Vector x = v.bits();
  for (std::size_t i = 0; i <= up_to; ++i) {
    if (x.size() != dbn.layer(i).visible_size())
      throw DimensionError("propagate_sample: input of length " + std::to_string(x.size()) + " does not fit layer " +
                           std::to_string(i));
    x = rng.bernoulli(cond_hidden(x, dbn.layer(i)));
  }
  return BinaryVector(std::move(x));
}

Matrix propagate_batch(const Matrix& data, const Dbn& dbn, std::size_t up_to, Rng& rng, bool mean_field) {
  if (up_to >= dbn.depth())
    throw InvalidArgument("propagate_batch: up_to = " + std::to_string(up_to) + " but the DBN has " +
                          std::to_string(dbn.depth()) + " layers");
  Matrix x = data;
  for (std::size_t i = 0; i <= up_to; ++i) {
    if (x.cols() != dbn.layer(i).visible_size())
      throw DimensionError("propagate_batch: input of width " + std::to_string(x.cols()) + " does not fit layer " +
                           std::to_string(i));
    x = cond_hidden_batch(x, dbn.layer(i));
    if (!mean_field) x = rng.bernoulli(x);
  }
  return x;
}

double log_cond_visible(const Vector& x, const Vector& h, const RbmParams& layer) {
  const Vector a = layer.w * h + layer.b_v;
  return x.dot(a) - softplus_sum(a);
}

double bernoulli_entropy(const Vector& logits) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double a = logits[i];
    const double q = sigmoid(a);
    h += q * softplus(-a) + (1.0 - q) * softplus(a);
  }
  return h;
}

LikelihoodEstimate estimate_dbn_loglik(const Dbn& dbn, const Matrix& data, double top_log_z,
                                       double top_log_z_stderr, int n_mc, Rng& rng) {
  if (dbn.empty()) throw InvalidArgument("dbn likelihood: the DBN has no layers");
  if (data.rows() == 0) throw InvalidArgument("dbn likelihood: empty data");
  if (n_mc < 1) throw InvalidArgument("dbn likelihood: n_mc must be >= 1");
  if (data.cols() != dbn.layer(0).visible_size())
    throw DimensionError("dbn likelihood: data width " + std::to_string(data.cols()) + " does not fit layer 0");

  const auto m = data.rows();
  const std::size_t depth = dbn.depth();
  LikelihoodEstimate out;
  out.top_log_z = top_log_z;
  out.top_log_z_stderr = top_log_z_stderr;

  if (depth == 1) {
    out.mean = -free_energy_batch(data, dbn.top()).mean() - top_log_z;
    out.std_error = top_log_z_stderr;
    return out;
  }

  const std::uint64_t base = rng.next_u64();
  double total = 0.0;
  double mc_var = 0.0;
  for (Eigen::Index e = 0; e < m; ++e) {
    Rng ex_rng = rng.split(base, static_cast<std::uint64_t>(e));
    const Vector v = data.row(e).transpose();
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int s = 0; s < n_mc; ++s) {
      Vector below = v;
      double term = 0.0;
      for (std::size_t i = 0; i + 1 < depth; ++i) {
        const RbmParams& layer = dbn.layer(i);
        const Vector logits = layer.w.transpose() * below + layer.b_h;
        const Vector h = ex_rng.bernoulli(sigmoid(logits));
        term += bernoulli_entropy(logits) + log_cond_visible(below, h, layer);
        below = h;
      }
      term += -free_energy(below, dbn.top()) - top_log_z;
      sum += term;
      sum_sq += term * term;
    }
    const double mean = sum / n_mc;
    total += mean;
    if (n_mc > 1) mc_var += std::max(0.0, (sum_sq - n_mc * mean * mean) / (n_mc - 1)) / n_mc;
  }
  const double md = static_cast<double>(m);
  out.mean = total / md;
  const double mc_se = std::sqrt(mc_var) / md;
  out.std_error = std::sqrt(mc_se * mc_se + top_log_z_stderr * top_log_z_stderr);
  return out;
}

LikelihoodEstimate estimate_dbn_loglik(const Dbn& dbn, const Matrix& data, const AisConfig& cfg, int n_mc,
                                       Rng& rng) {
  if (dbn.empty()) throw InvalidArgument("dbn likelihood: the DBN has no layers");
  if (data.rows() == 0) throw InvalidArgument("dbn likelihood: empty data");
  const AisEstimate top = ais_log_partition(dbn.top(), cfg);
  return estimate_dbn_loglik(dbn, data, top.log_z, top.std_error, n_mc, rng);
}

double dbn_loglik_lower_bound(const Dbn& dbn, const Matrix& data, const AisConfig& cfg, int n_mc, Rng& rng) {
  return estimate_dbn_loglik(dbn, data, cfg, n_mc, rng).mean;
}

}  // namespace energynet
