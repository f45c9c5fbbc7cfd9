#include "energynet/builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "energynet/data.hpp"

namespace energynet {

void BuildConfig::validate() const {
  if (max_layers < 1) throw InvalidArgument("BuildConfig: max_layers must be >= 1");
  if (!(gamma_threshold > 0.0)) throw InvalidArgument("BuildConfig: gamma_threshold must be > 0");
  if (!(beta > 1.0)) throw DivergenceError("BuildConfig: beta must exceed 1");
  if (cd_k < 1) throw InvalidArgument("BuildConfig: cd_k must be >= 1");
  if (!(lr > 0.0)) throw InvalidArgument("BuildConfig: lr must be > 0");
  if (batch_size < 1) throw InvalidArgument("BuildConfig: batch_size must be >= 1");
  if (min_checks < 1) throw InvalidArgument("BuildConfig: min_checks must be >= 1");
  if (max_steps < 1) throw InvalidArgument("BuildConfig: max_steps must be >= 1");
  if (n_mc < 1) throw InvalidArgument("BuildConfig: n_mc must be >= 1");
  if (mdl_weight && !(*mdl_weight >= 0.0)) throw InvalidArgument("BuildConfig: mdl_weight must be >= 0");
  if (!(lambda > 0.0)) throw InvalidArgument("BuildConfig: lambda must be > 0");
  dual_exponent(norm_p);
  ais.validate();
}

Vector marginal_logits(const Matrix& data) {
  const Vector mean = data.colwise().mean().transpose();
  return mean.unaryExpr([](double p) {
    p = std::clamp(p, kMarginalClamp, 1.0 - kMarginalClamp);
    return std::log(p / (1.0 - p));
  });
}

LayerTraining train_new_layer(const Matrix& input, const BuildConfig& cfg, Rng& rng) {
  cfg.validate();
  if (input.rows() == 0) throw InvalidArgument("train_new_layer: empty data");

  const long m = input.rows();
  Vector b_v = Vector::Zero(input.cols());
  if (cfg.init_visible_bias) b_v = marginal_logits(input);
  LayerTraining out{IRbmState(Matrix::Zero(input.cols(), 0), b_v, Vector::Zero(0), cfg.beta, cfg.penalty), kInf, 0, {}};
  std::vector<long> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0L);
  long cursor = m;  // forces a shuffle before the first batch
  Matrix batch(std::min<long>(cfg.batch_size, m), input.cols());

  for (long step = 1; step <= cfg.max_steps; ++step) {
    for (Eigen::Index r = 0; r < batch.rows(); ++r) {
      if (cursor == m) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
        cursor = 0;
      }
      batch.row(r) = input.row(order[static_cast<std::size_t>(cursor++)]);
    }
    IRbmUpdate upd = irbm_cd_update(out.state, batch, cfg.cd_k, cfg.lr, rng);
    out.state = std::move(upd.state);
    out.steps = step;
    // gamma <- n / c, then c <- c + 1: c still counts the updates before this one.
    const long c = step - 1;
    out.gamma = (step < cfg.min_checks || c == 0) ? kInf : out.state.n() / static_cast<double>(c);
    if (upd.grew) out.trace.push_back({step, out.state.n(), out.gamma});
    if (out.gamma <= cfg.gamma_threshold) {
      out.trace.push_back({step, out.state.n(), out.gamma});
      return out;
    }
  }
  out.trace.push_back({out.steps, out.state.n(), out.gamma});
  throw NonConvergenceError("train_new_layer: layer width did not converge within " + std::to_string(cfg.max_steps) +
                                " updates (n = " + std::to_string(out.state.n()) +
                                ", gamma = " + std::to_string(out.gamma) + ")",
                            std::move(out.trace));
}

Matrix propagate_dataset(const Matrix& data, const Dbn& dbn, Rng& rng, bool mean_field) {
  if (dbn.empty()) return data;
  return propagate_batch(data, dbn, dbn.depth() - 1, rng, mean_field);
}

const char* to_string(LayerDecision d) { return d == LayerDecision::kAccept ? "accept" : "reject"; }

void BuildReport::check(const BuildConfig& cfg) const {
  double prev = kInf;
  std::vector<int> sizes;
  for (const auto& r : records) {
    if (r.gamma > cfg.gamma_threshold) throw Error("build report: layer " + std::to_string(r.layer) + " ended with gamma > Gamma");
    if (r.decision == LayerDecision::kAccept) {
      if (!std::isfinite(r.description_length) || !(r.description_length < prev))
        throw Error("build report: accepted M values are not strictly decreasing at layer " + std::to_string(r.layer));
      prev = r.description_length;
      sizes.push_back(r.n);
    }
  }
  if (sizes != accepted_sizes) throw Error("build report: accepted sizes disagree with the records");
  if (static_cast<int>(accepted_sizes.size()) > cfg.max_layers) throw Error("build report: more layers than T");
}

BuildResult build_network(const Matrix& data, const BuildConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.rows() == 0) throw InvalidArgument("build_network: empty data");
  require_binary(data, "build_network: data");

  const long m = data.rows();
  const double weight = cfg.mdl_weight.value_or(static_cast<double>(m));
  const double r_inf = feature_bound(data);

  BuildResult out;
  double prev_m = kInf;
  for (int t = 1; t <= cfg.max_layers; ++t) {
    const Matrix input = propagate_dataset(data, out.dbn, rng, cfg.mean_field);
    LayerTraining layer = train_new_layer(input, cfg, rng);
    const Dbn candidate = out.dbn.with_layer(to_rbm(layer.state));

    AisConfig ais = cfg.ais;
    ais.seed = rng.next_u64();
    const LikelihoodEstimate ll = estimate_dbn_loglik(candidate, data, ais, cfg.n_mc, rng);

    BuildRecord rec;
    rec.layer = t;
    rec.n = layer.state.n();
    rec.gamma = layer.gamma;
    rec.steps = layer.steps;
    rec.loglik_per_example = ll.mean;
    rec.loglik_stderr = ll.std_error;
    rec.neg_loglik_total = -static_cast<double>(m) * ll.mean;
    rec.architecture = candidate.layer_sizes();
    const CapacityParams cap = CapacityParams::uniform(t, cfg.lambda, cfg.norm_p, r_inf, m);
    rec.complexity = rademacher_bound(Architecture{rec.architecture}, cap);
    rec.mdl_weight = weight;
    rec.description_length = description_length(rec.neg_loglik_total, rec.complexity, weight);
    rec.decision = rec.description_length < prev_m ? LayerDecision::kAccept : LayerDecision::kReject;
    out.report.records.push_back(rec);

    if (rec.decision == LayerDecision::kReject) break;
    prev_m = rec.description_length;
    out.dbn = candidate;
    out.report.accepted_sizes.push_back(rec.n);
  }
  return out;
}

}  // namespace energynet
