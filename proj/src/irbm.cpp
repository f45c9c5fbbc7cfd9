#include "energynet/irbm.hpp"

#include <string>

#include "energynet/error.hpp"

namespace energynet {

namespace {

double penalty_for(double beta, PenaltyConvention convention) {
  return convention == PenaltyConvention::kSoftplusScaled ? beta * kLog2 : beta;
}

// Unnormalized log masses of z = 1..n followed by the tail, from the visible
// bias term and the hidden pre-activations (first n entries of `pre`).
Vector log_masses(double visible_term, const double* pre, int n, double penalty, double log_tail_weight) {
  Vector out(n + 1);
  double acc = visible_term;
  for (int i = 0; i < n; ++i) {
    acc += softplus(pre[i]) - penalty;
    out[i] = acc;
  }
  out[n] = acc + log_tail_weight;
  return out;
}

// Inverse-CDF draw over normalized masses; index n means the tail.
int draw(const Vector& log_mass, Rng& rng) {
  const double lz = log_sum_exp(log_mass);
  const double u = rng.uniform();
  double cum = 0.0;
  const auto last = log_mass.size() - 1;
  for (Eigen::Index i = 0; i < last; ++i) {
    cum += std::exp(log_mass[i] - lz);
    if (u < cum) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(last) + 1;
}

void check_visible(const Vector& v, const IRbmState& state, const char* op) {
  if (v.size() != state.visible_size())
    throw DimensionError(std::string(op) + ": v has length " + std::to_string(v.size()) + ", expected " +
                         std::to_string(state.visible_size()));
}

// z draws for every row of `v` given pre-activations over at least n columns.
std::vector<int> draw_rows(const Matrix& v, const Matrix& pre, const IRbmState& state, Rng& rng) {
  const Vector vis = v * state.b_v();
  std::vector<int> z(static_cast<std::size_t>(v.rows()));
  const double pen = state.unit_penalty();
  const double ltw = state.log_tail_weight();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pre_rm = pre.leftCols(state.n());
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    z[static_cast<std::size_t>(r)] = draw(log_masses(vis[r], pre_rm.row(r).data(), state.n(), pen, ltw), rng);
  return z;
}

// Row r keeps its first z[r] columns.
Matrix prefix_mask(const std::vector<int>& z, Eigen::Index cols) {
  Matrix mask = Matrix::Zero(static_cast<Eigen::Index>(z.size()), cols);
  for (std::size_t r = 0; r < z.size(); ++r) mask.row(static_cast<Eigen::Index>(r)).head(z[r]).setOnes();
  return mask;
}

}  // namespace

IRbmState::IRbmState(Eigen::Index visible_size, double beta, PenaltyConvention convention)
    : IRbmState(Matrix::Zero(visible_size, 0), Vector::Zero(visible_size), Vector::Zero(0), beta, convention) {}

IRbmState::IRbmState(Matrix w, Vector b_v, Vector b_h, double beta, PenaltyConvention convention)
    : w_(std::move(w)),
      b_v_(std::move(b_v)),
      b_h_(std::move(b_h)),
      beta_(beta),
      penalty_(penalty_for(beta, convention)),
      convention_(convention) {
  validate();
}

IRbmState::IRbmState(const RbmParams& params, double beta, PenaltyConvention convention)
    : IRbmState(params.w, params.b_v, params.b_h, beta, convention) {}

void IRbmState::validate() const {
  if (!(beta_ > 1.0))
    throw DivergenceError("iRBM: beta must exceed 1 for the hidden-unit tail to converge (got " +
                          std::to_string(beta_) + ")");
  if (!(tail_ratio() < 1.0)) throw DivergenceError("iRBM: geometric tail ratio is not below 1");
  if (b_v_.size() < 1) throw DimensionError("iRBM: visible size must be at least 1");
  if (w_.rows() != b_v_.size()) throw DimensionError("iRBM: W rows != len(b_v)");
  if (w_.cols() != b_h_.size()) throw DimensionError("iRBM: W cols != len(b_h)");
  if (!w_.allFinite() || !b_v_.allFinite() || !b_h_.allFinite()) throw NumericError("iRBM: non-finite parameter");
}

double IRbmState::tail_ratio() const { return std::exp(kLog2 - penalty_); }

double IRbmState::log_tail_weight() const {
  // log(a / (1 - a)) with log a = ln2 - penalty.
  const double log_a = kLog2 - penalty_;
  return log_a - std::log(-std::expm1(log_a));
}

void IRbmState::add_unit() {
  w_.conservativeResize(Eigen::NoChange, w_.cols() + 1);
  w_.col(w_.cols() - 1).setZero();
  b_h_.conservativeResize(b_h_.size() + 1);
  b_h_[b_h_.size() - 1] = 0.0;
}

void IRbmState::apply(const RbmGradient& step) {
  if (step.w.rows() != w_.rows() || step.w.cols() != w_.cols() || step.b_v.size() != b_v_.size() ||
      step.b_h.size() != b_h_.size())
    throw DimensionError("iRBM: update shape does not match the state");
  w_ += step.w;
  b_v_ += step.b_v;
  b_h_ += step.b_h;
}

double free_energy_z(const Vector& v, int z, const IRbmState& state) {
  check_visible(v, state, "free_energy_z");
  if (z < 0) throw InvalidArgument("free_energy_z: z must be non-negative");
  if (z > state.n())
    throw InvalidArgument("free_energy_z: z = " + std::to_string(z) + " exceeds n = " + std::to_string(state.n()) +
                          "; units past n are covered by the tail term of log_partition_v");
  double f = -v.dot(state.b_v());
  for (int i = 0; i < z; ++i) f -= softplus(state.w().col(i).dot(v) + state.b_h()[i]) - state.unit_penalty();
  return f;
}

Vector neg_free_energy_prefix(const Vector& v, const IRbmState& state) {
  check_visible(v, state, "neg_free_energy_prefix");
  const Vector pre = state.w().transpose() * v + state.b_h();
  Vector out(state.n() + 1);
  out[0] = v.dot(state.b_v());
  for (int i = 0; i < state.n(); ++i) out[i + 1] = out[i] + softplus(pre[i]) - state.unit_penalty();
  return out;
}

double log_partition_v(const Vector& v, const IRbmState& state) {
  check_visible(v, state, "log_partition_v");
  const Vector pre = state.w().transpose() * v + state.b_h();
  return log_sum_exp(log_masses(v.dot(state.b_v()), pre.data(), state.n(), state.unit_penalty(),
                                state.log_tail_weight()));
}

ZPosterior posterior_z(const Vector& v, const IRbmState& state) {
  check_visible(v, state, "posterior_z");
  const Vector pre = state.w().transpose() * v + state.b_h();
  const Vector lm =
      log_masses(v.dot(state.b_v()), pre.data(), state.n(), state.unit_penalty(), state.log_tail_weight());
  const double lz = log_sum_exp(lm);
  ZPosterior out;
  out.mass = (lm.head(state.n()).array() - lz).exp().matrix();
  out.tail = std::exp(lm[state.n()] - lz);
  return out;
}

int sample_z(const Vector& v, const IRbmState& state, Rng& rng) {
  check_visible(v, state, "sample_z");
  const Vector pre = state.w().transpose() * v + state.b_h();
  return draw(log_masses(v.dot(state.b_v()), pre.data(), state.n(), state.unit_penalty(), state.log_tail_weight()),
              rng);
}

IRbmUpdate irbm_cd_update(const IRbmState& state, const Matrix& batch, int k, double lr, Rng& rng) {
  if (batch.rows() == 0) throw InvalidArgument("irbm_cd_update: empty batch");
  if (k < 1) throw InvalidArgument("irbm_cd_update: k must be >= 1");
  if (lr < 0.0) throw InvalidArgument("irbm_cd_update: lr must be non-negative");
  if (batch.cols() != state.visible_size())
    throw DimensionError("irbm_cd_update: batch has " + std::to_string(batch.cols()) + " columns, expected " +
                         std::to_string(state.visible_size()));

  const int n = state.n();
  // Candidate unit n+1 stands in for the tail; it is kept only if reached.
  IRbmState ext = state;
  ext.add_unit();
  const Eigen::Index cols = n + 1;
  bool grew = false;
  auto note = [&](const std::vector<int>& z) {
    for (int zi : z) grew = grew || zi > n;
  };
  auto pre_of = [&](const Matrix& v) {
    Matrix pre = v * ext.w();
    pre.rowwise() += ext.b_h().transpose();
    return pre;
  };

  const double inv = 1.0 / static_cast<double>(batch.rows());

  // Positive phase.
  const Matrix pre_pos = pre_of(batch);
  const std::vector<int> z_pos = draw_rows(batch, pre_pos, state, rng);
  note(z_pos);
  const Matrix ph_pos = sigmoid(pre_pos).cwiseProduct(prefix_mask(z_pos, cols));

  // Negative chain: (z, h, v) Gibbs sweeps started at the data.
  Matrix v = batch;
  for (int step = 0; step < k; ++step) {
    const Matrix pre = pre_of(v);
    const std::vector<int> z = draw_rows(v, pre, state, rng);
    note(z);
    const Matrix h = rng.bernoulli(sigmoid(pre)).cwiseProduct(prefix_mask(z, cols));
    Matrix pv = h * ext.w().transpose();
    pv.rowwise() += ext.b_v().transpose();
    v = rng.bernoulli(sigmoid(pv));
  }
  const Matrix pre_neg = pre_of(v);
  const std::vector<int> z_neg = draw_rows(v, pre_neg, state, rng);
  note(z_neg);
  const Matrix ph_neg = sigmoid(pre_neg).cwiseProduct(prefix_mask(z_neg, cols));

  RbmGradient step;
  step.w = (batch.transpose() * ph_pos - v.transpose() * ph_neg) * (lr * inv);
  step.b_v = (batch.colwise().sum() - v.colwise().sum()).transpose() * (lr * inv);
  step.b_h = (ph_pos.colwise().sum() - ph_neg.colwise().sum()).transpose() * (lr * inv);

  if (grew) {
    ext.apply(step);
    return {std::move(ext), true};
  }
  IRbmState out = state;
  step.w.conservativeResize(Eigen::NoChange, n);
  step.b_h.conservativeResize(n);
  out.apply(step);
  return {std::move(out), false};
}

RbmParams to_rbm(const IRbmState& state) {
  if (state.n() == 0) throw InvalidArgument("to_rbm: the iRBM has no trained units (n = 0)");
  return RbmParams(state.w(), state.b_v(), state.b_h());
}

}  // namespace energynet
