#include "energynet/rbm.hpp"

#include <string>

#include "energynet/error.hpp"

namespace energynet {

namespace {

void check_size(Eigen::Index got, Eigen::Index want, const char* operand) {
  if (got != want)
    throw DimensionError(std::string(operand) + ": expected length " + std::to_string(want) + ", got " +
                         std::to_string(got));
}

void check_enumerable(const RbmParams& params) {
  const auto bits = params.visible_size() + params.hidden_size();
  if (bits > kMaxEnumerationBits)
    throw IntractableError("intractable enumeration: D + K = " + std::to_string(bits) + " exceeds " +
                           std::to_string(kMaxEnumerationBits));
}

// -F for every configuration of the smaller layer; log Z is their log-sum-exp.
Vector enumerate_neg_free_energy_visible(const RbmParams& params) {
  const auto d = params.visible_size();
  const std::uint64_t n = std::uint64_t{1} << d;
  Vector out(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = -free_energy(BinaryVector::from_index(i, d), params);
  return out;
}

Vector enumerate_neg_free_energy_hidden(const RbmParams& params) {
  const auto k = params.hidden_size();
  const std::uint64_t n = std::uint64_t{1} << k;
  Vector out(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    const Vector h = BinaryVector::from_index(i, k).bits();
    out[static_cast<Eigen::Index>(i)] = h.dot(params.b_h) + softplus_sum(params.w * h + params.b_v);
  }
  return out;
}

}  // namespace

BinaryVector::BinaryVector(Vector bits) : bits_(std::move(bits)) {
  for (Eigen::Index i = 0; i < bits_.size(); ++i)
    if (bits_[i] != 0.0 && bits_[i] != 1.0)
      throw InvalidArgument("binary vector entry " + std::to_string(i) + " is " + std::to_string(bits_[i]));
}

BinaryVector::BinaryVector(std::initializer_list<double> bits)
    : BinaryVector(Vector(Eigen::Map<const Vector>(bits.begin(), static_cast<Eigen::Index>(bits.size())))) {}

BinaryVector BinaryVector::from_index(std::uint64_t index, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>((index >> i) & 1u);
  BinaryVector out;
  out.bits_ = std::move(v);
  return out;
}

void require_binary(const Matrix& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0.0 && m(r, c) != 1.0)
        throw InvalidArgument(std::string(what) + ": entry (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") is not binary");
}

RbmParams::RbmParams(Matrix w_, Vector b_v_, Vector b_h_)
    : w(std::move(w_)), b_v(std::move(b_v_)), b_h(std::move(b_h_)) {
  validate();
}

RbmParams RbmParams::zeros(Eigen::Index d, Eigen::Index k) {
  return RbmParams(Matrix::Zero(d, k), Vector::Zero(d), Vector::Zero(k));
}

RbmParams RbmParams::random_init(Eigen::Index d, Eigen::Index k, Rng& rng, double stddev) {
  return RbmParams(rng.normal_matrix(d, k, stddev), Vector::Zero(d), Vector::Zero(k));
}

void RbmParams::validate() const {
  if (b_v.size() < 1 || b_h.size() < 1)
    throw DimensionError("RbmParams: D and K must be at least 1 (got D=" + std::to_string(b_v.size()) +
                         ", K=" + std::to_string(b_h.size()) + ")");
  if (w.rows() != b_v.size()) throw DimensionError("RbmParams: W rows != len(b_v)");
  if (w.cols() != b_h.size()) throw DimensionError("RbmParams: W cols != len(b_h)");
  if (!w.allFinite() || !b_v.allFinite() || !b_h.allFinite())
    throw NumericError("RbmParams: non-finite parameter");
}

RbmGradient RbmGradient::zeros(Eigen::Index d, Eigen::Index k) {
  return {Matrix::Zero(d, k), Vector::Zero(d), Vector::Zero(k)};
}

RbmGradient& RbmGradient::operator+=(const RbmGradient& o) {
  w += o.w;
  b_v += o.b_v;
  b_h += o.b_h;
  return *this;
}

RbmGradient& RbmGradient::operator-=(const RbmGradient& o) {
  w -= o.w;
  b_v -= o.b_v;
  b_h -= o.b_h;
  return *this;
}

RbmGradient& RbmGradient::operator*=(double s) {
  w *= s;
  b_v *= s;
  b_h *= s;
  return *this;
}

double energy(const BinaryVector& v, const BinaryVector& h, const RbmParams& params) {
  check_size(v.size(), params.visible_size(), "energy: v");
  check_size(h.size(), params.hidden_size(), "energy: h");
  const Vector& vb = v.bits();
  const Vector& hb = h.bits();
  return -vb.dot(params.b_v) - hb.dot(params.b_h) - vb.dot(params.w * hb);
}

double free_energy(const Vector& v, const RbmParams& params) {
  check_size(v.size(), params.visible_size(), "free_energy: v");
  const Vector pre = params.w.transpose() * v + params.b_h;
  return -v.dot(params.b_v) - softplus_sum(pre);
}

Vector free_energy_batch(const Matrix& batch, const RbmParams& params) {
  check_size(batch.cols(), params.visible_size(), "free_energy_batch: batch columns");
  Matrix pre = batch * params.w;
  pre.rowwise() += params.b_h.transpose();
  Vector out = -(batch * params.b_v);
  for (Eigen::Index r = 0; r < pre.rows(); ++r)
    for (Eigen::Index c = 0; c < pre.cols(); ++c) out[r] -= softplus(pre(r, c));
  return out;
}

double exact_log_partition(const RbmParams& params) {
  check_enumerable(params);
  if (params.visible_size() <= params.hidden_size()) return log_sum_exp(enumerate_neg_free_energy_visible(params));
  return log_sum_exp(enumerate_neg_free_energy_hidden(params));
}

double log_prob(const BinaryVector& v, const RbmParams& params, double log_z) {
  return -free_energy(v.bits(), params) - log_z;
}

Vector cond_hidden(const Vector& v, const RbmParams& params) {
  check_size(v.size(), params.visible_size(), "cond_hidden: v");
  return sigmoid(Vector(params.w.transpose() * v + params.b_h));
}

Vector cond_visible(const Vector& h, const RbmParams& params) {
  check_size(h.size(), params.hidden_size(), "cond_visible: h");
  return sigmoid(Vector(params.w * h + params.b_v));
}

Matrix cond_hidden_batch(const Matrix& v, const RbmParams& params) {
  check_size(v.cols(), params.visible_size(), "cond_hidden_batch: columns");
  Matrix pre = v * params.w;
  pre.rowwise() += params.b_h.transpose();
  return sigmoid(pre);
}

Matrix cond_visible_batch(const Matrix& h, const RbmParams& params) {
  check_size(h.cols(), params.hidden_size(), "cond_visible_batch: columns");
  Matrix pre = h * params.w.transpose();
  pre.rowwise() += params.b_v.transpose();
  return sigmoid(pre);
}

GibbsSample gibbs_step(const BinaryVector& v, const RbmParams& params, Rng& rng) {
  Vector h = rng.bernoulli(cond_hidden(v.bits(), params));
  Vector v2 = rng.bernoulli(cond_visible(h, params));
  return {BinaryVector(std::move(v2)), BinaryVector(std::move(h))};
}

RbmGradient positive_statistics(const RbmParams& params, const Matrix& batch) {
  if (batch.rows() == 0) throw InvalidArgument("positive_statistics: empty batch");
  const Matrix ph = cond_hidden_batch(batch, params);
  const double inv = 1.0 / static_cast<double>(batch.rows());
  return {batch.transpose() * ph * inv, batch.colwise().sum().transpose() * inv, ph.colwise().sum().transpose() * inv};
}

RbmGradient cd_negative_statistics(const RbmParams& params, const Matrix& batch, int k, Rng& rng) {
  if (k < 1) throw InvalidArgument("cd: k must be >= 1");
  if (batch.rows() == 0) throw InvalidArgument("cd: empty batch");
  Matrix v = batch;
  for (int step = 0; step < k; ++step) {
    const Matrix h = rng.bernoulli(cond_hidden_batch(v, params));
    v = rng.bernoulli(cond_visible_batch(h, params));
  }
  return positive_statistics(params, v);
}

RbmGradient exact_model_statistics(const RbmParams& params) {
  check_enumerable(params);
  const auto d = params.visible_size();
  const Vector neg_f = enumerate_neg_free_energy_visible(params);
  const double log_z = log_sum_exp(neg_f);
  RbmGradient stats = RbmGradient::zeros(d, params.hidden_size());
  for (Eigen::Index i = 0; i < neg_f.size(); ++i) {
    const double p = std::exp(neg_f[i] - log_z);
    const Vector v = BinaryVector::from_index(static_cast<std::uint64_t>(i), d).bits();
    const Vector ph = cond_hidden(v, params);
    stats.w.noalias() += p * v * ph.transpose();
    stats.b_v += p * v;
    stats.b_h += p * ph;
  }
  return stats;
}

RbmGradient exact_loglik_gradient(const RbmParams& params, const Matrix& batch) {
  return positive_statistics(params, batch) - exact_model_statistics(params);
}

double exact_mean_loglik(const RbmParams& params, const Matrix& batch) {
  if (batch.rows() == 0) throw InvalidArgument("exact_mean_loglik: empty batch");
  const double log_z = exact_log_partition(params);
  return -free_energy_batch(batch, params).mean() - log_z;
}

RbmParams cd_k_update(const RbmParams& params, const Matrix& batch, int k, double lr, Rng& rng) {
  if (batch.rows() == 0) throw InvalidArgument("cd_k_update: empty batch");
  if (lr < 0.0) throw InvalidArgument("cd_k_update: lr must be non-negative");
  RbmGradient grad = positive_statistics(params, batch) - cd_negative_statistics(params, batch, k, rng);
  RbmParams out = params;
  out.w += lr * grad.w;
  out.b_v += lr * grad.b_v;
  out.b_h += lr * grad.b_h;
  return out;
}

Matrix to_batch(const std::vector<BinaryVector>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_size(rows[i].size(), out.cols(), "to_batch: row");
    out.row(static_cast<Eigen::Index>(i)) = rows[i].bits().transpose();
  }
  return out;
}

}  // namespace energynet
