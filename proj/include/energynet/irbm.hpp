#pragma once

#include <vector>

#include "energynet/rbm.hpp"

namespace energynet {

/// How the per-unit energy penalty beta_i is derived from the global scale.
enum class PenaltyConvention {
  kAbsolute,        ///< beta_i = beta
  kSoftplusScaled,  ///< beta_i = beta * softplus(0) = beta * ln 2
};

/// Infinite RBM with ordered hidden units. Units 1..n are materialized; every
/// unit beyond n has zero weights and bias and costs the same penalty, so the
/// remaining mass over z > n is a geometric series with ratio
/// a = exp(softplus(0) - beta_i) < 1.
class IRbmState {
 public:
  IRbmState() = default;
  /// n = 0 state over `visible_size` inputs. Throws DivergenceError for beta <= 1.
  IRbmState(Eigen::Index visible_size, double beta, PenaltyConvention convention = PenaltyConvention::kAbsolute);
  /// Wraps already-trained units. Throws DimensionError on shape mismatch.
  IRbmState(Matrix w, Vector b_v, Vector b_h, double beta,
            PenaltyConvention convention = PenaltyConvention::kAbsolute);
  IRbmState(const RbmParams& params, double beta, PenaltyConvention convention = PenaltyConvention::kAbsolute);

  Eigen::Index visible_size() const { return b_v_.size(); }
  int n() const { return static_cast<int>(b_h_.size()); }
  double beta() const { return beta_; }
  PenaltyConvention convention() const { return convention_; }

  const Matrix& w() const { return w_; }
  const Vector& b_v() const { return b_v_; }
  const Vector& b_h() const { return b_h_; }

  /// beta_i, identical for every unit.
  double unit_penalty() const { return penalty_; }
  /// Per-unit penalties of the materialized units.
  Vector penalties() const { return Vector::Constant(n(), penalty_); }
  /// Geometric ratio a of the unmaterialized tail.
  double tail_ratio() const;
  /// log(a / (1 - a)).
  double log_tail_weight() const;

  /// Appends a zero-weight, zero-bias unit.
  void add_unit();
  /// Adds a gradient step. Shapes must match the current unit count.
  void apply(const RbmGradient& step);

  friend bool operator==(const IRbmState&, const IRbmState&) = default;

 private:
  void validate() const;

  Matrix w_;
  Vector b_v_;
  Vector b_h_;
  double beta_ = 0.0;
  double penalty_ = 0.0;
  PenaltyConvention convention_ = PenaltyConvention::kAbsolute;
};

/// F(v, z) = -v.b_v - sum_{i<=z} (softplus(W_i^T v + b_h,i) - beta_i).
/// Throws InvalidArgument for z > n: use log_partition_v for the tail.
double free_energy_z(const Vector& v, int z, const IRbmState& state);

/// -F(v, z) for z = 0..n.
Vector neg_free_energy_prefix(const Vector& v, const IRbmState& state);

/// log Z(v) = log(sum_{z=1..n} N(z) + N(n) a / (1 - a)), N(z) = exp(-F(v, z)).
double log_partition_v(const Vector& v, const IRbmState& state);

/// P(z | v): one mass per materialized z = 1..n and one for all z > n.
struct ZPosterior {
  Vector mass;        ///< mass[i] = P(z = i + 1 | v)
  double tail = 0.0;  ///< P(z > n | v)
};

ZPosterior posterior_z(const Vector& v, const IRbmState& state);

/// Draws z ~ P(z | v). A tail draw returns n + 1.
int sample_z(const Vector& v, const IRbmState& state, Rng& rng);

struct IRbmUpdate {
  IRbmState state;
  bool grew = false;
};

/// One CD-k step with per-example z. z is drawn from P(z|v) for the positive
/// phase, at every step of the negative chain, and once more at the chain's
/// end; statistics of each phase cover units 1..z only. Any draw past n
/// materializes one new unit (at most one per update), which then receives
/// the statistics of the examples that reached it.
IRbmUpdate irbm_cd_update(const IRbmState& state, const Matrix& batch, int k, double lr, Rng& rng);

/// The materialized D x n block as a finite RBM. Throws InvalidArgument for n = 0.
RbmParams to_rbm(const IRbmState& state);

}  // namespace energynet
