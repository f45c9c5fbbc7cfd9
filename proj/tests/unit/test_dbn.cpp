#include <doctest.h>

#include <cmath>

#include "energynet/dbn.hpp"
#include "energynet/error.hpp"
#include "oracles.hpp"

using namespace energynet;

namespace {

RbmParams random_params(int d, int k, Rng& rng, double scale = 1.0) {
  return RbmParams(rng.normal_matrix(d, k, scale), rng.normal_matrix(d, 1, scale).col(0),
                   rng.normal_matrix(k, 1, scale).col(0));
}

Matrix all_states(int d) {
  Matrix out(1 << d, d);
  for (int i = 0; i < (1 << d); ++i) out.row(i) = oracle::bits(static_cast<std::uint64_t>(i), d).transpose();
  return out;
}

}  // namespace

TEST_CASE("Dbn shape checks") {
  Dbn dbn;
  dbn.push_back(RbmParams::zeros(4, 3));
  CHECK_THROWS_AS(dbn.push_back(RbmParams::zeros(2, 2)), DimensionError);
  dbn.push_back(RbmParams::zeros(3, 2));
  CHECK(dbn.layer_sizes() == std::vector<int>{4, 3, 2});
  CHECK(Dbn().layer_sizes().empty());
}

TEST_CASE("AIS on a zero-weight model is exact") {
  AisConfig cfg;
  cfg.n_temps = 100;
  cfg.n_chains = 16;
  const AisEstimate est = ais_log_partition(RbmParams::zeros(3, 2), cfg);
  CHECK(est.log_z == doctest::Approx(std::log(32.0)).epsilon(1e-14));
  CHECK(est.std_error == 0.0);
}

TEST_CASE("AIS agrees with enumeration") {
  Rng rng(17);
  AisConfig cfg;
  cfg.n_temps = 1000;
  cfg.n_chains = 64;
  for (int trial = 0; trial < 5; ++trial) {
    const RbmParams p = random_params(5, 4, rng);
    cfg.seed = 100 + static_cast<std::uint64_t>(trial);
    const AisEstimate est = ais_log_partition(p, cfg);
    const double exact = oracle::log_z(p.w, p.b_v, p.b_h);
    CHECK(std::abs(est.log_z - exact) <= std::max(3.0 * est.std_error, 0.05));
  }
}

TEST_CASE("AIS is deterministic and thread-count independent") {
  Rng rng(2);
  const RbmParams p = random_params(4, 3, rng);
  AisConfig cfg;
  cfg.n_temps = 200;
  cfg.n_chains = 10;
  cfg.seed = 9;
  const AisEstimate one = ais_log_partition(p, cfg);
  cfg.threads = 3;
  const AisEstimate three = ais_log_partition(p, cfg);
  CHECK(one.log_z == three.log_z);
  CHECK(one.std_error == three.std_error);
}

TEST_CASE("AIS standard error shrinks with more chains") {
  Rng rng(5);
  const RbmParams p = random_params(6, 5, rng, 1.5);
  AisConfig cfg;
  cfg.n_temps = 200;
  cfg.n_chains = 64;
  cfg.seed = 1;
  const double se64 = ais_log_partition(p, cfg).std_error;
  cfg.n_chains = 128;
  const double se128 = ais_log_partition(p, cfg).std_error;
  // Expected ratio is 1/sqrt(2); allow generous sampling noise.
  CHECK(se128 <= 1.25 * se64);
}

TEST_CASE("feed-forward propagation") {
  Dbn zero({RbmParams::zeros(3, 4)});
  Rng rng(1);
  Vector sum = Vector::Zero(4);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) sum += propagate_sample(BinaryVector{1, 0, 1}, zero, 0, rng).bits();
  for (int i = 0; i < 4; ++i) CHECK(std::abs(sum[i] / draws - 0.5) < 0.02);

  RbmParams sat = RbmParams::zeros(3, 2);
  sat.b_h.setConstant(50.0);
  CHECK(propagate_sample(BinaryVector{0, 0, 0}, Dbn({sat}), 0, rng) == BinaryVector{1, 1});

  Rng a(4), b(4);
  Rng init(3);
  const Dbn two({random_params(3, 4, init), random_params(4, 2, init)});
  CHECK(propagate_sample(BinaryVector{1, 1, 0}, two, 1, a) == propagate_sample(BinaryVector{1, 1, 0}, two, 1, b));
  CHECK_THROWS_AS(propagate_sample(BinaryVector{1, 1, 0}, two, 2, a), InvalidArgument);
}

TEST_CASE("single-layer bound is the exact log-likelihood") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const RbmParams p = random_params(4, 3, rng);
    const Matrix data = all_states(4).topRows(6 + trial);
    const double lz = oracle::log_z(p.w, p.b_v, p.b_h);
    Rng unused(0);
    const LikelihoodEstimate est = estimate_dbn_loglik(Dbn({p}), data, lz, 0.0, 10, unused);
    CHECK(std::abs(est.mean - oracle::mean_loglik(data, p.w, p.b_v, p.b_h)) < 1e-9);
  }

  const Matrix data = all_states(4);
  Rng unused(0);
  const LikelihoodEstimate est = estimate_dbn_loglik(Dbn({RbmParams::zeros(4, 2)}), data, 6.0 * std::log(2.0), 0.0, 1, unused);
  CHECK(est.mean == doctest::Approx(-4.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("two-layer bound never exceeds the exact log-likelihood") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const RbmParams l1 = random_params(4, 3, rng);
    const RbmParams l2 = random_params(3, 2, rng);
    const double lz2 = oracle::log_z(l2.w, l2.b_v, l2.b_h);
    const Matrix data = all_states(4);
    // With every posterior draw enumerated there is no MC error: compare the
    // expectation under Q, computed by enumerating h, to the exact value.
    for (int r = 0; r < data.rows(); ++r) {
      const Vector v = data.row(r).transpose();
      const double exact = oracle::dbn2_loglik(v, l1.w, l1.b_v, l2.w, l2.b_v, l2.b_h);
      double bound = 0.0;
      for (std::uint64_t a = 0; a < 8; ++a) {
        const Vector h = oracle::bits(a, 3);
        double q = 1.0;
        for (int j = 0; j < 3; ++j) {
          const double p1 = oracle::sigmoid(l1.b_h[j] + l1.w.col(j).dot(v));
          q *= h[j] > 0.5 ? p1 : 1.0 - p1;
        }
        const double log_joint = log_cond_visible(v, h, l1) + oracle::log_unnorm_marginal(h, l2.w, l2.b_v, l2.b_h) - lz2;
        bound += q * (log_joint - std::log(q));
      }
      CHECK(bound <= exact + 1e-9);
    }

    // The Monte Carlo estimator stays below the exact mean within 3 sigma.
    Rng mc(static_cast<std::uint64_t>(trial));
    const LikelihoodEstimate est = estimate_dbn_loglik(Dbn({l1, l2}), data, lz2, 0.0, 200, mc);
    double exact_mean = 0.0;
    for (int r = 0; r < data.rows(); ++r)
      exact_mean += oracle::dbn2_loglik(data.row(r).transpose(), l1.w, l1.b_v, l2.w, l2.b_v, l2.b_h);
    exact_mean /= static_cast<double>(data.rows());
    CHECK(est.mean <= exact_mean + 3.0 * est.std_error);
  }
}

TEST_CASE("closed-form pieces of the bound") {
  CHECK(bernoulli_entropy(Vector::Zero(3)) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
  const RbmParams layer((Matrix(2, 1) << 1.0, -2.0).finished(), Vector{{0.5, 0.0}}, Vector{{0.0}});
  const double p0 = oracle::sigmoid(1.5), p1 = oracle::sigmoid(-2.0);
  CHECK(log_cond_visible(Vector{{1, 0}}, Vector{{1}}, layer) ==
        doctest::Approx(std::log(p0) + std::log(1.0 - p1)).epsilon(1e-12));
}
