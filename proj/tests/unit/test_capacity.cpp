#include <doctest.h>

#include <cmath>

#include "energynet/capacity.hpp"
#include "energynet/error.hpp"
#include "energynet/random.hpp"

using namespace energynet;

TEST_CASE("hand-computed bound") {
  CapacityParams cap{{1.0}, 2.0, 1.0, 100};
  CHECK(rademacher_bound(Architecture{{4, 7}}, cap) == doctest::Approx(0.40787).epsilon(1e-4));
  CHECK(std::abs(rademacher_bound(Architecture{{4, 7}}, cap) - 2.0 * std::sqrt(2.0 * std::log(8.0) / 100.0)) < 1e-15);

  cap.r_inf = 0.0;
  CHECK(rademacher_bound(Architecture{{4, 7}}, cap) == 0.0);
}

TEST_CASE("dual exponent") {
  CHECK(dual_exponent(2.0) == 2.0);
  CHECK(std::isinf(dual_exponent(1.0)));
  CHECK(dual_exponent(kInf) == 1.0);
  CHECK(dual_exponent(4.0) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(dual_exponent(0.5), InvalidArgument);
}

TEST_CASE("extra unit-width layer doubles the bound when q is infinite") {
  CapacityParams cap = CapacityParams::uniform(2, 1.0, 1.0, 1.0, 50);
  const double one = rademacher_bound(Architecture{{6, 3}}, cap);
  const double two = rademacher_bound(Architecture{{6, 3, 1}}, cap);
  CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-15));
}

TEST_CASE("monotonicity sweeps") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.index(4));
    std::vector<int> sizes;
    for (int i = 0; i <= k; ++i) sizes.push_back(1 + static_cast<int>(rng.index(50)));
    CapacityParams cap = CapacityParams::uniform(k, 0.5 + rng.uniform(), 1.0 + 3.0 * rng.uniform(), 0.1 + rng.uniform(),
                                                 1 + static_cast<long>(rng.index(1000)));
    for (auto& l : cap.lambdas) l = 0.5 + rng.uniform();
    const double base = rademacher_bound(Architecture{sizes}, cap);
    CHECK(base > 0.0);

    // Wider non-final layers do not shrink the bound.
    const std::size_t j = rng.index(sizes.size() - 1);
    auto wider = sizes;
    wider[j] += 1 + static_cast<int>(rng.index(20));
    CHECK(rademacher_bound(Architecture{wider}, cap) >= base);

    // Larger Lambda and r_inf increase it; more samples decrease it.
    CapacityParams c2 = cap;
    c2.lambdas[rng.index(static_cast<std::size_t>(k))] *= 1.5;
    CHECK(rademacher_bound(Architecture{sizes}, c2) > base);
    c2 = cap;
    c2.r_inf *= 2.0;
    CHECK(rademacher_bound(Architecture{sizes}, c2) > base);
    c2 = cap;
    c2.m *= 4;
    CHECK(rademacher_bound(Architecture{sizes}, c2) < base);

    // Linear in r_inf.
    c2 = cap;
    c2.r_inf *= 0.5;
    CHECK(rademacher_bound(Architecture{sizes}, c2) * 2.0 == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("description length") {
  CHECK(description_length(0.0, 0.0, 1000.0) == 0.0);
  CHECK(description_length(123.5, 4.0, 0.0) == 123.5);
  CHECK(description_length(10.0, 0.5, 4.0) == 12.0);
  CHECK_THROWS_AS(description_length(kInf, 0.5, 1.0), NumericError);
  CHECK_THROWS_AS(description_length(1.0, 0.5, -1.0), InvalidArgument);

  // Two candidates ranked by a direct recomputation of -L + w R.
  const long m = 40;
  const double nll_a = 40.0 * 2.1, nll_b = 40.0 * 1.9;
  const double r_a = 2.0 * std::sqrt(2.0 * std::log(8.0) / 40.0);
  const double r_b = 4.0 * std::sqrt(3.0) * std::sqrt(2.0 * std::log(8.0) / 40.0);
  const auto cap = CapacityParams::uniform(2, 1.0, 2.0, 1.0, m);
  const double ma = description_length(nll_a, rademacher_bound(Architecture{{4, 3}}, cap), 40.0);
  const double mb = description_length(nll_b, rademacher_bound(Architecture{{4, 3, 5}}, cap), 40.0);
  CHECK(ma == doctest::Approx(nll_a + 40.0 * r_a).epsilon(1e-12));
  CHECK(mb == doctest::Approx(nll_b + 40.0 * r_b).epsilon(1e-12));
  CHECK((ma < mb) == (nll_a + 40.0 * r_a < nll_b + 40.0 * r_b));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(rademacher_bound(Architecture{{4}}, CapacityParams{{1.0}, 2.0, 1.0, 10}), InvalidArgument);
  CHECK_THROWS_AS(rademacher_bound(Architecture{{4, 0}}, CapacityParams{{1.0}, 2.0, 1.0, 10}), InvalidArgument);
  CHECK_THROWS_AS(rademacher_bound(Architecture{{4, 2, 2}}, CapacityParams{{1.0}, 2.0, 1.0, 10}), InvalidArgument);
  CHECK_THROWS_AS(rademacher_bound(Architecture{{4, 2}}, CapacityParams{{1.0}, 2.0, 1.0, 0}), InvalidArgument);
}
