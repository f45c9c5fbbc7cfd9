#include <doctest.h>

#include <cmath>

#include "energynet/math.hpp"
#include "energynet/random.hpp"

using namespace energynet;

TEST_CASE("seeded streams") {
  Rng a(7), b(7), c(8);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());

  Rng root(3);
  const auto base = root.next_u64();
  Rng s0 = root.split(base, 0), s0b = root.split(base, 0), s1 = root.split(base, 1);
  CHECK(s0.next_u64() == s0b.next_u64());
  CHECK(s0.next_u64() != s1.next_u64());
}

TEST_CASE("draw moments") {
  Rng rng(1);
  const int n = 100000;
  double u = 0.0, g = 0.0, g2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform();
    CHECK((x >= 0.0 && x < 1.0));
    u += x;
    const double y = rng.normal();
    g += y;
    g2 += y * y;
  }
  CHECK(std::abs(u / n - 0.5) < 0.01);
  CHECK(std::abs(g / n) < 0.02);
  CHECK(std::abs(g2 / n - 1.0) < 0.02);

  const Matrix bits = rng.bernoulli(Matrix(Matrix::Constant(200, 50, 0.25)));
  CHECK(std::abs(bits.mean() - 0.25) < 0.01);
}

TEST_CASE("matrix draws follow row order") {
  Rng a(4), b(4);
  const Matrix m = a.bernoulli(Matrix(Matrix::Constant(3, 5, 0.5)));
  for (int r = 0; r < 3; ++r) CHECK(m.row(r).transpose() == b.bernoulli(Vector(Vector::Constant(5, 0.5))));
}

TEST_CASE("stable numerics") {
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) == 0.0);
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp(Vector{{-1e308, 0.0}}) == 0.0);
}
