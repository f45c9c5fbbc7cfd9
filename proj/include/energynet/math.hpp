#pragma once

#include <cmath>
#include <limits>
#include <span>

#include <Eigen/Dense>

namespace energynet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kLog2 = 0.69314718055994530942;

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(exp(a) + exp(b)); -inf is the identity.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = x > m ? x : m;
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline double log_sum_exp(const Vector& xs) {
  return log_sum_exp(std::span<const double>(xs.data(), static_cast<std::size_t>(xs.size())));
}

inline Vector sigmoid(const Vector& x) { return x.unaryExpr([](double a) { return sigmoid(a); }); }
inline Matrix sigmoid(const Matrix& x) { return x.unaryExpr([](double a) { return sigmoid(a); }); }

inline double softplus_sum(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += softplus(x[i]);
  return s;
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }
inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace energynet
