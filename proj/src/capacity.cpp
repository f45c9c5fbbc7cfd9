#include "energynet/capacity.hpp"

#include <cmath>
#include <string>

#include "energynet/error.hpp"

namespace energynet {

void Architecture::validate() const {
  if (layer_sizes.size() < 2) throw InvalidArgument("Architecture: need the input size and at least one hidden layer");
  for (std::size_t i = 0; i < layer_sizes.size(); ++i)
    if (layer_sizes[i] < 1)
      throw InvalidArgument("Architecture: layer " + std::to_string(i) + " has size " +
                            std::to_string(layer_sizes[i]));
}

long Architecture::total_hidden_units() const {
  long total = 0;
  for (std::size_t i = 1; i < layer_sizes.size(); ++i) total += layer_sizes[i];
  return total;
}

double dual_exponent(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("norm exponent p must lie in [1, inf]");
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

double width_factor(double n, double q) {
  if (std::isinf(q)) return 1.0;
  return std::pow(n, 1.0 / q);
}

double CapacityParams::q() const { return dual_exponent(p); }

void CapacityParams::validate() const {
  dual_exponent(p);
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i]))
      throw InvalidArgument("CapacityParams: lambda " + std::to_string(i + 1) + " must be positive");
  if (!(r_inf >= 0.0) || !std::isfinite(r_inf)) throw InvalidArgument("CapacityParams: r_inf must be >= 0");
  if (m < 1) throw InvalidArgument("CapacityParams: m must be >= 1");
}

CapacityParams CapacityParams::uniform(int layers, double lambda, double p, double r_inf, long m) {
  CapacityParams cap;
  cap.lambdas.assign(static_cast<std::size_t>(layers), lambda);
  cap.p = p;
  cap.r_inf = r_inf;
  cap.m = m;
  return cap;
}

double rademacher_bound(const Architecture& arch, const CapacityParams& cap) {
  if (arch.layer_sizes.size() < 2) throw InvalidArgument("rademacher_bound: no hidden layers (k = 0)");
  arch.validate();
  cap.validate();
  const int k = arch.hidden_layers();
  if (static_cast<int>(cap.lambdas.size()) < k)
    throw InvalidArgument("rademacher_bound: " + std::to_string(cap.lambdas.size()) +
                          " lambdas for " + std::to_string(k) + " hidden layers");
  const double q = cap.q();
  double prod = 1.0;
  for (int j = 1; j <= k; ++j)
    prod *= cap.lambdas[static_cast<std::size_t>(j - 1)] * width_factor(arch.layer_sizes[static_cast<std::size_t>(j - 1)], q);
  const double n0 = arch.input_size();
  return std::ldexp(1.0, k - 1) * cap.r_inf * prod * std::sqrt(2.0 * std::log(2.0 * n0) / static_cast<double>(cap.m));
}

double description_length(double neg_log_lik_total, double complexity, double weight) {
  if (!std::isfinite(neg_log_lik_total) || !std::isfinite(complexity) || !std::isfinite(weight))
    throw NumericError("description_length: non-finite input");
  if (weight < 0.0) throw InvalidArgument("description_length: weight must be >= 0");
  return neg_log_lik_total + weight * complexity;
}

}  // namespace energynet
