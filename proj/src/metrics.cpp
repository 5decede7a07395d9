#include "oranlb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oranlb {

namespace {

std::vector<double> sorted_copy(std::span<const double> loads) {
  if (loads.empty())
    throw std::invalid_argument("balance metrics: no active RUs");
  std::vector<double> v(loads.begin(), loads.end());
  std::sort(v.begin(), v.end());
  return v;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double coefficient_of_variation(std::span<const double> active_loads) {
  const auto v = sorted_copy(active_loads);
  const double mu = mean_of(v);
  if (mu == 0.0) return 0.0;
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mu;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(v.size()));
  return sigma / mu;
}

double jain_index(std::span<const double> active_loads) {
  const auto v = sorted_copy(active_loads);
  double sum = 0.0, sum_sq = 0.0;
  for (double x : v) {
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) return 1.0;
  const double raw = (sum * sum) / (static_cast<double>(v.size()) * sum_sq);
  return std::min(1.0, raw);
}

double load_imbalance_factor(std::span<const double> active_loads) {
  const auto v = sorted_copy(active_loads);
  const double mu = mean_of(v);
  if (mu == 0.0) return 0.0;
  return v.back() / mu - 1.0;
}

BalanceMetrics compute_metrics(std::span<const double> active_loads) {
  BalanceMetrics m;
  m.cv = coefficient_of_variation(active_loads);
  m.jain = jain_index(active_loads);
  m.lif = load_imbalance_factor(active_loads);
  return m;
}

BalanceMetrics compute_metrics(const NetworkState& state) {
  std::vector<double> active;
  active.reserve(static_cast<size_t>(state.config.size()));
  for (int i = 0; i < state.config.size(); ++i)
    if (state.config.active(i)) active.push_back(state.dl_prb[static_cast<size_t>(i)]);
  return compute_metrics(std::span<const double>(active));
}

}  // namespace oranlb
