// Load-distribution metrics over the active RU set.
//
// All three are computed on a sorted copy of the input so the result is
// bit-identical under any permutation of RU order.
#pragma once

#include <span>

#include "oranlb/core.hpp"

namespace oranlb {

/// Population std / mean. Zero mean (idle network) maps to 0.
/// Throws on an empty input: metrics are undefined with no active RU.
double coefficient_of_variation(std::span<const double> active_loads);

/// (sum)^2 / (n * sum of squares), clamped to 1 from above. All-zero
/// input maps to 1 (an idle network is perfectly fair).
double jain_index(std::span<const double> active_loads);

/// max/mean - 1. Zero mean maps to 0.
double load_imbalance_factor(std::span<const double> active_loads);

/// Filters the state's downlink loads by the activation mask and computes
/// all three metrics.
BalanceMetrics compute_metrics(const NetworkState& state);

BalanceMetrics compute_metrics(std::span<const double> active_loads);

}  // namespace oranlb
