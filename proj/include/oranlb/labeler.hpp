// Threshold policies and the rule mapping balance metrics to a category.
// This is the ground-truth label generator for classifier training.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "oranlb/core.hpp"

namespace oranlb {

enum class PolicyName : int { Conservative = 0, Moderate = 1, Aggressive = 2 };

const char* to_string(PolicyName name);

/// Five-parameter classification boundary set. A state is Well Balanced when
/// cv/jain/lif all clear the strict bounds; the moderate band is defined by
/// the relaxed cv upper bound and jain lower bound.
struct ThresholdPolicy {
  PolicyName name = PolicyName::Moderate;
  double cv_well_max = 0.5;        // CV upper bound for Well Balanced
  double jain_well_min = 0.7;      // Jain lower bound for Well Balanced
  double lif_well_max = 1.5;       // LIF upper bound for Well Balanced
  double cv_moderate_max = 0.7;    // CV upper bound for Moderately Balanced
  double jain_moderate_min = 0.6;  // Jain lower bound for Moderately Balanced

  void validate() const;
};

/// The three built-in parameter sets.
ThresholdPolicy builtin_policy(PolicyName name);

/// Case-insensitive lookup: "conservative" | "moderate" | "aggressive".
ThresholdPolicy policy_from_string(const std::string& name);

/// Classification rule. Bounds are inclusive exactly as written: a state
/// sitting on the Well Balanced boundary is Well Balanced. When the strict
/// conjunction fails, the moderate band is tested as a plain disjunction
/// (cv in (cv_well_max, cv_moderate_max] OR jain in [jain_moderate_min,
/// jain_well_min)); LIF does not participate below the Well Balanced tier.
BalanceCategory classify(const BalanceMetrics& m, const ThresholdPolicy& policy);

/// Elementwise metrics -> classify over a snapshot batch, order-preserving.
std::vector<BalanceCategory> label_dataset(std::span<const NetworkState> snapshots,
                                           const ThresholdPolicy& policy);

}  // namespace oranlb
