#include "oranlb/labeler.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "oranlb/metrics.hpp"

namespace oranlb {

const char* to_string(PolicyName name) {
  switch (name) {
    case PolicyName::Conservative: return "conservative";
    case PolicyName::Moderate: return "moderate";
    case PolicyName::Aggressive: return "aggressive";
  }
  return "?";
}

void ThresholdPolicy::validate() const {
  if (!(cv_well_max < cv_moderate_max))
    throw std::invalid_argument("policy: cv_well_max must be < cv_moderate_max");
  if (!(jain_moderate_min < jain_well_min))
    throw std::invalid_argument("policy: jain_moderate_min must be < jain_well_min");
  if (cv_well_max < 0 || jain_well_min < 0 || lif_well_max < 0 ||
      cv_moderate_max < 0 || jain_moderate_min < 0)
    throw std::invalid_argument("policy: thresholds must be >= 0");
}

ThresholdPolicy builtin_policy(PolicyName name) {
  ThresholdPolicy p;
  p.name = name;
  switch (name) {
    case PolicyName::Conservative:
      p.cv_well_max = 0.3;
      p.jain_well_min = 0.8;
      p.lif_well_max = 1.0;
      p.cv_moderate_max = 0.5;
      p.jain_moderate_min = 0.7;
      break;
    case PolicyName::Moderate:
      p.cv_well_max = 0.5;
      p.jain_well_min = 0.7;
      p.lif_well_max = 1.5;
      p.cv_moderate_max = 0.7;
      p.jain_moderate_min = 0.6;
      break;
    case PolicyName::Aggressive:
      p.cv_well_max = 0.7;
      p.jain_well_min = 0.6;
      p.lif_well_max = 2.0;
      p.cv_moderate_max = 0.9;
      p.jain_moderate_min = 0.5;
      break;
  }
  return p;
}

ThresholdPolicy policy_from_string(const std::string& name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "conservative") return builtin_policy(PolicyName::Conservative);
  if (s == "moderate") return builtin_policy(PolicyName::Moderate);
  if (s == "aggressive") return builtin_policy(PolicyName::Aggressive);
  throw std::invalid_argument("unknown policy name '" + name + "'");
}

BalanceCategory classify(const BalanceMetrics& m, const ThresholdPolicy& p) {
  if (m.cv <= p.cv_well_max && m.jain >= p.jain_well_min && m.lif <= p.lif_well_max)
    return BalanceCategory::WellBalanced;
  const bool cv_moderate = m.cv > p.cv_well_max && m.cv <= p.cv_moderate_max;
  const bool jain_moderate = m.jain >= p.jain_moderate_min && m.jain < p.jain_well_min;
  if (cv_moderate || jain_moderate) return BalanceCategory::ModeratelyBalanced;
  return BalanceCategory::Imbalanced;
}

std::vector<BalanceCategory> label_dataset(std::span<const NetworkState> snapshots,
                                           const ThresholdPolicy& policy) {
  std::vector<BalanceCategory> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back(classify(compute_metrics(s), policy));
  return out;
}

}  // namespace oranlb
