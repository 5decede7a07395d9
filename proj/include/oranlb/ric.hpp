// The two control-plane roles: a policy selector that maps operational
// context to a threshold policy (rApp role, slow loop), and the real-time
// configuration optimizer (xApp role) that what-if evaluates RU deactivation
// candidates through the digital twin, keeps those whose predicted balance
// is acceptable, and picks the one with the largest energy savings.
#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/forest.hpp"
#include "oranlb/labeler.hpp"
#include "oranlb/logreg.hpp"
#include "oranlb/twin.hpp"

#include "json.hpp"

namespace oranlb {

enum class LocationType : int { Critical = 0, Standard = 1, EnergyPriority = 2 };
enum class TrafficLevel : int { Low = 0, Medium = 1, High = 2 };

const char* to_string(LocationType t);
const char* to_string(TrafficLevel t);
LocationType location_from_string(const std::string& s);
TrafficLevel traffic_from_string(const std::string& s);

struct OperationalContext {
  LocationType location = LocationType::Standard;
  int hour_of_day = 12;  // 0..23
  TrafficLevel traffic = TrafficLevel::Medium;

  void validate() const;
};

/// Optional override table consulted before the default context mapping.
/// First matching rule wins. Loaded from JSON:
///   {"rules": [{"location": "standard", "hour_from": 0, "hour_to": 5,
///               "traffic": "low", "policy": "aggressive"}, ...]}
/// location/traffic may be omitted or "any". Malformed tables throw at load.
class PolicyRuleTable {
 public:
  static PolicyRuleTable from_json(const nlohmann::json& j);
  std::optional<PolicyName> match(const OperationalContext& ctx) const;
  size_t size() const { return rules_.size(); }

 private:
  struct Rule {
    std::optional<LocationType> location;
    int hour_from = 0;
    int hour_to = 23;
    std::optional<TrafficLevel> traffic;
    PolicyName policy = PolicyName::Moderate;
  };
  std::vector<Rule> rules_;
};

/// critical -> Conservative, standard -> Moderate, energy_priority ->
/// Aggressive, unless an override rule matches.
ThresholdPolicy select_policy(const OperationalContext& ctx,
                              const PolicyRuleTable* overrides = nullptr);

/// Anything that can judge the balance quality of a (what-if) state. The
/// learned models extract features first; the oracle applies the threshold
/// rule to the true metrics and is used for search-correctness checks.
class BalancePredictor {
 public:
  virtual ~BalancePredictor() = default;
  virtual BalanceCategory predict_state(
      const NetworkState& state,
      std::array<double, kNumCategories>* proba = nullptr) const = 0;
  virtual std::string name() const = 0;
};

class OraclePredictor final : public BalancePredictor {
 public:
  explicit OraclePredictor(ThresholdPolicy policy) : policy_(policy) {}
  BalanceCategory predict_state(
      const NetworkState& state,
      std::array<double, kNumCategories>* proba) const override;
  std::string name() const override;

 private:
  ThresholdPolicy policy_;
};

class ForestPredictor final : public BalancePredictor {
 public:
  ForestPredictor(std::shared_ptr<const ForestModel> model, Scenario scenario)
      : model_(std::move(model)), scenario_(scenario) {}
  BalanceCategory predict_state(
      const NetworkState& state,
      std::array<double, kNumCategories>* proba) const override;
  std::string name() const override { return "forest"; }

 private:
  std::shared_ptr<const ForestModel> model_;
  Scenario scenario_;
};

class LogRegPredictor final : public BalancePredictor {
 public:
  LogRegPredictor(std::shared_ptr<const LogRegModel> model, Scenario scenario)
      : model_(std::move(model)), scenario_(scenario) {}
  BalanceCategory predict_state(
      const NetworkState& state,
      std::array<double, kNumCategories>* proba) const override;
  std::string name() const override { return "logreg"; }

 private:
  std::shared_ptr<const LogRegModel> model_;
  Scenario scenario_;
};

enum class CandidateMode : int { SingleDeactivation = 0, Exhaustive = 1 };

CandidateMode candidate_mode_from_string(const std::string& s);

/// SingleDeactivation: every mask reachable by switching off exactly one
/// active RU (keeping at least one). Exhaustive: every non-empty mask whose
/// active count does not exceed the current one, ascending by mask bits.
std::vector<RuConfig> enumerate_candidates(const RuConfig& current,
                                           CandidateMode mode);

struct CandidateOutcome {
  RuConfig config;
  BalanceCategory predicted = BalanceCategory::Imbalanced;
  std::array<double, kNumCategories> proba{};
  double energy_savings_w = 0.0;
  NetworkState predicted_state;
};

/// What-if: re-attach the snapshot's UEs under the candidate mask, rebuild
/// the state, predict its balance, and price the power delta.
CandidateOutcome evaluate_candidate(const Snapshot& current,
                                    const RuConfig& candidate,
                                    const DigitalTwin& twin,
                                    const BalancePredictor& model);

struct OptimizeOptions {
  CandidateMode mode = CandidateMode::SingleDeactivation;
  /// Accept only WellBalanced predictions instead of the default
  /// {WellBalanced, ModeratelyBalanced} set.
  bool require_well_balanced = false;
};

struct OptimizeResult {
  RuConfig chosen;
  double energy_savings_w = 0.0;
  bool kept_current = false;
  std::vector<CandidateOutcome> candidates;  // every evaluated candidate
  int chosen_candidate = -1;                 // index into candidates, -1 if kept
};

/// The configuration search: argmax energy savings over candidates whose
/// predicted category is acceptable; ties prefer more active RUs, then the
/// lowest mask bits. Falls back to the current configuration when no
/// candidate is acceptable or the best savings are not positive.
OptimizeResult optimize(const Snapshot& current, const DigitalTwin& twin,
                        const BalancePredictor& model,
                        const OptimizeOptions& options);

/// One record per candidate: mask, prediction, class probabilities, savings
/// and the chosen flag.
std::string format_decision_report(const OptimizeResult& result,
                                   const ThresholdPolicy& policy,
                                   const OperationalContext& ctx,
                                   const std::string& model_name);

}  // namespace oranlb
