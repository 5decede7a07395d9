#include "oranlb/ric.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "oranlb/metrics.hpp"

namespace oranlb {

namespace {

std::string lower(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

const char* to_string(LocationType t) {
  switch (t) {
    case LocationType::Critical: return "critical";
    case LocationType::Standard: return "standard";
    case LocationType::EnergyPriority: return "energy_priority";
  }
  return "?";
}

const char* to_string(TrafficLevel t) {
  switch (t) {
    case TrafficLevel::Low: return "low";
    case TrafficLevel::Medium: return "medium";
    case TrafficLevel::High: return "high";
  }
  return "?";
}

LocationType location_from_string(const std::string& s) {
  const std::string v = lower(s);
  if (v == "critical") return LocationType::Critical;
  if (v == "standard") return LocationType::Standard;
  if (v == "energy_priority" || v == "energy-priority")
    return LocationType::EnergyPriority;
  throw std::invalid_argument("unknown location type '" + s + "'");
}

TrafficLevel traffic_from_string(const std::string& s) {
  const std::string v = lower(s);
  if (v == "low") return TrafficLevel::Low;
  if (v == "medium") return TrafficLevel::Medium;
  if (v == "high") return TrafficLevel::High;
  throw std::invalid_argument("unknown traffic level '" + s + "'");
}

void OperationalContext::validate() const {
  if (hour_of_day < 0 || hour_of_day > 23)
    throw std::invalid_argument("context: hour_of_day must be 0..23");
}

PolicyRuleTable PolicyRuleTable::from_json(const nlohmann::json& j) {
  PolicyRuleTable table;
  if (!j.is_object() || !j.contains("rules") || !j.at("rules").is_array())
    throw std::invalid_argument("rule table: expected {\"rules\": [...]}");
  for (const auto& jr : j.at("rules")) {
    Rule r;
    if (jr.contains("location") && jr.at("location").get<std::string>() != "any")
      r.location = location_from_string(jr.at("location").get<std::string>());
    if (jr.contains("traffic") && jr.at("traffic").get<std::string>() != "any")
      r.traffic = traffic_from_string(jr.at("traffic").get<std::string>());
    r.hour_from = jr.value("hour_from", 0);
    r.hour_to = jr.value("hour_to", 23);
    if (r.hour_from < 0 || r.hour_to > 23 || r.hour_from > r.hour_to)
      throw std::invalid_argument("rule table: bad hour range");
    r.policy = policy_from_string(jr.at("policy").get<std::string>()).name;
    table.rules_.push_back(r);
  }
  return table;
}

std::optional<PolicyName> PolicyRuleTable::match(const OperationalContext& ctx) const {
  for (const auto& r : rules_) {
    if (r.location && *r.location != ctx.location) continue;
    if (r.traffic && *r.traffic != ctx.traffic) continue;
    if (ctx.hour_of_day < r.hour_from || ctx.hour_of_day > r.hour_to) continue;
    return r.policy;
  }
  return std::nullopt;
}

ThresholdPolicy select_policy(const OperationalContext& ctx,
                              const PolicyRuleTable* overrides) {
  ctx.validate();
  if (overrides) {
    if (auto p = overrides->match(ctx)) return builtin_policy(*p);
  }
  switch (ctx.location) {
    case LocationType::Critical: return builtin_policy(PolicyName::Conservative);
    case LocationType::Standard: return builtin_policy(PolicyName::Moderate);
    case LocationType::EnergyPriority: return builtin_policy(PolicyName::Aggressive);
  }
  return builtin_policy(PolicyName::Moderate);
}

BalanceCategory OraclePredictor::predict_state(
    const NetworkState& state, std::array<double, kNumCategories>* proba) const {
  const BalanceCategory c = classify(compute_metrics(state), policy_);
  if (proba) {
    proba->fill(0.0);
    (*proba)[static_cast<size_t>(static_cast<int>(c))] = 1.0;
  }
  return c;
}

std::string OraclePredictor::name() const {
  return std::string("oracle:") + to_string(policy_.name);
}

BalanceCategory ForestPredictor::predict_state(
    const NetworkState& state, std::array<double, kNumCategories>* proba) const {
  const FeatureVector fv = extract(state, scenario_);
  if (proba) *proba = model_->predict_proba(fv.values);
  return model_->predict_category(fv);
}

BalanceCategory LogRegPredictor::predict_state(
    const NetworkState& state, std::array<double, kNumCategories>* proba) const {
  const FeatureVector fv = extract(state, scenario_);
  if (proba) *proba = model_->predict_proba(fv.values);
  return model_->predict_category(fv);
}

CandidateMode candidate_mode_from_string(const std::string& s) {
  const std::string v = lower(s);
  if (v == "single") return CandidateMode::SingleDeactivation;
  if (v == "exhaustive") return CandidateMode::Exhaustive;
  throw std::invalid_argument("unknown candidate mode '" + s + "'");
}

std::vector<RuConfig> enumerate_candidates(const RuConfig& current,
                                           CandidateMode mode) {
  std::vector<RuConfig> out;
  const int n = current.size();
  const int current_active = n_active(current);
  if (mode == CandidateMode::SingleDeactivation) {
    if (current_active < 2) return out;
    for (int i = 0; i < n; ++i) {
      if (!current.active(i)) continue;
      auto mask = current.mask();
      mask[static_cast<size_t>(i)] = false;
      out.emplace_back(std::move(mask));
    }
    return out;
  }
  if (n > 20)
    throw std::invalid_argument("exhaustive candidate enumeration is limited to 20 RUs");
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    if (std::popcount(bits) > current_active) continue;
    std::vector<bool> mask(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i)
      if (bits & (1u << i)) mask[static_cast<size_t>(i)] = true;
    out.emplace_back(std::move(mask));
  }
  return out;
}

CandidateOutcome evaluate_candidate(const Snapshot& current,
                                    const RuConfig& candidate,
                                    const DigitalTwin& twin,
                                    const BalancePredictor& model) {
  NetworkState predicted = twin.reattach(current, candidate);
  CandidateOutcome outcome{candidate, BalanceCategory::Imbalanced, {}, 0.0,
                           std::move(predicted)};
  outcome.predicted = model.predict_state(outcome.predicted_state, &outcome.proba);
  outcome.energy_savings_w = current.state.power_w - outcome.predicted_state.power_w;
  return outcome;
}

OptimizeResult optimize(const Snapshot& current, const DigitalTwin& twin,
                        const BalancePredictor& model,
                        const OptimizeOptions& options) {
  const auto candidates = enumerate_candidates(current.state.config, options.mode);

  OptimizeResult result{current.state.config, 0.0, true, {}, -1};
  result.candidates.reserve(candidates.size());

  // Order-deterministic argmax: better savings first, then more active RUs,
  // then the lowest mask bits.
  const auto better = [](const CandidateOutcome& a, const CandidateOutcome& b) {
    if (a.energy_savings_w != b.energy_savings_w)
      return a.energy_savings_w > b.energy_savings_w;
    const int na = n_active(a.config), nb = n_active(b.config);
    if (na != nb) return na > nb;
    return a.config.bits() < b.config.bits();
  };

  int best = -1;
  for (const auto& candidate : candidates) {
    result.candidates.push_back(evaluate_candidate(current, candidate, twin, model));
    const auto& outcome = result.candidates.back();
    const bool acceptable =
        options.require_well_balanced
            ? outcome.predicted == BalanceCategory::WellBalanced
            : outcome.predicted != BalanceCategory::Imbalanced;
    if (!acceptable) continue;
    if (best < 0 || better(outcome, result.candidates[static_cast<size_t>(best)]))
      best = static_cast<int>(result.candidates.size()) - 1;
  }

  if (best >= 0 &&
      result.candidates[static_cast<size_t>(best)].energy_savings_w > 0.0) {
    const auto& chosen = result.candidates[static_cast<size_t>(best)];
    result.chosen = chosen.config;
    result.energy_savings_w = chosen.energy_savings_w;
    result.kept_current = false;
    result.chosen_candidate = best;
  }
  return result;
}

std::string format_decision_report(const OptimizeResult& result,
                                   const ThresholdPolicy& policy,
                                   const OperationalContext& ctx,
                                   const std::string& model_name) {
  std::ostringstream os;
  os << "policy: " << to_string(policy.name) << " (location=" << to_string(ctx.location)
     << " hour=" << ctx.hour_of_day << " traffic=" << to_string(ctx.traffic)
     << ")\n";
  os << "model: " << model_name << "\n";
  os << "candidates: " << result.candidates.size() << "\n";
  os << "mask          n_active  predicted            p_imb   p_mod   p_well  "
        "savings_w  chosen\n";
  char line[160];
  for (size_t i = 0; i < result.candidates.size(); ++i) {
    const auto& c = result.candidates[i];
    std::snprintf(line, sizeof(line),
                  "%-12s  %-8d  %-19s  %.4f  %.4f  %.4f  %9.4f  %s\n",
                  c.config.to_string().c_str(), n_active(c.config),
                  to_string(c.predicted), c.proba[0], c.proba[1], c.proba[2],
                  c.energy_savings_w,
                  static_cast<int>(i) == result.chosen_candidate ? "*" : "");
    os << line;
  }
  if (result.kept_current) {
    os << "decision: keep current configuration " << result.chosen.to_string()
       << " (no acceptable energy-saving candidate)\n";
  } else {
    std::snprintf(line, sizeof(line),
                  "decision: switch to %s (energy savings %.4f W)\n",
                  result.chosen.to_string().c_str(), result.energy_savings_w);
    os << line;
  }
  return os.str();
}

}  // namespace oranlb
