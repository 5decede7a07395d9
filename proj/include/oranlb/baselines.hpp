// The six non-ML comparator strategies. Each one fits on training data
// (where the strategy has anything to fit) and predicts through the same
// category-code interface as the learned models, so the evaluation pipeline
// is identical for every predictor.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/features.hpp"

namespace oranlb {

enum class BaselineKind : int {
  RandomPrior = 0,     // draws from the training label distribution
  EnergyFirst,         // always WellBalanced
  ConservativeAll,     // always Imbalanced
  MajorityClass,       // most frequent training label
  RuCountRule,         // modal training label per active-RU count
  LoadBasedRule,       // two grid-fitted cut points on mean PRB utilization
};

const char* to_string(BaselineKind kind);
BaselineKind baseline_from_string(const std::string& name);
std::vector<BaselineKind> all_baselines();

class BaselineStrategy {
 public:
  /// Fits the strategy on training features/labels. EnergyFirst and
  /// ConservativeAll take no fit; RandomPrior needs a seed for its
  /// prediction streams.
  static BaselineStrategy fit(BaselineKind kind, const FeatureMatrix& x,
                              std::span<const int> y, std::uint64_t seed = 0);

  /// Predicts a category code for one row. draw_index feeds RandomPrior's
  /// per-call counter stream so parallel evaluation stays reproducible; the
  /// other strategies ignore it.
  int predict(std::span<const double> row, std::uint64_t draw_index = 0) const;

  std::vector<int> predict_batch(const FeatureMatrix& x) const;

  BaselineKind kind() const { return kind_; }

  /// Fitted parameters for reports (prior, modal labels, cut points).
  std::string describe() const;

 private:
  BaselineKind kind_ = BaselineKind::MajorityClass;
  std::uint64_t seed_ = 0;
  std::array<double, kNumCategories> prior_{};       // RandomPrior
  int majority_ = 0;                                 // MajorityClass
  std::map<int, int> label_by_count_;                // RuCountRule
  int fallback_label_ = 0;                           // RuCountRule, unseen count
  double load_cut_lo_ = 0.0, load_cut_hi_ = 0.0;     // LoadBasedRule
  std::array<int, 3> region_label_{0, 0, 0};         // LoadBasedRule
  int n_active_feature_ = 0;
  int dl_mean_feature_ = 0;
};

}  // namespace oranlb
