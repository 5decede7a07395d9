// Evaluation report bundle and the plot-ready CSV emitters: model
// comparison, baseline comparison, feature importance ranking and the
// per-category network impact table. Improvement percentages are always
// computed from the stored rows, never persisted.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oranlb/eval.hpp"
#include "oranlb/io.hpp"

#include "json.hpp"

namespace oranlb {

/// Per-category means over a labeled dataset (QoS, recomputed CV, power).
struct CategoryImpactRow {
  int category_code = 0;
  bool present = false;
  std::uint64_t count = 0;
  double qos_mean = 0.0;
  double cv_mean = 0.0;
  double power_mean = 0.0;
};

struct CategoryImpactTable {
  std::array<CategoryImpactRow, kNumCategories> rows{};  // indexed by code

  /// WellBalanced-vs-Imbalanced relative QoS gain, percent.
  std::optional<double> qos_improvement_pct() const;
  /// WellBalanced-vs-Imbalanced relative CV change, percent (negative is
  /// better distribution).
  std::optional<double> cv_change_pct() const;
};

/// Throws DataError on an empty dataset; absent categories yield
/// present=false rows.
CategoryImpactTable category_impact(const SnapshotDataset& data, PolicyName policy);

struct ModelEvalEntry {
  std::string model;   // "forest" | "logreg"
  std::string policy;
  EvalReport report;
};

struct BaselineEvalEntry {
  std::string name;
  std::string fitted_params;
  EvalReport report;
};

struct ReportBundle {
  std::string policy;
  std::uint64_t seed = 0;
  std::uint64_t n_train = 0, n_val = 0, n_test = 0;
  std::vector<ModelEvalEntry> models;
  std::vector<BaselineEvalEntry> baselines;
  std::vector<std::pair<std::string, double>> feature_importance;
  bool has_impact = false;
  CategoryImpactTable impact;

  double forest_f1() const;
  double best_baseline_f1() const;
  /// Forest F1 gain over the best baseline, percent.
  std::optional<double> baseline_improvement_pct() const;

  nlohmann::json to_json() const;
  static ReportBundle from_json(const nlohmann::json& j);
};

nlohmann::json eval_report_to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::json& j);

/// Writes feature_importance.csv, model_comparison.csv,
/// baseline_comparison.csv and category_impact.csv under out_dir. Multiple
/// bundles (one per policy) merge into the comparison tables.
void write_report_csvs(const std::vector<ReportBundle>& bundles,
                       const std::string& out_dir);

/// Human-readable summary printed by the evaluate subcommand.
std::string format_bundle_summary(const ReportBundle& bundle);

}  // namespace oranlb
