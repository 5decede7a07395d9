// From-scratch random forest classifier: Gini impurity splits, bootstrap
// resampling, sqrt(d) feature subsampling per split. Trees train on
// independent per-tree random streams, so a forest is reproducible for any
// thread count, and prediction is invariant under tree order.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/features.hpp"

#include "json.hpp"

namespace oranlb {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 10;
};

/// One decision tree in flat-array form. Node 0 is the root; feature == -1
/// marks a leaf whose class counts drive voting and probabilities.
struct TreeNodes {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<std::array<double, kNumCategories>> counts;

  size_t size() const { return feature.size(); }
  int leaf_for(std::span<const double> row) const;
};

class ForestModel {
 public:
  /// Requires at least two distinct labels. Deterministic given the seed.
  static ForestModel train(const FeatureMatrix& x, const std::vector<int>& y,
                           const ForestParams& params, std::uint64_t seed,
                           int threads = 1);

  /// Majority vote over trees; ties resolve toward the less balanced
  /// category (the safe failure mode for deactivation decisions).
  int predict(std::span<const double> row) const;

  /// Mean of per-leaf class frequencies, sums to 1.
  std::array<double, kNumCategories> predict_proba(std::span<const double> row) const;

  BalanceCategory predict_category(const FeatureVector& fv) const;

  std::vector<int> predict_batch(const FeatureMatrix& x, int threads = 1) const;

  /// Mean impurity decrease per feature, normalized to sum 1, paired with
  /// schema names and sorted descending.
  std::vector<std::pair<std::string, double>> feature_importance() const;

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);

  const ForestParams& params() const { return params_; }
  size_t n_trees() const { return trees_.size(); }
  const std::string& schema_version() const { return schema_version_; }

  /// Free-form tag recording which threshold policy labeled the training
  /// data; persisted with the model.
  std::string policy_tag;

 private:
  ForestParams params_;
  std::string schema_version_ = kFeatureSchemaVersion;
  std::uint64_t seed_ = 0;
  std::vector<TreeNodes> trees_;
  std::vector<double> importance_;  // unnormalized, per feature
};

}  // namespace oranlb
