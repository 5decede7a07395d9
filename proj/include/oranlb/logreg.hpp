// Multinomial logistic regression with L2 regularization and inverse-
// frequency class weights, fitted by full-batch gradient descent with
// backtracking (the loss never increases across iterations). Features are
// z-scored with statistics fitted on the training split only; the scaler is
// part of the model.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/features.hpp"

#include "json.hpp"

namespace oranlb {

struct LogRegParams {
  double l2_c = 1.0;     // inverse regularization strength; penalty is 1/(2C)*||W||^2
  int max_iters = 500;
  double grad_tol = 1e-5;
  bool balanced_class_weights = true;
};

class LogRegModel {
 public:
  static LogRegModel train(const FeatureMatrix& x, const std::vector<int>& y,
                           const LogRegParams& params, std::uint64_t seed);

  int predict(std::span<const double> row) const;
  std::array<double, kNumCategories> predict_proba(std::span<const double> row) const;
  std::vector<int> predict_batch(const FeatureMatrix& x) const;
  BalanceCategory predict_category(const FeatureVector& fv) const;

  nlohmann::json to_json() const;
  static LogRegModel from_json(const nlohmann::json& j);

  double final_grad_norm() const { return final_grad_norm_; }
  int iterations_run() const { return iterations_run_; }
  const std::string& schema_version() const { return schema_version_; }

  std::string policy_tag;

 private:
  LogRegParams params_;
  std::string schema_version_ = kFeatureSchemaVersion;
  size_t dim_ = 0;
  // Row-major (class, feature) weights plus per-class bias.
  std::vector<double> weights_;
  std::array<double, kNumCategories> bias_{};
  std::vector<double> feat_mean_;
  std::vector<double> feat_std_;
  double final_grad_norm_ = 0.0;
  int iterations_run_ = 0;
};

}  // namespace oranlb
