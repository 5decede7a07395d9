// Evaluation protocol shared by the learned models and the rule baselines:
// confusion matrix, per-class precision/recall/F1, macro-averaged F1,
// stratified train/val/test splitting and stratified k-fold CV.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/features.hpp"

namespace oranlb {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  double f1_macro = 0.0;
  std::array<ClassScores, kNumCategories> per_class{};
  // confusion[true][pred]
  std::array<std::array<int, kNumCategories>, kNumCategories> confusion{};
  bool has_cv = false;
  double cv_mean = 0.0;
  double cv_std = 0.0;
};

/// Macro-averaged F1 over the fixed three-class set.
///
/// Convention for a class absent from the evaluation slice: if it appears in
/// neither the truth nor the predictions it is skipped (the mean runs over
/// the remaining classes); if it has support or predictions but no true
/// positives, its F1 counts as 0.
double f1_macro(std::span<const int> y_true, std::span<const int> y_pred);

EvalReport evaluate_predictions(std::span<const int> y_true,
                                std::span<const int> y_pred);

struct SplitIndices {
  std::vector<size_t> train;
  std::vector<size_t> val;
  std::vector<size_t> test;
};

/// Per-class proportional allocation with the remainder going to train.
/// Fractions must sum to 1; every class needs at least 3 samples.
SplitIndices stratified_split(std::span<const int> labels, double train_frac,
                              double val_frac, double test_frac,
                              std::uint64_t seed);

struct CvResult {
  double mean = 0.0;
  double stddev = 0.0;  // population std over folds
  std::vector<double> fold_scores;
};

/// Trains on the given split and returns predictions for the eval rows.
using TrainPredictFn = std::function<std::vector<int>(
    const FeatureMatrix& x_train, const std::vector<int>& y_train,
    const FeatureMatrix& x_eval, std::uint64_t fold_seed)>;

/// Stratified k-fold CV of F1-macro; the model is retrained per fold.
/// Every class needs at least k samples.
CvResult cross_validate(const FeatureMatrix& x, const std::vector<int>& y,
                        int k, std::uint64_t seed, const TrainPredictFn& fn);

FeatureMatrix gather_rows(const FeatureMatrix& x, std::span<const size_t> idx);

template <typename T>
std::vector<T> gather(const std::vector<T>& v, std::span<const size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace oranlb
