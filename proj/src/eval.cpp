#include "oranlb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oranlb/rng.hpp"

namespace oranlb {

namespace {

void check_labels(std::span<const int> y) {
  for (int v : y)
    if (v < 0 || v >= kNumCategories)
      throw std::invalid_argument("labels must be category codes 0..2");
}

std::array<std::vector<size_t>, kNumCategories> indices_by_class(
    std::span<const int> labels) {
  std::array<std::vector<size_t>, kNumCategories> by_class;
  for (size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<size_t>(labels[i])].push_back(i);
  return by_class;
}

}  // namespace

EvalReport evaluate_predictions(std::span<const int> y_true,
                                std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("evaluate: length mismatch");
  if (y_true.empty()) throw std::invalid_argument("evaluate: empty input");
  check_labels(y_true);
  check_labels(y_pred);

  EvalReport r;
  int correct = 0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    ++r.confusion[static_cast<size_t>(y_true[i])][static_cast<size_t>(y_pred[i])];
    if (y_true[i] == y_pred[i]) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

  double f1_sum = 0.0;
  int f1_classes = 0;
  for (int c = 0; c < kNumCategories; ++c) {
    const size_t sc = static_cast<size_t>(c);
    int tp = r.confusion[sc][sc];
    int support = 0, predicted = 0;
    for (int o = 0; o < kNumCategories; ++o) {
      support += r.confusion[sc][static_cast<size_t>(o)];
      predicted += r.confusion[static_cast<size_t>(o)][sc];
    }
    ClassScores s;
    s.support = support;
    s.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    s.recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    r.per_class[sc] = s;
    if (support > 0 || predicted > 0) {
      f1_sum += s.f1;
      ++f1_classes;
    }
  }
  r.f1_macro = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
  return r;
}

double f1_macro(std::span<const int> y_true, std::span<const int> y_pred) {
  return evaluate_predictions(y_true, y_pred).f1_macro;
}

SplitIndices stratified_split(std::span<const int> labels, double train_frac,
                              double val_frac, double test_frac,
                              std::uint64_t seed) {
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw std::invalid_argument("split: fractions must sum to 1");
  check_labels(labels);
  auto by_class = indices_by_class(labels);

  SplitIndices out;
  RngStream rng(seed, 0xC1A55F01Dull);
  for (int c = 0; c < kNumCategories; ++c) {
    auto& idx = by_class[static_cast<size_t>(c)];
    if (idx.empty()) continue;
    if (idx.size() < 3)
      throw std::invalid_argument("split: class with fewer than 3 samples");
    rng.shuffle(idx);
    const size_t n_val = static_cast<size_t>(
        std::floor(val_frac * static_cast<double>(idx.size())));
    const size_t n_test = static_cast<size_t>(
        std::floor(test_frac * static_cast<double>(idx.size())));
    size_t i = 0;
    for (; i < n_val; ++i) out.val.push_back(idx[i]);
    for (; i < n_val + n_test; ++i) out.test.push_back(idx[i]);
    for (; i < idx.size(); ++i) out.train.push_back(idx[i]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

CvResult cross_validate(const FeatureMatrix& x, const std::vector<int>& y,
                        int k, std::uint64_t seed, const TrainPredictFn& fn) {
  if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  if (x.rows != y.size())
    throw std::invalid_argument("cross_validate: rows != labels");
  check_labels(y);
  auto by_class = indices_by_class(y);

  // Deal each class round-robin into folds after a seeded shuffle.
  std::vector<std::vector<size_t>> folds(static_cast<size_t>(k));
  RngStream rng(seed, 0xF01D5ull);
  for (int c = 0; c < kNumCategories; ++c) {
    auto& idx = by_class[static_cast<size_t>(c)];
    if (idx.empty()) continue;
    if (idx.size() < static_cast<size_t>(k))
      throw std::invalid_argument("cross_validate: class with fewer samples than folds");
    rng.shuffle(idx);
    for (size_t i = 0; i < idx.size(); ++i)
      folds[i % static_cast<size_t>(k)].push_back(idx[i]);
  }

  CvResult result;
  for (int f = 0; f < k; ++f) {
    std::vector<size_t> eval_idx = folds[static_cast<size_t>(f)];
    std::sort(eval_idx.begin(), eval_idx.end());
    std::vector<size_t> train_idx;
    for (int g = 0; g < k; ++g)
      if (g != f)
        train_idx.insert(train_idx.end(), folds[static_cast<size_t>(g)].begin(),
                         folds[static_cast<size_t>(g)].end());
    std::sort(train_idx.begin(), train_idx.end());

    const auto x_train = gather_rows(x, train_idx);
    const auto y_train = gather(y, train_idx);
    const auto x_eval = gather_rows(x, eval_idx);
    const auto y_eval = gather(y, eval_idx);
    const auto pred = fn(x_train, y_train, x_eval,
                         seed + 1000ull * static_cast<std::uint64_t>(f + 1));
    result.fold_scores.push_back(f1_macro(y_eval, pred));
  }

  double sum = 0.0;
  for (double s : result.fold_scores) sum += s;
  result.mean = sum / static_cast<double>(k);
  double ss = 0.0;
  for (double s : result.fold_scores) {
    const double d = s - result.mean;
    ss += d * d;
  }
  result.stddev = std::sqrt(ss / static_cast<double>(k));
  return result;
}

FeatureMatrix gather_rows(const FeatureMatrix& x, std::span<const size_t> idx) {
  FeatureMatrix out;
  out.rows = idx.size();
  out.cols = x.cols;
  out.values.reserve(out.rows * out.cols);
  for (size_t i : idx) {
    const auto row = x.row(i);
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace oranlb
