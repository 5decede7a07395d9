#include "oranlb/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oranlb/parallel.hpp"
#include "oranlb/rng.hpp"

namespace oranlb {

namespace {

constexpr double kMinGain = 1e-12;

double gini(const std::array<double, kNumCategories>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double g = 1.0;
  for (double c : counts) {
    const double p = c / total;
    g -= p * p;
  }
  return g;
}

int argmax_prefer_low(const std::array<double, kNumCategories>& v) {
  int best = 0;
  for (int c = 1; c < kNumCategories; ++c)
    if (v[static_cast<size_t>(c)] > v[static_cast<size_t>(best)]) best = c;
  return best;
}

struct TreeBuilder {
  const FeatureMatrix& x;
  const std::vector<int>& y;
  const ForestParams& params;
  RngStream& rng;
  int n_candidate_features;
  double n_root;

  TreeNodes nodes;
  std::vector<double>* importance;  // accumulated across the forest
  std::vector<size_t> idx;          // bootstrap sample, partitioned in place
  std::vector<std::pair<double, int>> scratch;  // (value, class)

  int make_leaf(const std::array<double, kNumCategories>& counts) {
    nodes.feature.push_back(-1);
    nodes.threshold.push_back(0.0);
    nodes.left.push_back(-1);
    nodes.right.push_back(-1);
    nodes.counts.push_back(counts);
    return static_cast<int>(nodes.size()) - 1;
  }

  int build(size_t lo, size_t hi, int depth) {
    std::array<double, kNumCategories> counts{};
    for (size_t i = lo; i < hi; ++i)
      counts[static_cast<size_t>(y[idx[i]])] += 1.0;
    const double total = static_cast<double>(hi - lo);
    const double node_gini = gini(counts, total);

    const bool pure = node_gini == 0.0;
    if (depth >= params.max_depth || hi - lo < 2 || pure)
      return make_leaf(counts);

    const auto candidates =
        rng.sample_without_replacement(static_cast<int>(x.cols), n_candidate_features);

    double best_gain = kMinGain;
    int best_feature = -1;
    double best_threshold = 0.0;
    for (int f : candidates) {
      scratch.clear();
      for (size_t i = lo; i < hi; ++i)
        scratch.emplace_back(x.at(idx[i], static_cast<size_t>(f)), y[idx[i]]);
      std::sort(scratch.begin(), scratch.end());
      if (scratch.front().first == scratch.back().first) continue;

      std::array<double, kNumCategories> left_counts{};
      double n_left = 0.0;
      for (size_t i = 0; i + 1 < scratch.size(); ++i) {
        left_counts[static_cast<size_t>(scratch[i].second)] += 1.0;
        n_left += 1.0;
        if (scratch[i].first == scratch[i + 1].first) continue;
        std::array<double, kNumCategories> right_counts{};
        for (int c = 0; c < kNumCategories; ++c)
          right_counts[static_cast<size_t>(c)] =
              counts[static_cast<size_t>(c)] - left_counts[static_cast<size_t>(c)];
        const double n_right = total - n_left;
        const double child =
            (n_left * gini(left_counts, n_left) + n_right * gini(right_counts, n_right)) /
            total;
        const double gain = node_gini - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (scratch[i].first + scratch[i + 1].first);
        }
      }
    }

    if (best_feature < 0) return make_leaf(counts);

    auto mid_it = std::partition(idx.begin() + static_cast<ptrdiff_t>(lo),
                                 idx.begin() + static_cast<ptrdiff_t>(hi),
                                 [&](size_t i) {
                                   return x.at(i, static_cast<size_t>(best_feature)) <=
                                          best_threshold;
                                 });
    const size_t mid = static_cast<size_t>(mid_it - idx.begin());
    if (mid == lo || mid == hi) return make_leaf(counts);  // numeric edge

    (*importance)[static_cast<size_t>(best_feature)] += (total / n_root) * best_gain;

    const int self = make_leaf(counts);  // placeholder, converted to a split below
    nodes.feature[static_cast<size_t>(self)] = best_feature;
    nodes.threshold[static_cast<size_t>(self)] = best_threshold;
    const int l = build(lo, mid, depth + 1);
    const int r = build(mid, hi, depth + 1);
    nodes.left[static_cast<size_t>(self)] = l;
    nodes.right[static_cast<size_t>(self)] = r;
    return self;
  }
};

}  // namespace

int TreeNodes::leaf_for(std::span<const double> row) const {
  int node = 0;
  while (feature[static_cast<size_t>(node)] >= 0) {
    const size_t sn = static_cast<size_t>(node);
    node = row[static_cast<size_t>(feature[sn])] <= threshold[sn] ? left[sn]
                                                                  : right[sn];
  }
  return node;
}

ForestModel ForestModel::train(const FeatureMatrix& x, const std::vector<int>& y,
                               const ForestParams& params, std::uint64_t seed,
                               int threads) {
  if (x.rows != y.size())
    throw std::invalid_argument("forest: rows != labels");
  if (x.rows < 2) throw std::invalid_argument("forest: need at least 2 rows");
  bool multi_class = false;
  for (size_t i = 1; i < y.size(); ++i) multi_class = multi_class || y[i] != y[0];
  if (!multi_class) throw std::invalid_argument("forest: degenerate label set");
  if (params.n_trees < 1 || params.max_depth < 1)
    throw std::invalid_argument("forest: bad hyperparameters");

  ForestModel model;
  model.params_ = params;
  model.seed_ = seed;
  model.trees_.resize(static_cast<size_t>(params.n_trees));
  model.importance_.assign(x.cols, 0.0);

  const int n_candidates = std::max(
      1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(x.cols)))));

  std::vector<std::vector<double>> per_tree_importance(
      static_cast<size_t>(params.n_trees), std::vector<double>(x.cols, 0.0));

  parallel_for(static_cast<std::uint64_t>(params.n_trees), threads,
               [&](std::uint64_t t) {
                 RngStream rng(seed, t);
                 TreeBuilder builder{x, y, params, rng, n_candidates,
                                     static_cast<double>(x.rows),
                                     TreeNodes{},
                                     &per_tree_importance[static_cast<size_t>(t)],
                                     {},
                                     {}};
                 builder.idx.resize(x.rows);
                 for (auto& i : builder.idx)
                   i = static_cast<size_t>(rng.uniform_int(x.rows));
                 builder.build(0, x.rows, 0);
                 model.trees_[static_cast<size_t>(t)] = std::move(builder.nodes);
               });

  for (const auto& imp : per_tree_importance)
    for (size_t f = 0; f < x.cols; ++f) model.importance_[f] += imp[f];
  return model;
}

int ForestModel::predict(std::span<const double> row) const {
  std::array<double, kNumCategories> votes{};
  for (const auto& tree : trees_) {
    const int leaf = tree.leaf_for(row);
    votes[static_cast<size_t>(
        argmax_prefer_low(tree.counts[static_cast<size_t>(leaf)]))] += 1.0;
  }
  return argmax_prefer_low(votes);
}

std::array<double, kNumCategories> ForestModel::predict_proba(
    std::span<const double> row) const {
  std::array<double, kNumCategories> proba{};
  for (const auto& tree : trees_) {
    const auto& counts = tree.counts[static_cast<size_t>(tree.leaf_for(row))];
    const double total = counts[0] + counts[1] + counts[2];
    for (int c = 0; c < kNumCategories; ++c)
      proba[static_cast<size_t>(c)] += counts[static_cast<size_t>(c)] / total;
  }
  for (auto& p : proba) p /= static_cast<double>(trees_.size());
  return proba;
}

BalanceCategory ForestModel::predict_category(const FeatureVector& fv) const {
  if (fv.schema_version != schema_version_)
    throw std::invalid_argument("forest: feature schema mismatch ('" +
                                fv.schema_version + "' vs '" + schema_version_ + "')");
  if (fv.values.size() != feature_schema().size())
    throw std::invalid_argument("forest: feature vector length mismatch");
  return category_from_code(predict(fv.values));
}

std::vector<int> ForestModel::predict_batch(const FeatureMatrix& x,
                                            int threads) const {
  std::vector<int> out(x.rows, 0);
  parallel_for(x.rows, threads,
               [&](std::uint64_t i) { out[static_cast<size_t>(i)] = predict(x.row(i)); });
  return out;
}

std::vector<std::pair<std::string, double>> ForestModel::feature_importance() const {
  const auto& schema = feature_schema();
  const bool schema_named = importance_.size() == schema.size();
  double total = std::accumulate(importance_.begin(), importance_.end(), 0.0);
  if (total <= 0.0) total = 1.0;
  std::vector<std::pair<std::string, double>> out;
  out.reserve(importance_.size());
  for (size_t f = 0; f < importance_.size(); ++f)
    out.emplace_back(schema_named ? schema[f].name : "f" + std::to_string(f),
                     importance_[f] / total);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json j;
  j["kind"] = "forest";
  j["format_version"] = 1;
  j["schema_version"] = schema_version_;
  j["policy"] = policy_tag;
  j["n_trees"] = params_.n_trees;
  j["max_depth"] = params_.max_depth;
  j["seed"] = seed_;
  j["importance"] = importance_;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    nlohmann::json jt;
    jt["feature"] = t.feature;
    jt["threshold"] = t.threshold;
    jt["left"] = t.left;
    jt["right"] = t.right;
    jt["counts"] = t.counts;
    trees.push_back(std::move(jt));
  }
  j["trees"] = std::move(trees);
  return j;
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "forest")
    throw std::invalid_argument("model file is not a forest");
  if (j.value("format_version", 0) != 1)
    throw std::invalid_argument("unsupported forest format version");
  ForestModel m;
  m.schema_version_ = j.at("schema_version").get<std::string>();
  m.policy_tag = j.value("policy", "");
  m.params_.n_trees = j.at("n_trees").get<int>();
  m.params_.max_depth = j.at("max_depth").get<int>();
  m.seed_ = j.at("seed").get<std::uint64_t>();
  m.importance_ = j.at("importance").get<std::vector<double>>();
  for (const auto& jt : j.at("trees")) {
    TreeNodes t;
    t.feature = jt.at("feature").get<std::vector<int>>();
    t.threshold = jt.at("threshold").get<std::vector<double>>();
    t.left = jt.at("left").get<std::vector<int>>();
    t.right = jt.at("right").get<std::vector<int>>();
    t.counts = jt.at("counts").get<std::vector<std::array<double, kNumCategories>>>();
    m.trees_.push_back(std::move(t));
  }
  if (m.trees_.empty()) throw std::invalid_argument("forest file has no trees");
  return m;
}

}  // namespace oranlb
