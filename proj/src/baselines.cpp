#include "oranlb/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "oranlb/rng.hpp"

namespace oranlb {

namespace {

int modal_label(const std::array<double, kNumCategories>& counts) {
  int best = 0;
  for (int c = 1; c < kNumCategories; ++c)
    if (counts[static_cast<size_t>(c)] > counts[static_cast<size_t>(best)]) best = c;
  return best;
}

}  // namespace

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::RandomPrior: return "random_prior";
    case BaselineKind::EnergyFirst: return "energy_first";
    case BaselineKind::ConservativeAll: return "conservative_all";
    case BaselineKind::MajorityClass: return "majority_class";
    case BaselineKind::RuCountRule: return "ru_count_rule";
    case BaselineKind::LoadBasedRule: return "load_based_rule";
  }
  return "?";
}

BaselineKind baseline_from_string(const std::string& name) {
  for (BaselineKind k : all_baselines())
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown baseline '" + name + "'");
}

std::vector<BaselineKind> all_baselines() {
  return {BaselineKind::RandomPrior,   BaselineKind::EnergyFirst,
          BaselineKind::ConservativeAll, BaselineKind::MajorityClass,
          BaselineKind::RuCountRule,   BaselineKind::LoadBasedRule};
}

BaselineStrategy BaselineStrategy::fit(BaselineKind kind, const FeatureMatrix& x,
                                       std::span<const int> y, std::uint64_t seed) {
  if (y.empty() || x.rows != y.size())
    throw std::invalid_argument("baseline fit: empty or mismatched training data");

  BaselineStrategy s;
  s.kind_ = kind;
  s.seed_ = seed;
  s.n_active_feature_ = feature_index("n_active");
  s.dl_mean_feature_ = feature_index("dl_prb_mean");

  std::array<double, kNumCategories> counts{};
  for (int v : y) counts[static_cast<size_t>(v)] += 1.0;

  switch (kind) {
    case BaselineKind::EnergyFirst:
    case BaselineKind::ConservativeAll:
      break;
    case BaselineKind::RandomPrior: {
      for (int c = 0; c < kNumCategories; ++c)
        s.prior_[static_cast<size_t>(c)] =
            counts[static_cast<size_t>(c)] / static_cast<double>(y.size());
      break;
    }
    case BaselineKind::MajorityClass:
      s.majority_ = modal_label(counts);
      break;
    case BaselineKind::RuCountRule: {
      std::map<int, std::array<double, kNumCategories>> by_count;
      for (size_t i = 0; i < y.size(); ++i) {
        const int k = static_cast<int>(
            std::lround(x.at(i, static_cast<size_t>(s.n_active_feature_))));
        by_count[k][static_cast<size_t>(y[i])] += 1.0;
      }
      for (const auto& [k, c] : by_count) s.label_by_count_[k] = modal_label(c);
      s.fallback_label_ = modal_label(counts);
      break;
    }
    case BaselineKind::LoadBasedRule: {
      // Coarse grid over mean-load cut pairs; each region takes its modal
      // training label, pick the pair with the fewest training errors.
      constexpr double kStep = 2.5;
      std::vector<double> grid;
      for (double t = 0.0; t <= 100.0 + 1e-9; t += kStep) grid.push_back(t);

      const auto region_counts = [&](double lo, double hi) {
        std::array<std::array<double, kNumCategories>, 3> rc{};
        for (size_t i = 0; i < y.size(); ++i) {
          const double m = x.at(i, static_cast<size_t>(s.dl_mean_feature_));
          const int region = m < lo ? 0 : (m < hi ? 1 : 2);
          rc[static_cast<size_t>(region)][static_cast<size_t>(y[i])] += 1.0;
        }
        return rc;
      };

      double best_correct = -1.0;
      for (size_t a = 0; a < grid.size(); ++a) {
        for (size_t b = a; b < grid.size(); ++b) {
          const auto rc = region_counts(grid[a], grid[b]);
          double correct = 0.0;
          std::array<int, 3> labels{};
          for (int r = 0; r < 3; ++r) {
            labels[static_cast<size_t>(r)] = modal_label(rc[static_cast<size_t>(r)]);
            correct += rc[static_cast<size_t>(r)]
                         [static_cast<size_t>(labels[static_cast<size_t>(r)])];
          }
          if (correct > best_correct) {
            best_correct = correct;
            s.load_cut_lo_ = grid[a];
            s.load_cut_hi_ = grid[b];
            s.region_label_ = labels;
          }
        }
      }
      break;
    }
  }
  return s;
}

int BaselineStrategy::predict(std::span<const double> row,
                              std::uint64_t draw_index) const {
  switch (kind_) {
    case BaselineKind::EnergyFirst:
      return static_cast<int>(BalanceCategory::WellBalanced);
    case BaselineKind::ConservativeAll:
      return static_cast<int>(BalanceCategory::Imbalanced);
    case BaselineKind::MajorityClass:
      return majority_;
    case BaselineKind::RandomPrior: {
      RngStream rng(seed_, draw_index);
      const double u = rng.uniform();
      double acc = 0.0;
      for (int c = 0; c < kNumCategories; ++c) {
        acc += prior_[static_cast<size_t>(c)];
        if (u < acc) return c;
      }
      return kNumCategories - 1;
    }
    case BaselineKind::RuCountRule: {
      const int k = static_cast<int>(
          std::lround(row[static_cast<size_t>(n_active_feature_)]));
      auto it = label_by_count_.find(k);
      return it != label_by_count_.end() ? it->second : fallback_label_;
    }
    case BaselineKind::LoadBasedRule: {
      const double m = row[static_cast<size_t>(dl_mean_feature_)];
      const int region = m < load_cut_lo_ ? 0 : (m < load_cut_hi_ ? 1 : 2);
      return region_label_[static_cast<size_t>(region)];
    }
  }
  return 0;
}

std::vector<int> BaselineStrategy::predict_batch(const FeatureMatrix& x) const {
  std::vector<int> out(x.rows);
  for (size_t i = 0; i < x.rows; ++i)
    out[i] = predict(x.row(i), static_cast<std::uint64_t>(i));
  return out;
}

std::string BaselineStrategy::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  switch (kind_) {
    case BaselineKind::RandomPrior:
      os << " prior=[" << prior_[0] << "," << prior_[1] << "," << prior_[2] << "]";
      break;
    case BaselineKind::MajorityClass:
      os << " label=" << to_string(category_from_code(majority_));
      break;
    case BaselineKind::RuCountRule: {
      os << " map={";
      bool first = true;
      for (const auto& [k, v] : label_by_count_) {
        if (!first) os << ",";
        os << k << ":" << v;
        first = false;
      }
      os << "}";
      break;
    }
    case BaselineKind::LoadBasedRule:
      os << " cuts=[" << load_cut_lo_ << "," << load_cut_hi_ << "] labels=["
         << region_label_[0] << "," << region_label_[1] << "," << region_label_[2]
         << "]";
      break;
    default:
      break;
  }
  return os.str();
}

}  // namespace oranlb
