#include "oranlb/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oranlb/metrics.hpp"

namespace oranlb {

namespace {

double row_cv(const SnapshotRow& row) {
  std::vector<double> active;
  for (int i = 0; i < row.n_rus; ++i)
    if (row.mask[static_cast<size_t>(i)] == '1')
      active.push_back(row.dl_prb[static_cast<size_t>(i)]);
  return coefficient_of_variation(active);
}

}  // namespace

std::optional<double> CategoryImpactTable::qos_improvement_pct() const {
  const auto& wb = rows[static_cast<size_t>(BalanceCategory::WellBalanced)];
  const auto& imb = rows[static_cast<size_t>(BalanceCategory::Imbalanced)];
  if (!wb.present || !imb.present || imb.qos_mean == 0.0) return std::nullopt;
  return 100.0 * (wb.qos_mean - imb.qos_mean) / imb.qos_mean;
}

std::optional<double> CategoryImpactTable::cv_change_pct() const {
  const auto& wb = rows[static_cast<size_t>(BalanceCategory::WellBalanced)];
  const auto& imb = rows[static_cast<size_t>(BalanceCategory::Imbalanced)];
  if (!wb.present || !imb.present || imb.cv_mean == 0.0) return std::nullopt;
  return 100.0 * (wb.cv_mean - imb.cv_mean) / imb.cv_mean;
}

CategoryImpactTable category_impact(const SnapshotDataset& data, PolicyName policy) {
  if (data.rows.empty()) throw DataError("category impact: empty dataset");
  const auto labels = data.labels(policy);

  CategoryImpactTable table;
  for (int c = 0; c < kNumCategories; ++c)
    table.rows[static_cast<size_t>(c)].category_code = c;

  for (size_t i = 0; i < data.rows.size(); ++i) {
    auto& row = table.rows[static_cast<size_t>(labels[i])];
    row.present = true;
    row.count += 1;
    row.qos_mean += data.rows[i].qos;
    row.cv_mean += row_cv(data.rows[i]);
    row.power_mean += data.rows[i].power_w;
  }
  for (auto& row : table.rows) {
    if (!row.present) continue;
    const double n = static_cast<double>(row.count);
    row.qos_mean /= n;
    row.cv_mean /= n;
    row.power_mean /= n;
  }
  return table;
}

double ReportBundle::forest_f1() const {
  for (const auto& m : models)
    if (m.model == "forest") return m.report.f1_macro;
  return 0.0;
}

double ReportBundle::best_baseline_f1() const {
  double best = 0.0;
  for (const auto& b : baselines) best = std::max(best, b.report.f1_macro);
  return best;
}

std::optional<double> ReportBundle::baseline_improvement_pct() const {
  const double best = best_baseline_f1();
  if (best <= 0.0 || baselines.empty()) return std::nullopt;
  return 100.0 * (forest_f1() - best) / best;
}

nlohmann::json eval_report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["f1_macro"] = r.f1_macro;
  nlohmann::json per_class = nlohmann::json::array();
  for (int c = 0; c < kNumCategories; ++c) {
    const auto& s = r.per_class[static_cast<size_t>(c)];
    per_class.push_back({{"label", to_string(category_from_code(c))},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support}});
  }
  j["per_class"] = std::move(per_class);
  j["confusion"] = r.confusion;
  if (r.has_cv) {
    j["cv_mean"] = r.cv_mean;
    j["cv_std"] = r.cv_std;
  }
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.f1_macro = j.at("f1_macro").get<double>();
  const auto& per_class = j.at("per_class");
  for (int c = 0; c < kNumCategories; ++c) {
    const auto& s = per_class.at(static_cast<size_t>(c));
    auto& out = r.per_class[static_cast<size_t>(c)];
    out.precision = s.at("precision").get<double>();
    out.recall = s.at("recall").get<double>();
    out.f1 = s.at("f1").get<double>();
    out.support = s.at("support").get<int>();
  }
  r.confusion =
      j.at("confusion")
          .get<std::array<std::array<int, kNumCategories>, kNumCategories>>();
  if (j.contains("cv_mean")) {
    r.has_cv = true;
    r.cv_mean = j.at("cv_mean").get<double>();
    r.cv_std = j.at("cv_std").get<double>();
  }
  return r;
}

nlohmann::json ReportBundle::to_json() const {
  nlohmann::json j;
  j["policy"] = policy;
  j["seed"] = seed;
  j["n_train"] = n_train;
  j["n_val"] = n_val;
  j["n_test"] = n_test;
  nlohmann::json jm = nlohmann::json::array();
  for (const auto& m : models)
    jm.push_back({{"model", m.model},
                  {"policy", m.policy},
                  {"report", eval_report_to_json(m.report)}});
  j["models"] = std::move(jm);
  nlohmann::json jb = nlohmann::json::array();
  for (const auto& b : baselines)
    jb.push_back({{"name", b.name},
                  {"fitted_params", b.fitted_params},
                  {"report", eval_report_to_json(b.report)}});
  j["baselines"] = std::move(jb);
  nlohmann::json ji = nlohmann::json::array();
  for (const auto& [name, imp] : feature_importance)
    ji.push_back({{"feature", name}, {"importance", imp}});
  j["feature_importance"] = std::move(ji);
  if (has_impact) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : impact.rows)
      rows.push_back({{"category", r.category_code},
                      {"present", r.present},
                      {"count", r.count},
                      {"qos_mean", r.qos_mean},
                      {"cv_mean", r.cv_mean},
                      {"power_mean", r.power_mean}});
    j["category_impact"] = std::move(rows);
  }
  return j;
}

ReportBundle ReportBundle::from_json(const nlohmann::json& j) {
  ReportBundle b;
  b.policy = j.at("policy").get<std::string>();
  b.seed = j.value("seed", 0ull);
  b.n_train = j.value("n_train", 0ull);
  b.n_val = j.value("n_val", 0ull);
  b.n_test = j.value("n_test", 0ull);
  for (const auto& jm : j.at("models"))
    b.models.push_back({jm.at("model").get<std::string>(),
                        jm.at("policy").get<std::string>(),
                        eval_report_from_json(jm.at("report"))});
  for (const auto& jb : j.at("baselines"))
    b.baselines.push_back({jb.at("name").get<std::string>(),
                           jb.value("fitted_params", ""),
                           eval_report_from_json(jb.at("report"))});
  for (const auto& ji : j.at("feature_importance"))
    b.feature_importance.emplace_back(ji.at("feature").get<std::string>(),
                                      ji.at("importance").get<double>());
  if (j.contains("category_impact")) {
    b.has_impact = true;
    const auto& rows = j.at("category_impact");
    for (size_t c = 0; c < kNumCategories; ++c) {
      const auto& r = rows.at(c);
      auto& out = b.impact.rows[c];
      out.category_code = r.at("category").get<int>();
      out.present = r.at("present").get<bool>();
      out.count = r.at("count").get<std::uint64_t>();
      out.qos_mean = r.at("qos_mean").get<double>();
      out.cv_mean = r.at("cv_mean").get<double>();
      out.power_mean = r.at("power_mean").get<double>();
    }
  }
  return b;
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace

void write_report_csvs(const std::vector<ReportBundle>& bundles,
                       const std::string& out_dir) {
  if (bundles.empty()) throw DataError("report: no bundles");

  {
    auto f = open_out(out_dir, "model_comparison.csv");
    f << "model,policy,accuracy,f1_macro,cv_mean,cv_std\n";
    for (const auto& b : bundles)
      for (const auto& m : b.models) {
        f << m.model << "," << m.policy << "," << format_number(m.report.accuracy)
          << "," << format_number(m.report.f1_macro) << ",";
        f << (m.report.has_cv ? format_number(m.report.cv_mean) : "NA") << ",";
        f << (m.report.has_cv ? format_number(m.report.cv_std) : "NA") << "\n";
      }
  }
  {
    auto f = open_out(out_dir, "baseline_comparison.csv");
    f << "policy,strategy,f1_macro,forest_improvement_pct\n";
    for (const auto& b : bundles) {
      const double forest = b.forest_f1();
      for (const auto& e : b.baselines) {
        f << b.policy << "," << e.name << "," << format_number(e.report.f1_macro) << ",";
        if (e.report.f1_macro > 0.0)
          f << format_number(100.0 * (forest - e.report.f1_macro) / e.report.f1_macro);
        else
          f << "NA";
        f << "\n";
      }
    }
  }
  {
    auto f = open_out(out_dir, "feature_importance.csv");
    f << "policy,rank,feature,importance\n";
    for (const auto& b : bundles) {
      int rank = 1;
      for (const auto& [name, imp] : b.feature_importance)
        f << b.policy << "," << rank++ << "," << name << "," << format_number(imp)
          << "\n";
    }
  }
  {
    auto f = open_out(out_dir, "category_impact.csv");
    f << "policy,category,count,qos_mean,cv_mean,power_mean\n";
    for (const auto& b : bundles) {
      if (!b.has_impact) continue;
      for (const auto& r : b.impact.rows) {
        f << b.policy << "," << to_string(category_from_code(r.category_code)) << ",";
        if (r.present)
          f << r.count << "," << format_number(r.qos_mean) << ","
            << format_number(r.cv_mean) << "," << format_number(r.power_mean);
        else
          f << "0,NA,NA,NA";
        f << "\n";
      }
      const auto qos_gain = b.impact.qos_improvement_pct();
      const auto cv_change = b.impact.cv_change_pct();
      f << b.policy << ",improvement,NA,"
        << (qos_gain ? format_number(*qos_gain) + "%" : "NA") << ","
        << (cv_change ? format_number(*cv_change) + "%" : "NA") << ",NA\n";
    }
  }
}

std::string format_bundle_summary(const ReportBundle& bundle) {
  std::ostringstream os;
  char line[256];
  os << "policy: " << bundle.policy << "  (train/val/test = " << bundle.n_train
     << "/" << bundle.n_val << "/" << bundle.n_test << ")\n";
  for (const auto& m : bundle.models) {
    std::snprintf(line, sizeof(line), "  %-8s accuracy=%.4f f1_macro=%.4f",
                  m.model.c_str(), m.report.accuracy, m.report.f1_macro);
    os << line;
    if (m.report.has_cv) {
      std::snprintf(line, sizeof(line), "  cv=%.4f±%.4f", m.report.cv_mean,
                    m.report.cv_std);
      os << line;
    }
    os << "\n";
  }
  for (const auto& b : bundle.baselines) {
    std::snprintf(line, sizeof(line), "  %-16s f1_macro=%.4f\n", b.name.c_str(),
                  b.report.f1_macro);
    os << line;
  }
  if (const auto imp = bundle.baseline_improvement_pct()) {
    std::snprintf(line, sizeof(line),
                  "  forest improvement over best baseline: %.1f%%\n", *imp);
    os << line;
  }
  if (!bundle.feature_importance.empty()) {
    os << "  top features:";
    for (size_t i = 0; i < std::min<size_t>(3, bundle.feature_importance.size()); ++i) {
      std::snprintf(line, sizeof(line), " %s=%.3f",
                    bundle.feature_importance[i].first.c_str(),
                    bundle.feature_importance[i].second);
      os << line;
    }
    os << "\n";
  }
  if (bundle.has_impact) {
    for (const auto& r : bundle.impact.rows) {
      if (!r.present) {
        os << "  " << to_string(category_from_code(r.category_code)) << ": (absent)\n";
        continue;
      }
      std::snprintf(line, sizeof(line),
                    "  %-18s n=%llu qos=%.2f cv=%.3f power=%.2fW\n",
                    to_string(category_from_code(r.category_code)),
                    static_cast<unsigned long long>(r.count), r.qos_mean, r.cv_mean,
                    r.power_mean);
      os << line;
    }
    if (const auto gain = bundle.impact.qos_improvement_pct()) {
      std::snprintf(line, sizeof(line), "  qos improvement (well vs imbalanced): %+.1f%%\n",
                    *gain);
      os << line;
    }
    if (const auto change = bundle.impact.cv_change_pct()) {
      std::snprintf(line, sizeof(line), "  cv change (well vs imbalanced): %+.1f%%\n",
                    *change);
      os << line;
    }
  }
  return os.str();
}

}  // namespace oranlb
