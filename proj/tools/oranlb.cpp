// oranlb: RU sleeping with load-balance-aware configuration selection.
//
// Pipeline subcommands: generate -> label -> featurize -> train / evaluate,
// plus optimize (what-if configuration search on a scene) and report
// (plot-ready CSV tables from an evaluation bundle).
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oranlb/baselines.hpp"
#include "oranlb/eval.hpp"
#include "oranlb/features.hpp"
#include "oranlb/forest.hpp"
#include "oranlb/io.hpp"
#include "oranlb/labeler.hpp"
#include "oranlb/logreg.hpp"
#include "oranlb/metrics.hpp"
#include "oranlb/parallel.hpp"
#include "oranlb/report.hpp"
#include "oranlb/ric.hpp"
#include "oranlb/twin.hpp"

namespace {

using namespace oranlb;

constexpr const char* kVersion = "0.1.0";

// ORANLB_LOG=quiet suppresses the per-command progress lines; it is the only
// environment variable the tool reads. Reports and summaries always print.
bool quiet() {
  const char* v = std::getenv("ORANLB_LOG");
  return v != nullptr && std::string(v) == "quiet";
}

template <typename... Args>
void info(const char* fmt, Args... args) {
  if (!quiet()) std::printf(fmt, args...);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(16u, std::max(1u, hw)));
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad JSON (" + e.what() + ")");
  }
  return j;
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string config_path;
  std::string out_path;
  std::string scenes_path;
  std::uint64_t n_snapshots = 0;
  int threads = 0;
  int rus = 0;
  int ues = 0;
  double area = 0.0;
  int prb = 0;
  double dl_fraction = 0.0;
  double demand_mean = -1.0;
  double demand_sigma = -1.0;
  double coverage_radius = -1.0;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& a) {
  RunConfig cfg;
  if (!a.config_path.empty()) cfg = RunConfig::from_file(a.config_path);
  if (a.rus > 0) cfg.scenario.n_rus = a.rus;
  if (a.ues > 0) cfg.scenario.n_ues = a.ues;
  if (a.area > 0) cfg.scenario.area_side_m = a.area;
  if (a.prb > 0) cfg.scenario.prb_per_ru = a.prb;
  if (a.dl_fraction > 0) cfg.scenario.dl_fraction = a.dl_fraction;
  if (a.demand_mean >= 0) cfg.twin.demand_mean_prb = a.demand_mean;
  if (a.demand_sigma >= 0) cfg.twin.demand_sigma = a.demand_sigma;
  if (a.coverage_radius >= 0) cfg.twin.coverage_radius_m = a.coverage_radius;
  if (a.seed) {
    cfg.scenario.seed = *a.seed;
    cfg.seed_set = true;
  }
  if (!cfg.seed_set) throw DataError("generate: --seed is required");
  if (cfg.scenario.n_rus > kMaxFileRus)
    throw DataError("generate: the dataset format supports at most " +
                    std::to_string(kMaxFileRus) + " RUs");

  const DigitalTwin twin(cfg.scenario, cfg.twin);
  const int threads = resolve_threads(a.threads);
  const auto snapshots = twin.generate_dataset(a.n_snapshots, threads);

  SnapshotDataset ds;
  ds.rows.reserve(snapshots.size());
  for (size_t i = 0; i < snapshots.size(); ++i)
    ds.rows.push_back(row_from_state(i, snapshots[i].state, twin.scenario()));
  write_snapshot_csv(a.out_path, ds);

  DatasetMeta meta;
  meta.scenario = twin.scenario();
  meta.twin = twin.params();
  meta.n_snapshots = a.n_snapshots;
  write_dataset_meta(meta_path_for(a.out_path), meta);

  if (!a.scenes_path.empty())
    write_scenes(a.scenes_path, snapshots, twin.scenario(), twin.params());

  info("generated %llu snapshots -> %s\n",
       static_cast<unsigned long long>(a.n_snapshots), a.out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// label

BalanceMetrics row_metrics(const SnapshotRow& row) {
  std::vector<double> active;
  for (int i = 0; i < row.n_rus; ++i)
    if (row.mask[static_cast<size_t>(i)] == '1')
      active.push_back(row.dl_prb[static_cast<size_t>(i)]);
  return compute_metrics(active);
}

int cmd_label(const std::string& in_path, const std::string& out_path,
              const std::string& policy_arg) {
  auto ds = read_snapshot_csv(in_path);
  const auto meta = read_dataset_meta(meta_path_for(in_path));

  std::vector<PolicyName> policies;
  if (policy_arg == "all") {
    policies = {PolicyName::Conservative, PolicyName::Moderate,
                PolicyName::Aggressive};
  } else {
    policies = {policy_from_string(policy_arg).name};
  }

  for (auto& row : ds.rows) {
    const BalanceMetrics m = row_metrics(row);
    for (PolicyName pn : policies) {
      const int code = static_cast<int>(classify(m, builtin_policy(pn)));
      switch (pn) {
        case PolicyName::Conservative: row.label_conservative = code; break;
        case PolicyName::Moderate: row.label_moderate = code; break;
        case PolicyName::Aggressive: row.label_aggressive = code; break;
      }
    }
  }
  write_snapshot_csv(out_path, ds);
  write_dataset_meta(meta_path_for(out_path), meta);
  info("labeled %zu rows -> %s\n", ds.rows.size(), out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// featurize

int cmd_featurize(const std::string& in_path, const std::string& out_path,
                  int threads_arg) {
  const auto ds = read_snapshot_csv(in_path);
  const auto meta = read_dataset_meta(meta_path_for(in_path));
  const int threads = resolve_threads(threads_arg);

  FeatureDataset out;
  out.x.rows = ds.rows.size();
  out.x.cols = feature_schema().size();
  out.x.values.assign(out.x.rows * out.x.cols, 0.0);
  out.snapshot_ids.resize(ds.rows.size());
  out.label_conservative.resize(ds.rows.size());
  out.label_moderate.resize(ds.rows.size());
  out.label_aggressive.resize(ds.rows.size());

  parallel_for(ds.rows.size(), threads, [&](std::uint64_t i) {
    const auto& row = ds.rows[static_cast<size_t>(i)];
    const auto fv = extract(feature_inputs_from_row(row, meta.scenario));
    std::copy(fv.values.begin(), fv.values.end(),
              out.x.values.begin() + static_cast<ptrdiff_t>(i * out.x.cols));
    out.snapshot_ids[static_cast<size_t>(i)] = row.snapshot_id;
    out.label_conservative[static_cast<size_t>(i)] = row.label_conservative;
    out.label_moderate[static_cast<size_t>(i)] = row.label_moderate;
    out.label_aggressive[static_cast<size_t>(i)] = row.label_aggressive;
  });

  write_feature_csv(out_path, out);
  write_dataset_meta(meta_path_for(out_path), meta);
  info("featurized %zu rows (%zu features) -> %s\n", out.x.rows, out.x.cols,
       out_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string features_path;
  std::string model_out;
  std::string eval_out;
  std::string policy = "aggressive";
  std::string model_kind = "forest";
  int trees = 100;
  int depth = 10;
  double l2_c = 1.0;
  int iters = 500;
  int cv_folds = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

EvalReport run_cv_forest(const FeatureMatrix& x, const std::vector<int>& y,
                         int folds, std::uint64_t seed, const ForestParams& fp,
                         int threads, EvalReport base) {
  const auto cv = cross_validate(
      x, y, folds, seed,
      [&](const FeatureMatrix& xa, const std::vector<int>& ya,
          const FeatureMatrix& xb, std::uint64_t fold_seed) {
        return ForestModel::train(xa, ya, fp, fold_seed, threads)
            .predict_batch(xb, threads);
      });
  base.has_cv = true;
  base.cv_mean = cv.mean;
  base.cv_std = cv.stddev;
  return base;
}

EvalReport run_cv_logreg(const FeatureMatrix& x, const std::vector<int>& y,
                         int folds, std::uint64_t seed, const LogRegParams& lp,
                         EvalReport base) {
  const auto cv = cross_validate(
      x, y, folds, seed,
      [&](const FeatureMatrix& xa, const std::vector<int>& ya,
          const FeatureMatrix& xb, std::uint64_t fold_seed) {
        return LogRegModel::train(xa, ya, lp, fold_seed).predict_batch(xb);
      });
  base.has_cv = true;
  base.cv_mean = cv.mean;
  base.cv_std = cv.stddev;
  return base;
}

int cmd_train(const TrainArgs& a) {
  if (!a.seed) throw DataError("train: --seed is required");
  const auto fd = read_feature_csv(a.features_path);
  const PolicyName policy = policy_from_string(a.policy).name;
  const auto y = fd.labels(policy);
  const int threads = resolve_threads(a.threads);

  const auto split = stratified_split(y, 0.70, 0.15, 0.15, *a.seed);
  const auto x_train = gather_rows(fd.x, split.train);
  const auto y_train = gather(y, split.train);
  const auto x_test = gather_rows(fd.x, split.test);
  const auto y_test = gather(y, split.test);

  EvalReport report;
  nlohmann::json model_json;
  if (a.model_kind == "forest") {
    auto model = ForestModel::train(x_train, y_train, {a.trees, a.depth}, *a.seed,
                                    threads);
    model.policy_tag = to_string(policy);
    report = evaluate_predictions(y_test, model.predict_batch(x_test, threads));
    if (a.cv_folds > 0)
      report = run_cv_forest(fd.x, y, a.cv_folds, *a.seed, {a.trees, a.depth},
                             threads, report);
    model_json = model.to_json();
  } else if (a.model_kind == "logreg") {
    LogRegParams lp;
    lp.l2_c = a.l2_c;
    lp.max_iters = a.iters;
    auto model = LogRegModel::train(x_train, y_train, lp, *a.seed);
    model.policy_tag = to_string(policy);
    report = evaluate_predictions(y_test, model.predict_batch(x_test));
    if (a.cv_folds > 0)
      report = run_cv_logreg(fd.x, y, a.cv_folds, *a.seed, lp, report);
    model_json = model.to_json();
  } else {
    throw DataError("train: unknown model kind '" + a.model_kind + "'");
  }

  save_json_file(a.model_out, model_json);
  if (!a.eval_out.empty()) save_json_file(a.eval_out, eval_report_to_json(report));

  std::printf("%s (%s): accuracy=%.4f f1_macro=%.4f", a.model_kind.c_str(),
              to_string(policy), report.accuracy, report.f1_macro);
  if (report.has_cv) std::printf(" cv=%.4f±%.4f", report.cv_mean, report.cv_std);
  std::printf("  -> %s\n", a.model_out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string features_path;
  std::string data_path;  // optional, enables the category impact table
  std::string out_path;
  std::string policy = "aggressive";
  int trees = 100;
  int depth = 10;
  double l2_c = 1.0;
  int iters = 500;
  int cv_folds = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

int cmd_evaluate(const EvaluateArgs& a) {
  if (!a.seed) throw DataError("evaluate: --seed is required");
  const auto fd = read_feature_csv(a.features_path);
  const PolicyName policy = policy_from_string(a.policy).name;
  const auto y = fd.labels(policy);
  const int threads = resolve_threads(a.threads);

  const auto split = stratified_split(y, 0.70, 0.15, 0.15, *a.seed);
  const auto x_train = gather_rows(fd.x, split.train);
  const auto y_train = gather(y, split.train);
  const auto x_test = gather_rows(fd.x, split.test);
  const auto y_test = gather(y, split.test);

  ReportBundle bundle;
  bundle.policy = to_string(policy);
  bundle.seed = *a.seed;
  bundle.n_train = split.train.size();
  bundle.n_val = split.val.size();
  bundle.n_test = split.test.size();

  auto forest =
      ForestModel::train(x_train, y_train, {a.trees, a.depth}, *a.seed, threads);
  forest.policy_tag = to_string(policy);
  EvalReport forest_report =
      evaluate_predictions(y_test, forest.predict_batch(x_test, threads));
  if (a.cv_folds > 0)
    forest_report = run_cv_forest(fd.x, y, a.cv_folds, *a.seed,
                                  {a.trees, a.depth}, threads, forest_report);
  bundle.models.push_back({"forest", bundle.policy, forest_report});

  LogRegParams lp;
  lp.l2_c = a.l2_c;
  lp.max_iters = a.iters;
  auto logreg = LogRegModel::train(x_train, y_train, lp, *a.seed);
  EvalReport logreg_report =
      evaluate_predictions(y_test, logreg.predict_batch(x_test));
  if (a.cv_folds > 0)
    logreg_report = run_cv_logreg(fd.x, y, a.cv_folds, *a.seed, lp, logreg_report);
  bundle.models.push_back({"logreg", bundle.policy, logreg_report});

  for (const BaselineKind kind : all_baselines()) {
    const auto strategy = BaselineStrategy::fit(kind, x_train, y_train, *a.seed);
    bundle.baselines.push_back(
        {to_string(kind), strategy.describe(),
         evaluate_predictions(y_test, strategy.predict_batch(x_test))});
  }

  bundle.feature_importance = forest.feature_importance();

  if (!a.data_path.empty()) {
    const auto ds = read_snapshot_csv(a.data_path);
    bundle.impact = category_impact(ds, policy);
    bundle.has_impact = true;
  }

  save_json_file(a.out_path, bundle.to_json());
  std::fputs(format_bundle_summary(bundle).c_str(), stdout);
  return 0;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::string state_path;
  std::uint64_t row = 0;
  std::string model_path;
  bool use_oracle = false;
  std::string location = "standard";
  int hour = 12;
  std::string traffic = "medium";
  std::string rules_path;
  std::string mode = "single";
  bool require_well_balanced = false;
  std::string out_path;
};

int cmd_optimize(const OptimizeArgs& a) {
  if (a.model_path.empty() && !a.use_oracle)
    throw DataError("optimize: provide --model FILE or --oracle");

  const SceneRecord scene = read_scene(a.state_path, a.row);
  const DigitalTwin twin(scene.scenario, scene.twin);

  OperationalContext ctx;
  ctx.location = location_from_string(a.location);
  ctx.hour_of_day = a.hour;
  ctx.traffic = traffic_from_string(a.traffic);

  std::optional<PolicyRuleTable> rules;
  if (!a.rules_path.empty())
    rules = PolicyRuleTable::from_json(load_json_file(a.rules_path));
  const ThresholdPolicy policy = select_policy(ctx, rules ? &*rules : nullptr);

  std::unique_ptr<BalancePredictor> predictor;
  if (a.use_oracle) {
    predictor = std::make_unique<OraclePredictor>(policy);
  } else {
    const auto j = load_json_file(a.model_path);
    const std::string kind = j.value("kind", "");
    std::string tag;
    if (kind == "forest") {
      auto model = std::make_shared<ForestModel>(ForestModel::from_json(j));
      tag = model->policy_tag;
      predictor = std::make_unique<ForestPredictor>(std::move(model), scene.scenario);
    } else if (kind == "logreg") {
      auto model = std::make_shared<LogRegModel>(LogRegModel::from_json(j));
      tag = model->policy_tag;
      predictor = std::make_unique<LogRegPredictor>(std::move(model), scene.scenario);
    } else {
      throw DataError(a.model_path + ": unknown model kind '" + kind + "'");
    }
    if (!tag.empty() && tag != to_string(policy.name))
      std::fprintf(stderr,
                   "warning: model was trained for policy '%s' but the selected "
                   "policy is '%s'\n",
                   tag.c_str(), to_string(policy.name));
  }

  OptimizeOptions options;
  options.mode = candidate_mode_from_string(a.mode);
  options.require_well_balanced = a.require_well_balanced;

  const OptimizeResult result = optimize(scene.snapshot, twin, *predictor, options);
  const std::string report =
      format_decision_report(result, policy, ctx, predictor->name());
  if (a.out_path.empty()) {
    std::fputs(report.c_str(), stdout);
  } else {
    std::ofstream f(a.out_path);
    if (!f) throw DataError("cannot open '" + a.out_path + "' for writing");
    f << report;
    info("decision report -> %s\n", a.out_path.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::vector<std::string>& bundles, const std::string& out_dir) {
  std::vector<ReportBundle> loaded;
  for (const auto& path : bundles)
    loaded.push_back(ReportBundle::from_json(load_json_file(path)));
  write_report_csvs(loaded, out_dir);
  info("report tables -> %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RU sleeping with load-balance-aware configuration selection"};
  app.set_version_flag("--version", std::string("oranlb ") + kVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a snapshot dataset");
  g->add_option("--config", gen.config_path, "Run config JSON");
  g->add_option("--rus,--scenario", gen.rus, "Number of RUs");
  g->add_option("--ues", gen.ues, "Number of UEs");
  g->add_option("--area", gen.area, "Area side in meters");
  g->add_option("--prb", gen.prb, "PRB capacity per RU");
  g->add_option("--dl-fraction", gen.dl_fraction, "Downlink demand fraction");
  g->add_option("--demand-mean", gen.demand_mean, "Mean DL PRB demand per UE");
  g->add_option("--demand-sigma", gen.demand_sigma, "Lognormal demand sigma");
  g->add_option("--coverage-radius", gen.coverage_radius,
                "Attachment radius in meters (0 = unlimited)");
  g->add_option("--snapshots", gen.n_snapshots, "Number of snapshots")->required();
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--out", gen.out_path, "Output CSV path")->required();
  g->add_option("--scenes", gen.scenes_path, "Also write a scene file (JSON lines)");
  g->add_option("--threads", gen.threads, "Worker threads (0 = auto)");
  g->callback([&] { cmd_generate(gen); });

  std::string label_in, label_out, label_policy = "all";
  auto* l = app.add_subcommand("label", "Append balance category labels");
  l->add_option("--in", label_in, "Input snapshot CSV")->required();
  l->add_option("--out", label_out, "Output snapshot CSV")->required();
  l->add_option("--policy", label_policy,
                "conservative|moderate|aggressive|all (default all)");
  l->callback([&] { cmd_label(label_in, label_out, label_policy); });

  std::string feat_in, feat_out;
  int feat_threads = 0;
  auto* fz = app.add_subcommand("featurize", "Extract the feature matrix");
  fz->add_option("--in", feat_in, "Input snapshot CSV")->required();
  fz->add_option("--out", feat_out, "Output feature CSV")->required();
  fz->add_option("--threads", feat_threads, "Worker threads (0 = auto)");
  fz->callback([&] { cmd_featurize(feat_in, feat_out, feat_threads); });

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a classifier");
  t->add_option("--features", tr.features_path, "Feature CSV")->required();
  t->add_option("--policy", tr.policy, "Label policy")->required();
  t->add_option("--model", tr.model_kind, "forest|logreg (default forest)");
  t->add_option("--out", tr.model_out, "Model file")->required();
  t->add_option("--eval-out", tr.eval_out, "Write the EvalReport JSON here");
  t->add_option("--trees", tr.trees, "Forest size");
  t->add_option("--depth", tr.depth, "Max tree depth");
  t->add_option("--l2-c", tr.l2_c, "LogReg inverse regularization strength");
  t->add_option("--iters", tr.iters, "LogReg iteration budget");
  t->add_option("--cv", tr.cv_folds, "Stratified k-fold CV (0 = off)");
  t->add_option("--seed", tr.seed, "RNG seed");
  t->add_option("--threads", tr.threads, "Worker threads (0 = auto)");
  t->callback([&] { cmd_train(tr); });

  EvaluateArgs ev;
  auto* e = app.add_subcommand(
      "evaluate", "Train and compare models plus all baseline strategies");
  e->add_option("--features", ev.features_path, "Feature CSV")->required();
  e->add_option("--data", ev.data_path,
                "Labeled snapshot CSV (enables the category impact table)");
  e->add_option("--policy", ev.policy, "Label policy")->required();
  e->add_option("--out", ev.out_path, "Report bundle JSON")->required();
  e->add_option("--trees", ev.trees, "Forest size");
  e->add_option("--depth", ev.depth, "Max tree depth");
  e->add_option("--l2-c", ev.l2_c, "LogReg inverse regularization strength");
  e->add_option("--iters", ev.iters, "LogReg iteration budget");
  e->add_option("--cv", ev.cv_folds, "Stratified k-fold CV (0 = off)");
  e->add_option("--seed", ev.seed, "RNG seed");
  e->add_option("--threads", ev.threads, "Worker threads (0 = auto)");
  e->callback([&] { cmd_evaluate(ev); });

  OptimizeArgs op;
  auto* o = app.add_subcommand("optimize",
                               "Pick an energy-saving RU configuration");
  o->add_option("--state", op.state_path, "Scene file (JSON lines)")->required();
  o->add_option("--row", op.row, "Scene row (default 0)");
  o->add_option("--model", op.model_path, "Trained model file");
  o->add_flag("--oracle", op.use_oracle,
              "Use the threshold rule on true metrics instead of a model");
  o->add_option("--location", op.location, "critical|standard|energy_priority");
  o->add_option("--hour", op.hour, "Hour of day 0..23");
  o->add_option("--traffic", op.traffic, "low|medium|high");
  o->add_option("--rules", op.rules_path, "Policy override rule table JSON");
  o->add_option("--mode", op.mode, "single|exhaustive (default single)");
  o->add_flag("--require-well-balanced", op.require_well_balanced,
              "Accept only WellBalanced predictions");
  o->add_option("--out", op.out_path, "Write the decision report here");
  o->callback([&] { cmd_optimize(op); });

  std::vector<std::string> bundle_paths;
  std::string report_dir;
  auto* r = app.add_subcommand("report", "Emit plot-ready CSV tables");
  r->add_option("--bundle", bundle_paths, "Report bundle JSON (repeatable)")
      ->required();
  r->add_option("--out-dir", report_dir, "Output directory")->required();
  r->callback([&] { cmd_report(bundle_paths, report_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
