#include "oranlb/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace oranlb {

namespace {

const char* kNullMarker = "NA";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw DataError(ctx + ": bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& ctx) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw DataError(ctx + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::string> snapshot_header(bool lc, bool lm, bool la) {
  std::vector<std::string> h = {"snapshot_id", "scenario_n_rus", "mask"};
  for (int i = 0; i < kMaxFileRus; ++i) h.push_back("ru" + std::to_string(i) + "_dl_prb");
  for (int i = 0; i < kMaxFileRus; ++i) h.push_back("ru" + std::to_string(i) + "_ul_prb");
  for (int i = 0; i < kMaxFileRus; ++i) h.push_back("ru" + std::to_string(i) + "_ue_count");
  h.insert(h.end(), {"n_active", "qos", "power_w", "dl_tput", "ul_tput",
                     "demand_mean", "demand_std", "demand_max"});
  if (lc) h.push_back("label_conservative");
  if (lm) h.push_back("label_moderate");
  if (la) h.push_back("label_aggressive");
  return h;
}

std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

SnapshotRow row_from_state(std::uint64_t snapshot_id, const NetworkState& state,
                           const Scenario& scenario) {
  const FeatureInputs in = feature_inputs_from_state(state, scenario);
  SnapshotRow row;
  row.snapshot_id = snapshot_id;
  row.n_rus = state.config.size();
  row.mask = state.config.to_string();
  row.dl_prb = state.dl_prb;
  row.ul_prb = state.ul_prb;
  row.ue_count.assign(static_cast<size_t>(row.n_rus), 0);
  for (int ru : state.ue_attach)
    if (ru != kDetached) ++row.ue_count[static_cast<size_t>(ru)];
  row.n_active = n_active(state.config);
  row.qos = state.qos;
  row.power_w = state.power_w;
  row.dl_tput = in.dl_tput_total;
  row.ul_tput = in.ul_tput_total;
  row.demand_mean = in.attached_demand_mean;
  row.demand_std = in.attached_demand_std;
  row.demand_max = in.attached_demand_max;
  return row;
}

FeatureInputs feature_inputs_from_row(const SnapshotRow& row,
                                      const Scenario& scenario) {
  FeatureInputs in;
  in.n_rus = row.n_rus;
  in.n_ues_total = scenario.n_ues;
  in.prb_capacity = static_cast<double>(scenario.prb_per_ru);
  int attached = 0;
  for (int i = 0; i < row.n_rus; ++i) {
    const size_t si = static_cast<size_t>(i);
    attached += row.ue_count[si];
    if (row.mask[si] != '1') continue;
    in.active_dl_prb.push_back(row.dl_prb[si]);
    in.active_ul_prb.push_back(row.ul_prb[si]);
    in.active_ue_counts.push_back(row.ue_count[si]);
  }
  in.attached_ues = attached;
  in.attached_demand_mean = row.demand_mean;
  in.attached_demand_std = row.demand_std;
  in.attached_demand_max = row.demand_max;
  in.dl_tput_total = row.dl_tput;
  in.ul_tput_total = row.ul_tput;
  in.power_w = row.power_w;
  return in;
}

bool SnapshotDataset::has_label(PolicyName policy) const {
  if (rows.empty()) return false;
  switch (policy) {
    case PolicyName::Conservative: return rows.front().label_conservative.has_value();
    case PolicyName::Moderate: return rows.front().label_moderate.has_value();
    case PolicyName::Aggressive: return rows.front().label_aggressive.has_value();
  }
  return false;
}

std::vector<int> SnapshotDataset::labels(PolicyName policy) const {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const std::optional<int>* v = nullptr;
    switch (policy) {
      case PolicyName::Conservative: v = &r.label_conservative; break;
      case PolicyName::Moderate: v = &r.label_moderate; break;
      case PolicyName::Aggressive: v = &r.label_aggressive; break;
    }
    if (!v || !v->has_value())
      throw DataError(std::string("dataset has no '") + to_string(policy) + "' labels");
    out.push_back(**v);
  }
  return out;
}

void write_snapshot_csv(const std::string& path, const SnapshotDataset& dataset) {
  if (dataset.rows.empty()) throw DataError("write " + path + ": empty dataset");
  const auto& first = dataset.rows.front();
  const bool lc = first.label_conservative.has_value();
  const bool lm = first.label_moderate.has_value();
  const bool la = first.label_aggressive.has_value();

  std::ofstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f << join_csv(snapshot_header(lc, lm, la)) << "\n";

  for (const auto& row : dataset.rows) {
    if (row.n_rus > kMaxFileRus)
      throw DataError("write " + path + ": scenario exceeds " +
                      std::to_string(kMaxFileRus) + " RU columns");
    if (row.label_conservative.has_value() != lc ||
        row.label_moderate.has_value() != lm ||
        row.label_aggressive.has_value() != la)
      throw DataError("write " + path + ": inconsistent label columns");

    std::vector<std::string> fields;
    fields.push_back(std::to_string(row.snapshot_id));
    fields.push_back(std::to_string(row.n_rus));
    fields.push_back(row.mask);
    for (int i = 0; i < kMaxFileRus; ++i)
      fields.push_back(i < row.n_rus ? format_number(row.dl_prb[static_cast<size_t>(i)])
                                     : kNullMarker);
    for (int i = 0; i < kMaxFileRus; ++i)
      fields.push_back(i < row.n_rus ? format_number(row.ul_prb[static_cast<size_t>(i)])
                                     : kNullMarker);
    for (int i = 0; i < kMaxFileRus; ++i)
      fields.push_back(i < row.n_rus ? std::to_string(row.ue_count[static_cast<size_t>(i)])
                                     : kNullMarker);
    fields.push_back(std::to_string(row.n_active));
    fields.push_back(format_number(row.qos));
    fields.push_back(format_number(row.power_w));
    fields.push_back(format_number(row.dl_tput));
    fields.push_back(format_number(row.ul_tput));
    fields.push_back(format_number(row.demand_mean));
    fields.push_back(format_number(row.demand_std));
    fields.push_back(format_number(row.demand_max));
    if (lc) fields.push_back(std::to_string(*row.label_conservative));
    if (lm) fields.push_back(std::to_string(*row.label_moderate));
    if (la) fields.push_back(std::to_string(*row.label_aggressive));
    f << join_csv(fields) << "\n";
  }
  if (!f) throw DataError("write " + path + ": I/O failure");
}

SnapshotDataset read_snapshot_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": empty file");

  const auto header = split_csv(line);
  bool lc = false, lm = false, la = false;
  for (const auto& h : header) {
    if (h == "label_conservative") lc = true;
    if (h == "label_moderate") lm = true;
    if (h == "label_aggressive") la = true;
  }
  const auto expected = snapshot_header(lc, lm, la);
  if (header != expected)
    throw DataError(path + ":1: unexpected dataset header (schema mismatch)");

  SnapshotDataset ds;
  std::uint64_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    const auto fields = split_csv(line);
    if (fields.size() != expected.size())
      throw DataError(ctx + ": expected " + std::to_string(expected.size()) +
                      " fields, got " + std::to_string(fields.size()));

    SnapshotRow row;
    size_t k = 0;
    row.snapshot_id = static_cast<std::uint64_t>(parse_int(fields[k++], ctx));
    row.n_rus = static_cast<int>(parse_int(fields[k++], ctx));
    row.mask = fields[k++];
    if (row.n_rus < 1 || row.n_rus > kMaxFileRus)
      throw DataError(ctx + ": scenario_n_rus out of range");
    if (static_cast<int>(row.mask.size()) != row.n_rus)
      throw DataError(ctx + ": mask length != scenario_n_rus");

    const auto read_ru_block = [&](auto push, const char* what) {
      for (int i = 0; i < kMaxFileRus; ++i) {
        const std::string& v = fields[k++];
        if (i < row.n_rus) {
          if (v == kNullMarker)
            throw DataError(ctx + ": null marker inside active " + what + " block");
          push(v);
        } else if (v != kNullMarker) {
          throw DataError(ctx + ": expected null marker in padding " + what + " column");
        }
      }
    };
    read_ru_block([&](const std::string& v) { row.dl_prb.push_back(parse_double(v, ctx)); },
                  "dl_prb");
    read_ru_block([&](const std::string& v) { row.ul_prb.push_back(parse_double(v, ctx)); },
                  "ul_prb");
    read_ru_block(
        [&](const std::string& v) { row.ue_count.push_back(static_cast<int>(parse_int(v, ctx))); },
        "ue_count");

    row.n_active = static_cast<int>(parse_int(fields[k++], ctx));
    int popcount = 0;
    for (char c : row.mask) {
      if (c != '0' && c != '1') throw DataError(ctx + ": bad mask character");
      popcount += c == '1';
    }
    if (popcount != row.n_active)
      throw DataError(ctx + ": n_active disagrees with mask");
    if (popcount < 1) throw DataError(ctx + ": all-inactive mask");

    row.qos = parse_double(fields[k++], ctx);
    row.power_w = parse_double(fields[k++], ctx);
    row.dl_tput = parse_double(fields[k++], ctx);
    row.ul_tput = parse_double(fields[k++], ctx);
    row.demand_mean = parse_double(fields[k++], ctx);
    row.demand_std = parse_double(fields[k++], ctx);
    row.demand_max = parse_double(fields[k++], ctx);
    if (lc) row.label_conservative = static_cast<int>(parse_int(fields[k++], ctx));
    if (lm) row.label_moderate = static_cast<int>(parse_int(fields[k++], ctx));
    if (la) row.label_aggressive = static_cast<int>(parse_int(fields[k++], ctx));
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw DataError(path + ": no data rows");
  return ds;
}

std::string meta_path_for(const std::string& dataset_path) {
  return dataset_path + ".meta.json";
}

nlohmann::json scenario_to_json(const Scenario& s) {
  return nlohmann::json{{"n_rus", s.n_rus},
                        {"n_ues", s.n_ues},
                        {"dl_fraction", s.dl_fraction},
                        {"area_side_m", s.area_side_m},
                        {"prb_per_ru", s.prb_per_ru},
                        {"seed", s.seed}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.n_rus = j.value("n_rus", s.n_rus);
  s.n_ues = j.value("n_ues", s.n_ues);
  s.dl_fraction = j.value("dl_fraction", s.dl_fraction);
  s.area_side_m = j.value("area_side_m", s.area_side_m);
  s.prb_per_ru = j.value("prb_per_ru", s.prb_per_ru);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

nlohmann::json twin_params_to_json(const TwinParams& p) {
  nlohmann::json jp;
  jp["pathloss_exponent"] = p.pathloss_exponent;
  nlohmann::json pos = nlohmann::json::array();
  for (const auto& v : p.ru_positions) pos.push_back({v.x, v.y});
  jp["ru_positions"] = std::move(pos);
  jp["demand_mean_prb"] = p.demand_mean_prb;
  jp["demand_sigma"] = p.demand_sigma;
  jp["p_base_w"] = p.p_base_w;
  jp["p_slope_w"] = p.p_slope_w;
  jp["qos_weights"] = {p.qos_weight_tput, p.qos_weight_latency, p.qos_weight_fairness};
  jp["coverage_radius_m"] = p.coverage_radius_m;
  jp["mbps_per_prb"] = p.mbps_per_prb;
  return jp;
}

TwinParams twin_params_from_json(const nlohmann::json& j) {
  TwinParams p;
  p.pathloss_exponent = j.value("pathloss_exponent", p.pathloss_exponent);
  if (j.contains("ru_positions")) {
    for (const auto& jv : j.at("ru_positions"))
      p.ru_positions.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
  }
  p.demand_mean_prb = j.value("demand_mean_prb", p.demand_mean_prb);
  p.demand_sigma = j.value("demand_sigma", p.demand_sigma);
  p.p_base_w = j.value("p_base_w", p.p_base_w);
  p.p_slope_w = j.value("p_slope_w", p.p_slope_w);
  if (j.contains("qos_weights")) {
    const auto& w = j.at("qos_weights");
    p.qos_weight_tput = w.at(0).get<double>();
    p.qos_weight_latency = w.at(1).get<double>();
    p.qos_weight_fairness = w.at(2).get<double>();
  }
  p.coverage_radius_m = j.value("coverage_radius_m", p.coverage_radius_m);
  p.mbps_per_prb = j.value("mbps_per_prb", p.mbps_per_prb);
  return p;
}

void write_dataset_meta(const std::string& path, const DatasetMeta& meta) {
  nlohmann::json j;
  j["dataset_schema"] = meta.dataset_schema;
  j["feature_schema"] = meta.feature_schema;
  j["scenario"] = scenario_to_json(meta.scenario);
  j["twin"] = twin_params_to_json(meta.twin);
  j["n_snapshots"] = meta.n_snapshots;
  std::ofstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
}

DatasetMeta read_dataset_meta(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open metadata '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad JSON (" + e.what() + ")");
  }
  DatasetMeta m;
  m.dataset_schema = j.value("dataset_schema", "");
  if (m.dataset_schema != kDatasetSchemaVersion)
    throw DataError(path + ": dataset schema '" + m.dataset_schema +
                    "' != expected '" + kDatasetSchemaVersion + "'");
  m.feature_schema = j.value("feature_schema", "");
  m.scenario = scenario_from_json(j.at("scenario"));
  m.twin = twin_params_from_json(j.at("twin"));
  m.n_snapshots = j.value("n_snapshots", 0ull);
  return m;
}

nlohmann::json state_to_json(const NetworkState& state) {
  nlohmann::json j;
  j["mask"] = state.config.to_string();
  j["dl_prb"] = state.dl_prb;
  j["ul_prb"] = state.ul_prb;
  j["ue_attach"] = state.ue_attach;
  j["ue_dl_demand"] = state.ue_dl_demand;
  j["ue_tput_dl"] = state.ue_tput_dl;
  j["ue_tput_ul"] = state.ue_tput_ul;
  j["qos"] = state.qos;
  j["power_w"] = state.power_w;
  return j;
}

NetworkState state_from_json(const nlohmann::json& j) {
  return NetworkState(RuConfig::from_string(j.at("mask").get<std::string>()),
                      j.at("dl_prb").get<std::vector<double>>(),
                      j.at("ul_prb").get<std::vector<double>>(),
                      j.at("ue_attach").get<std::vector<int>>(),
                      j.at("ue_dl_demand").get<std::vector<double>>(),
                      j.at("ue_tput_dl").get<std::vector<double>>(),
                      j.at("ue_tput_ul").get<std::vector<double>>(),
                      j.at("qos").get<double>(), j.at("power_w").get<double>());
}

void write_scenes(const std::string& path, std::span<const Snapshot> snapshots,
                  const Scenario& scenario, const TwinParams& twin) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  const nlohmann::json jscn = scenario_to_json(scenario);
  const nlohmann::json jtwin = twin_params_to_json(twin);
  for (const auto& snap : snapshots) {
    nlohmann::json j;
    j["scenario"] = jscn;
    j["twin"] = jtwin;
    j["state"] = state_to_json(snap.state);
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& p : snap.ue_positions) pos.push_back({p.x, p.y});
    j["ue_pos"] = std::move(pos);
    f << j.dump() << "\n";
  }
}

SceneRecord read_scene(const std::string& path, std::uint64_t row) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open scene file '" + path + "'");
  std::string line;
  std::uint64_t i = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (i++ != row) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(i) + ": bad JSON (" + e.what() + ")");
    }
    SceneRecord rec{scenario_from_json(j.at("scenario")),
                    twin_params_from_json(j.at("twin")),
                    Snapshot{state_from_json(j.at("state")), {}}};
    for (const auto& jp : j.at("ue_pos"))
      rec.snapshot.ue_positions.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
    return rec;
  }
  throw DataError(path + ": scene row " + std::to_string(row) + " out of range");
}

std::vector<int> FeatureDataset::labels(PolicyName policy) const {
  const std::vector<std::optional<int>>* src = nullptr;
  switch (policy) {
    case PolicyName::Conservative: src = &label_conservative; break;
    case PolicyName::Moderate: src = &label_moderate; break;
    case PolicyName::Aggressive: src = &label_aggressive; break;
  }
  std::vector<int> out;
  out.reserve(x.rows);
  for (size_t i = 0; i < x.rows; ++i) {
    if (!src || i >= src->size() || !(*src)[i].has_value())
      throw DataError(std::string("feature dataset has no '") + to_string(policy) +
                      "' labels");
    out.push_back(*(*src)[i]);
  }
  return out;
}

void write_feature_csv(const std::string& path, const FeatureDataset& dataset) {
  if (dataset.x.rows == 0) throw DataError("write " + path + ": empty feature set");
  const auto& schema = feature_schema();
  if (dataset.x.cols != schema.size())
    throw DataError("write " + path + ": feature width != schema");
  const bool lc = !dataset.label_conservative.empty() &&
                  dataset.label_conservative.front().has_value();
  const bool lm = !dataset.label_moderate.empty() &&
                  dataset.label_moderate.front().has_value();
  const bool la = !dataset.label_aggressive.empty() &&
                  dataset.label_aggressive.front().has_value();

  std::ofstream f(path);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  std::vector<std::string> header = {"snapshot_id"};
  for (const auto& d : schema) header.push_back(d.name);
  if (lc) header.push_back("label_conservative");
  if (lm) header.push_back("label_moderate");
  if (la) header.push_back("label_aggressive");
  f << join_csv(header) << "\n";

  for (size_t r = 0; r < dataset.x.rows; ++r) {
    std::vector<std::string> fields;
    fields.push_back(std::to_string(dataset.snapshot_ids[r]));
    for (size_t c = 0; c < dataset.x.cols; ++c)
      fields.push_back(format_number(dataset.x.at(r, c)));
    if (lc) fields.push_back(std::to_string(*dataset.label_conservative[r]));
    if (lm) fields.push_back(std::to_string(*dataset.label_moderate[r]));
    if (la) fields.push_back(std::to_string(*dataset.label_aggressive[r]));
    f << join_csv(fields) << "\n";
  }
  if (!f) throw DataError("write " + path + ": I/O failure");
}

FeatureDataset read_feature_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": empty file");
  const auto header = split_csv(line);
  const auto& schema = feature_schema();
  if (header.size() < schema.size() + 1 || header[0] != "snapshot_id")
    throw DataError(path + ":1: unexpected feature header");
  for (size_t i = 0; i < schema.size(); ++i)
    if (header[i + 1] != schema[i].name)
      throw DataError(path + ":1: feature column '" + header[i + 1] +
                      "' does not match schema '" + schema[i].name + "'");
  bool lc = false, lm = false, la = false;
  for (size_t i = schema.size() + 1; i < header.size(); ++i) {
    if (header[i] == "label_conservative") lc = true;
    else if (header[i] == "label_moderate") lm = true;
    else if (header[i] == "label_aggressive") la = true;
    else throw DataError(path + ":1: unknown column '" + header[i] + "'");
  }

  FeatureDataset ds;
  ds.x.cols = schema.size();
  std::uint64_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw DataError(ctx + ": wrong field count");
    size_t k = 0;
    ds.snapshot_ids.push_back(static_cast<std::uint64_t>(parse_int(fields[k++], ctx)));
    for (size_t c = 0; c < schema.size(); ++c)
      ds.x.values.push_back(parse_double(fields[k++], ctx));
    ds.label_conservative.push_back(
        lc ? std::optional<int>(static_cast<int>(parse_int(fields[k++], ctx)))
           : std::nullopt);
    ds.label_moderate.push_back(
        lm ? std::optional<int>(static_cast<int>(parse_int(fields[k++], ctx)))
           : std::nullopt);
    ds.label_aggressive.push_back(
        la ? std::optional<int>(static_cast<int>(parse_int(fields[k++], ctx)))
           : std::nullopt);
    ++ds.x.rows;
  }
  if (ds.x.rows == 0) throw DataError(path + ": no data rows");
  return ds;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("scenario")) cfg.scenario = scenario_from_json(j.at("scenario"));
  if (j.contains("twin")) cfg.twin = twin_params_from_json(j.at("twin"));
  if (j.contains("policy"))
    cfg.policy = policy_from_string(j.at("policy").get<std::string>()).name;
  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.n_trees = m.value("n_trees", cfg.n_trees);
    cfg.max_depth = m.value("max_depth", cfg.max_depth);
    cfg.logreg_c = m.value("logreg_c", cfg.logreg_c);
    cfg.logreg_iters = m.value("logreg_iters", cfg.logreg_iters);
  }
  if (j.contains("seed")) {
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad JSON (" + e.what() + ")");
  }
  return from_json(j);
}

}  // namespace oranlb
