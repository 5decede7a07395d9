// Dataset persistence and run configuration.
//
// Snapshot datasets are wide-format CSV with a fixed 8-RU column block
// (absent RUs carry the null marker "NA"), a metadata JSON sidecar, and an
// optional scene file (JSON lines) holding the full per-snapshot state
// needed for what-if re-attachment. Numeric CSV fields are printed with 9
// significant digits so byte-identity comparisons are meaningful.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/features.hpp"
#include "oranlb/labeler.hpp"
#include "oranlb/twin.hpp"

#include "json.hpp"

namespace oranlb {

/// Data/validation failures that map to CLI exit code 2; carries the file
/// line where applicable.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// The persisted aggregate view of one snapshot (the CSV row). Per-UE
/// vectors live in the scene file, not here.
struct SnapshotRow {
  std::uint64_t snapshot_id = 0;
  int n_rus = 0;
  std::string mask;                       // "101011", RU 0 first
  std::vector<double> dl_prb;             // size n_rus
  std::vector<double> ul_prb;
  std::vector<int> ue_count;              // attached UEs per RU
  int n_active = 0;
  double qos = 0.0;
  double power_w = 0.0;
  double dl_tput = 0.0;
  double ul_tput = 0.0;
  double demand_mean = 0.0;               // attached UEs, downlink PRBs
  double demand_std = 0.0;
  double demand_max = 0.0;
  // Label columns present in the file, keyed by policy code.
  std::optional<int> label_conservative;
  std::optional<int> label_moderate;
  std::optional<int> label_aggressive;
};

SnapshotRow row_from_state(std::uint64_t snapshot_id, const NetworkState& state,
                           const Scenario& scenario);

/// FeatureInputs for extraction from a persisted row (needs the scenario
/// for total UE count and PRB capacity).
FeatureInputs feature_inputs_from_row(const SnapshotRow& row,
                                      const Scenario& scenario);

struct SnapshotDataset {
  std::vector<SnapshotRow> rows;
  bool has_label(PolicyName policy) const;
  std::vector<int> labels(PolicyName policy) const;  // throws if absent
};

void write_snapshot_csv(const std::string& path, const SnapshotDataset& dataset);
SnapshotDataset read_snapshot_csv(const std::string& path);

/// Metadata sidecar (path + ".meta.json"): seed, scenario, twin parameters,
/// schema versions, snapshot count.
inline constexpr const char* kDatasetSchemaVersion = "ds1";

struct DatasetMeta {
  std::string dataset_schema = kDatasetSchemaVersion;
  std::string feature_schema = kFeatureSchemaVersion;
  Scenario scenario;
  TwinParams twin;
  std::uint64_t n_snapshots = 0;
};

std::string meta_path_for(const std::string& dataset_path);
void write_dataset_meta(const std::string& path, const DatasetMeta& meta);
DatasetMeta read_dataset_meta(const std::string& path);

/// Scene file: one JSON object per line with the complete snapshot state.
void write_scenes(const std::string& path, std::span<const Snapshot> snapshots,
                  const Scenario& scenario, const TwinParams& twin);
/// Reads scene `row` (0-based) together with its scenario/twin parameters.
struct SceneRecord {
  Scenario scenario;
  TwinParams twin;
  Snapshot snapshot;
};
SceneRecord read_scene(const std::string& path, std::uint64_t row);

nlohmann::json state_to_json(const NetworkState& state);
NetworkState state_from_json(const nlohmann::json& j);

/// Feature CSV: snapshot_id, the schema columns, then any label columns
/// carried over from the source dataset.
struct FeatureDataset {
  std::vector<std::uint64_t> snapshot_ids;
  FeatureMatrix x;
  std::vector<std::optional<int>> label_conservative;
  std::vector<std::optional<int>> label_moderate;
  std::vector<std::optional<int>> label_aggressive;

  std::vector<int> labels(PolicyName policy) const;
};

void write_feature_csv(const std::string& path, const FeatureDataset& dataset);
FeatureDataset read_feature_csv(const std::string& path);

/// Fixed-precision numeric formatting used by every CSV writer.
std::string format_number(double v);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json twin_params_to_json(const TwinParams& p);
TwinParams twin_params_from_json(const nlohmann::json& j);

/// Run configuration file: scenario + twin + model hyperparameters + policy
/// + seed. Any CLI flag overrides the file value.
struct RunConfig {
  Scenario scenario;
  TwinParams twin;
  PolicyName policy = PolicyName::Moderate;
  int n_trees = 100;
  int max_depth = 10;
  double logreg_c = 1.0;
  int logreg_iters = 500;
  std::uint64_t seed = 0;
  bool seed_set = false;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j);
};

}  // namespace oranlb
