// Engineered per-snapshot features for classifier training and real-time
// prediction. The schema is versioned and order-fixed; every feature is an
// order-free statistic of the snapshot (no raw per-RU columns). None of the
// three balance metrics appears verbatim: models must learn the ratio
// structure from the underlying statistics.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "oranlb/core.hpp"

namespace oranlb {

inline constexpr const char* kFeatureSchemaVersion = "fv1";

enum class FeatureCategory : int {
  LoadDistribution = 0,
  ResourceUtilization,
  ConnectionPatterns,
  TrafficCharacteristics,
  PerformanceIndicators,
};

struct FeatureDef {
  std::string name;
  FeatureCategory category;
};

/// The fixed fv1 schema. Index order matches FeatureVector::values.
const std::vector<FeatureDef>& feature_schema();

/// Index of a feature name in the schema; throws if unknown.
int feature_index(const std::string& name);

struct FeatureVector {
  std::vector<double> values;
  std::string schema_version = kFeatureSchemaVersion;
};

/// Aggregates a feature extraction needs. Derivable from a full NetworkState
/// or from a persisted dataset row plus its scenario; both paths feed the
/// same arithmetic so in-memory and file-based pipelines agree.
struct FeatureInputs {
  std::vector<double> active_dl_prb;   // loads of active RUs only
  std::vector<double> active_ul_prb;
  std::vector<int> active_ue_counts;   // attached UEs per active RU
  int n_rus = 0;
  int n_ues_total = 0;
  int attached_ues = 0;
  double attached_demand_mean = 0.0;   // downlink PRBs, attached UEs only
  double attached_demand_std = 0.0;
  double attached_demand_max = 0.0;
  double dl_tput_total = 0.0;          // Mbps
  double ul_tput_total = 0.0;
  double power_w = 0.0;
  double prb_capacity = 100.0;
};

FeatureInputs feature_inputs_from_state(const NetworkState& state,
                                        const Scenario& scenario);

FeatureVector extract(const FeatureInputs& in);

FeatureVector extract(const NetworkState& state, const Scenario& scenario);

/// Row-major matrix of features, one row per snapshot.
struct FeatureMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;  // rows * cols

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
};

FeatureMatrix extract_batch(std::span<const NetworkState> snapshots,
                            const Scenario& scenario, int threads = 1);

/// Population mean/std/min/max and interpolated percentile helpers shared
/// with the metrics and report code.
double population_std(std::span<const double> v);
double percentile(std::span<const double> sorted_values, double q);

}  // namespace oranlb
