#include "oranlb/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "oranlb/parallel.hpp"

namespace oranlb {

namespace {

std::vector<FeatureDef> make_schema() {
  using C = FeatureCategory;
  return {
      {"dl_prb_mean", C::LoadDistribution},
      {"dl_prb_std", C::LoadDistribution},
      {"dl_prb_min", C::LoadDistribution},
      {"dl_prb_max", C::LoadDistribution},
      {"dl_prb_p25", C::LoadDistribution},
      {"dl_prb_p50", C::LoadDistribution},
      {"dl_prb_p75", C::LoadDistribution},
      {"ul_prb_mean", C::LoadDistribution},
      {"ul_prb_std", C::LoadDistribution},
      {"n_active", C::ResourceUtilization},
      {"active_ratio", C::ResourceUtilization},
      {"total_dl_prb", C::ResourceUtilization},
      {"mean_ru_utilization", C::ResourceUtilization},
      {"active_ru_efficiency_ratio", C::ResourceUtilization},
      {"num_ues", C::ConnectionPatterns},
      {"ue_per_ru_mean", C::ConnectionPatterns},
      {"ue_per_ru_std", C::ConnectionPatterns},
      {"ue_per_ru_max", C::ConnectionPatterns},
      {"detached_ues", C::ConnectionPatterns},
      {"dl_ul_ratio", C::TrafficCharacteristics},
      {"demand_mean", C::TrafficCharacteristics},
      {"demand_std", C::TrafficCharacteristics},
      {"demand_peak_ratio", C::TrafficCharacteristics},
      {"demand_dispersion", C::TrafficCharacteristics},
      {"power_w", C::PerformanceIndicators},
      {"power_per_active_ru", C::PerformanceIndicators},
      {"dl_tput_total", C::PerformanceIndicators},
      {"tput_per_active_ru", C::PerformanceIndicators},
      {"tput_per_watt", C::PerformanceIndicators},
  };
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

const std::vector<FeatureDef>& feature_schema() {
  static const std::vector<FeatureDef> schema = make_schema();
  return schema;
}

int feature_index(const std::string& name) {
  static const std::unordered_map<std::string, int> index = [] {
    std::unordered_map<std::string, int> m;
    const auto& schema = feature_schema();
    for (size_t i = 0; i < schema.size(); ++i)
      m[schema[i].name] = static_cast<int>(i);
    return m;
  }();
  auto it = index.find(name);
  if (it == index.end())
    throw std::invalid_argument("unknown feature '" + name + "'");
  return it->second;
}

double population_std(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mu;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double percentile(std::span<const double> sorted_values, double q) {
  if (sorted_values.empty()) return 0.0;
  const size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  const double h = q * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

FeatureInputs feature_inputs_from_state(const NetworkState& state,
                                        const Scenario& scenario) {
  FeatureInputs in;
  in.n_rus = state.config.size();
  in.n_ues_total = static_cast<int>(state.ue_attach.size());
  in.prb_capacity = static_cast<double>(scenario.prb_per_ru);

  std::vector<int> counts(static_cast<size_t>(in.n_rus), 0);
  std::vector<double> attached_demand;
  attached_demand.reserve(state.ue_attach.size());
  for (size_t u = 0; u < state.ue_attach.size(); ++u) {
    const int ru = state.ue_attach[u];
    if (ru == kDetached) continue;
    ++counts[static_cast<size_t>(ru)];
    attached_demand.push_back(state.ue_dl_demand[u]);
  }
  in.attached_ues = static_cast<int>(attached_demand.size());

  for (int i = 0; i < in.n_rus; ++i) {
    if (!state.config.active(i)) continue;
    const size_t si = static_cast<size_t>(i);
    in.active_dl_prb.push_back(state.dl_prb[si]);
    in.active_ul_prb.push_back(state.ul_prb[si]);
    in.active_ue_counts.push_back(counts[si]);
  }

  in.attached_demand_mean = mean_of(attached_demand);
  in.attached_demand_std = population_std(attached_demand);
  in.attached_demand_max =
      attached_demand.empty()
          ? 0.0
          : *std::max_element(attached_demand.begin(), attached_demand.end());

  for (double t : state.ue_tput_dl) in.dl_tput_total += t;
  for (double t : state.ue_tput_ul) in.ul_tput_total += t;
  in.power_w = state.power_w;
  return in;
}

FeatureVector extract(const FeatureInputs& in) {
  if (in.active_dl_prb.empty())
    throw std::invalid_argument("extract: no active RUs");
  const double k = static_cast<double>(in.active_dl_prb.size());

  std::vector<double> dl_sorted(in.active_dl_prb);
  std::sort(dl_sorted.begin(), dl_sorted.end());

  std::vector<double> counts_d(in.active_ue_counts.size());
  for (size_t i = 0; i < counts_d.size(); ++i)
    counts_d[i] = static_cast<double>(in.active_ue_counts[i]);

  double total_dl = 0.0, total_ul = 0.0;
  for (double x : in.active_dl_prb) total_dl += x;
  for (double x : in.active_ul_prb) total_ul += x;

  const double attached_offered =
      static_cast<double>(in.attached_ues) * in.attached_demand_mean;
  const double tput_total = in.dl_tput_total + in.ul_tput_total;

  FeatureVector fv;
  fv.values = {
      // load_distribution
      mean_of(in.active_dl_prb),
      population_std(in.active_dl_prb),
      dl_sorted.front(),
      dl_sorted.back(),
      percentile(dl_sorted, 0.25),
      percentile(dl_sorted, 0.50),
      percentile(dl_sorted, 0.75),
      mean_of(in.active_ul_prb),
      population_std(in.active_ul_prb),
      // resource_utilization
      k,
      k / static_cast<double>(in.n_rus),
      total_dl,
      (total_dl + total_ul) / (2.0 * k),
      attached_offered / (k * in.prb_capacity),
      // connection_patterns
      static_cast<double>(in.attached_ues),
      mean_of(counts_d),
      population_std(counts_d),
      counts_d.empty() ? 0.0 : *std::max_element(counts_d.begin(), counts_d.end()),
      static_cast<double>(in.n_ues_total - in.attached_ues),
      // traffic_characteristics
      safe_ratio(in.dl_tput_total, in.ul_tput_total),
      in.attached_demand_mean,
      in.attached_demand_std,
      safe_ratio(in.attached_demand_max, in.attached_demand_mean),
      safe_ratio(in.attached_demand_std, in.attached_demand_mean),
      // performance_indicators
      in.power_w,
      in.power_w / k,
      in.dl_tput_total,
      tput_total / k,
      safe_ratio(tput_total, in.power_w),
  };
  if (fv.values.size() != feature_schema().size())
    throw std::logic_error("extract: schema size mismatch");
  for (double v : fv.values)
    if (!std::isfinite(v)) throw std::logic_error("extract: non-finite feature");
  return fv;
}

FeatureVector extract(const NetworkState& state, const Scenario& scenario) {
  return extract(feature_inputs_from_state(state, scenario));
}

FeatureMatrix extract_batch(std::span<const NetworkState> snapshots,
                            const Scenario& scenario, int threads) {
  FeatureMatrix m;
  m.rows = snapshots.size();
  m.cols = feature_schema().size();
  m.values.assign(m.rows * m.cols, 0.0);
  parallel_for(snapshots.size(), threads, [&](std::uint64_t i) {
    const auto fv = extract(snapshots[static_cast<size_t>(i)], scenario);
    std::copy(fv.values.begin(), fv.values.end(),
              m.values.begin() + static_cast<ptrdiff_t>(i * m.cols));
  });
  return m;
}

}  // namespace oranlb
