#include "oranlb/twin.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "oranlb/metrics.hpp"
#include "oranlb/parallel.hpp"

namespace oranlb {

namespace {
// Distances below this are clamped before the power law so a UE sitting on
// top of an RU does not produce an infinite receive power.
constexpr double kMinPathDistanceM = 1.0;
}  // namespace

void TwinParams::validate() const {
  if (pathloss_exponent <= 0)
    throw std::invalid_argument("twin: pathloss_exponent must be positive");
  if (demand_mean_prb < 0 || demand_sigma < 0)
    throw std::invalid_argument("twin: demand parameters must be >= 0");
  if (p_base_w < 0 || p_slope_w < 0)
    throw std::invalid_argument("twin: power parameters must be >= 0");
  if (qos_weight_tput < 0 || qos_weight_latency < 0 || qos_weight_fairness < 0)
    throw std::invalid_argument("twin: qos weights must be >= 0");
  const double sum = qos_weight_tput + qos_weight_latency + qos_weight_fairness;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("twin: qos weights must sum to 1");
  if (coverage_radius_m < 0)
    throw std::invalid_argument("twin: coverage_radius_m must be >= 0");
  if (mbps_per_prb <= 0)
    throw std::invalid_argument("twin: mbps_per_prb must be positive");
}

double config_power(const RuConfig& config, std::span<const double> dl_prb,
                    double p_base_w, double p_slope_w) {
  double total = 0.0;
  for (int i = 0; i < config.size(); ++i) {
    if (!config.active(i)) continue;
    total += p_base_w + p_slope_w * dl_prb[static_cast<size_t>(i)] / 100.0;
  }
  return total;
}

DigitalTwin::DigitalTwin(Scenario scenario, TwinParams params)
    : scenario_(scenario), params_(std::move(params)) {
  scenario_.validate();
  if (params_.ru_positions.empty())
    params_.ru_positions = grid_layout(scenario_.n_rus, scenario_.area_side_m);
  if (static_cast<int>(params_.ru_positions.size()) != scenario_.n_rus)
    throw std::invalid_argument("twin: ru_positions size != n_rus");
  if (params_.demand_mean_prb == 0.0) {
    // Mean sized to ~28% utilization at full activation; combined with the
    // heavy-tailed per-UE draws this yields balanced, concentrated and
    // overloaded regimes in one dataset.
    params_.demand_mean_prb = 0.55 * static_cast<double>(scenario_.prb_per_ru) *
                              static_cast<double>(scenario_.n_rus) /
                              (2.0 * static_cast<double>(scenario_.n_ues));
  }
  params_.validate();
}

std::vector<Vec2> DigitalTwin::grid_layout(int n_rus, double area_side_m) {
  if (n_rus < 1) throw std::invalid_argument("grid layout: n_rus must be >= 1");
  const int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_rus))));
  const int cols = (n_rus + rows - 1) / rows;
  std::vector<Vec2> pos;
  pos.reserve(static_cast<size_t>(n_rus));
  for (int k = 0; k < n_rus; ++k) {
    const int r = k / cols;
    const int c = k % cols;
    const int row_count = std::min(cols, n_rus - r * cols);
    pos.push_back({(c + 0.5) * area_side_m / row_count,
                   (r + 0.5) * area_side_m / rows});
  }
  return pos;
}

std::vector<Vec2> DigitalTwin::place_ues(RngStream& rng) const {
  std::vector<Vec2> pos(static_cast<size_t>(scenario_.n_ues));
  for (auto& p : pos) {
    p.x = rng.uniform(0.0, scenario_.area_side_m);
    p.y = rng.uniform(0.0, scenario_.area_side_m);
  }
  return pos;
}

std::vector<double> DigitalTwin::draw_demands(RngStream& rng) const {
  std::vector<double> d(static_cast<size_t>(scenario_.n_ues));
  for (auto& v : d)
    v = rng.lognormal_with_mean(params_.demand_mean_prb, params_.demand_sigma);
  return d;
}

std::vector<int> DigitalTwin::attach(std::span<const Vec2> ue_positions,
                                     const RuConfig& config) const {
  if (n_active(config) < 1)
    throw std::invalid_argument("attach: no active RU");
  std::vector<int> out(ue_positions.size(), kDetached);
  const double radius = params_.coverage_radius_m;
  for (size_t u = 0; u < ue_positions.size(); ++u) {
    double best_rx = -1.0;
    int best_ru = kDetached;
    for (int i = 0; i < config.size(); ++i) {
      if (!config.active(i)) continue;
      const Vec2& rp = params_.ru_positions[static_cast<size_t>(i)];
      const double dx = ue_positions[u].x - rp.x;
      const double dy = ue_positions[u].y - rp.y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (radius > 0.0 && dist > radius) continue;
      const double d = std::max(dist, kMinPathDistanceM);
      const double rx = std::pow(d, -params_.pathloss_exponent);
      if (rx > best_rx) {
        best_rx = rx;
        best_ru = i;
      }
    }
    out[u] = best_ru;
  }
  return out;
}

RuConfig DigitalTwin::random_config(RngStream& rng) const {
  const int n = scenario_.n_rus;
  const int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  const auto chosen = rng.sample_without_replacement(n, k);
  std::vector<bool> mask(static_cast<size_t>(n), false);
  for (int i : chosen) mask[static_cast<size_t>(i)] = true;
  return RuConfig(std::move(mask));
}

NetworkState DigitalTwin::load_and_qos(const RuConfig& config,
                                       std::span<const int> attachment,
                                       std::span<const double> dl_demand,
                                       QosBreakdown* breakdown) const {
  const int n = scenario_.n_rus;
  const size_t n_ues = attachment.size();
  if (config.size() != n)
    throw std::invalid_argument("load_and_qos: mask size != n_rus");
  if (dl_demand.size() != n_ues)
    throw std::invalid_argument("load_and_qos: demand size != attachment size");
  if (n_active(config) < 1)
    throw std::invalid_argument("load_and_qos: no active RU");

  const double cap = static_cast<double>(scenario_.prb_per_ru);
  const double ul_per_dl = (1.0 - scenario_.dl_fraction) / scenario_.dl_fraction;

  // Offered load per RU, uncapped.
  std::vector<double> offered_dl(static_cast<size_t>(n), 0.0);
  std::vector<double> offered_ul(static_cast<size_t>(n), 0.0);
  for (size_t u = 0; u < n_ues; ++u) {
    const int ru = attachment[u];
    if (ru == kDetached) continue;
    if (ru < 0 || ru >= n || !config.active(ru))
      throw std::invalid_argument("load_and_qos: attachment to inactive RU");
    offered_dl[static_cast<size_t>(ru)] += dl_demand[u];
    offered_ul[static_cast<size_t>(ru)] += dl_demand[u] * ul_per_dl;
  }

  std::vector<double> dl_prb(static_cast<size_t>(n), 0.0);
  std::vector<double> ul_prb(static_cast<size_t>(n), 0.0);
  std::vector<double> scale_dl(static_cast<size_t>(n), 1.0);
  std::vector<double> scale_ul(static_cast<size_t>(n), 1.0);
  for (int i = 0; i < n; ++i) {
    if (!config.active(i)) continue;
    const size_t si = static_cast<size_t>(i);
    dl_prb[si] = std::min(100.0, 100.0 * offered_dl[si] / cap);
    ul_prb[si] = std::min(100.0, 100.0 * offered_ul[si] / cap);
    if (offered_dl[si] > cap) scale_dl[si] = cap / offered_dl[si];
    if (offered_ul[si] > cap) scale_ul[si] = cap / offered_ul[si];
  }

  // Per-UE allocation and throughput.
  std::vector<double> tput_dl(n_ues, 0.0);
  std::vector<double> tput_ul(n_ues, 0.0);
  double sat_sum = 0.0;
  for (size_t u = 0; u < n_ues; ++u) {
    const int ru = attachment[u];
    if (dl_demand[u] <= 0.0) {
      sat_sum += 1.0;
      continue;
    }
    if (ru == kDetached) continue;  // zero throughput, zero satisfaction
    const size_t si = static_cast<size_t>(ru);
    const double alloc_dl = dl_demand[u] * scale_dl[si];
    const double alloc_ul = dl_demand[u] * ul_per_dl * scale_ul[si];
    tput_dl[u] = alloc_dl * params_.mbps_per_prb;
    tput_ul[u] = alloc_ul * params_.mbps_per_prb;
    sat_sum += std::min(1.0, alloc_dl / dl_demand[u]);
  }

  QosBreakdown q;
  q.demand_satisfaction = n_ues > 0 ? sat_sum / static_cast<double>(n_ues) : 1.0;

  const int active_count = n_active(config);
  double total_offered = 0.0;
  for (int i = 0; i < n; ++i) total_offered += offered_dl[static_cast<size_t>(i)];

  // Throughput score: satisfaction relative to what an even split of the
  // same total load over the same active set would deliver. A network that
  // is starved everywhere equally scores 1; losses caused by concentrating
  // traffic on a subset of RUs score below 1.
  const double ideal_satisfaction =
      total_offered > static_cast<double>(active_count) * cap
          ? static_cast<double>(active_count) * cap / total_offered
          : 1.0;
  q.throughput_score = std::min(1.0, q.demand_satisfaction / ideal_satisfaction);

  // Latency proxy: congestion where offered load concentrates beyond the
  // even-split share of the active set.
  const double fair_share = total_offered / static_cast<double>(active_count);
  double lat_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!config.active(i)) continue;
    const double excess =
        std::max(0.0, (offered_dl[static_cast<size_t>(i)] - fair_share) / cap);
    lat_sum += std::max(0.0, 1.0 - excess);
  }
  q.latency_score = lat_sum / static_cast<double>(active_count);

  q.fairness = jain_index(std::span<const double>(tput_dl));

  double qos = 100.0 * (params_.qos_weight_tput * q.throughput_score +
                        params_.qos_weight_latency * q.latency_score +
                        params_.qos_weight_fairness * q.fairness);
  qos = std::clamp(qos, 0.0, 100.0);
  if (breakdown) *breakdown = q;

  const double power = config_power(config, dl_prb, params_.p_base_w, params_.p_slope_w);

  return NetworkState(config, std::move(dl_prb), std::move(ul_prb),
                      std::vector<int>(attachment.begin(), attachment.end()),
                      std::vector<double>(dl_demand.begin(), dl_demand.end()),
                      std::move(tput_dl), std::move(tput_ul), qos, power);
}

Snapshot DigitalTwin::generate(std::uint64_t snapshot_index) const {
  RngStream rng(scenario_.seed, snapshot_index);
  auto ue_pos = place_ues(rng);
  auto demands = draw_demands(rng);
  auto config = random_config(rng);
  auto attachment = attach(ue_pos, config);
  auto state = load_and_qos(config, attachment, demands);
  return Snapshot{std::move(state), std::move(ue_pos)};
}

std::vector<Snapshot> DigitalTwin::generate_dataset(std::uint64_t n_snapshots,
                                                    int threads) const {
  std::vector<Snapshot> out;
  out.reserve(static_cast<size_t>(n_snapshots));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < n_snapshots; ++i) out.push_back(generate(i));
    return out;
  }
  std::vector<std::unique_ptr<Snapshot>> slots(static_cast<size_t>(n_snapshots));
  parallel_for(n_snapshots, threads, [&](std::uint64_t i) {
    slots[static_cast<size_t>(i)] = std::make_unique<Snapshot>(generate(i));
  });
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

NetworkState DigitalTwin::reattach(const Snapshot& snap, const RuConfig& candidate,
                                   QosBreakdown* breakdown) const {
  const auto attachment = attach(snap.ue_positions, candidate);
  return load_and_qos(candidate, attachment, snap.state.ue_dl_demand, breakdown);
}

}  // namespace oranlb
