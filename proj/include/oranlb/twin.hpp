// Digital twin: generates network snapshots for a scenario. Places RUs on a
// deterministic grid, scatters UEs uniformly, attaches each UE to the
// strongest active RU under a distance power law, and derives PRB loads,
// per-UE throughput, a composite QoS score and total RU power.
//
// Every snapshot index maps to its own random stream, so generation is
// reproducible bit-for-bit regardless of thread count.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/rng.hpp"

namespace oranlb {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Twin model parameters. Zero-valued demand_mean_prb and empty ru_positions
/// mean "derive from the scenario" (see DigitalTwin constructor).
struct TwinParams {
  double pathloss_exponent = 3.5;
  std::vector<Vec2> ru_positions;  // empty: grid layout over the area
  double demand_mean_prb = 0.0;    // mean downlink PRB demand per UE; 0: auto
  double demand_sigma = 1.4;       // lognormal shape (sigma of underlying normal)
  double p_base_w = 4.0;           // idle draw per active RU
  double p_slope_w = 2.0;          // extra watts per active RU at 100% load
  double qos_weight_tput = 0.5;
  double qos_weight_latency = 0.3;
  double qos_weight_fairness = 0.2;
  double coverage_radius_m = 0.0;  // 0: unlimited (no detached UEs)
  double mbps_per_prb = 1.0;

  void validate() const;
};

/// QoS component scores in [0,1], exposed for tests and reports.
///
/// The QoS score measures how much service quality the current RU
/// configuration loses to load concentration, against the best the active
/// set could do if traffic were spread evenly:
///   - throughput_score: demand satisfaction relative to the even-split
///     ideal at the same total load and active count;
///   - latency_score: congestion where an RU's offered load exceeds its
///     even-split share of the total;
///   - fairness: Jain index of per-UE downlink throughput.
/// demand_satisfaction carries the raw mean allocated/demanded ratio the
/// throughput score is derived from.
struct QosBreakdown {
  double throughput_score = 1.0;
  double latency_score = 1.0;
  double fairness = 1.0;
  double demand_satisfaction = 1.0;
};

/// A generated snapshot plus the UE geometry needed for what-if
/// re-attachment under a different activation mask.
struct Snapshot {
  NetworkState state;
  std::vector<Vec2> ue_positions;
};

/// Power draw for a mask and per-RU downlink loads: each active RU burns
/// p_base plus p_slope scaled by its load fraction.
double config_power(const RuConfig& config, std::span<const double> dl_prb,
                    double p_base_w, double p_slope_w);

class DigitalTwin {
 public:
  DigitalTwin(Scenario scenario, TwinParams params);

  const Scenario& scenario() const { return scenario_; }
  const TwinParams& params() const { return params_; }

  /// Deterministic near-square grid covering the area, row-major RU order.
  static std::vector<Vec2> grid_layout(int n_rus, double area_side_m);

  std::vector<Vec2> place_ues(RngStream& rng) const;

  /// Per-UE downlink demand in PRBs, lognormal.
  std::vector<double> draw_demands(RngStream& rng) const;

  /// Nearest-active-RU attachment (max received power under the distance
  /// power law; ties go to the lowest RU index). A UE farther than the
  /// coverage radius from every active RU is kDetached.
  std::vector<int> attach(std::span<const Vec2> ue_positions,
                          const RuConfig& config) const;

  /// Random non-empty mask, stratified: active count uniform over {1..N},
  /// then a uniform mask of that count.
  RuConfig random_config(RngStream& rng) const;

  /// Derives loads, throughput, QoS and power from an attachment and demand
  /// vector. Overloaded RUs scale every attached UE's allocation by
  /// capacity/offered (proportional fair share).
  NetworkState load_and_qos(const RuConfig& config, std::span<const int> attachment,
                            std::span<const double> dl_demand,
                            QosBreakdown* breakdown = nullptr) const;

  /// Snapshot i from stream (scenario.seed, i): fresh UE placement, fresh
  /// demands, random activation mask.
  Snapshot generate(std::uint64_t snapshot_index) const;

  std::vector<Snapshot> generate_dataset(std::uint64_t n_snapshots,
                                         int threads = 1) const;

  /// What-if evaluation: same UEs and demands, different mask.
  NetworkState reattach(const Snapshot& snap, const RuConfig& candidate,
                        QosBreakdown* breakdown = nullptr) const;

 private:
  Scenario scenario_;
  TwinParams params_;
};

}  // namespace oranlb
