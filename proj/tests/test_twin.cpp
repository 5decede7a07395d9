// Digital twin: placement, attachment, load/QoS/power derivation and
// deterministic dataset generation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "oranlb/labeler.hpp"
#include "oranlb/metrics.hpp"
#include "oranlb/rng.hpp"
#include "oranlb/twin.hpp"

using namespace oranlb;

namespace {

Scenario scenario_n(int n_rus, std::uint64_t seed = 42) {
  Scenario s;
  s.n_rus = n_rus;
  s.seed = seed;
  return s;
}

bool states_equal(const NetworkState& a, const NetworkState& b) {
  return a.config == b.config && a.dl_prb == b.dl_prb && a.ul_prb == b.ul_prb &&
         a.ue_attach == b.ue_attach && a.ue_dl_demand == b.ue_dl_demand &&
         a.ue_tput_dl == b.ue_tput_dl && a.ue_tput_ul == b.ue_tput_ul &&
         a.qos == b.qos && a.power_w == b.power_w;
}

}  // namespace

TEST_CASE("grid layout covers the area deterministically") {
  const auto p4 = DigitalTwin::grid_layout(4, 1000.0);
  REQUIRE(p4.size() == 4);
  CHECK(p4[0].x == doctest::Approx(250.0));
  CHECK(p4[0].y == doctest::Approx(250.0));
  CHECK(p4[1].x == doctest::Approx(750.0));
  CHECK(p4[3].y == doctest::Approx(750.0));

  for (int n : {2, 3, 5, 6, 7, 8}) {
    const auto p = DigitalTwin::grid_layout(n, 1000.0);
    REQUIRE(p.size() == static_cast<size_t>(n));
    std::set<std::pair<double, double>> uniq;
    for (const auto& v : p) {
      CHECK(v.x >= 0.0);
      CHECK(v.x <= 1000.0);
      CHECK(v.y >= 0.0);
      CHECK(v.y <= 1000.0);
      uniq.insert({v.x, v.y});
    }
    CHECK(uniq.size() == static_cast<size_t>(n));
  }
}

TEST_CASE("ue placement is uniform over the area and seed-deterministic") {
  const DigitalTwin twin(scenario_n(4, 42), {});
  RngStream r1(42, 0), r2(42, 0), r3(43, 0);
  const auto a = twin.place_ues(r1);
  const auto b = twin.place_ues(r2);
  const auto c = twin.place_ues(r3);
  REQUIRE(a.size() == 30);
  for (const auto& p : a) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= 1000.0);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= 1000.0);
  }
  bool identical = true, differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    identical = identical && a[i].x == b[i].x && a[i].y == b[i].y;
    differs = differs || a[i].x != c[i].x || a[i].y != c[i].y;
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("attachment picks the strongest active RU") {
  Scenario scn = scenario_n(4);
  TwinParams params;
  const DigitalTwin twin(scn, params);
  const auto& rus = twin.params().ru_positions;

  // UE sitting on RU 2 attaches there while RU 2 is active.
  std::vector<Vec2> ues = {rus[2]};
  auto all_on = RuConfig::all_active(4);
  CHECK(twin.attach(ues, all_on) == std::vector<int>{2});

  // With RU 2 off it moves to the nearest remaining active RU.
  RuConfig without2(std::vector<bool>{true, true, false, true});
  const auto moved = twin.attach(ues, without2);
  REQUIRE(moved.size() == 1);
  CHECK(moved[0] != 2);
  double best = 1e300;
  int expected = -1;
  for (int i : {0, 1, 3}) {
    const double dx = ues[0].x - rus[static_cast<size_t>(i)].x;
    const double dy = ues[0].y - rus[static_cast<size_t>(i)].y;
    const double d = std::hypot(dx, dy);
    if (d < best) {
      best = d;
      expected = i;
    }
  }
  CHECK(moved[0] == expected);
}

TEST_CASE("attachment agrees with a brute-force nearest-active scan") {
  const DigitalTwin twin(scenario_n(4, 7), {});
  const auto& rus = twin.params().ru_positions;
  RngStream rng(7, 99);
  for (int iter = 0; iter < 50; ++iter) {
    auto config = twin.random_config(rng);
    std::vector<Vec2> ues(20);
    for (auto& u : ues) {
      u.x = rng.uniform(0.0, 1000.0);
      u.y = rng.uniform(0.0, 1000.0);
    }
    const auto got = twin.attach(ues, config);
    for (size_t u = 0; u < ues.size(); ++u) {
      int expected = kDetached;
      double best = 1e300;
      for (int i = 0; i < 4; ++i) {
        if (!config.active(i)) continue;
        const double d = std::hypot(ues[u].x - rus[static_cast<size_t>(i)].x,
                                    ues[u].y - rus[static_cast<size_t>(i)].y);
        if (d < best) {
          best = d;
          expected = i;
        }
      }
      CHECK(got[u] == expected);
    }
  }
}

TEST_CASE("a finite coverage radius detaches out-of-range UEs") {
  Scenario scn = scenario_n(4);
  TwinParams params;
  params.coverage_radius_m = 50.0;
  const DigitalTwin twin(scn, params);
  std::vector<Vec2> ues = {{0.0, 0.0}};  // corner, ~354m from the nearest RU
  const auto att = twin.attach(ues, RuConfig::all_active(4));
  CHECK(att[0] == kDetached);
}

TEST_CASE("idle network scores a perfect qos") {
  const DigitalTwin twin(scenario_n(4), {});
  const auto config = RuConfig::all_active(4);
  std::vector<Vec2> ues(30, Vec2{500.0, 500.0});
  const auto att = twin.attach(ues, config);
  QosBreakdown q;
  const auto state =
      twin.load_and_qos(config, att, std::vector<double>(30, 0.0), &q);
  for (double p : state.dl_prb) CHECK(p == 0.0);
  CHECK(q.demand_satisfaction == 1.0);
  CHECK(q.fairness == 1.0);
  CHECK(state.qos == 100.0);
}

TEST_CASE("overloaded single RU halves every allocation") {
  Scenario scn = scenario_n(2);
  scn.n_ues = 10;
  TwinParams params;
  const DigitalTwin twin(scn, params);
  // Only RU 0 active; demands sum to exactly twice the capacity.
  RuConfig config(std::vector<bool>{true, false});
  std::vector<int> att(10, 0);
  std::vector<double> demand(10, 20.0);  // 200 PRB offered vs 100 capacity
  QosBreakdown q;
  const auto state = twin.load_and_qos(config, att, demand, &q);
  CHECK(state.dl_prb[0] == 100.0);
  CHECK(q.demand_satisfaction == doctest::Approx(0.5).epsilon(1e-12));
  for (double t : state.ue_tput_dl)
    CHECK(t == doctest::Approx(10.0 * params.mbps_per_prb).epsilon(1e-12));
  // Starvation is even, so no balance-attributable loss.
  CHECK(q.throughput_score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.latency_score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("allocation conservation per RU") {
  const DigitalTwin twin(scenario_n(6, 11), {});
  const double cap = 100.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto snap = twin.generate(i);
    const auto& st = snap.state;
    std::vector<double> allocated(6, 0.0);
    for (size_t u = 0; u < st.ue_attach.size(); ++u)
      if (st.ue_attach[u] != kDetached)
        allocated[static_cast<size_t>(st.ue_attach[u])] +=
            st.ue_tput_dl[u] / twin.params().mbps_per_prb;
    for (int ru = 0; ru < 6; ++ru) {
      CHECK(allocated[static_cast<size_t>(ru)] <= cap * (1 + 1e-9));
      const bool full = std::abs(st.dl_prb[static_cast<size_t>(ru)] - 100.0) < 1e-9;
      if (full)
        CHECK(allocated[static_cast<size_t>(ru)] == doctest::Approx(cap).epsilon(1e-9));
      else if (st.config.active(ru))
        CHECK(allocated[static_cast<size_t>(ru)] <= cap);
    }
    CHECK(st.qos >= 0.0);
    CHECK(st.qos <= 100.0);
  }
}

TEST_CASE("power model matches the closed form") {
  // Six active RUs at 40% load with the default coefficients.
  RuConfig config = RuConfig::all_active(6);
  std::vector<double> loads(6, 40.0);
  CHECK(config_power(config, loads, 4.0, 2.0) == doctest::Approx(28.8).epsilon(1e-12));

  // An inactive RU contributes nothing even if a stale load is passed.
  RuConfig partial(std::vector<bool>{true, false, true});
  const std::vector<double> stale = {50.0, 70.0, 0.0};
  CHECK(config_power(partial, stale, 4.0, 2.0) ==
        doctest::Approx(4.0 + 2.0 * 0.5 + 4.0).epsilon(1e-12));
}

TEST_CASE("power never increases when an RU is deactivated at fixed loads") {
  const DigitalTwin twin(scenario_n(6, 5), {});
  for (std::uint64_t i = 0; i < 300; ++i) {
    const auto snap = twin.generate(i);
    const auto& st = snap.state;
    if (n_active(st.config) < 2) continue;
    const double base = config_power(st.config, st.dl_prb, twin.params().p_base_w,
                                     twin.params().p_slope_w);
    for (int ru = 0; ru < st.config.size(); ++ru) {
      if (!st.config.active(ru)) continue;
      auto mask = st.config.mask();
      mask[static_cast<size_t>(ru)] = false;
      auto loads = st.dl_prb;
      loads[static_cast<size_t>(ru)] = 0.0;
      CHECK(config_power(RuConfig(mask), loads, twin.params().p_base_w,
                         twin.params().p_slope_w) <= base);
    }
  }
}

TEST_CASE("balanced and fully served network scores 100") {
  Scenario scn = scenario_n(2);
  scn.n_ues = 4;
  const DigitalTwin twin(scn, {});
  const auto& rus = twin.params().ru_positions;
  // Two UEs pinned on each RU with identical demands: symmetric, no overload.
  std::vector<Vec2> ues = {rus[0], rus[0], rus[1], rus[1]};
  const auto config = RuConfig::all_active(2);
  const auto att = twin.attach(ues, config);
  QosBreakdown q;
  const auto state = twin.load_and_qos(config, att, std::vector<double>(4, 10.0), &q);
  CHECK(state.qos == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(q.fairness == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generation is deterministic and stratified over active counts") {
  const DigitalTwin twin(scenario_n(4, 123), {});

  const auto a = twin.generate_dataset(500, 1);
  const auto b = twin.generate_dataset(500, 1);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(states_equal(a[i].state, b[i].state));

  std::set<int> counts;
  for (const auto& s : a) counts.insert(n_active(s.state.config));
  CHECK(counts == std::set<int>{1, 2, 3, 4});

  // A different seed changes the stream.
  const DigitalTwin other(scenario_n(4, 124), {});
  CHECK_FALSE(states_equal(other.generate(0).state, a[0].state));
}

TEST_CASE("parallel generation equals serial generation") {
  const DigitalTwin twin(scenario_n(6, 9), {});
  const auto serial = twin.generate_dataset(400, 1);
  const auto parallel = twin.generate_dataset(400, 4);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i)
    CHECK(states_equal(serial[i].state, parallel[i].state));
}

TEST_CASE("generated labels cover all three categories") {
  const DigitalTwin twin(scenario_n(6, 31), {});
  const auto policy = builtin_policy(PolicyName::Moderate);
  std::set<BalanceCategory> seen;
  for (std::uint64_t i = 0; i < 10000 && seen.size() < 3; ++i)
    seen.insert(classify(compute_metrics(twin.generate(i).state), policy));
  CHECK(seen.size() == 3);
}

TEST_CASE("reattach with the current mask reproduces the state") {
  const DigitalTwin twin(scenario_n(5, 17), {});
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto snap = twin.generate(i);
    const auto again = twin.reattach(snap, snap.state.config);
    CHECK(states_equal(snap.state, again));
  }
}

TEST_CASE("twin parameter validation") {
  TwinParams bad;
  bad.qos_weight_tput = 0.6;  // weights no longer sum to 1
  CHECK_THROWS_AS(DigitalTwin(scenario_n(4), bad), std::invalid_argument);

  TwinParams wrong_pos;
  wrong_pos.ru_positions = {{1.0, 1.0}};
  CHECK_THROWS_AS(DigitalTwin(scenario_n(4), wrong_pos), std::invalid_argument);

  Scenario degenerate = scenario_n(1);
  CHECK_THROWS_AS(DigitalTwin(degenerate, TwinParams{}), std::invalid_argument);
}
