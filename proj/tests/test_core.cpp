// Core types, balance metrics and the threshold labeler.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oranlb/core.hpp"
#include "oranlb/labeler.hpp"
#include "oranlb/metrics.hpp"
#include "oranlb/rng.hpp"

using namespace oranlb;

namespace {

NetworkState tiny_state(std::vector<bool> mask, std::vector<double> dl) {
  const size_t n = mask.size();
  int first_active = 0;
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      first_active = static_cast<int>(i);
      break;
    }
  return NetworkState(RuConfig(std::move(mask)), std::move(dl),
                      std::vector<double>(n, 0.0), {first_active}, {1.0}, {1.0},
                      {0.5}, 90.0, 10.0);
}

}  // namespace

TEST_CASE("ru config popcount and invariants") {
  CHECK(n_active(RuConfig({true, true, true, true})) == 4);
  CHECK(n_active(RuConfig({true, false, true, false, true, false})) == 3);
  CHECK_THROWS_AS(RuConfig({false, false, false, false}), std::invalid_argument);
  CHECK_THROWS_AS(RuConfig({}), std::invalid_argument);

  const RuConfig c({true, false, true, true});
  CHECK(c.to_string() == "1011");
  CHECK(RuConfig::from_string("1011") == c);
  CHECK(c.bits() == 0b1101u);  // RU 0 is the least significant bit
  CHECK_THROWS_AS(RuConfig::from_string("10x1"), std::invalid_argument);
}

TEST_CASE("network state construction enforces invariants") {
  CHECK_NOTHROW(tiny_state({true, true}, {10.0, 20.0}));
  // inactive RU carrying load
  CHECK_THROWS_AS(tiny_state({true, false}, {10.0, 20.0}), std::invalid_argument);
  // attachment to an inactive RU
  CHECK_THROWS_AS(NetworkState(RuConfig({true, false}), {10.0, 0.0}, {0.0, 0.0},
                               {1}, {1.0}, {1.0}, {0.5}, 90.0, 10.0),
                  std::invalid_argument);
  // load out of range
  CHECK_THROWS_AS(tiny_state({true, true}, {10.0, 120.0}), std::invalid_argument);
  // qos out of range
  CHECK_THROWS_AS(NetworkState(RuConfig({true}), {10.0}, {0.0}, {0}, {1.0},
                               {1.0}, {0.5}, 101.0, 10.0),
                  std::invalid_argument);
  // detached UE is fine
  CHECK_NOTHROW(NetworkState(RuConfig({true, false}), {10.0, 0.0}, {0.0, 0.0},
                             {kDetached}, {1.0}, {0.0}, {0.0}, 90.0, 10.0));
}

TEST_CASE("category codes are stable") {
  CHECK(static_cast<int>(BalanceCategory::Imbalanced) == 0);
  CHECK(static_cast<int>(BalanceCategory::ModeratelyBalanced) == 1);
  CHECK(static_cast<int>(BalanceCategory::WellBalanced) == 2);
  CHECK(category_from_code(2) == BalanceCategory::WellBalanced);
  CHECK_THROWS_AS(category_from_code(3), std::invalid_argument);
}

TEST_CASE("coefficient of variation") {
  CHECK(coefficient_of_variation(std::vector<double>{50, 50, 50}) == 0.0);
  CHECK(coefficient_of_variation(std::vector<double>{20, 40, 60}) ==
        doctest::Approx(0.408248).epsilon(1e-5));
  CHECK(coefficient_of_variation(std::vector<double>{90, 5, 5}) ==
        doctest::Approx(1.202082).epsilon(1e-5));
  CHECK(coefficient_of_variation(std::vector<double>{0, 0}) == 0.0);
  CHECK_THROWS_AS(coefficient_of_variation(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("jain index") {
  CHECK(jain_index(std::vector<double>{50, 50, 50}) == 1.0);
  CHECK(jain_index(std::vector<double>{100, 0, 0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(jain_index(std::vector<double>{20, 40, 60}) ==
        doctest::Approx(14400.0 / 16800.0).epsilon(1e-12));
  CHECK(jain_index(std::vector<double>{0, 0, 0}) == 1.0);
  CHECK_THROWS_AS(jain_index(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("load imbalance factor") {
  CHECK(load_imbalance_factor(std::vector<double>{50, 50, 50}) == 0.0);
  CHECK(load_imbalance_factor(std::vector<double>{20, 40, 60}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(load_imbalance_factor(std::vector<double>{100, 0}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(load_imbalance_factor(std::vector<double>{0, 0}) == 0.0);
}

TEST_CASE("metrics over a state filter by the activation mask") {
  const auto m = compute_metrics(tiny_state({true, true, true, false}, {20, 40, 60, 0}));
  CHECK(m.cv == doctest::Approx(0.408248).epsilon(1e-5));
  CHECK(m.jain == doctest::Approx(0.857143).epsilon(1e-5));
  CHECK(m.lif == doctest::Approx(0.5).epsilon(1e-12));

  const auto single = compute_metrics(tiny_state({false, true}, {0, 73.0}));
  CHECK(single.cv == 0.0);
  CHECK(single.jain == 1.0);
  CHECK(single.lif == 0.0);
}

TEST_CASE("metric identities and invariances on random vectors") {
  RngStream rng(2024, 0);
  for (int iter = 0; iter < 2000; ++iter) {
    const int n = 1 + static_cast<int>(rng.uniform_int(8));
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.0, 100.0);

    const double cv = coefficient_of_variation(v);
    const double jain = jain_index(v);
    const double lif = load_imbalance_factor(v);

    CHECK(cv >= 0.0);
    CHECK(jain <= 1.0);
    CHECK(jain >= 1.0 / n - 1e-12);
    CHECK(lif >= 0.0);
    CHECK(lif <= n - 1 + 1e-12);

    // Algebraic identity with the population sigma convention.
    CHECK(jain == doctest::Approx(1.0 / (1.0 + cv * cv)).epsilon(1e-9));

    // Permutation invariance is exact (inputs are sorted internally).
    auto shuffled = v;
    rng.shuffle(shuffled);
    CHECK(coefficient_of_variation(shuffled) == cv);
    CHECK(jain_index(shuffled) == jain);
    CHECK(load_imbalance_factor(shuffled) == lif);

    // Power-of-two scaling is exact; arbitrary scaling within 1e-12.
    auto doubled = v;
    for (auto& x : doubled) x *= 4.0;
    CHECK(coefficient_of_variation(doubled) == cv);
    CHECK(jain_index(doubled) == jain);
    CHECK(load_imbalance_factor(doubled) == lif);

    auto scaled = v;
    for (auto& x : scaled) x *= 3.7;
    CHECK(coefficient_of_variation(scaled) == doctest::Approx(cv).epsilon(1e-12));
  }
}

TEST_CASE("builtin policies carry the published parameter sets") {
  const auto c = builtin_policy(PolicyName::Conservative);
  CHECK(c.cv_well_max == 0.3);
  CHECK(c.jain_well_min == 0.8);
  CHECK(c.lif_well_max == 1.0);
  CHECK(c.cv_moderate_max == 0.5);
  CHECK(c.jain_moderate_min == 0.7);

  const auto m = builtin_policy(PolicyName::Moderate);
  CHECK(m.cv_well_max == 0.5);
  CHECK(m.jain_well_min == 0.7);
  CHECK(m.lif_well_max == 1.5);
  CHECK(m.cv_moderate_max == 0.7);
  CHECK(m.jain_moderate_min == 0.6);

  const auto a = builtin_policy(PolicyName::Aggressive);
  CHECK(a.cv_well_max == 0.7);
  CHECK(a.jain_well_min == 0.6);
  CHECK(a.lif_well_max == 2.0);
  CHECK(a.cv_moderate_max == 0.9);
  CHECK(a.jain_moderate_min == 0.5);

  CHECK(policy_from_string("AGGRESSIVE").name == PolicyName::Aggressive);
  CHECK(policy_from_string("Moderate").name == PolicyName::Moderate);
  CHECK_THROWS_AS(policy_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("classification rule") {
  const auto conservative = builtin_policy(PolicyName::Conservative);
  const auto moderate = builtin_policy(PolicyName::Moderate);
  const auto aggressive = builtin_policy(PolicyName::Aggressive);

  // Perfect balance is Well Balanced under every policy.
  for (const auto& p : {conservative, moderate, aggressive})
    CHECK(classify({0.0, 1.0, 0.0}, p) == BalanceCategory::WellBalanced);

  // The [20,40,60] metric triple flips category across policies.
  const BalanceMetrics m{0.408248, 0.857143, 0.5};
  CHECK(classify(m, moderate) == BalanceCategory::WellBalanced);
  CHECK(classify(m, conservative) == BalanceCategory::ModeratelyBalanced);

  CHECK(classify({1.202082, 0.409, 1.7}, aggressive) == BalanceCategory::Imbalanced);

  // Boundary semantics: cv exactly at the bound is inclusive.
  CHECK(classify({0.3, 0.9, 0.5}, conservative) == BalanceCategory::WellBalanced);
  CHECK(classify({0.3 + 1e-9, 0.9, 0.5}, conservative) ==
        BalanceCategory::ModeratelyBalanced);

  // The moderate jain disjunct applies even when cv is past the moderate cap.
  CHECK(classify({1.2, 0.65, 0.9}, moderate) == BalanceCategory::ModeratelyBalanced);
}

TEST_CASE("well-balanced nesting across policies") {
  const auto conservative = builtin_policy(PolicyName::Conservative);
  const auto moderate = builtin_policy(PolicyName::Moderate);
  const auto aggressive = builtin_policy(PolicyName::Aggressive);

  RngStream rng(77, 1);
  int violations = 0;
  for (int i = 0; i < 20000; ++i) {
    const BalanceMetrics m{rng.uniform(0.0, 3.0), rng.uniform(0.0, 1.0),
                           rng.uniform(0.0, 6.0)};
    const bool wb_c = classify(m, conservative) == BalanceCategory::WellBalanced;
    const bool wb_m = classify(m, moderate) == BalanceCategory::WellBalanced;
    const bool wb_a = classify(m, aggressive) == BalanceCategory::WellBalanced;
    if (wb_c && !wb_m) ++violations;
    if (wb_m && !wb_a) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("label_dataset is elementwise and order-preserving") {
  const auto policy = builtin_policy(PolicyName::Moderate);
  CHECK(label_dataset(std::vector<NetworkState>{}, policy).empty());

  std::vector<NetworkState> states;
  states.push_back(tiny_state({true, true, true, false}, {20, 40, 60, 0}));
  states.push_back(tiny_state({true, true}, {50, 50}));
  const auto labels = label_dataset(states, policy);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == classify(compute_metrics(states[0]), policy));
  CHECK(labels[1] == BalanceCategory::WellBalanced);
}
