#include "oranlb/core.hpp"

#include <cmath>

namespace oranlb {

int n_active(const RuConfig& config) {
  int count = 0;
  for (int i = 0; i < config.size(); ++i)
    if (config.active(i)) ++count;
  return count;
}

namespace {

bool in_unit_percent(double v) { return v >= 0.0 && v <= 100.0 && std::isfinite(v); }

}  // namespace

NetworkState::NetworkState(RuConfig cfg, std::vector<double> dl,
                           std::vector<double> ul, std::vector<int> attach,
                           std::vector<double> dl_demand,
                           std::vector<double> tput_dl,
                           std::vector<double> tput_ul, double qos_score,
                           double power)
    : config(std::move(cfg)),
      dl_prb(std::move(dl)),
      ul_prb(std::move(ul)),
      ue_attach(std::move(attach)),
      ue_dl_demand(std::move(dl_demand)),
      ue_tput_dl(std::move(tput_dl)),
      ue_tput_ul(std::move(tput_ul)),
      qos(qos_score),
      power_w(power) {
  const size_t n = static_cast<size_t>(config.size());
  if (dl_prb.size() != n || ul_prb.size() != n)
    throw std::invalid_argument("network state: load vector size mismatch");
  const size_t u = ue_attach.size();
  if (ue_dl_demand.size() != u || ue_tput_dl.size() != u || ue_tput_ul.size() != u)
    throw std::invalid_argument("network state: UE vector size mismatch");

  for (size_t i = 0; i < n; ++i) {
    if (!in_unit_percent(dl_prb[i]) || !in_unit_percent(ul_prb[i]))
      throw std::invalid_argument("network state: PRB load outside [0,100]");
    if (!config.active(static_cast<int>(i)) && (dl_prb[i] != 0.0 || ul_prb[i] != 0.0))
      throw std::invalid_argument("network state: inactive RU carries load");
  }
  for (int a : ue_attach) {
    if (a == kDetached) continue;
    if (a < 0 || a >= config.size() || !config.active(a))
      throw std::invalid_argument("network state: UE attached to inactive RU");
  }
  if (!in_unit_percent(qos))
    throw std::invalid_argument("network state: qos outside [0,100]");
  if (!(power_w >= 0.0) || !std::isfinite(power_w))
    throw std::invalid_argument("network state: negative power");
}

const char* to_string(BalanceCategory c) {
  switch (c) {
    case BalanceCategory::Imbalanced: return "Imbalanced";
    case BalanceCategory::ModeratelyBalanced: return "ModeratelyBalanced";
    case BalanceCategory::WellBalanced: return "WellBalanced";
  }
  return "?";
}

BalanceCategory category_from_code(int code) {
  if (code < 0 || code >= kNumCategories)
    throw std::invalid_argument("balance category: bad code " + std::to_string(code));
  return static_cast<BalanceCategory>(code);
}

}  // namespace oranlb
