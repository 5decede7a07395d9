// Core domain types shared by every module: scenario parameters, RU
// activation masks, per-snapshot network state, and the balance taxonomy.
// All types are immutable after construction and safe to share across
// threads read-only.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oranlb {

/// Attachment sentinel for a UE that no active RU can serve.
inline constexpr int kDetached = -1;

/// File schemas use a fixed-width RU block; scenarios above this size are
/// rejected at the I/O layer, unused columns carry a null marker.
inline constexpr int kMaxFileRus = 8;

/// Static description of one deployment: RU/UE counts, geometry and radio
/// capacity. The seed drives every random draw downstream.
struct Scenario {
  int n_rus = 6;
  int n_ues = 30;
  double dl_fraction = 0.7;   // share of each UE's demand that is downlink
  double area_side_m = 1000.0;
  int prb_per_ru = 100;       // PRB capacity per RU per direction
  std::uint64_t seed = 0;

  void validate() const {
    if (n_rus < 2) throw std::invalid_argument("scenario: n_rus must be >= 2");
    if (n_ues < 1) throw std::invalid_argument("scenario: n_ues must be >= 1");
    if (!(dl_fraction > 0.0 && dl_fraction < 1.0))
      throw std::invalid_argument("scenario: dl_fraction must be in (0,1)");
    if (area_side_m <= 0.0)
      throw std::invalid_argument("scenario: area_side_m must be positive");
    if (prb_per_ru < 1)
      throw std::invalid_argument("scenario: prb_per_ru must be >= 1");
  }
};

/// RU on/off mask. At least one RU must be active; an all-off network is
/// not a constructible state.
class RuConfig {
 public:
  explicit RuConfig(std::vector<bool> mask) : mask_(std::move(mask)) {
    if (mask_.empty()) throw std::invalid_argument("ru config: empty mask");
    bool any = false;
    for (bool b : mask_) any = any || b;
    if (!any) throw std::invalid_argument("ru config: all RUs inactive");
  }

  static RuConfig all_active(int n_rus) {
    return RuConfig(std::vector<bool>(static_cast<size_t>(n_rus), true));
  }

  int size() const { return static_cast<int>(mask_.size()); }
  bool active(int i) const { return mask_[static_cast<size_t>(i)]; }
  const std::vector<bool>& mask() const { return mask_; }

  /// Mask packed into an integer, RU 0 in the least significant bit.
  /// Used for deterministic tie-breaking and compact comparisons.
  std::uint32_t bits() const {
    std::uint32_t b = 0;
    for (size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i]) b |= (1u << i);
    return b;
  }

  /// "1011" with RU 0 first.
  std::string to_string() const {
    std::string s;
    s.reserve(mask_.size());
    for (bool b : mask_) s.push_back(b ? '1' : '0');
    return s;
  }

  static RuConfig from_string(const std::string& s) {
    std::vector<bool> m;
    m.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("ru config: bad mask string '" + s + "'");
      m.push_back(c == '1');
    }
    return RuConfig(std::move(m));
  }

  bool operator==(const RuConfig& other) const = default;

 private:
  std::vector<bool> mask_;
};

/// Number of active RUs in a config. Always >= 1 by construction.
int n_active(const RuConfig& config);

/// One network snapshot: activation mask, per-RU PRB loads, UE attachment
/// and traffic outcome, plus the aggregate QoS score and power draw.
///
/// Invariants enforced at construction:
///   - inactive RUs carry exactly zero load,
///   - every attached UE points at an active RU,
///   - loads are percentages in [0,100], qos in [0,100], power >= 0.
struct NetworkState {
  RuConfig config;
  std::vector<double> dl_prb;      // percent per RU
  std::vector<double> ul_prb;      // percent per RU
  std::vector<int> ue_attach;      // RU index or kDetached
  std::vector<double> ue_dl_demand;  // downlink PRBs requested per UE
  std::vector<double> ue_tput_dl;    // Mbps
  std::vector<double> ue_tput_ul;    // Mbps
  double qos = 0.0;                // [0,100]
  double power_w = 0.0;

  NetworkState(RuConfig cfg, std::vector<double> dl, std::vector<double> ul,
               std::vector<int> attach, std::vector<double> dl_demand,
               std::vector<double> tput_dl, std::vector<double> tput_ul,
               double qos_score, double power);
};

/// The three balance metrics over active RUs (downlink loads).
struct BalanceMetrics {
  double cv = 0.0;    // std/mean, >= 0
  double jain = 1.0;  // in [1/|A|, 1]
  double lif = 0.0;   // max/mean - 1, >= 0
};

/// Balance quality taxonomy. Integer codes are part of the file and model
/// formats: lower code = less balanced.
enum class BalanceCategory : int {
  Imbalanced = 0,
  ModeratelyBalanced = 1,
  WellBalanced = 2,
};

inline constexpr int kNumCategories = 3;

const char* to_string(BalanceCategory c);
BalanceCategory category_from_code(int code);

}  // namespace oranlb
