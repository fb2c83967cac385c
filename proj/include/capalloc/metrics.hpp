#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "capalloc/network.hpp"

namespace capalloc {

struct MechanismMetrics {
  std::vector<double> utilities;
  double total_utility = 0.0;
  double auctioneer_income = 0.0;
  double r_anc = 0.0;   // allocated / total bidirectional capacity
  double r_unc = 0.0;   // flow-carrying / total bidirectional capacity
  double unfairness = 0.0;
};

struct RunMetrics {
  int scenario_index = 0;
  std::uint64_t seed = 0;
  bool has_aca = false;
  bool has_cca = false;
  MechanismMetrics aca;
  MechanismMetrics cca;
  bool aca_done_by_round2 = false;  // no bids were placed in round 3
};

/// (r_anc, r_unc): allocated and flow-carrying capacity as fractions of the
/// network's total bidirectional capacity.
std::pair<double, double> capacity_ratios(const Network& net,
                                          const std::vector<FlowVector>& allocated,
                                          const std::vector<FlowVector>& used);

/// Spread between the best- and worst-off player.
double unfairness(const std::vector<double>& utilities);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample convention, n-1
};

Stat stat_of(const std::vector<double>& xs);

struct CampaignStats {
  int count = 0;
  Stat ut_aca, ut_cca, ut_diff;
  Stat income_aca, income_cca;
  Stat r_anc_aca, r_unc_aca, r_anc_cca, r_unc_cca;
  Stat uf_aca, uf_cca;
  double frac_aca_negative = 0.0;
  double frac_aca_higher = 0.0;       // runs with U_T_ACA > U_T_CCA
  double frac_done_by_round2 = 0.0;
};

/// Sample means/deviations and the reported fractions. Throws on empty input.
CampaignStats aggregate(const std::vector<RunMetrics>& runs);

/// Stable per-run CSV schema used by campaign outputs.
std::string run_metrics_csv_header();
std::string run_metrics_csv_row(const RunMetrics& r);

}  // namespace capalloc
