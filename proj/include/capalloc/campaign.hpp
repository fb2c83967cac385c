#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capalloc/aca.hpp"
#include "capalloc/cca.hpp"
#include "capalloc/metrics.hpp"
#include "capalloc/scenario.hpp"

namespace capalloc {

struct CampaignSpec {
  ScenarioConfig config;
  std::string preset_name = "small";
  int count = 1;
  std::uint64_t base_seed = 0;
  bool run_aca = true;
  bool run_cca = true;
  std::string out_dir;
  int workers = 0;  // 0: hardware default
  bool save_scenarios = false;
};

/// Both mechanisms evaluated on one network; pure function of its inputs.
RunMetrics evaluate_scenario(const Network& net, int index, std::uint64_t seed,
                             bool run_aca, bool run_cca, int routes_per_consumer);

/// Serial reference runner: scenario seeds base_seed, base_seed+1, ...
std::vector<RunMetrics> run_campaign_serial(const CampaignSpec& spec);

/// OpenMP runner; produces the same RunMetrics vector as the serial
/// reference for any worker count.
std::vector<RunMetrics> run_campaign_parallel(const CampaignSpec& spec, int workers);

/// Dispatches on spec.workers (1 selects the serial reference).
std::vector<RunMetrics> run_campaign(const CampaignSpec& spec);

/// Writes runs.csv, summary.json and the histogram bin files for
/// U_T_ACA, U_T_CCA and their difference into spec.out_dir.
void write_campaign_outputs(const CampaignSpec& spec, const std::vector<RunMetrics>& runs);

/// (bin_lo, bin_hi, count) rows over uniform bins spanning the data.
std::string histogram_csv(const std::vector<double>& values, int bins);

}  // namespace capalloc
