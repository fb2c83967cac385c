#include "capalloc/campaign.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "capalloc/json_io.hpp"

#ifdef CAPALLOC_HAVE_OPENMP
#include <omp.h>
#endif

namespace capalloc {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, p);
}

}  // namespace

RunMetrics evaluate_scenario(const Network& net, int index, std::uint64_t seed,
                             bool run_aca, bool run_cca, int routes_per_consumer) {
  RunMetrics rm;
  rm.scenario_index = index;
  rm.seed = seed;

  if (run_aca) {
    const auto outcome = run_auction(net, AcaConfig{});
    rm.has_aca = true;
    std::vector<FlowVector> allocated, used;
    for (const auto& p : outcome.players) {
      rm.aca.utilities.push_back(p.utility);
      rm.aca.total_utility += p.utility;
      rm.aca.auctioneer_income += p.capacity_payment;
      allocated.push_back(p.allocation);
      used.push_back(p.final_flows);
    }
    const auto [anc, unc] = capacity_ratios(net, allocated, used);
    rm.aca.r_anc = anc;
    rm.aca.r_unc = unc;
    rm.aca.unfairness = unfairness(rm.aca.utilities);
    rm.aca_done_by_round2 =
        outcome.round_had_bids.size() < 3 || outcome.round_had_bids[2] == 0;
  }

  if (run_cca) {
    const auto inst = build_instance(net, routes_per_consumer);
    const auto result = clear(net, inst);
    const auto payments = vcg_payments(net, inst, result);
    const auto eval = evaluate_cca(net, inst, result, payments);
    rm.has_cca = true;
    for (const auto& p : eval) {
      rm.cca.utilities.push_back(p.utility);
      rm.cca.total_utility += p.utility;
      rm.cca.auctioneer_income += p.capacity_payment;
    }
    // Every accepted unit sits on a complete route, so carried flow equals
    // the allocation and the two ratios coincide exactly.
    const auto [anc, unc] = capacity_ratios(net, result.allocated, result.allocated);
    rm.cca.r_anc = anc;
    rm.cca.r_unc = unc;
    rm.cca.unfairness = unfairness(rm.cca.utilities);
  }
  return rm;
}

namespace {

RunMetrics run_one(const CampaignSpec& spec, int i) {
  const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
  try {
    const auto sc = generate_scenario(spec.config, seed, spec.preset_name);
    return evaluate_scenario(sc.network, i, seed, spec.run_aca, spec.run_cca,
                             spec.config.routes_per_consumer);
  } catch (const std::exception& e) {
    throw std::runtime_error("scenario " + std::to_string(i) + " (seed " + std::to_string(seed) +
                             "): " + e.what());
  }
}

}  // namespace

std::vector<RunMetrics> run_campaign_serial(const CampaignSpec& spec) {
  std::vector<RunMetrics> out(spec.count);
  for (int i = 0; i < spec.count; ++i) out[i] = run_one(spec, i);
  return out;
}

std::vector<RunMetrics> run_campaign_parallel(const CampaignSpec& spec, int workers) {
#ifdef CAPALLOC_HAVE_OPENMP
  std::vector<RunMetrics> out(spec.count);
  bool failed = false;
  std::string what;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers > 0 ? workers : omp_get_max_threads())
  for (int i = 0; i < spec.count; ++i) {
    try {
      out[i] = run_one(spec, i);
    } catch (const std::exception& e) {
#pragma omp critical
      {
        failed = true;
        what = e.what();
      }
    }
  }
  if (failed) throw std::runtime_error("campaign run failed: " + what);
  return out;
#else
  (void)workers;
  return run_campaign_serial(spec);
#endif
}

std::vector<RunMetrics> run_campaign(const CampaignSpec& spec) {
  if (spec.count < 1) throw std::invalid_argument("campaign count must be positive");
  if (spec.workers == 1) return run_campaign_serial(spec);
  return run_campaign_parallel(spec, spec.workers);
}

std::string histogram_csv(const std::vector<double>& values, int bins) {
  std::string out = "bin_lo,bin_hi,count\n";
  if (values.empty()) return out;
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi <= lo) {
    out += fmt(lo) + "," + fmt(hi) + "," + std::to_string(values.size()) + "\n";
    return out;
  }
  std::vector<long> counts(bins, 0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  for (int b = 0; b < bins; ++b) {
    out += fmt(lo + b * width) + "," + fmt(b + 1 == bins ? hi : lo + (b + 1) * width) + "," +
           std::to_string(counts[b]) + "\n";
  }
  return out;
}

void write_campaign_outputs(const CampaignSpec& spec, const std::vector<RunMetrics>& runs) {
  namespace fs = std::filesystem;
  if (spec.out_dir.empty()) throw std::invalid_argument("no output directory");
  fs::create_directories(spec.out_dir);
  const fs::path dir(spec.out_dir);

  {
    std::ofstream csv(dir / "runs.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (dir / "runs.csv").string());
    csv << run_metrics_csv_header() << "\n";
    for (const auto& r : runs) csv << run_metrics_csv_row(r) << "\n";
  }

  const auto stats = aggregate(runs);
  nlohmann::ordered_json j;
  j["preset"] = spec.preset_name;
  j["config"] = {{"n_v", spec.config.n_v},
                 {"n_e", spec.config.n_e},
                 {"n_s", spec.config.n_s},
                 {"routes_per_consumer", spec.config.routes_per_consumer}};
  j["count"] = stats.count;
  j["base_seed"] = spec.base_seed;
  j["stddev_convention"] = "sample (n-1)";
  auto put = [&](const char* name, const Stat& s) {
    j[name] = {{"mean", s.mean}, {"stddev", s.stddev}};
  };
  put("ut_aca", stats.ut_aca);
  put("ut_cca", stats.ut_cca);
  put("ut_diff", stats.ut_diff);
  put("income_aca", stats.income_aca);
  put("income_cca", stats.income_cca);
  put("r_anc_aca", stats.r_anc_aca);
  put("r_unc_aca", stats.r_unc_aca);
  put("r_anc_cca", stats.r_anc_cca);
  put("r_unc_cca", stats.r_unc_cca);
  put("uf_aca", stats.uf_aca);
  put("uf_cca", stats.uf_cca);
  j["frac_ut_aca_negative"] = stats.frac_aca_negative;
  j["frac_ut_aca_higher"] = stats.frac_aca_higher;
  j["frac_aca_done_by_round2"] = stats.frac_done_by_round2;
  {
    std::ofstream js(dir / "summary.json", std::ios::binary);
    js << j.dump(2) << "\n";
  }

  std::vector<double> ut_a, ut_c, diff;
  for (const auto& r : runs) {
    if (r.has_aca) ut_a.push_back(r.aca.total_utility);
    if (r.has_cca) ut_c.push_back(r.cca.total_utility);
    if (r.has_aca && r.has_cca) diff.push_back(r.cca.total_utility - r.aca.total_utility);
  }
  const int bins = 40;
  std::ofstream(dir / "hist_ut_aca.csv", std::ios::binary) << histogram_csv(ut_a, bins);
  std::ofstream(dir / "hist_ut_cca.csv", std::ios::binary) << histogram_csv(ut_c, bins);
  std::ofstream(dir / "hist_ut_diff.csv", std::ios::binary) << histogram_csv(diff, bins);

  if (spec.save_scenarios) {
    fs::create_directories(dir / "scenarios");
    for (const auto& r : runs) {
      const auto sc = generate_scenario(spec.config, r.seed, spec.preset_name);
      char name[32];
      std::snprintf(name, sizeof name, "scenario_%05d.json", r.scenario_index);
      std::ofstream(dir / "scenarios" / name, std::ios::binary)
          << scenario_to_json(sc, spec.config).dump(2) << "\n";
    }
  }
}

}  // namespace capalloc
