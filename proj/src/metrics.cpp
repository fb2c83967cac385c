#include "capalloc/metrics.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace capalloc {

namespace {

// Shortest round-trip formatting, locale independent; keeps campaign output
// byte-stable.
std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, p);
}

}  // namespace

std::pair<double, double> capacity_ratios(const Network& net,
                                          const std::vector<FlowVector>& allocated,
                                          const std::vector<FlowVector>& used) {
  const double denom = net.total_bidirectional_capacity();
  if (denom <= 0) return {0.0, 0.0};
  double alloc_sum = 0.0, used_sum = 0.0;
  for (const auto& v : allocated) {
    for (double q : v) alloc_sum += q;
  }
  for (const auto& v : used) {
    for (double q : v) used_sum += q;
  }
  return {alloc_sum / denom, used_sum / denom};
}

double unfairness(const std::vector<double>& utilities) {
  if (utilities.empty()) throw std::invalid_argument("no utilities");
  double lo = utilities[0], hi = utilities[0];
  for (double u : utilities) {
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  return hi - lo;
}

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

CampaignStats aggregate(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  CampaignStats cs;
  cs.count = static_cast<int>(runs.size());
  std::vector<double> ut_a, ut_c, diff, inc_a, inc_c, ranc_a, runc_a, ranc_c, runc_c, uf_a, uf_c;
  int negatives = 0, higher = 0, done_by_2 = 0, aca_runs = 0, both_runs = 0;
  for (const auto& r : runs) {
    if (r.has_aca) {
      ++aca_runs;
      ut_a.push_back(r.aca.total_utility);
      inc_a.push_back(r.aca.auctioneer_income);
      ranc_a.push_back(r.aca.r_anc);
      runc_a.push_back(r.aca.r_unc);
      uf_a.push_back(r.aca.unfairness);
      if (r.aca.total_utility < 0) ++negatives;
      if (r.aca_done_by_round2) ++done_by_2;
    }
    if (r.has_cca) {
      ut_c.push_back(r.cca.total_utility);
      inc_c.push_back(r.cca.auctioneer_income);
      ranc_c.push_back(r.cca.r_anc);
      runc_c.push_back(r.cca.r_unc);
      uf_c.push_back(r.cca.unfairness);
    }
    if (r.has_aca && r.has_cca) {
      ++both_runs;
      diff.push_back(r.cca.total_utility - r.aca.total_utility);
      if (r.aca.total_utility > r.cca.total_utility) ++higher;
    }
  }
  cs.ut_aca = stat_of(ut_a);
  cs.ut_cca = stat_of(ut_c);
  cs.ut_diff = stat_of(diff);
  cs.income_aca = stat_of(inc_a);
  cs.income_cca = stat_of(inc_c);
  cs.r_anc_aca = stat_of(ranc_a);
  cs.r_unc_aca = stat_of(runc_a);
  cs.r_anc_cca = stat_of(ranc_c);
  cs.r_unc_cca = stat_of(runc_c);
  cs.uf_aca = stat_of(uf_a);
  cs.uf_cca = stat_of(uf_c);
  if (aca_runs > 0) {
    cs.frac_aca_negative = static_cast<double>(negatives) / aca_runs;
    cs.frac_done_by_round2 = static_cast<double>(done_by_2) / aca_runs;
  }
  if (both_runs > 0) cs.frac_aca_higher = static_cast<double>(higher) / both_runs;
  return cs;
}

std::string run_metrics_csv_header() {
  return "scenario_index,seed,ut_aca,ut_cca,income_aca,income_cca,"
         "r_anc_aca,r_unc_aca,r_anc_cca,r_unc_cca,uf_aca,uf_cca,aca_done_by_round2";
}

std::string run_metrics_csv_row(const RunMetrics& r) {
  auto check_ratio = [](double x) {
    if (x < -1e-12 || x > 1.0 + 1e-9) throw std::logic_error("capacity ratio out of range");
  };
  auto check_mech = [&](const MechanismMetrics& m) {
    check_ratio(m.r_anc);
    check_ratio(m.r_unc);
    if (m.r_unc > m.r_anc + 1e-9) throw std::logic_error("used exceeds allocated capacity");
    if (m.unfairness < 0) throw std::logic_error("negative unfairness");
  };
  if (r.has_aca) check_mech(r.aca);
  if (r.has_cca) check_mech(r.cca);

  std::string row = std::to_string(r.scenario_index) + "," + std::to_string(r.seed);
  auto push = [&](bool present, double v) { row += ","; row += present ? fmt(v) : ""; };
  push(r.has_aca, r.aca.total_utility);
  push(r.has_cca, r.cca.total_utility);
  push(r.has_aca, r.aca.auctioneer_income);
  push(r.has_cca, r.cca.auctioneer_income);
  push(r.has_aca, r.aca.r_anc);
  push(r.has_aca, r.aca.r_unc);
  push(r.has_cca, r.cca.r_anc);
  push(r.has_cca, r.cca.r_unc);
  push(r.has_aca, r.aca.unfairness);
  push(r.has_cca, r.cca.unfairness);
  row += ",";
  row += r.has_aca ? (r.aca_done_by_round2 ? "1" : "0") : "";
  return row;
}

}  // namespace capalloc
