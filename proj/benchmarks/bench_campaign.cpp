// Compares the serial reference campaign runner with the OpenMP one and
// verifies they produce identical rows.
#include <chrono>
#include <cstdio>
#include <string>

#include "capalloc/campaign.hpp"

using namespace capalloc;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CampaignSpec spec;
  spec.preset_name = argc > 1 ? argv[1] : "small";
  spec.config = preset(spec.preset_name);
  spec.count = argc > 2 ? std::stoi(argv[2]) : 20;
  spec.base_seed = 1;

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = run_campaign_serial(spec);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = run_campaign_parallel(spec, 0);
  const double t_parallel = seconds_since(t0);

  bool identical = serial.size() == parallel.size();
  for (std::size_t i = 0; identical && i < serial.size(); ++i) {
    identical = run_metrics_csv_row(serial[i]) == run_metrics_csv_row(parallel[i]);
  }

  std::printf("preset=%s count=%d\n", spec.preset_name.c_str(), spec.count);
  std::printf("serial reference: %.3f s (%.1f ms/scenario)\n", t_serial,
              1e3 * t_serial / spec.count);
  std::printf("openmp kernel:    %.3f s (%.1f ms/scenario, speedup %.2fx)\n", t_parallel,
              1e3 * t_parallel / spec.count, t_serial / t_parallel);
  std::printf("rows identical:   %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
