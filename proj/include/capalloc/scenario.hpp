#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capalloc/network.hpp"

namespace capalloc {

/// splitmix64: the pinned, portable generator behind every random draw.
/// A scenario's stream is seeded once and consumed in a documented order, so
/// (config, seed) fully determines the result on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [lo, hi] via rejection sampling.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t state_;
};

struct ScenarioConfig {
  int n_v = 6;
  int n_e = 8;
  int n_s = 1;
  int cap_min = 10, cap_max = 90;
  int transfer_min = 3, transfer_max = 11;
  int source_cost_min = 20, source_cost_max = 30;
  int demand_quantity_min = 10, demand_quantity_max = 50;
  int demand_steps = 3;
  double demand_price_factor = 1.4;
  int routes_per_consumer = 10;
  int max_graph_retries = 10000;

  std::vector<std::string> check() const;
};

/// The four experiment sizes: small(6,8,1), medium(9,12,2), large(15,20,3),
/// xlarge(20,30,4). Throws on unknown names.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct Scenario {
  Network network;
  std::uint64_t seed = 0;
  std::string label;
};

struct GraphSkeleton {
  int n_v = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based vertex indices
  std::vector<int> source_nodes;           // 0-based
};

/// Random connected planar skeleton: edges placed one by one among absent
/// pairs, whole draw retried until both properties hold.
GraphSkeleton generate_graph(const ScenarioConfig& cfg, Rng& rng);

/// Integer capacities, transfer costs and source costs from the configured
/// uniform ranges.
Network assign_parameters(const GraphSkeleton& skeleton, const ScenarioConfig& cfg, Rng& rng);

/// Three-step inverse demand per consumer; step prices drawn from
/// [cheapest-route value floor + source-cost floor, factor * (route value
/// ceiling + source-cost ceiling)] and sorted descending. Route values
/// include source and transfer costs.
void assign_demands(Network& net, const ScenarioConfig& cfg, Rng& rng);

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed,
                           std::string_view label = "");

}  // namespace capalloc
