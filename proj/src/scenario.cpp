#include "capalloc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "capalloc/planarity.hpp"

namespace capalloc {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("empty interval");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

std::vector<std::string> ScenarioConfig::check() const {
  std::vector<std::string> out;
  if (n_v < 2) out.push_back("need at least two nodes");
  if (n_s < 1 || n_s >= n_v) out.push_back("need 1 <= n_s < n_v");
  if (n_e < n_v - 1) out.push_back("too few edges for a connected graph");
  const long max_edges = n_v >= 3 ? 3L * n_v - 6 : 1;
  if (n_e > max_edges) out.push_back("edge count exceeds the planar bound");
  if (cap_min > cap_max || transfer_min > transfer_max || source_cost_min > source_cost_max ||
      demand_quantity_min > demand_quantity_max)
    out.push_back("empty parameter interval");
  if (cap_min < 0 || transfer_min < 0 || source_cost_min < 0 || demand_quantity_min <= 0)
    out.push_back("negative parameter bound");
  if (demand_steps < 1) out.push_back("need at least one demand step");
  if (demand_price_factor <= 0) out.push_back("price factor must be positive");
  if (routes_per_consumer < 1) out.push_back("need at least one route per consumer");
  return out;
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  if (name == "small") {
    cfg.n_v = 6;
    cfg.n_e = 8;
    cfg.n_s = 1;
  } else if (name == "medium") {
    cfg.n_v = 9;
    cfg.n_e = 12;
    cfg.n_s = 2;
  } else if (name == "large") {
    cfg.n_v = 15;
    cfg.n_e = 20;
    cfg.n_s = 3;
  } else if (name == "xlarge") {
    cfg.n_v = 20;
    cfg.n_e = 30;
    cfg.n_s = 4;
  } else {
    throw std::invalid_argument("unknown preset: " + std::string(name));
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"small", "medium", "large", "xlarge"}; }

namespace {

bool skeleton_connected(const GraphSkeleton& g) {
  std::vector<std::vector<int>> adj(g.n_v);
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(g.n_v, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == g.n_v;
}

}  // namespace

GraphSkeleton generate_graph(const ScenarioConfig& cfg, Rng& rng) {
  const auto problems = cfg.check();
  if (!problems.empty()) throw std::invalid_argument("bad scenario config: " + problems[0]);

  for (int attempt = 0; attempt < cfg.max_graph_retries; ++attempt) {
    GraphSkeleton g;
    g.n_v = cfg.n_v;
    std::set<std::pair<int, int>> present;
    bool ok = true;
    for (int e = 0; e < cfg.n_e; ++e) {
      // Uniform over the currently absent pairs, drawn by rejection.
      std::pair<int, int> pick;
      int guard = 0;
      do {
        const int a = static_cast<int>(rng.uniform_int(0, cfg.n_v - 1));
        const int b = static_cast<int>(rng.uniform_int(0, cfg.n_v - 1));
        pick = std::minmax(a, b);
        if (++guard > 100000) {
          ok = false;
          break;
        }
      } while (pick.first == pick.second || present.count(pick));
      if (!ok) break;
      present.insert(pick);
      g.edges.push_back(pick);
    }
    if (!ok) continue;
    if (!skeleton_connected(g)) continue;
    if (!is_planar(g.n_v, g.edges)) continue;

    std::vector<int> nodes(cfg.n_v);
    for (int i = 0; i < cfg.n_v; ++i) nodes[i] = i;
    for (int k = 0; k < cfg.n_s; ++k) {
      const int j = static_cast<int>(rng.uniform_int(k, cfg.n_v - 1));
      std::swap(nodes[k], nodes[j]);
    }
    g.source_nodes.assign(nodes.begin(), nodes.begin() + cfg.n_s);
    std::sort(g.source_nodes.begin(), g.source_nodes.end());
    return g;
  }
  throw std::runtime_error("graph generation exhausted its retry budget");
}

Network assign_parameters(const GraphSkeleton& skeleton, const ScenarioConfig& cfg, Rng& rng) {
  Network net;
  for (int v = 0; v < skeleton.n_v; ++v) net.nodes.push_back(v + 1);

  // Draw order is part of the determinism contract: capacities for all edges,
  // then transfer costs, then source costs.
  std::vector<double> caps, costs;
  for (std::size_t e = 0; e < skeleton.edges.size(); ++e)
    caps.push_back(static_cast<double>(rng.uniform_int(cfg.cap_min, cfg.cap_max)));
  for (std::size_t e = 0; e < skeleton.edges.size(); ++e)
    costs.push_back(static_cast<double>(rng.uniform_int(cfg.transfer_min, cfg.transfer_max)));
  for (std::size_t e = 0; e < skeleton.edges.size(); ++e) {
    Edge edge;
    edge.id = static_cast<int>(e) + 1;
    edge.from = skeleton.edges[e].first + 1;
    edge.to = skeleton.edges[e].second + 1;
    edge.capacity_pos = caps[e];
    edge.capacity_neg = caps[e];
    edge.transfer_cost = costs[e];
    net.edges.push_back(edge);
  }
  std::set<int> source_set(skeleton.source_nodes.begin(), skeleton.source_nodes.end());
  for (int s : skeleton.source_nodes) {
    Source src;
    src.node = s + 1;
    src.unit_cost = static_cast<double>(rng.uniform_int(cfg.source_cost_min, cfg.source_cost_max));
    net.sources.push_back(src);
  }
  for (int v = 0; v < skeleton.n_v; ++v) {
    if (!source_set.count(v)) net.consumers.push_back({v + 1, {}});
  }
  return net;
}

void assign_demands(Network& net, const ScenarioConfig& cfg, Rng& rng) {
  // Route value extremes over every consumer's cheapest routes, source cost
  // included; the configured source-cost bounds then widen the interval
  // further. Keeps willingness-to-pay comfortably above delivery cost for
  // the cheap routes only.
  double route_min = 0.0, route_max = 0.0;
  bool any = false;
  for (int i = 0; i < static_cast<int>(net.consumers.size()); ++i) {
    for (const auto& r : k_cheapest_routes(net, i, cfg.routes_per_consumer)) {
      const double t = route_unit_cost(net, r);
      if (!any) {
        route_min = route_max = t;
        any = true;
      } else {
        route_min = std::min(route_min, t);
        route_max = std::max(route_max, t);
      }
    }
  }
  if (!any) throw std::runtime_error("no consumer can reach a source");

  const std::int64_t price_lo =
      static_cast<std::int64_t>(std::llround(route_min)) + cfg.source_cost_min;
  const std::int64_t price_hi = static_cast<std::int64_t>(
      std::llround(cfg.demand_price_factor * (route_max + cfg.source_cost_max)));

  for (auto& c : net.consumers) {
    std::vector<double> quantities, prices;
    for (int t = 0; t < cfg.demand_steps; ++t)
      quantities.push_back(static_cast<double>(
          rng.uniform_int(cfg.demand_quantity_min, cfg.demand_quantity_max)));
    for (int t = 0; t < cfg.demand_steps; ++t)
      prices.push_back(static_cast<double>(rng.uniform_int(price_lo, std::max(price_lo, price_hi))));
    std::sort(prices.rbegin(), prices.rend());
    c.demand.clear();
    for (int t = 0; t < cfg.demand_steps; ++t) c.demand.push_back({prices[t], quantities[t]});
  }
}

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed, std::string_view label) {
  Rng rng(seed);
  Scenario sc;
  sc.seed = seed;
  sc.label = label;
  const auto skeleton = generate_graph(cfg, rng);
  sc.network = assign_parameters(skeleton, cfg, rng);
  assign_demands(sc.network, cfg, rng);
  return sc;
}

}  // namespace capalloc
