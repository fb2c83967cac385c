#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "capalloc/planarity.hpp"
#include "capalloc/scenario.hpp"

using namespace capalloc;

namespace {

// Independent connectivity check over the generated network.
bool bfs_connected(const Network& net) {
  std::set<NodeId> seen{net.nodes.front()};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : net.edges) {
      if (seen.count(e.from) && !seen.count(e.to)) {
        seen.insert(e.to);
        grew = true;
      }
      if (seen.count(e.to) && !seen.count(e.from)) {
        seen.insert(e.from);
        grew = true;
      }
    }
  }
  return seen.size() == net.nodes.size();
}

}  // namespace

TEST_CASE("rng is reproducible and unbiased over closed intervals") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  Rng r(7);
  std::set<std::int64_t> values;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(3, 11);
    CHECK(v >= 3);
    CHECK(v <= 11);
    values.insert(v);
  }
  CHECK(values.size() == 9);  // every value of the closed interval appears
}

TEST_CASE("config validation") {
  ScenarioConfig cfg = preset("small");
  CHECK(cfg.check().empty());
  cfg.n_e = 100;  // beyond the planar bound for 6 nodes
  CHECK(!cfg.check().empty());

  ScenarioConfig two;
  two.n_v = 2;
  two.n_e = 1;
  two.n_s = 1;
  CHECK(two.check().empty());
}

TEST_CASE("presets") {
  CHECK(preset("small").n_v == 6);
  CHECK(preset("medium").n_v == 9);
  CHECK(preset("medium").n_s == 2);
  CHECK(preset("large").n_e == 20);
  CHECK(preset("xlarge").n_s == 4);
  CHECK_THROWS_AS(preset("tiny"), std::invalid_argument);
}

TEST_CASE("two-node config yields the unique single-edge graph") {
  ScenarioConfig cfg;
  cfg.n_v = 2;
  cfg.n_e = 1;
  cfg.n_s = 1;
  Rng rng(5);
  const auto g = generate_graph(cfg, rng);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == std::pair<int, int>{0, 1});
  CHECK(g.source_nodes.size() == 1);
}

TEST_CASE("generated graphs are connected, planar and sized to spec") {
  for (const auto& name : preset_names()) {
    const auto cfg = preset(name);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed);
      const auto g = generate_graph(cfg, rng);
      CHECK(g.n_v == cfg.n_v);
      CHECK(static_cast<int>(g.edges.size()) == cfg.n_e);
      CHECK(static_cast<int>(g.source_nodes.size()) == cfg.n_s);
      std::set<std::pair<int, int>> distinct(g.edges.begin(), g.edges.end());
      CHECK(distinct.size() == g.edges.size());
      CHECK(is_planar(g.n_v, g.edges));
    }
  }
}

TEST_CASE("hopeless configs exhaust their retry budget with a clear error") {
  // At the planarity bound a random graph is almost never planar, so a tiny
  // retry budget runs out.
  ScenarioConfig cfg;
  cfg.n_v = 20;
  cfg.n_e = 3 * 20 - 6;
  cfg.n_s = 1;
  cfg.max_graph_retries = 5;
  REQUIRE(cfg.check().empty());
  Rng rng(1);
  CHECK_THROWS_WITH_AS(generate_graph(cfg, rng),
                       "graph generation exhausted its retry budget", std::runtime_error);
}

TEST_CASE("degenerate parameter ranges force the midpoint values") {
  ScenarioConfig cfg = preset("small");
  cfg.cap_min = cfg.cap_max = 50;
  cfg.transfer_min = cfg.transfer_max = 7;
  cfg.source_cost_min = cfg.source_cost_max = 25;
  Rng rng(3);
  const auto g = generate_graph(cfg, rng);
  const auto net = assign_parameters(g, cfg, rng);
  for (const auto& e : net.edges) {
    CHECK(e.capacity_pos == doctest::Approx(50));
    CHECK(e.capacity_neg == doctest::Approx(50));
    CHECK(e.transfer_cost == doctest::Approx(7));
  }
  for (const auto& s : net.sources) CHECK(s.unit_cost == doctest::Approx(25));
}

TEST_CASE("sampled parameters are integers inside their intervals") {
  const auto cfg = preset("small");
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto sc = generate_scenario(cfg, seed);
    for (const auto& e : sc.network.edges) {
      CHECK(e.capacity_pos >= cfg.cap_min);
      CHECK(e.capacity_pos <= cfg.cap_max);
      CHECK(e.capacity_pos == std::round(e.capacity_pos));
      CHECK(e.transfer_cost >= cfg.transfer_min);
      CHECK(e.transfer_cost <= cfg.transfer_max);
      CHECK(e.transfer_cost == std::round(e.transfer_cost));
    }
    for (const auto& s : sc.network.sources) {
      CHECK(s.unit_cost >= cfg.source_cost_min);
      CHECK(s.unit_cost <= cfg.source_cost_max);
      CHECK(s.unit_cost == std::round(s.unit_cost));
    }
  }
}

TEST_CASE("demand curves are sorted and bounded") {
  const auto cfg = preset("small");
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto sc = generate_scenario(cfg, seed);
    // route-value extremes over the cheapest routes, as in demand pricing
    double route_min = 1e18, route_max = 0;
    for (int i = 0; i < static_cast<int>(sc.network.consumers.size()); ++i) {
      for (const auto& r : k_cheapest_routes(sc.network, i, cfg.routes_per_consumer)) {
        const double v = route_unit_cost(sc.network, r);
        route_min = std::min(route_min, v);
        route_max = std::max(route_max, v);
      }
    }
    REQUIRE(route_max > 0);
    const double lo = std::round(route_min) + cfg.source_cost_min;
    const double hi = std::round(cfg.demand_price_factor * (route_max + cfg.source_cost_max));
    for (const auto& c : sc.network.consumers) {
      REQUIRE(c.demand.size() == 3);
      for (std::size_t t = 0; t < 3; ++t) {
        const auto& st = c.demand[t];
        CHECK(st.quantity >= cfg.demand_quantity_min);
        CHECK(st.quantity <= cfg.demand_quantity_max);
        CHECK(st.quantity == std::round(st.quantity));
        CHECK(st.price >= lo);
        CHECK(st.price >= cfg.transfer_min + cfg.source_cost_min);
        CHECK(st.price <= hi);
        if (t > 0) CHECK(st.price <= c.demand[t - 1].price);
      }
    }
  }
}

TEST_CASE("scenarios are deterministic and valid") {
  const auto cfg = preset("medium");
  const auto a = generate_scenario(cfg, 77);
  const auto b = generate_scenario(cfg, 77);
  REQUIRE(a.network.edges.size() == b.network.edges.size());
  for (std::size_t e = 0; e < a.network.edges.size(); ++e) {
    CHECK(a.network.edges[e].from == b.network.edges[e].from);
    CHECK(a.network.edges[e].capacity_pos == b.network.edges[e].capacity_pos);
    CHECK(a.network.edges[e].transfer_cost == b.network.edges[e].transfer_cost);
  }
  for (std::size_t i = 0; i < a.network.consumers.size(); ++i)
    CHECK(a.network.consumers[i].demand == b.network.consumers[i].demand);

  const auto c = generate_scenario(cfg, 78);
  bool differs = false;
  for (std::size_t e = 0; e < a.network.edges.size() && !differs; ++e)
    differs = a.network.edges[e].capacity_pos != c.network.edges[e].capacity_pos ||
              a.network.edges[e].from != c.network.edges[e].from;
  CHECK(differs);

  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const auto sc = generate_scenario(preset("small"), seed);
    CHECK(validate(sc.network).empty());
    CHECK(bfs_connected(sc.network));
  }
}

TEST_CASE("mean cheapest-route length on the small preset") {
  // Statistical reproduction over 1000 seeds; tolerance band covers the
  // generator difference.
  const auto cfg = preset("small");
  double total = 0;
  long count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto sc = generate_scenario(cfg, seed);
    for (int i = 0; i < static_cast<int>(sc.network.consumers.size()); ++i) {
      const auto routes = k_cheapest_routes(sc.network, i, 1);
      REQUIRE(!routes.empty());
      total += static_cast<double>(routes[0].edges.size());
      ++count;
    }
  }
  const double mean = total / static_cast<double>(count);
  CHECK(mean > 1.56 - 0.15);
  CHECK(mean < 1.56 + 0.15);
}
