#include "capalloc/cca.hpp"

#include <cmath>
#include <stdexcept>

#ifdef CAPALLOC_HAVE_OPENMP
#include <omp.h>
#endif

namespace capalloc {

namespace {
constexpr double kTol = 1e-9;
constexpr double kCapacityTieEps = 1e-6;
}  // namespace

std::vector<RouteBid> generate_bids(const Network& net, int player,
                                    const std::vector<Route>& routes) {
  const DemandCurve& demand = net.consumers[player].demand;
  std::vector<RouteBid> bids;
  for (int j = 0; j < static_cast<int>(routes.size()); ++j) {
    const double c = route_unit_cost(net, routes[j]);
    double cumulative = 0.0;
    for (int t = 0; t < static_cast<int>(demand.size()); ++t) {
      if (demand[t].price < c - kTol) break;  // marginal-profitability cutoff
      cumulative += demand[t].quantity;
      RouteBid b;
      b.player = player;
      b.route_index = j;
      b.bid_index = t;
      b.quantity = cumulative;
      b.price = consumption_utility(demand, cumulative) - cumulative * c;
      bids.push_back(b);
    }
  }
  return bids;
}

CcaInstance instance_from_routes(const Network& net, std::vector<std::vector<Route>> routes) {
  CcaInstance inst;
  inst.routes = std::move(routes);
  for (int i = 0; i < inst.num_players(); ++i) {
    auto bids = generate_bids(net, i, inst.routes[i]);
    inst.bids.insert(inst.bids.end(), bids.begin(), bids.end());
  }
  return inst;
}

CcaInstance build_instance(const Network& net, int routes_per_consumer) {
  std::vector<std::vector<Route>> routes(net.consumers.size());
  for (int i = 0; i < static_cast<int>(net.consumers.size()); ++i)
    routes[i] = k_cheapest_routes(net, i, routes_per_consumer);
  return instance_from_routes(net, std::move(routes));
}

lp::LinearProgram build_clearing_lp(const Network& net, const CcaInstance& inst) {
  const int m = static_cast<int>(net.edges.size());
  const int nb = static_cast<int>(inst.bids.size());

  lp::LinearProgram prog;
  prog.objective.assign(nb, 0.0);
  prog.lower.assign(nb, 0.0);
  prog.upper.assign(nb, 1.0);

  // One netted row per edge and direction, then one convexity row per player.
  std::vector<lp::Row> rows(2 * m);
  for (int e = 0; e < m; ++e) {
    rows[e].rhs = net.edges[e].capacity_pos;
    rows[m + e].rhs = net.edges[e].capacity_neg;
  }
  std::vector<lp::Row> convexity(inst.num_players());
  for (auto& r : convexity) r.rhs = 1.0;

  for (int b = 0; b < nb; ++b) {
    const auto& bid = inst.bids[b];
    const Route& route = inst.routes[bid.player][bid.route_index];
    prog.objective[b] =
        bid.price - kCapacityTieEps * bid.quantity * static_cast<double>(route.edges.size());
    for (const auto& se : route.edges) {
      const int e = net.edge_index(se.edge_id);
      if (e < 0) throw std::invalid_argument("bid route references unknown edge");
      rows[e].add(b, se.sign * bid.quantity);
      rows[m + e].add(b, -se.sign * bid.quantity);
    }
    convexity[bid.player].add(b, 1.0);
  }
  prog.le = std::move(rows);
  for (auto& r : convexity) prog.le.push_back(std::move(r));
  return prog;
}

ClearingResult clear(const Network& net, const CcaInstance& inst) {
  ClearingResult out;
  out.acceptance.assign(inst.bids.size(), 0.0);
  out.accepted_value.assign(inst.num_players(), 0.0);
  out.allocated.assign(inst.num_players(), FlowVector(net.num_products(), 0.0));
  if (inst.bids.empty()) return out;

  const auto prog = build_clearing_lp(net, inst);
  const auto res = lp::solve(prog);
  if (!res.ok())
    throw std::runtime_error("clearing LP failed: " + lp::to_string(res.status));

  const int m = static_cast<int>(net.edges.size());
  for (std::size_t b = 0; b < inst.bids.size(); ++b) {
    double x = res.values[b];
    if (x < kTol) x = 0.0;
    if (x > 1.0) x = 1.0;
    out.acceptance[b] = x;
    if (x == 0.0) continue;
    const auto& bid = inst.bids[b];
    out.objective += x * bid.price;
    out.accepted_value[bid.player] += x * bid.price;
    const Route& route = inst.routes[bid.player][bid.route_index];
    for (const auto& se : route.edges) {
      const int e = net.edge_index(se.edge_id);
      const int prod = se.sign > 0 ? e : m + e;
      out.allocated[bid.player][prod] += x * bid.quantity;
    }
  }
  return out;
}

std::vector<double> vcg_payments(const Network& net, const CcaInstance& inst,
                                 const ClearingResult& base) {
  const int n = inst.num_players();
  std::vector<double> payments(n, 0.0);
  double total_value = 0.0;
  for (double v : base.accepted_value) total_value += v;
  bool failed = false;

#ifdef CAPALLOC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (n > 2)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      CcaInstance without;
      without.routes = inst.routes;
      for (const auto& b : inst.bids) {
        if (b.player != i) without.bids.push_back(b);
      }
      const auto res = clear(net, without);
      const double others_base = total_value - base.accepted_value[i];
      payments[i] = std::max(res.objective - others_base, 0.0);
    } catch (...) {
      failed = true;
    }
  }
  if (failed) throw std::runtime_error("leave-one-out clearing failed");
  return payments;
}

std::vector<CcaPlayerResult> evaluate_cca(const Network& net, const CcaInstance& inst,
                                          const ClearingResult& result,
                                          const std::vector<double>& payments) {
  std::vector<CcaPlayerResult> out(inst.num_players());
  for (std::size_t b = 0; b < inst.bids.size(); ++b) {
    const double x = result.acceptance[b];
    if (x <= 0.0) continue;
    const auto& bid = inst.bids[b];
    const Route& route = inst.routes[bid.player][bid.route_index];
    auto& pr = out[bid.player];
    const double q = x * bid.quantity;
    pr.consumed += q;
    pr.transfer_cost += q * route_transfer_cost(net, route);
    pr.inlet_cost += q * source_cost_of_route(net, route);
  }
  for (int i = 0; i < inst.num_players(); ++i) {
    auto& pr = out[i];
    pr.consumption_utility = consumption_utility(net.consumers[i].demand, pr.consumed);
    pr.capacity_payment = payments[i];
    pr.utility = pr.consumption_utility - pr.transfer_cost - pr.inlet_cost - pr.capacity_payment;
  }
  return out;
}

}  // namespace capalloc
