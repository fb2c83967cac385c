#include "capalloc/aca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capalloc {

namespace {

constexpr double kTol = 1e-7;
constexpr double kTieEps = 1e-6;

void clean(FlowVector& v) {
  for (double& x : v) {
    if (x < kTol) x = 0.0;
  }
}

}  // namespace

AcaState make_initial_state(const Network& net, const AcaConfig& config) {
  if (config.rounds < 1 || config.price_step <= 0)
    throw std::invalid_argument("bad auction config");
  AcaState s;
  s.net = &net;
  s.config = config;
  const std::size_t np = net.num_products();
  const std::size_t m = net.edges.size();
  s.prices.assign(np, config.start_price);
  s.cua.assign(np, 0.0);
  for (std::size_t e = 0; e < m; ++e) {
    s.cua[e] = net.edges[e].capacity_pos;
    s.cua[m + e] = net.edges[e].capacity_neg;
  }
  s.active.assign(np, 0);
  s.players.resize(net.consumers.size());
  for (std::size_t i = 0; i < net.consumers.size(); ++i) {
    auto& p = s.players[i];
    p.aac.assign(np, 0.0);
    p.pb.assign(np, 0.0);
    p.retired.assign(np, 0.0);
    p.allocation.assign(np, 0.0);
    p.live_demand = net.consumers[i].demand;
  }
  return s;
}

lp::LinearProgram build_bidder_lp(const AcaState& s, int player, BidPolicy policy,
                                  bool allow_cua) {
  const Network& net = *s.net;
  const int m = static_cast<int>(net.edges.size());
  const int np = 2 * m;
  const int ns = static_cast<int>(net.sources.size());
  const auto& ps = s.players[player];
  const int nt = static_cast<int>(ps.live_demand.size());

  lp::LinearProgram prog;
  prog.objective.assign(4 * m + ns + nt, 0.0);
  prog.lower.assign(4 * m + ns + nt, 0.0);
  prog.upper.assign(4 * m + ns + nt, 0.0);

  const double tie = policy == BidPolicy::open_minimal ? -kTieEps : kTieEps;
  for (int p = 0; p < np; ++p) {
    const double ct = net.edges[p % m].transfer_cost;
    // Without auctioned capacity in play (round finalization) the same tiny
    // penalty lands on the owned-capacity flows, so zero-margin consumption
    // is dropped rather than fixed.
    prog.objective[p] = -ct - (allow_cua ? 0.0 : kTieEps);
    prog.upper[p] = ps.aac[p];
    double cap = 0.0;
    if (allow_cua && s.active[p]) cap = std::min(s.cua[p], ps.pb[p]);
    prog.objective[np + p] = -ct - (s.active[p] ? s.prices[p] : 0.0) + tie;
    prog.upper[np + p] = cap;
  }
  for (int k = 0; k < ns; ++k) {
    prog.objective[2 * np + k] = -net.sources[k].unit_cost;
    prog.upper[2 * np + k] = lp::kInf;
  }
  for (int t = 0; t < nt; ++t) {
    prog.objective[2 * np + ns + t] = ps.live_demand[t].price;
    prog.upper[2 * np + ns + t] = ps.live_demand[t].quantity;
  }

  const BalanceMatrix bm = nodal_balance_matrix(net, player, nt);
  for (const auto& row : bm.rows) {
    lp::Row r;
    for (int j = 0; j < bm.num_vars; ++j) r.add(j, row[j]);
    r.rhs = 0.0;
    prog.eq.push_back(std::move(r));
  }
  return prog;
}

BidderPlan optimal_potential_flows(const AcaState& s, int player, BidPolicy policy) {
  const Network& net = *s.net;
  const int m = static_cast<int>(net.edges.size());
  const int np = 2 * m;
  const int ns = static_cast<int>(net.sources.size());
  const auto& ps = s.players[player];
  const int nt = static_cast<int>(ps.live_demand.size());

  const auto prog = build_bidder_lp(s, player, policy, true);
  const auto res = lp::solve(prog);
  if (!res.ok())
    throw std::runtime_error("bidder LP failed: " + lp::to_string(res.status));

  BidderPlan plan;
  plan.aac_flows.assign(res.values.begin(), res.values.begin() + np);
  plan.cua_flows.assign(res.values.begin() + np, res.values.begin() + 2 * np);
  plan.inlets.assign(res.values.begin() + 2 * np, res.values.begin() + 2 * np + ns);
  plan.consumption.assign(res.values.begin() + 2 * np + ns, res.values.end());
  clean(plan.aac_flows);
  clean(plan.cua_flows);

  double u = 0.0;
  for (int t = 0; t < nt; ++t) u += ps.live_demand[t].price * plan.consumption[t];
  for (int p = 0; p < np; ++p) {
    u -= net.edges[p % m].transfer_cost * (plan.aac_flows[p] + plan.cua_flows[p]);
    if (s.active[p]) u -= s.prices[p] * plan.cua_flows[p];
  }
  for (int k = 0; k < ns; ++k) u -= net.sources[k].unit_cost * plan.inlets[k];
  plan.utility = u;
  return plan;
}

FlowVector submit_bids(const AcaState& s, const BidderPlan& plan) {
  FlowVector bids(s.cua.size(), 0.0);
  for (std::size_t p = 0; p < bids.size(); ++p) {
    if (s.active[p]) bids[p] = plan.cua_flows[p];
  }
  return bids;
}

StepOutcome auction_step(AcaState& s, const std::vector<FlowVector>& bids) {
  if (bids.size() != s.players.size()) throw std::invalid_argument("bid count mismatch");
  const std::size_t np = s.cua.size();
  for (std::size_t i = 0; i < bids.size(); ++i) {
    for (std::size_t p = 0; p < np; ++p) {
      if (bids[i][p] > s.players[i].pb[p] + kTol)
        throw std::logic_error("bid exceeds previous bid");
      if (!s.active[p] && bids[i][p] > kTol)
        throw std::logic_error("bid on inactive product");
    }
  }

  StepOutcome out;
  for (std::size_t p = 0; p < np; ++p) {
    if (!s.active[p]) continue;
    double agg = 0.0;
    for (const auto& b : bids) agg += b[p];
    if (agg <= s.cua[p] + kTol) {
      // Undersell (equality included): allocate the last submitted bids at
      // the current price and retire the product for this round.
      for (std::size_t i = 0; i < bids.size(); ++i) {
        const double q = bids[i][p];
        if (q <= 0.0) continue;
        auto& ps = s.players[i];
        ps.allocation[p] += q;
        ps.aac[p] += q;
        ps.capacity_payment += q * s.prices[p];
        s.cua[p] -= q;
      }
      s.cua[p] = std::max(s.cua[p], 0.0);
      s.active[p] = 0;
      out.closed_products.push_back(static_cast<int>(p));
    } else {
      s.prices[p] += s.config.price_step;
    }
  }
  for (std::size_t i = 0; i < bids.size(); ++i) s.players[i].pb = bids[i];
  out.any_active_left =
      std::any_of(s.active.begin(), s.active.end(), [](char a) { return a != 0; });
  return out;
}

void finalize_round(AcaState& s) {
  const Network& net = *s.net;
  const int m = static_cast<int>(net.edges.size());
  const int np = 2 * m;
  const int ns = static_cast<int>(net.sources.size());
  for (std::size_t i = 0; i < s.players.size(); ++i) {
    auto& ps = s.players[i];
    const auto prog = build_bidder_lp(s, static_cast<int>(i), BidPolicy::open_minimal,
                                      /*allow_cua=*/false);
    const auto res = lp::solve(prog);
    if (!res.ok())
      throw std::runtime_error("round-final flow LP failed: " + lp::to_string(res.status));

    FlowVector flows(res.values.begin(), res.values.begin() + np);
    clean(flows);
    double ensured = 0.0;
    for (int t = 0; t < static_cast<int>(ps.live_demand.size()); ++t)
      ensured += res.values[2 * np + ns + t];
    for (int k = 0; k < ns; ++k)
      ps.inlet_cost += net.sources[k].unit_cost * res.values[2 * np + k];
    for (int p = 0; p < np; ++p) {
      ps.transfer_cost += net.edges[p % m].transfer_cost * flows[p];
      ps.retired[p] += flows[p];
      ps.aac[p] = std::max(ps.aac[p] - flows[p], 0.0);
    }
    ps.consumed += ensured;
    ps.live_demand = reduce_demand(ps.live_demand, ensured);
  }
}

AcaOutcome run_auction(const Network& net, const AcaConfig& config,
                       const StepObserver& observer) {
  AcaState s = make_initial_state(net, config);
  const std::size_t np = net.num_products();
  const std::size_t n = s.players.size();

  // Rational bids stop once a product's price exceeds what any demand step
  // can pay net of costs; this cap only guards against runaway loops.
  double max_price = config.start_price;
  for (const auto& c : net.consumers) max_price = std::max(max_price, max_demand_price(c.demand));
  const long step_cap = 16 + 2 * static_cast<long>((max_price + 1.0) / config.price_step);

  AcaOutcome out;
  out.players.resize(n);
  for (int round = 1; round <= config.rounds; ++round) {
    s.round = round;
    s.step = 0;
    for (std::size_t p = 0; p < np; ++p) {
      s.prices[p] = config.start_price;
      s.active[p] = s.cua[p] > kTol ? 1 : 0;
    }
    for (auto& ps : s.players) ps.pb = s.cua;  // opening bid unconstrained

    bool any_bids = false;
    bool running = std::any_of(s.active.begin(), s.active.end(), [](char a) { return a != 0; });
    while (running) {
      ++s.step;
      if (s.step > step_cap) throw std::runtime_error("auction round failed to terminate");
      std::vector<FlowVector> bids(n);
      const BidPolicy policy = s.step == 1 ? BidPolicy::open_minimal : BidPolicy::hold_previous;
      for (std::size_t i = 0; i < n; ++i) {
        double biddable = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
          if (s.active[p]) biddable += std::min(s.cua[p], s.players[i].pb[p]);
        }
        if (biddable <= kTol || s.players[i].live_demand.empty()) {
          bids[i].assign(np, 0.0);
          continue;
        }
        bids[i] = submit_bids(s, optimal_potential_flows(s, static_cast<int>(i), policy));
      }
      for (const auto& b : bids) {
        for (double q : b) {
          if (q > kTol) any_bids = true;
        }
      }
      const auto step_out = auction_step(s, bids);
      if (observer) {
        StepRecord rec;
        rec.round = round;
        rec.step = s.step;
        rec.prices = s.prices;
        rec.bids = bids;
        rec.closed_products = step_out.closed_products;
        observer(rec);
      }
      running = step_out.any_active_left;
    }
    out.closing_prices.push_back(s.prices);
    out.round_had_bids.push_back(any_bids ? 1 : 0);
    finalize_round(s);
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& pr = out.players[i];
    const auto& ps = s.players[i];
    pr.allocation = ps.allocation;
    pr.final_flows = ps.retired;
    pr.consumed = ps.consumed;
    pr.consumption_utility = consumption_utility(net.consumers[i].demand, ps.consumed);
    pr.transfer_cost = ps.transfer_cost;
    pr.inlet_cost = ps.inlet_cost;
    pr.capacity_payment = ps.capacity_payment;
    pr.utility =
        pr.consumption_utility - pr.transfer_cost - pr.inlet_cost - pr.capacity_payment;
    out.total_payment += pr.capacity_payment;
  }
  return out;
}

}  // namespace capalloc
