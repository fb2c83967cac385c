#pragma once

#include <vector>

#include "capalloc/lp.hpp"
#include "capalloc/network.hpp"

namespace capalloc {

/// One route-quantity bid: quantity is cumulative through a demand step,
/// price is the bidder's truthful valuation of that coupled pair.
struct RouteBid {
  int player = 0;
  int route_index = 0;  // into the player's route list
  int bid_index = 0;    // demand-step index the bid extends through
  double quantity = 0.0;
  double price = 0.0;
};

/// Bids of all players plus the route lists they refer to.
struct CcaInstance {
  std::vector<std::vector<Route>> routes;  // per player
  std::vector<RouteBid> bids;

  int num_players() const { return static_cast<int>(routes.size()); }
};

/// Truthful bids for one player: walks each route's unit cost against the
/// demand steps, bidding cumulative quantity at utility-minus-cost value,
/// stopping at the first step priced below the route cost.
std::vector<RouteBid> generate_bids(const Network& net, int player,
                                    const std::vector<Route>& routes);

/// Bids for every consumer over a fixed route list per player.
CcaInstance instance_from_routes(const Network& net, std::vector<std::vector<Route>> routes);

/// Bids for every consumer over its k cheapest routes.
CcaInstance build_instance(const Network& net, int routes_per_consumer);

/// Acceptance variables in [0,1], nominal-value objective, netted capacity
/// rows per edge direction and one convexity row per player. A tiny secondary
/// objective term steers degenerate optima towards minimal allocated
/// capacity.
lp::LinearProgram build_clearing_lp(const Network& net, const CcaInstance& inst);

struct ClearingResult {
  std::vector<double> acceptance;       // per bid
  std::vector<FlowVector> allocated;    // per player, per product
  double objective = 0.0;               // sum of acceptance * price
  std::vector<double> accepted_value;   // per player, sum of acceptance * price
};

ClearingResult clear(const Network& net, const CcaInstance& inst);

/// Externality payments: re-clears without each player in turn and charges
/// the drop in the others' accepted nominal value.
std::vector<double> vcg_payments(const Network& net, const CcaInstance& inst,
                                 const ClearingResult& base);

struct CcaPlayerResult {
  double consumed = 0.0;
  double consumption_utility = 0.0;
  double transfer_cost = 0.0;
  double inlet_cost = 0.0;
  double capacity_payment = 0.0;
  double utility = 0.0;
};

std::vector<CcaPlayerResult> evaluate_cca(const Network& net, const CcaInstance& inst,
                                          const ClearingResult& result,
                                          const std::vector<double>& payments);

}  // namespace capalloc
