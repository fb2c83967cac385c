#pragma once

#include <functional>
#include <vector>

#include "capalloc/lp.hpp"
#include "capalloc/network.hpp"

namespace capalloc {

struct AcaConfig {
  int rounds = 3;
  double price_step = 1.0;
  double start_price = 0.0;
};

/// Per-player auction state. "aac" is capacity already paid for and free to
/// use, "retired" is capacity bound to fixed flows from earlier rounds.
struct AcaPlayerState {
  FlowVector aac;
  FlowVector pb;  // previous bid, bounds the next one within a round
  FlowVector retired;
  FlowVector allocation;  // cumulative, includes capacity that ends up unused
  DemandCurve live_demand;
  double capacity_payment = 0.0;
  double consumed = 0.0;
  double transfer_cost = 0.0;
  double inlet_cost = 0.0;
};

struct AcaState {
  const Network* net = nullptr;
  AcaConfig config;
  std::vector<double> prices;   // per product
  FlowVector cua;               // capacities under auction
  std::vector<char> active;     // per product
  std::vector<AcaPlayerState> players;
  int round = 0;  // 1-based once running
  int step = 0;   // 1-based within a round
};

/// A bidder's optimal potential flows at the current prices.
struct BidderPlan {
  FlowVector aac_flows;
  FlowVector cua_flows;
  std::vector<double> inlets;       // per source
  std::vector<double> consumption;  // per live demand step
  double utility = 0.0;             // without tie-break terms
};

/// Tie-breaking among LP-equal plans: the opening bid of a round commits to
/// as little auctioned capacity as possible; afterwards a bidder holds on to
/// its previous bid until strictly unprofitable.
enum class BidPolicy { open_minimal, hold_previous };

AcaState make_initial_state(const Network& net, const AcaConfig& config);

/// Builds the bidder LP over x = (f_aac, f_cua, I, Y) for one player.
lp::LinearProgram build_bidder_lp(const AcaState& s, int player, BidPolicy policy,
                                  bool allow_cua);

BidderPlan optimal_potential_flows(const AcaState& s, int player, BidPolicy policy);

/// Bid vector induced by a plan: the f_cua entry on every active product,
/// zero elsewhere.
FlowVector submit_bids(const AcaState& s, const BidderPlan& plan);

struct StepOutcome {
  std::vector<int> closed_products;
  bool any_active_left = false;
};

/// Applies one simultaneous step: closes every product whose aggregate bid
/// fits (allocating at the current price), raises the price elsewhere.
/// Throws std::logic_error when a bid exceeds the bidder's previous bid.
StepOutcome auction_step(AcaState& s, const std::vector<FlowVector>& bids);

/// After a round: fixes optimal flows on owned capacity, reduces demand by
/// the ensured quantity and carries unused capacity forward as free AAC.
void finalize_round(AcaState& s);

struct StepRecord {
  int round = 0;
  int step = 0;
  std::vector<double> prices;
  std::vector<FlowVector> bids;
  std::vector<int> closed_products;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct AcaPlayerResult {
  FlowVector allocation;
  FlowVector final_flows;
  double consumed = 0.0;
  double consumption_utility = 0.0;  // U_C on the original demand curve
  double transfer_cost = 0.0;        // C_T
  double inlet_cost = 0.0;           // C_I
  double capacity_payment = 0.0;     // C_C
  double utility = 0.0;              // U = U_C - C_T - C_I - C_C
};

struct AcaOutcome {
  std::vector<AcaPlayerResult> players;
  std::vector<std::vector<double>> closing_prices;  // per round, per product
  std::vector<char> round_had_bids;                 // per round
  double total_payment = 0.0;
};

AcaOutcome run_auction(const Network& net, const AcaConfig& config,
                       const StepObserver& observer = nullptr);

}  // namespace capalloc
