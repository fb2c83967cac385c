#pragma once

#include <string>
#include <vector>

namespace capalloc {

using NodeId = int;

/// Directed-labelled pipeline edge. Flow is allowed in both directions;
/// capacities may differ per direction, the transfer cost is shared.
struct Edge {
  int id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double capacity_pos = 0.0;
  double capacity_neg = 0.0;
  double transfer_cost = 0.0;
};

struct Source {
  NodeId node = 0;
  double unit_cost = 0.0;  // no quantity limit
};

struct DemandStep {
  double price = 0.0;
  double quantity = 0.0;

  bool operator==(const DemandStep&) const = default;
};

/// Piecewise-constant inverse demand: prices non-increasing, quantities > 0.
using DemandCurve = std::vector<DemandStep>;

struct Consumer {
  NodeId node = 0;
  DemandCurve demand;
};

/// One traversed edge of a route; sign +1 when the traversal direction
/// coincides with the edge orientation.
struct SignedEdge {
  int edge_id = 0;
  int sign = 1;

  bool operator==(const SignedEdge&) const = default;
};

/// Simple path from some source node to the owning consumer's node.
struct Route {
  int player = 0;  // consumer index
  std::vector<SignedEdge> edges;

  bool operator==(const Route&) const = default;
};

struct Network {
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  std::vector<Source> sources;
  std::vector<Consumer> consumers;

  int node_index(NodeId id) const;       // -1 when unknown
  int edge_index(int edge_id) const;     // -1 when unknown
  int source_index(NodeId node) const;   // -1 when the node is not a source

  std::size_t num_products() const { return 2 * edges.size(); }
  double total_bidirectional_capacity() const;
};

/// Product-indexed vector of length 2m, laid out [e1+ .. em+, e1- .. em-].
using FlowVector = std::vector<double>;

inline int product_index(const Network& net, int edge_idx, bool positive) {
  return positive ? edge_idx : edge_idx + static_cast<int>(net.edges.size());
}

/// Structural checks; returns one message per violation, empty when valid.
std::vector<std::string> validate(const Network& net);

bool is_network_connected(const Network& net);

double source_cost_of_route(const Network& net, const Route& route);
double route_transfer_cost(const Network& net, const Route& route);

/// Source unit cost at the route origin plus the transfer costs of all
/// traversed edges.
double route_unit_cost(const Network& net, const Route& route);

/// Walks the signed edges; returns true iff they form a simple path from a
/// source node to the consumer's node.
bool route_is_valid(const Network& net, const Route& route);

/// Up to k loopless source->consumer paths ordered by unit cost, ties broken
/// by the lexicographic signed-edge-id sequence. Lazily enumerates paths in
/// cost order, so only the k cheapest are ever expanded.
std::vector<Route> k_cheapest_routes(const Network& net, int player, int k);

double max_demand_price(const DemandCurve& d);

/// Integral of the inverse demand curve from 0 to min(quantity, total).
double consumption_utility(const DemandCurve& d, double quantity);

/// Removes quantity from the front (highest-price steps first).
DemandCurve reduce_demand(const DemandCurve& d, double quantity);

/// Nodal-balance equality rows (one per node, zero rhs) over the variable
/// layout x = (f_aac, f_cua, I, Y):
///   f_aac, f_cua : flows per product, both vectors of length 2m
///   I            : inlet per source
///   Y            : consumption per demand step of the given player
struct BalanceMatrix {
  int num_vars = 0;
  std::vector<std::vector<double>> rows;  // nodes x num_vars

  std::vector<double> residual(const std::vector<double>& x) const;
};

BalanceMatrix nodal_balance_matrix(const Network& net, int player, int demand_steps);

}  // namespace capalloc
