#include "capalloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <set>
#include <stdexcept>

namespace capalloc {

namespace {
constexpr double kTol = 1e-9;
}

int Network::node_index(NodeId id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == id) return static_cast<int>(i);
  return -1;
}

int Network::edge_index(int edge_id) const {
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == edge_id) return static_cast<int>(i);
  return -1;
}

int Network::source_index(NodeId node) const {
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (sources[i].node == node) return static_cast<int>(i);
  return -1;
}

double Network::total_bidirectional_capacity() const {
  double sum = 0.0;
  for (const auto& e : edges) sum += e.capacity_pos + e.capacity_neg;
  return sum;
}

bool is_network_connected(const Network& net) {
  if (net.nodes.empty()) return false;
  std::vector<std::vector<int>> adj(net.nodes.size());
  for (const auto& e : net.edges) {
    const int a = net.node_index(e.from), b = net.node_index(e.to);
    if (a < 0 || b < 0) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(net.nodes.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  return reached == net.nodes.size();
}

std::vector<std::string> validate(const Network& net) {
  std::vector<std::string> out;
  if (net.nodes.empty()) out.push_back("network has no nodes");
  std::set<NodeId> node_set(net.nodes.begin(), net.nodes.end());
  if (node_set.size() != net.nodes.size()) out.push_back("duplicate node ids");

  std::set<int> edge_ids;
  for (const auto& e : net.edges) {
    if (!edge_ids.insert(e.id).second)
      out.push_back("duplicate edge id " + std::to_string(e.id));
    if (!node_set.count(e.from) || !node_set.count(e.to))
      out.push_back("edge " + std::to_string(e.id) + " references an undeclared node");
    if (e.from == e.to) out.push_back("edge " + std::to_string(e.id) + " is a self-loop");
    if (e.capacity_pos < 0 || e.capacity_neg < 0)
      out.push_back("edge " + std::to_string(e.id) + " has negative capacity");
    if (e.transfer_cost < 0)
      out.push_back("edge " + std::to_string(e.id) + " has negative transfer cost");
  }

  std::set<NodeId> source_nodes;
  for (const auto& s : net.sources) {
    if (!node_set.count(s.node))
      out.push_back("source at undeclared node " + std::to_string(s.node));
    if (!source_nodes.insert(s.node).second)
      out.push_back("duplicate source at node " + std::to_string(s.node));
    if (s.unit_cost < 0)
      out.push_back("source at node " + std::to_string(s.node) + " has negative cost");
  }
  if (net.sources.empty()) out.push_back("network has no sources");
  if (net.consumers.empty()) out.push_back("network has no consumers");

  std::set<NodeId> consumer_nodes;
  for (const auto& c : net.consumers) {
    if (!node_set.count(c.node))
      out.push_back("consumer at undeclared node " + std::to_string(c.node));
    if (!consumer_nodes.insert(c.node).second)
      out.push_back("duplicate consumer at node " + std::to_string(c.node));
    if (source_nodes.count(c.node))
      out.push_back("node " + std::to_string(c.node) + " is both source and consumer");
    for (std::size_t t = 0; t < c.demand.size(); ++t) {
      if (c.demand[t].quantity <= 0)
        out.push_back("consumer at node " + std::to_string(c.node) +
                      " has a non-positive demand step quantity");
      if (t > 0 && c.demand[t].price > c.demand[t - 1].price + kTol)
        out.push_back("consumer at node " + std::to_string(c.node) +
                      " has increasing demand prices");
    }
  }
  if (!net.nodes.empty() && !is_network_connected(net)) out.push_back("graph is not connected");

  // reachability: every consumer must see at least one source through edges
  if (!net.sources.empty() && !net.consumers.empty()) {
    std::set<NodeId> reach;
    for (const auto& s : net.sources) reach.insert(s.node);
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& e : net.edges) {
        if (reach.count(e.from) && !reach.count(e.to)) {
          reach.insert(e.to);
          grew = true;
        } else if (reach.count(e.to) && !reach.count(e.from)) {
          reach.insert(e.from);
          grew = true;
        }
      }
    }
    for (const auto& c : net.consumers) {
      if (!reach.count(c.node))
        out.push_back("consumer at node " + std::to_string(c.node) +
                      " cannot reach any source");
    }
  }
  return out;
}

double source_cost_of_route(const Network& net, const Route& route) {
  if (route.edges.empty()) {
    const int ci = route.player;
    if (ci < 0 || ci >= static_cast<int>(net.consumers.size()))
      throw std::invalid_argument("route player out of range");
    const int si = net.source_index(net.consumers[ci].node);
    if (si < 0) throw std::invalid_argument("zero-length route with no source at consumer");
    return net.sources[si].unit_cost;
  }
  const auto& first = route.edges.front();
  const int ei = net.edge_index(first.edge_id);
  if (ei < 0) throw std::invalid_argument("route references unknown edge");
  const NodeId origin = first.sign > 0 ? net.edges[ei].from : net.edges[ei].to;
  const int si = net.source_index(origin);
  if (si < 0) throw std::invalid_argument("route does not start at a source");
  return net.sources[si].unit_cost;
}

double route_transfer_cost(const Network& net, const Route& route) {
  double sum = 0.0;
  for (const auto& se : route.edges) {
    const int ei = net.edge_index(se.edge_id);
    if (ei < 0) throw std::invalid_argument("route references unknown edge");
    sum += net.edges[ei].transfer_cost;
  }
  return sum;
}

double route_unit_cost(const Network& net, const Route& route) {
  return source_cost_of_route(net, route) + route_transfer_cost(net, route);
}

bool route_is_valid(const Network& net, const Route& route) {
  if (route.player < 0 || route.player >= static_cast<int>(net.consumers.size())) return false;
  const NodeId target = net.consumers[route.player].node;
  if (route.edges.empty()) return net.source_index(target) >= 0;

  std::set<int> used;
  NodeId at = 0;
  bool first = true;
  for (const auto& se : route.edges) {
    const int ei = net.edge_index(se.edge_id);
    if (ei < 0 || (se.sign != 1 && se.sign != -1)) return false;
    if (!used.insert(se.edge_id).second) return false;
    const auto& e = net.edges[ei];
    const NodeId tail = se.sign > 0 ? e.from : e.to;
    const NodeId head = se.sign > 0 ? e.to : e.from;
    if (first) {
      if (net.source_index(tail) < 0) return false;
      at = tail;
      first = false;
    }
    if (tail != at) return false;
    at = head;
  }
  return at == target;
}

namespace {

// Partial path state for the best-first route search.
struct PathState {
  double cost = 0.0;
  std::vector<int> seq;  // signed edge ids, route so far
  NodeId at = 0;
  std::uint64_t visited = 0;  // node-index bitmask

  bool operator>(const PathState& o) const {
    if (cost != o.cost) return cost > o.cost;
    return seq > o.seq;
  }
};

}  // namespace

std::vector<Route> k_cheapest_routes(const Network& net, int player, int k) {
  std::vector<Route> out;
  if (player < 0 || player >= static_cast<int>(net.consumers.size()) || k < 1) return out;
  if (net.nodes.size() > 64)
    throw std::invalid_argument("route search supports at most 64 nodes");
  const NodeId target = net.consumers[player].node;

  // Outgoing arcs per node index: (edge index, sign, head node index).
  struct Arc {
    int edge_idx;
    int sign;
    int head;
  };
  std::vector<std::vector<Arc>> arcs(net.nodes.size());
  for (std::size_t ei = 0; ei < net.edges.size(); ++ei) {
    const auto& e = net.edges[ei];
    const int a = net.node_index(e.from), b = net.node_index(e.to);
    if (a < 0 || b < 0) continue;
    arcs[a].push_back({static_cast<int>(ei), +1, b});
    arcs[b].push_back({static_cast<int>(ei), -1, a});
  }

  std::priority_queue<PathState, std::vector<PathState>, std::greater<>> heap;
  for (const auto& s : net.sources) {
    const int ni = net.node_index(s.node);
    if (ni < 0) continue;
    PathState st;
    st.cost = s.unit_cost;
    st.at = s.node;
    st.visited = std::uint64_t{1} << ni;
    heap.push(std::move(st));
  }

  constexpr long kExpansionCap = 10'000'000;
  long expansions = 0;
  while (!heap.empty() && static_cast<int>(out.size()) < k) {
    if (++expansions > kExpansionCap)
      throw std::runtime_error("route enumeration exceeded expansion cap");
    PathState st = heap.top();
    heap.pop();
    if (st.at == target) {
      Route r;
      r.player = player;
      for (int sid : st.seq) {
        const int ei = std::abs(sid) - 1;
        r.edges.push_back({net.edges[ei].id, sid > 0 ? +1 : -1});
      }
      out.push_back(std::move(r));
      continue;
    }
    const int ni = net.node_index(st.at);
    for (const auto& arc : arcs[ni]) {
      if (st.visited & (std::uint64_t{1} << arc.head)) continue;
      PathState nx;
      nx.cost = st.cost + net.edges[arc.edge_idx].transfer_cost;
      nx.seq = st.seq;
      nx.seq.push_back(arc.sign * (arc.edge_idx + 1));
      nx.at = net.nodes[arc.head];
      nx.visited = st.visited | (std::uint64_t{1} << arc.head);
      heap.push(std::move(nx));
    }
  }
  return out;
}

double max_demand_price(const DemandCurve& d) {
  double p = 0.0;
  for (const auto& s : d) p = std::max(p, s.price);
  return p;
}

double consumption_utility(const DemandCurve& d, double quantity) {
  if (quantity < 0) throw std::invalid_argument("negative quantity");
  double u = 0.0, rem = quantity;
  for (const auto& s : d) {
    if (rem <= kTol) break;
    const double take = std::min(rem, s.quantity);
    u += s.price * take;
    rem -= take;
  }
  return u;
}

DemandCurve reduce_demand(const DemandCurve& d, double quantity) {
  if (quantity < 0) throw std::invalid_argument("negative quantity");
  DemandCurve out;
  double rem = quantity;
  for (const auto& s : d) {
    if (rem >= s.quantity - kTol) {
      rem -= s.quantity;
      rem = std::max(rem, 0.0);
    } else {
      out.push_back({s.price, s.quantity - rem});
      rem = 0.0;
    }
  }
  return out;
}

std::vector<double> BalanceMatrix::residual(const std::vector<double>& x) const {
  std::vector<double> r(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < num_vars; ++j) r[i] += rows[i][j] * x[j];
  }
  return r;
}

BalanceMatrix nodal_balance_matrix(const Network& net, int player, int demand_steps) {
  if (player < 0 || player >= static_cast<int>(net.consumers.size()))
    throw std::invalid_argument("player out of range");
  const int m = static_cast<int>(net.edges.size());
  const int ns = static_cast<int>(net.sources.size());
  BalanceMatrix bm;
  bm.num_vars = 4 * m + ns + demand_steps;
  bm.rows.assign(net.nodes.size(), std::vector<double>(bm.num_vars, 0.0));

  // Positive flow on edge e leaves e.from and enters e.to; the negative
  // product is the reverse. f_aac occupies [0, 2m), f_cua [2m, 4m).
  for (int e = 0; e < m; ++e) {
    const int a = net.node_index(net.edges[e].from);
    const int b = net.node_index(net.edges[e].to);
    for (int base : {0, 2 * m}) {
      bm.rows[a][base + e] -= 1.0;
      bm.rows[b][base + e] += 1.0;
      bm.rows[b][base + m + e] -= 1.0;
      bm.rows[a][base + m + e] += 1.0;
    }
  }
  for (int s = 0; s < ns; ++s) {
    bm.rows[net.node_index(net.sources[s].node)][4 * m + s] += 1.0;
  }
  const int cn = net.node_index(net.consumers[player].node);
  for (int t = 0; t < demand_steps; ++t) bm.rows[cn][4 * m + ns + t] -= 1.0;
  return bm;
}

}  // namespace capalloc
