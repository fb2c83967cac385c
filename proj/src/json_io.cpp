#include "capalloc/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace capalloc {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double number_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(where + ": missing or non-numeric '" + key + "'");
  return j[key].get<double>();
}

}  // namespace

Network network_from_json(const json& root) {
  const json& j = root.contains("network") ? root["network"] : root;
  Network net;
  if (!j.is_object()) throw std::invalid_argument("network: expected an object");
  for (const char* key : {"nodes", "edges", "sources", "consumers"}) {
    if (!j.contains(key) || !j[key].is_array())
      throw std::invalid_argument(std::string("network.") + key + ": missing array");
  }
  for (const auto& n : j["nodes"]) {
    if (!n.is_number_integer()) throw std::invalid_argument("network.nodes: expected integers");
    net.nodes.push_back(n.get<int>());
  }
  int idx = 0;
  for (const auto& e : j["edges"]) {
    const std::string where = "network.edges[" + std::to_string(idx++) + "]";
    Edge edge;
    edge.id = static_cast<int>(number_at(e, "id", where));
    edge.from = static_cast<int>(number_at(e, "from", where));
    edge.to = static_cast<int>(number_at(e, "to", where));
    if (e.contains("capacity")) {
      edge.capacity_pos = edge.capacity_neg = number_at(e, "capacity", where);
    } else {
      edge.capacity_pos = number_at(e, "capacity_pos", where);
      edge.capacity_neg = number_at(e, "capacity_neg", where);
    }
    edge.transfer_cost = number_at(e, "transfer_cost", where);
    net.edges.push_back(edge);
  }
  idx = 0;
  for (const auto& s : j["sources"]) {
    const std::string where = "network.sources[" + std::to_string(idx++) + "]";
    Source src;
    src.node = static_cast<int>(number_at(s, "node", where));
    src.unit_cost = number_at(s, "unit_cost", where);
    net.sources.push_back(src);
  }
  idx = 0;
  for (const auto& c : j["consumers"]) {
    const std::string where = "network.consumers[" + std::to_string(idx++) + "]";
    Consumer consumer;
    consumer.node = static_cast<int>(number_at(c, "node", where));
    if (!c.contains("demand") || !c["demand"].is_array())
      throw std::invalid_argument(where + ": missing demand array");
    for (const auto& step : c["demand"]) {
      if (!step.is_array() || step.size() != 2 || !step[0].is_number() || !step[1].is_number())
        throw std::invalid_argument(where + ".demand: expected [price, quantity] pairs");
      consumer.demand.push_back({step[0].get<double>(), step[1].get<double>()});
    }
    net.consumers.push_back(std::move(consumer));
  }
  return net;
}

ordered_json network_to_json(const Network& net) {
  ordered_json j;
  j["nodes"] = net.nodes;
  j["edges"] = ordered_json::array();
  for (const auto& e : net.edges) {
    ordered_json je;
    je["id"] = e.id;
    je["from"] = e.from;
    je["to"] = e.to;
    if (e.capacity_pos == e.capacity_neg) {
      je["capacity"] = e.capacity_pos;
    } else {
      je["capacity_pos"] = e.capacity_pos;
      je["capacity_neg"] = e.capacity_neg;
    }
    je["transfer_cost"] = e.transfer_cost;
    j["edges"].push_back(std::move(je));
  }
  j["sources"] = ordered_json::array();
  for (const auto& s : net.sources) {
    ordered_json js;
    js["node"] = s.node;
    js["unit_cost"] = s.unit_cost;
    j["sources"].push_back(std::move(js));
  }
  j["consumers"] = ordered_json::array();
  for (const auto& c : net.consumers) {
    ordered_json jc;
    jc["node"] = c.node;
    jc["demand"] = ordered_json::array();
    for (const auto& st : c.demand) jc["demand"].push_back({st.price, st.quantity});
    j["consumers"].push_back(std::move(jc));
  }
  return j;
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;  // json parse errors carry byte positions
  return network_from_json(j);
}

ordered_json scenario_to_json(const Scenario& sc, const ScenarioConfig& cfg) {
  ordered_json j;
  j["provenance"] = {{"generator", "splitmix64-v1"},
                     {"label", sc.label},
                     {"seed", sc.seed},
                     {"config",
                      {{"n_v", cfg.n_v},
                       {"n_e", cfg.n_e},
                       {"n_s", cfg.n_s},
                       {"cap", {cfg.cap_min, cfg.cap_max}},
                       {"transfer", {cfg.transfer_min, cfg.transfer_max}},
                       {"source_cost", {cfg.source_cost_min, cfg.source_cost_max}},
                       {"demand_quantity", {cfg.demand_quantity_min, cfg.demand_quantity_max}},
                       {"demand_steps", cfg.demand_steps},
                       {"demand_price_factor", cfg.demand_price_factor},
                       {"routes_per_consumer", cfg.routes_per_consumer}}}};
  j["network"] = network_to_json(sc.network);
  return j;
}

ordered_json bids_to_json(const Network& net, const CcaInstance& inst) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < inst.num_players(); ++i) {
    ordered_json jp;
    jp["player"] = i;
    jp["node"] = net.consumers[i].node;
    jp["routes"] = ordered_json::array();
    for (const auto& r : inst.routes[i]) {
      ordered_json jr;
      jr["edges"] = ordered_json::array();
      for (const auto& se : r.edges) jr["edges"].push_back(se.sign * se.edge_id);
      jr["unit_cost"] = route_unit_cost(net, r);
      jr["bids"] = ordered_json::array();
      jp["routes"].push_back(std::move(jr));
    }
    out.push_back(std::move(jp));
  }
  for (const auto& b : inst.bids) {
    ordered_json jb;
    jb["quantity"] = b.quantity;
    jb["price"] = b.price;
    out[b.player]["routes"][b.route_index]["bids"].push_back(std::move(jb));
  }
  return out;
}

std::vector<std::vector<Route>> example_routes() {
  auto route = [](int player, std::initializer_list<int> ids) {
    Route r;
    r.player = player;
    for (int s : ids) r.edges.push_back({s > 0 ? s : -s, s > 0 ? 1 : -1});
    return r;
  };
  return {
      {route(0, {-1}), route(0, {-2, 4}), route(0, {-3, 5}), route(0, {-2, -6, 5}),
       route(0, {-3, 6, 4})},
      {route(1, {-2}), route(1, {-1, -4}), route(1, {-3, 5, -4}), route(1, {-3, 6})},
      {route(2, {-3}), route(2, {-1, -5}), route(2, {-2, -6}), route(2, {-2, 4, -5})},
  };
}

Network example_network() {
  Network net;
  net.nodes = {1, 2, 3, 4};
  net.edges = {
      {1, 2, 1, 80, 80, 9.0},  {2, 3, 1, 75, 75, 8.0},  {3, 4, 1, 70, 70, 11.0},
      {4, 3, 2, 60, 60, 4.0},  {5, 4, 2, 60, 60, 4.5},  {6, 4, 3, 60, 60, 5.0},
  };
  net.sources = {{1, 23.0}};
  net.consumers = {
      {2, {{47, 50}, {39, 40}, {30, 35}}},
      {3, {{46, 40}, {38, 45}, {32, 35}}},
      {4, {{53, 50}, {49, 35}, {36, 45}}},
  };
  return net;
}

}  // namespace capalloc
