#pragma once

#include <string>

#include "json.hpp"

#include "capalloc/cca.hpp"
#include "capalloc/network.hpp"
#include "capalloc/scenario.hpp"

namespace capalloc {

/// Parses the network schema
///   {nodes:[id], edges:[{id,from,to,capacity,transfer_cost}],
///    sources:[{node,unit_cost}], consumers:[{node,demand:[[price,qty],..]}]}
/// Edges may carry capacity_pos/capacity_neg instead of the symmetric
/// capacity field. A scenario file wraps the same fields next to an optional
/// provenance object. Throws std::invalid_argument with a message naming the
/// offending path.
Network network_from_json(const nlohmann::json& j);
nlohmann::ordered_json network_to_json(const Network& net);

Network load_network_file(const std::string& path);

/// Scenario file: the network fields wrapped next to a provenance object
/// (generator version, configuration, seed).
nlohmann::ordered_json scenario_to_json(const Scenario& sc, const ScenarioConfig& cfg);

nlohmann::ordered_json bids_to_json(const Network& net, const CcaInstance& inst);

/// The bundled four-node example network (one source, three consumers, six
/// bidirectional edges); also shipped as data/example_network.json.
Network example_network();

/// The route lists the bundled example is defined over. Slightly smaller
/// than a full cheapest-route enumeration; kept fixed so the recorded
/// example results stay pinned.
std::vector<std::vector<Route>> example_routes();

}  // namespace capalloc
