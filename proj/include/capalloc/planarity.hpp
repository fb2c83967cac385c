#pragma once

#include <utility>
#include <vector>

namespace capalloc {

/// Left-right planarity test over 0-based vertex indices. Handles
/// disconnected inputs; parallel edges and self-loops are ignored (they never
/// change planarity of the rest).
bool is_planar(int num_vertices, const std::vector<std::pair<int, int>>& edges);

}  // namespace capalloc
