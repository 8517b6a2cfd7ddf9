#pragma once

#include <string>
#include <vector>

#include "byzct/topology.hpp"

namespace byzct {

/// k-set agreement on the closure of one simplex: O is the (k-1)-skeleton of
/// the same simplex and Δ(τ) is the (k-1)-skeleton of τ.
ColorlessTask kset_task(const std::vector<std::string>& values, int k);

/// Binary consensus: I is the edge {0,1}, O two isolated vertices.
ColorlessTask consensus_task();

/// I is the edge {a,b}, O the path a - m - b. Endpoints must stay put and the
/// edge may use all of O, so no map exists without subdividing once.
ColorlessTask path_task();

}  // namespace byzct
