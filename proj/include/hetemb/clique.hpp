#pragma once

#include <chrono>
#include <vector>

#include "hetemb/graph.hpp"

namespace hetemb {

struct CliqueResult {
  std::vector<NodeId> members;
  bool exact = true;  // false when the time budget ran out
};

/// Largest clique found greedily from every start vertex (highest-degree
/// candidate first).
CliqueResult greedy_clique(const Graph& g);

/// Exact maximum clique by Bron-Kerbosch with Tomita pivoting and a size
/// bound. Falls back to the best clique found (at least the greedy one) when
/// the budget is exhausted.
CliqueResult max_clique(const Graph& g,
                        std::chrono::milliseconds budget = std::chrono::seconds(10));

}  // namespace hetemb
