#pragma once

#include <optional>
#include <vector>

#include "layoutgraph/layout_graph.hpp"

namespace layoutgraph {

enum class TraversalMode { Dfs, Bfs };

// Permutation of all non-root node ids.
struct ReadingOrder {
  std::vector<int> sequence;
};

// Stable insertion sort of same-parent node ids under the top-to-bottom,
// left-to-right precedence of their boxes.
std::vector<int> sort_siblings(const std::vector<int>& children,
                               const std::map<int, LayoutNode>& nodes,
                               std::optional<double> tau = std::nullopt);

// Depth-first traversal from the pseudo root with children visited in sorted
// order; the root itself is dropped from the output. Bfs mode does the same
// level by level.
ReadingOrder reorder(const LayoutGraph& graph,
                     TraversalMode mode = TraversalMode::Dfs,
                     std::optional<double> tau = std::nullopt);

}  // namespace layoutgraph
