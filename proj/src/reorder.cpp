#include "layoutgraph/reorder.hpp"

#include <deque>

namespace layoutgraph {

std::vector<int> sort_siblings(const std::vector<int>& children,
                               const std::map<int, LayoutNode>& nodes,
                               std::optional<double> tau) {
  std::vector<int> sorted;
  sorted.reserve(children.size());
  for (int child : children) {
    const BoundingBox& cb = *nodes.at(child).box;
    // Advance past every element the child does not strictly precede; ties
    // keep input order.
    size_t index = 0;
    while (index < sorted.size() &&
           !precedes(cb, *nodes.at(sorted[index]).box, tau)) {
      ++index;
    }
    sorted.insert(sorted.begin() + static_cast<long>(index), child);
  }
  return sorted;
}

ReadingOrder reorder(const LayoutGraph& graph, TraversalMode mode,
                     std::optional<double> tau) {
  graph.check_invariants();
  ReadingOrder order;
  if (mode == TraversalMode::Dfs) {
    // Stack form of the depth-first traversal: sorted children are pushed in
    // reverse so the topmost/leftmost child is popped first.
    std::vector<int> stack{graph.root_id};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (id != graph.root_id) order.sequence.push_back(id);
      std::vector<int> sorted = sort_siblings(graph.node(id).children,
                                              graph.nodes, tau);
      while (!sorted.empty()) {
        stack.push_back(sorted.back());
        sorted.pop_back();
      }
    }
  } else {
    std::deque<int> queue{graph.root_id};
    while (!queue.empty()) {
      int id = queue.front();
      queue.pop_front();
      if (id != graph.root_id) order.sequence.push_back(id);
      for (int c : sort_siblings(graph.node(id).children, graph.nodes, tau)) {
        queue.push_back(c);
      }
    }
  }
  return order;
}

}  // namespace layoutgraph
