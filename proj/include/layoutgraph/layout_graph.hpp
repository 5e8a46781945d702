#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "layoutgraph/document.hpp"
#include "layoutgraph/geometry.hpp"

namespace layoutgraph {

struct LayoutNode {
  int id = 0;
  std::string text;
  std::optional<BoundingBox> box;  // absent only for the pseudo root
  std::optional<int> parent;
  std::vector<int> children;
};

// Non-empty group of nodes with tight union bounds.
struct Region {
  std::vector<int> member_ids;
  BoundingBox bounds;
};

struct SiblingEdge {
  int from = 0;
  int to = 0;
  Relation label = Relation::None;

  bool operator==(const SiblingEdge&) const = default;
};

// Document layout tree plus sibling spatial edges.
struct LayoutGraph {
  std::map<int, LayoutNode> nodes;
  std::vector<std::pair<int, int>> tree_edges;  // (parent, child)
  std::vector<SiblingEdge> sibling_edges;
  int root_id = -1;

  const LayoutNode& node(int id) const;
  // Label of the sibling or tree edge from -> to, if any.
  std::optional<Relation> edge_label(int from, int to) const;
  // Throws GraphError if any structural invariant is violated.
  void check_invariants() const;
};

struct GraphError : std::runtime_error {
  explicit GraphError(const std::string& what) : std::runtime_error(what) {}
};

// Picks the node standing for a whole region: the one that is both topmost
// and leftmost (by box y_min/x_min); failing that, topmost, ties broken by
// leftmost then smallest id.
int find_representative(const Region& region,
                        const std::map<int, LayoutNode>& nodes);

// Flat subtree for one region: the representative parents every other member.
struct SubtreeFragment {
  int representative = 0;
  std::vector<std::pair<int, int>> edges;  // (parent, child)
};

SubtreeFragment build_subtree(const Region& region,
                              const std::map<int, LayoutNode>& nodes);

// Hangs each fragment's representative off a fresh pseudo root (synthetic id,
// no box, no text). Node ids must be disjoint across fragments. Nested
// hierarchies are expressed by fragments whose edge lists already chain
// representatives; build_layout_graph produces those.
LayoutGraph assemble_tree(const std::vector<SubtreeFragment>& fragments,
                          const std::map<int, LayoutNode>& nodes);

// Connects same-parent nodes (including the pseudo root's children) with the
// spatial relation of their boxes, then closes the edge set under inversion.
void add_sibling_relations(LayoutGraph& graph,
                           double eps = kDefaultCenterEpsilon);

// Full pipeline: regions -> subtrees -> assembled tree under a pseudo root ->
// sibling enrichment. Deterministic for identical input.
LayoutGraph build_layout_graph(const GenericDocument& doc,
                               double eps = kDefaultCenterEpsilon);

}  // namespace layoutgraph
