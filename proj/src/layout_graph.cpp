#include "layoutgraph/layout_graph.hpp"

#include <algorithm>
#include <set>

namespace layoutgraph {

const LayoutNode& LayoutGraph::node(int id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) {
    throw GraphError("unknown node id " + std::to_string(id));
  }
  return it->second;
}

std::optional<Relation> LayoutGraph::edge_label(int from, int to) const {
  for (const auto& [p, c] : tree_edges) {
    if (p == from && c == to) return Relation::ParentChild;
    if (p == to && c == from) return Relation::ChildParent;
  }
  for (const auto& e : sibling_edges) {
    if (e.from == from && e.to == to) return e.label;
  }
  return std::nullopt;
}

void LayoutGraph::check_invariants() const {
  if (!nodes.count(root_id)) throw GraphError("root id not in node set");
  int parentless = 0;
  for (const auto& [id, n] : nodes) {
    if (n.id != id) throw GraphError("node id mismatch in map");
    if (!n.parent) ++parentless;
  }
  if (parentless != 1) {
    throw GraphError("expected exactly one parentless node, found " +
                     std::to_string(parentless));
  }
  if (node(root_id).parent) throw GraphError("root has a parent");
  if (tree_edges.size() + 1 != nodes.size()) {
    throw GraphError("tree edge count must be node count - 1");
  }
  // Reachability from the root covers all nodes; with |E| = |V| - 1 this
  // rules out cycles.
  std::set<int> seen{root_id};
  std::vector<int> stack{root_id};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    for (int c : node(cur).children) {
      if (!seen.insert(c).second) throw GraphError("node visited twice");
      if (!node(c).parent || *node(c).parent != cur) {
        throw GraphError("child/parent link mismatch at node " +
                         std::to_string(c));
      }
      stack.push_back(c);
    }
  }
  if (seen.size() != nodes.size()) throw GraphError("tree is not connected");

  std::set<std::tuple<int, int, Relation>> edge_set;
  for (const auto& e : sibling_edges) {
    if (e.label == Relation::None) throw GraphError("sibling edge labeled None");
    if (node(e.from).parent != node(e.to).parent) {
      throw GraphError("sibling edge between non-siblings");
    }
    edge_set.insert({e.from, e.to, e.label});
  }
  for (const auto& e : sibling_edges) {
    if (!edge_set.count({e.to, e.from, inverse(e.label)})) {
      throw GraphError("sibling edges not closed under inversion");
    }
  }
}

int find_representative(const Region& region,
                        const std::map<int, LayoutNode>& nodes) {
  if (region.member_ids.empty()) throw GraphError("empty region");
  auto box_of = [&](int id) -> const BoundingBox& {
    auto it = nodes.find(id);
    if (it == nodes.end() || !it->second.box) {
      throw GraphError("region member " + std::to_string(id) + " has no box");
    }
    return *it->second.box;
  };
  double top = box_of(region.member_ids.front()).y_min;
  double left = box_of(region.member_ids.front()).x_min;
  for (int id : region.member_ids) {
    top = std::min(top, box_of(id).y_min);
    left = std::min(left, box_of(id).x_min);
  }
  for (int id : region.member_ids) {
    if (box_of(id).y_min == top && box_of(id).x_min == left) return id;
  }
  // No member is both topmost and leftmost: take the topmost, ties broken by
  // leftmost, then smallest id.
  int best = region.member_ids.front();
  for (int id : region.member_ids) {
    const BoundingBox& b = box_of(id);
    const BoundingBox& bb = box_of(best);
    if (b.y_min < bb.y_min ||
        (b.y_min == bb.y_min &&
         (b.x_min < bb.x_min || (b.x_min == bb.x_min && id < best)))) {
      best = id;
    }
  }
  return best;
}

SubtreeFragment build_subtree(const Region& region,
                              const std::map<int, LayoutNode>& nodes) {
  SubtreeFragment frag;
  frag.representative = find_representative(region, nodes);
  for (int id : region.member_ids) {
    if (id != frag.representative) frag.edges.emplace_back(frag.representative, id);
  }
  return frag;
}

LayoutGraph assemble_tree(const std::vector<SubtreeFragment>& fragments,
                          const std::map<int, LayoutNode>& nodes) {
  LayoutGraph g;
  g.nodes = nodes;
  std::set<int> owned;
  int max_id = -1;
  for (const auto& [id, n] : nodes) max_id = std::max(max_id, id);
  auto claim = [&](int id) {
    if (!g.nodes.count(id)) {
      throw GraphError("fragment references unknown node " + std::to_string(id));
    }
    if (!owned.insert(id).second) {
      throw GraphError("duplicate node id " + std::to_string(id) +
                       " across fragments");
    }
  };
  for (const auto& frag : fragments) {
    claim(frag.representative);
    for (const auto& [p, c] : frag.edges) {
      if (c != frag.representative) claim(c);
    }
  }

  g.root_id = max_id + 1;
  LayoutNode root;
  root.id = g.root_id;
  g.nodes.emplace(g.root_id, root);

  auto link = [&](int parent, int child) {
    g.tree_edges.emplace_back(parent, child);
    g.nodes.at(parent).children.push_back(child);
    g.nodes.at(child).parent = parent;
  };
  for (const auto& frag : fragments) {
    link(g.root_id, frag.representative);
    for (const auto& [p, c] : frag.edges) link(p, c);
  }
  g.check_invariants();
  return g;
}

namespace {

// Returns the representative of the region after adding its (possibly
// nested) subtree edges into `edges`. Members of a region are its direct
// leaves plus the representatives of its child regions.
int process_region(const RegionSpec& region, std::map<int, LayoutNode>& nodes,
                   std::vector<std::pair<int, int>>& edges) {
  Region members;
  for (const Leaf& leaf : region.leaves) {
    LayoutNode n;
    n.id = leaf.id;
    n.text = leaf.text;
    n.box = leaf.box;
    if (!nodes.emplace(leaf.id, std::move(n)).second) {
      throw GraphError("duplicate node id " + std::to_string(leaf.id));
    }
    members.member_ids.push_back(leaf.id);
  }
  for (const RegionSpec& child : region.children) {
    members.member_ids.push_back(process_region(child, nodes, edges));
  }
  // Tight bounds, ignoring any bounds the input supplied.
  bool first = true;
  for (int id : members.member_ids) {
    const BoundingBox& b = *nodes.at(id).box;
    members.bounds = first ? b : merge(members.bounds, b);
    first = false;
  }
  SubtreeFragment frag = build_subtree(members, nodes);
  for (const auto& e : frag.edges) edges.push_back(e);
  return frag.representative;
}

}  // namespace

void add_sibling_relations(LayoutGraph& graph, double eps) {
  graph.sibling_edges.clear();
  std::set<std::tuple<int, int, Relation>> edge_set;
  auto add = [&](int i, int j, Relation rel) {
    if (edge_set.insert({i, j, rel}).second) {
      graph.sibling_edges.push_back({i, j, rel});
    }
  };
  for (const auto& [id, n] : graph.nodes) {
    const auto& sibs = n.children;
    for (size_t a = 0; a < sibs.size(); ++a) {
      for (size_t b = 0; b < sibs.size(); ++b) {
        if (a == b) continue;
        int i = sibs[a], j = sibs[b];
        Relation rel = spatial_relation(*graph.node(i).box,
                                        *graph.node(j).box, eps);
        if (rel != Relation::None) {
          add(i, j, rel);
          add(j, i, inverse(rel));
        }
      }
    }
  }
}

LayoutGraph build_layout_graph(const GenericDocument& doc, double eps) {
  std::map<int, LayoutNode> nodes;
  std::vector<SubtreeFragment> fragments;
  for (const RegionSpec& region : doc.regions) {
    SubtreeFragment frag;
    frag.representative = process_region(region, nodes, frag.edges);
    fragments.push_back(std::move(frag));
  }
  LayoutGraph g = assemble_tree(fragments, nodes);
  add_sibling_relations(g, eps);
  g.check_invariants();
  return g;
}

}  // namespace layoutgraph
