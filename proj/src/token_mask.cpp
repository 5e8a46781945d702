#include "layoutgraph/token_mask.hpp"

#include <cctype>

namespace layoutgraph {

std::vector<std::string> whitespace_tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

TokenMap map_tokens(const ReadingOrder& order, const LayoutGraph& graph,
                    const Tokenizer& tokenize, const SpecialLayout& specials,
                    int max_len) {
  TokenMap tm;
  int pos = 0;
  for (int s = 0; s < specials.leading; ++s) {
    tm.special_positions.insert(pos);
    tm.node_of.push_back(TokenMap::kNoNode);
    ++pos;
  }
  for (int id : order.sequence) {
    const auto tokens = tokenize(graph.node(id).text);
    if (tokens.empty()) {
      throw TokenMapError("node " + std::to_string(id) +
                          " tokenizes to nothing");
    }
    TokenRange range{pos, pos + static_cast<int>(tokens.size())};
    if (range.end + specials.trailing > max_len) {
      throw TokenMapError(
          "sequence overflows max length " + std::to_string(max_len) +
          " at node " + std::to_string(id) + " (token " +
          std::to_string(pos) + ")");
    }
    tm.tokens_of[id] = range;
    for (int t = range.begin; t < range.end; ++t) {
      tm.node_of.push_back(id);
    }
    pos = range.end;
  }
  for (int s = 0; s < specials.trailing; ++s) {
    tm.special_positions.insert(pos);
    tm.node_of.push_back(TokenMap::kNoNode);
    ++pos;
  }
  tm.token_count = pos;
  return tm;
}

TokenRel token_relation(const TokenMap& tm, const LayoutGraph& graph, int i,
                        int j) {
  if (tm.special_positions.count(i) || tm.special_positions.count(j)) {
    throw TokenMapError("token_relation on a special position");
  }
  int a = tm.node_of.at(static_cast<size_t>(i));
  int b = tm.node_of.at(static_cast<size_t>(j));
  if (a == b) return {TokenRelKind::SameNode, Relation::None};
  if (auto label = graph.edge_label(a, b)) {
    return {TokenRelKind::Edge, *label};
  }
  return {TokenRelKind::Unrelated, Relation::None};
}

GraphMask build_graph_mask(const TokenMap& tm, const LayoutGraph& graph,
                           const RelationWeights& w) {
  const int n = tm.token_count;
  GraphMask mask;
  mask.size = n;
  mask.values.assign(static_cast<size_t>(n) * n, 0.0);
  mask.labels.assign(static_cast<size_t>(n) * n, GraphMask::kSpecial);

  // Node-pair labels are block constant, so resolve each pair once and fan
  // out over the token ranges.
  for (const auto& [a, ra] : tm.tokens_of) {
    for (const auto& [b, rb] : tm.tokens_of) {
      double value;
      int8_t label;
      if (a == b) {
        value = w.self_weight;
        label = GraphMask::kSelf;
      } else if (auto rel = graph.edge_label(a, b)) {
        value = w.weight_of.at(*rel);
        label = static_cast<int8_t>(*rel);
      } else {
        value = w.fill;
        label = GraphMask::kFill;
      }
      for (int i = ra.begin; i < ra.end; ++i) {
        for (int j = rb.begin; j < rb.end; ++j) {
          mask.values[static_cast<size_t>(i) * n + j] = value;
          mask.labels[static_cast<size_t>(i) * n + j] = label;
        }
      }
    }
  }
  return mask;
}

}  // namespace layoutgraph
