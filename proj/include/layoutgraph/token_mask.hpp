#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "layoutgraph/layout_graph.hpp"
#include "layoutgraph/reorder.hpp"

namespace layoutgraph {

struct TokenRange {
  int begin = 0;  // inclusive
  int end = 0;    // exclusive
  int size() const { return end - begin; }
};

// Surjective many-to-one token -> node assignment. Special positions
// (classification, padding, image placeholders) carry no node.
struct TokenMap {
  int token_count = 0;
  std::vector<int> node_of;  // kNoNode at special positions
  std::map<int, TokenRange> tokens_of;
  std::set<int> special_positions;

  static constexpr int kNoNode = -1;
};

// Reserved positions around the text span (e.g. a leading [CLS], trailing
// image placeholders).
struct SpecialLayout {
  int leading = 0;
  int trailing = 0;
};

using Tokenizer = std::function<std::vector<std::string>(const std::string&)>;

// Splits on ASCII whitespace.
std::vector<std::string> whitespace_tokenize(const std::string& text);

struct TokenMapError : std::runtime_error {
  explicit TokenMapError(const std::string& what) : std::runtime_error(what) {}
};

// Lays out node token ranges in reading order between the declared special
// positions. Every node must tokenize to at least one token and the total
// length must stay within max_len.
TokenMap map_tokens(const ReadingOrder& order, const LayoutGraph& graph,
                    const Tokenizer& tokenize, const SpecialLayout& specials,
                    int max_len = 512);

enum class TokenRelKind { SameNode, Edge, Unrelated };

struct TokenRel {
  TokenRelKind kind = TokenRelKind::Unrelated;
  Relation label = Relation::None;  // meaningful only for Edge
};

// Node-level relation lifted to a token pair. Both positions must be
// non-special.
TokenRel token_relation(const TokenMap& tm, const LayoutGraph& graph, int i,
                        int j);

// Additive attention-bias weights per relation label.
struct RelationWeights {
  std::map<Relation, double> weight_of = {
      {Relation::ParentChild, 0.0}, {Relation::ChildParent, 0.0},
      {Relation::Left, 0.0},        {Relation::Right, 0.0},
      {Relation::Up, 0.0},          {Relation::Down, 0.0},
  };
  double self_weight = 0.0;
  double fill = -9e15;
};

// Dense n x n additive mask. Cell labels are kept alongside the values so
// gradients can be routed back to per-label weights.
struct GraphMask {
  int size = 0;
  std::vector<double> values;  // row-major

  // Per-cell provenance: kSelf, kFill, kSpecial, or the Relation of the
  // contributing edge.
  enum : int8_t { kSelf = -1, kFill = -2, kSpecial = -3 };
  std::vector<int8_t> labels;

  double at(int i, int j) const { return values[static_cast<size_t>(i) * size + j]; }
  int8_t label_at(int i, int j) const {
    return labels[static_cast<size_t>(i) * size + j];
  }
};

GraphMask build_graph_mask(const TokenMap& tm, const LayoutGraph& graph,
                           const RelationWeights& w);

}  // namespace layoutgraph
