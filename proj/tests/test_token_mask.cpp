#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "layoutgraph/token_mask.hpp"
#include "test_support.hpp"

using namespace layoutgraph;

namespace {

// Two-region fixture: region {0: "alpha beta", 1: "gamma delta"} and
// region {2: "solo"}.
LayoutGraph fixture_graph() {
  GenericDocument doc;
  doc.page_width = doc.page_height = 500;
  RegionSpec r1, r2;
  r1.leaves = {{0, "alpha beta", {10, 10, 100, 20}, {}},
               {1, "gamma delta", {10, 30, 100, 40}, {}}};
  r2.leaves = {{2, "solo", {300, 300, 360, 310}, {}}};
  doc.regions = {r1, r2};
  return build_layout_graph(doc);
}

}  // namespace

TEST_CASE("whitespace tokenizer") {
  CHECK(whitespace_tokenize("a  b\tc\n") == std::vector<std::string>{"a", "b", "c"});
  CHECK(whitespace_tokenize("").empty());
  CHECK(whitespace_tokenize("  \t ").empty());
}

TEST_CASE("map_tokens lays ranges out in reading order") {
  LayoutGraph g = fixture_graph();
  ReadingOrder order = reorder(g);
  TokenMap tm = map_tokens(order, g, whitespace_tokenize, {1, 0});
  // Leading special, then two tokens per node 0 and 1, one for node 2.
  CHECK(tm.token_count == 6);
  CHECK(tm.special_positions == std::set<int>{0});
  CHECK(tm.node_of == std::vector<int>{TokenMap::kNoNode, 0, 0, 1, 1, 2});
  CHECK(tm.tokens_of.at(0).begin == 1);
  CHECK(tm.tokens_of.at(0).end == 3);
  CHECK(tm.tokens_of.at(2).begin == 5);

  // Ranges are contiguous and follow the order sequence.
  int prev_end = 1;
  for (int id : order.sequence) {
    CHECK(tm.tokens_of.at(id).begin == prev_end);
    prev_end = tm.tokens_of.at(id).end;
  }
}

TEST_CASE("map_tokens without specials maps everything") {
  LayoutGraph g = fixture_graph();
  TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {});
  CHECK(tm.special_positions.empty());
  for (int v : tm.node_of) CHECK(v != TokenMap::kNoNode);
}

TEST_CASE("map_tokens rejects overflow and empty tokenizations") {
  LayoutGraph g = fixture_graph();
  CHECK_THROWS_AS(map_tokens(reorder(g), g, whitespace_tokenize, {}, 3),
                  TokenMapError);
  Tokenizer empty_tok = [](const std::string&) {
    return std::vector<std::string>{};
  };
  CHECK_THROWS_AS(map_tokens(reorder(g), g, empty_tok, {}), TokenMapError);
}

TEST_CASE("token_relation lifts node relations") {
  LayoutGraph g = fixture_graph();
  TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {});
  const int t0 = tm.tokens_of.at(0).begin;
  const int t1 = tm.tokens_of.at(1).begin;
  // Node 0 parents node 1 inside their region.
  TokenRel rel = token_relation(tm, g, t0, t1);
  CHECK(rel.kind == TokenRelKind::Edge);
  CHECK(rel.label == Relation::ParentChild);

  CHECK(token_relation(tm, g, t0, t0).kind == TokenRelKind::SameNode);
  CHECK(token_relation(tm, g, t0, t0 + 1).kind == TokenRelKind::SameNode);
}

TEST_CASE("token_relation between unrelated subtrees") {
  LayoutGraph g = fixture_graph();
  TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {});
  // Nodes 1 and 2 sit in different regions with no sibling edge (1 is not a
  // root child).
  const int t1 = tm.tokens_of.at(1).begin;
  const int t2 = tm.tokens_of.at(2).begin;
  CHECK(!g.edge_label(1, 2).has_value());
  CHECK(token_relation(tm, g, t1, t2).kind == TokenRelKind::Unrelated);
}

TEST_CASE("token_relation rejects special positions") {
  LayoutGraph g = fixture_graph();
  TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {1, 0});
  CHECK_THROWS_AS(token_relation(tm, g, 0, 1), TokenMapError);
}

TEST_CASE("single-node mask is all self weight") {
  GenericDocument doc;
  RegionSpec r;
  r.leaves = {{0, "one two three", {0, 0, 100, 10}, {}}};
  doc.regions = {r};
  LayoutGraph g = build_layout_graph(doc);
  TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {});
  GraphMask mask = build_graph_mask(tm, g, {});
  REQUIRE(mask.size == 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(mask.at(i, j) == 0.0);
  }
}

TEST_CASE("parent and child tokens stay mutually visible") {
  GenericDocument doc;
  RegionSpec r;
  r.leaves = {{0, "A", {0, 0, 50, 10}, {}}, {1, "B", {0, 20, 50, 30}, {}}};
  doc.regions = {r};
  LayoutGraph g = build_layout_graph(doc);
  TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {});
  GraphMask mask = build_graph_mask(tm, g, {});
  CHECK(mask.at(0, 1) == 0.0);
  CHECK(mask.at(1, 0) == 0.0);
  CHECK(mask.label_at(0, 1) == static_cast<int8_t>(Relation::ParentChild));
  CHECK(mask.label_at(1, 0) == static_cast<int8_t>(Relation::ChildParent));
}

TEST_CASE("mask equals the per-cell brute-force oracle") {
  std::mt19937 rng(909);
  std::uniform_int_distribution<int> size(1, 20);
  RelationWeights weights;
  weights.weight_of[Relation::Left] = 0.25;
  weights.weight_of[Relation::ParentChild] = -0.5;
  weights.self_weight = 0.125;
  for (int round = 0; round < 30; ++round) {
    GenericDocument doc = lgtest::random_document(rng, size(rng));
    LayoutGraph g = build_layout_graph(doc);
    TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {2, 1});
    GraphMask mask = build_graph_mask(tm, g, weights);
    GraphMask oracle = lgtest::mask_oracle(tm, g, weights);
    CHECK(mask.values == oracle.values);
    CHECK(mask.labels == oracle.labels);
  }
}

TEST_CASE("mask invariants") {
  std::mt19937 rng(313);
  RelationWeights weights;  // defaults: zeros and -9e15 fill
  for (int round = 0; round < 20; ++round) {
    GenericDocument doc = lgtest::random_document(rng, 15);
    LayoutGraph g = build_layout_graph(doc);
    TokenMap tm = map_tokens(reorder(g), g, whitespace_tokenize, {1, 0});
    GraphMask mask = build_graph_mask(tm, g, weights);

    for (int i = 0; i < mask.size; ++i) {
      CHECK(mask.at(i, i) != weights.fill);
      for (int j = 0; j < mask.size; ++j) {
        // Symmetric masked pattern.
        CHECK((mask.at(i, j) == weights.fill) ==
              (mask.at(j, i) == weights.fill));
        // Default weights leave only {0, fill}.
        CHECK((mask.at(i, j) == 0.0 || mask.at(i, j) == weights.fill));
      }
    }
    // Block constancy per node pair.
    for (const auto& [a, ra] : tm.tokens_of) {
      for (const auto& [b, rb] : tm.tokens_of) {
        const double v = mask.at(ra.begin, rb.begin);
        for (int i = ra.begin; i < ra.end; ++i) {
          for (int j = rb.begin; j < rb.end; ++j) CHECK(mask.at(i, j) == v);
        }
      }
    }
  }
}

TEST_CASE("default fill matches the published constant") {
  RelationWeights w;
  CHECK(w.fill == -9e15);
  CHECK(w.self_weight == 0.0);
  for (const auto& [rel, value] : w.weight_of) CHECK(value == 0.0);
}
