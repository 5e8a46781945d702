#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "layoutgraph/geometry.hpp"

namespace layoutgraph {

// A text leaf: one line/word of OCR text with its box.
struct Leaf {
  int id = 0;
  std::string text;
  BoundingBox box;
  // Opaque dataset metadata (e.g. CORD category labels), carried through
  // untouched.
  std::map<std::string, std::string> metadata;
};

// A region groups leaves and/or nested regions. Bounds, when present in the
// input, are advisory; the pipeline recomputes tight bounds from members.
struct RegionSpec {
  std::optional<BoundingBox> bounds;
  std::vector<Leaf> leaves;
  std::vector<RegionSpec> children;
};

struct GenericDocument {
  std::string id;
  double page_width = 0.0;
  double page_height = 0.0;
  std::vector<RegionSpec> regions;
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Parse the generic JSON schema. Unknown fields are ignored; structural or
// schema violations throw ParseError with the offending JSON path.
GenericDocument parse_generic(const std::string& bytes);

// Dataset adapters. Each maps the dataset's annotation JSON onto the generic
// schema: one region per entity, one leaf per word.
GenericDocument adapt_funsd(const std::string& bytes);
GenericDocument adapt_xfund(const std::string& bytes);
GenericDocument adapt_cord(const std::string& bytes);

}  // namespace layoutgraph
