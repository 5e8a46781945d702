#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace layoutgraph {

// Axis-aligned pixel rectangle in image coordinates: origin at the top-left
// of the page, y grows downward.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const;
};

// Union of two boxes (tight cover).
BoundingBox merge(const BoundingBox& a, const BoundingBox& b);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

Point center(const BoundingBox& box);

// Spatial edge labels. Left/Right/Up/Down describe the second node's position
// relative to the first; ParentChild points from parent to child.
enum class Relation {
  ParentChild,
  ChildParent,
  Left,
  Right,
  Up,
  Down,
  None,
};

Relation inverse(Relation r);
const char* relation_name(Relation r);
std::optional<Relation> relation_from_name(const std::string& name);

inline constexpr double kDefaultCenterEpsilon = 1e-6;

// Relation of b as seen from a's center lines. The horizontal line y = cy_a
// is tested against b's vertical extent first; on a hit the side comes from
// comparing the centers' x. Otherwise the vertical line x = cx_a is tested
// against b's horizontal extent. Coincident centers (within eps) give None.
Relation spatial_relation(const BoundingBox& a, const BoundingBox& b,
                          double eps = kDefaultCenterEpsilon);

// Top-to-bottom, left-to-right reading precedence between box centers.
// Vertical ties within tau fall back to the horizontal comparison. When tau
// is not supplied it defaults to half the smaller box height.
bool precedes(const BoundingBox& a, const BoundingBox& b,
              std::optional<double> tau = std::nullopt);

}  // namespace layoutgraph
