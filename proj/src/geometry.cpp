#include "layoutgraph/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace layoutgraph {

bool BoundingBox::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min >= 0.0 && y_min >= 0.0 &&
         x_min <= x_max && y_min <= y_max;
}

BoundingBox merge(const BoundingBox& a, const BoundingBox& b) {
  return {std::min(a.x_min, b.x_min), std::min(a.y_min, b.y_min),
          std::max(a.x_max, b.x_max), std::max(a.y_max, b.y_max)};
}

Point center(const BoundingBox& box) {
  return {(box.x_min + box.x_max) / 2.0, (box.y_min + box.y_max) / 2.0};
}

Relation inverse(Relation r) {
  switch (r) {
    case Relation::ParentChild:
      return Relation::ChildParent;
    case Relation::ChildParent:
      return Relation::ParentChild;
    case Relation::Left:
      return Relation::Right;
    case Relation::Right:
      return Relation::Left;
    case Relation::Up:
      return Relation::Down;
    case Relation::Down:
      return Relation::Up;
    case Relation::None:
      return Relation::None;
  }
  return Relation::None;
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::ParentChild:
      return "parent-child";
    case Relation::ChildParent:
      return "child-parent";
    case Relation::Left:
      return "left";
    case Relation::Right:
      return "right";
    case Relation::Up:
      return "up";
    case Relation::Down:
      return "down";
    case Relation::None:
      return "none";
  }
  return "none";
}

std::optional<Relation> relation_from_name(const std::string& name) {
  for (Relation r : {Relation::ParentChild, Relation::ChildParent,
                     Relation::Left, Relation::Right, Relation::Up,
                     Relation::Down, Relation::None}) {
    if (name == relation_name(r)) return r;
  }
  return std::nullopt;
}

Relation spatial_relation(const BoundingBox& a, const BoundingBox& b,
                          double eps) {
  const Point ca = center(a);
  const Point cb = center(b);
  if (std::abs(ca.x - cb.x) <= eps && std::abs(ca.y - cb.y) <= eps) {
    return Relation::None;
  }
  // Horizontal judgment line first: reading order is line-oriented.
  if (ca.y >= b.y_min && ca.y <= b.y_max && std::abs(cb.x - ca.x) > eps) {
    return cb.x < ca.x ? Relation::Left : Relation::Right;
  }
  if (ca.x >= b.x_min && ca.x <= b.x_max && std::abs(cb.y - ca.y) > eps) {
    return cb.y < ca.y ? Relation::Up : Relation::Down;
  }
  return Relation::None;
}

bool precedes(const BoundingBox& a, const BoundingBox& b,
              std::optional<double> tau) {
  const Point ca = center(a);
  const Point cb = center(b);
  const double tol = tau ? *tau : std::min(a.height(), b.height()) / 2.0;
  if (ca.y < cb.y - tol) return true;
  if (cb.y < ca.y - tol) return false;
  return ca.x < cb.x;
}

}  // namespace layoutgraph
