#pragma once

#include <filesystem>
#include <optional>

#include "layoutgraph/attention.hpp"
#include "layoutgraph/reorder.hpp"
#include "layoutgraph/serialize.hpp"
#include "layoutgraph/token_mask.hpp"

namespace layoutgraph {

// Pipeline-wide knobs, loadable from a JSON file. Defaults mirror the
// per-module defaults.
struct PipelineConfig {
  std::optional<double> tie_tolerance;  // vertical tie band for precedes
  double center_epsilon = kDefaultCenterEpsilon;
  RelationWeights weights;
  int max_len = 512;
  double alpha = 32.0;
  TraversalMode traversal = TraversalMode::Dfs;
  ScalarWidth precision = ScalarWidth::Double;

  void validate() const;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace layoutgraph
