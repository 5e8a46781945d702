#include "layoutgraph/config.hpp"

#include <json.hpp>

namespace layoutgraph {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (tie_tolerance && *tie_tolerance < 0) {
    throw ParseError("tie_tolerance must be non-negative");
  }
  if (center_epsilon < 0) throw ParseError("center_epsilon must be non-negative");
  if (weights.fill > -1e9) {
    throw ParseError("fill must be at most -1e9 to vanish under softmax");
  }
  if (max_len < 1) throw ParseError("max_len must be at least 1");
  if (alpha <= 0) throw ParseError("alpha must be positive");
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError(path.string() + ": malformed config JSON");
  }
  PipelineConfig cfg;
  if (j.contains("tie_tolerance")) cfg.tie_tolerance = j["tie_tolerance"].get<double>();
  if (j.contains("center_epsilon")) cfg.center_epsilon = j["center_epsilon"].get<double>();
  if (j.contains("fill")) cfg.weights.fill = j["fill"].get<double>();
  if (j.contains("self_weight")) cfg.weights.self_weight = j["self_weight"].get<double>();
  if (j.contains("relation_weights")) {
    for (const auto& [name, value] : j["relation_weights"].items()) {
      auto rel = relation_from_name(name);
      if (!rel || *rel == Relation::None) {
        throw ParseError(path.string() + ": unknown relation label '" + name + "'");
      }
      cfg.weights.weight_of[*rel] = value.get<double>();
    }
  }
  if (j.contains("max_len")) cfg.max_len = j["max_len"].get<int>();
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
  if (j.contains("traversal")) {
    const std::string mode = j["traversal"].get<std::string>();
    if (mode == "dfs") {
      cfg.traversal = TraversalMode::Dfs;
    } else if (mode == "bfs") {
      cfg.traversal = TraversalMode::Bfs;
    } else {
      throw ParseError(path.string() + ": traversal must be 'dfs' or 'bfs'");
    }
  }
  if (j.contains("precision")) {
    const std::string p = j["precision"].get<std::string>();
    if (p == "single") {
      cfg.precision = ScalarWidth::Single;
    } else if (p == "double") {
      cfg.precision = ScalarWidth::Double;
    } else {
      throw ParseError(path.string() + ": precision must be 'single' or 'double'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace layoutgraph
