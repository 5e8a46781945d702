#include <cstdlib>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "layoutgraph/attention.hpp"
#include "layoutgraph/config.hpp"
#include "layoutgraph/document.hpp"
#include "layoutgraph/layout_graph.hpp"
#include "layoutgraph/reorder.hpp"
#include "layoutgraph/serialize.hpp"
#include "layoutgraph/token_mask.hpp"

namespace lg = layoutgraph;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInvariantViolation = 2;
constexpr int kExitInternalError = 3;

struct CommonOptions {
  std::string input;
  std::string format = "generic";
  std::string config;
  std::string output;
};

lg::PipelineConfig resolve_config(const CommonOptions& opts) {
  std::string path = opts.config;
  if (path.empty()) {
    if (const char* env = std::getenv("LAYOUTGRAPH_CONFIG")) path = env;
  }
  if (path.empty()) return {};
  return lg::load_pipeline_config(path);
}

lg::GenericDocument load_document(const CommonOptions& opts) {
  const std::string bytes = lg::read_file(opts.input);
  if (opts.format == "generic") return lg::parse_generic(bytes);
  if (opts.format == "funsd") return lg::adapt_funsd(bytes);
  if (opts.format == "xfund") return lg::adapt_xfund(bytes);
  if (opts.format == "cord") return lg::adapt_cord(bytes);
  throw lg::ParseError("unknown format '" + opts.format + "'");
}

void emit(const CommonOptions& opts, const std::string& bytes) {
  if (opts.output.empty()) {
    std::cout << bytes;
  } else {
    lg::atomic_write_file(opts.output, bytes);
  }
}

lg::TokenMap build_token_map(const lg::LayoutGraph& graph,
                             const lg::ReadingOrder& order,
                             const lg::PipelineConfig& cfg) {
  return lg::map_tokens(order, graph, lg::whitespace_tokenize,
                        lg::SpecialLayout{}, cfg.max_len);
}

// Central finite differences of L = <upstream, H + layer(H)> for a handful
// of randomly probed parameter entries.
double gradient_check(const lg::Matrix& h, const lg::GraphMask& mask,
                      lg::AttentionParams params, const lg::ModelConfig& cfg,
                      const lg::Matrix& upstream, std::mt19937& rng) {
  const double step = 1e-5;
  auto loss = [&](const lg::Matrix& hh, const lg::AttentionParams& pp) {
    lg::Matrix out = lg::residual_combine(
        hh, lg::graph_attention_forward(hh, mask, pp, cfg));
    double acc = 0.0;
    for (size_t i = 0; i < out.size(); ++i) acc += out.data()[i] * upstream.data()[i];
    return acc;
  };
  lg::AttentionGradients g =
      lg::graph_attention_backward(h, mask, params, cfg, upstream);

  double max_rel = 0.0;
  auto probe = [&](double* slot, double analytic) {
    const double save = *slot;
    *slot = save + step;
    const double up = loss(h, params);
    *slot = save - step;
    const double down = loss(h, params);
    *slot = save;
    const double numeric = (up - down) / (2 * step);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
  };
  std::uniform_int_distribution<int> pick(0, cfg.hidden_size - 1);
  for (int trial = 0; trial < 8; ++trial) {
    const int r = pick(rng), c = pick(rng);
    probe(&params.w_q(r, c), g.d_w_q(r, c));
    probe(&params.w_k(r, c), g.d_w_k(r, c));
    probe(&params.w_v(r, c), g.d_w_v(r, c));
    probe(&params.w_out(r, c), g.d_w_out(r, c));
  }
  // Input gradient, probed the same way.
  lg::Matrix h_probe = h;
  std::uniform_int_distribution<int> row(0, h.rows() - 1);
  for (int trial = 0; trial < 8; ++trial) {
    const int r = row(rng), c = pick(rng);
    const double save = h_probe(r, c);
    h_probe(r, c) = save + step;
    const double up = loss(h_probe, params);
    h_probe(r, c) = save - step;
    const double down = loss(h_probe, params);
    h_probe(r, c) = save;
    const double numeric = (up - down) / (2 * step);
    const double analytic = g.d_h(r, c);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
  }
  return max_rel;
}

int run(int argc, char** argv) {
  CLI::App app{"Document layout graph toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string order_mode;
  bool json_mask = false;
  unsigned seed = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
    auto* in = cmd->add_option("--input", opts.input, "Input annotation file");
    if (needs_input) in->required();
    cmd->add_option("--format", opts.format,
                    "Input format: generic, funsd, xfund, cord");
    cmd->add_option("--config", opts.config, "Pipeline config JSON");
    cmd->add_option("--output", opts.output, "Output path (stdout if omitted)");
  };

  auto* build_graph = app.add_subcommand("build-graph",
                                         "Build the layout graph as JSON");
  add_common(build_graph);

  auto* reorder_cmd = app.add_subcommand("reorder",
                                         "Emit the reading order as JSON");
  add_common(reorder_cmd);
  reorder_cmd->add_option("--order", order_mode, "Traversal: dfs or bfs");

  auto* mask_cmd = app.add_subcommand("mask", "Emit the token graph mask");
  add_common(mask_cmd);
  mask_cmd->add_flag("--json-mask", json_mask, "JSON instead of binary output");

  auto* demo = app.add_subcommand(
      "attend-demo", "Seeded random forward pass with a gradient check");
  add_common(demo, /*needs_input=*/false);
  demo->add_option("--seed", seed, "RNG seed");

  auto* validate = app.add_subcommand("validate",
                                      "Check all invariants on the input");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  lg::PipelineConfig cfg = resolve_config(opts);
  if (!order_mode.empty()) {
    if (order_mode == "dfs") {
      cfg.traversal = lg::TraversalMode::Dfs;
    } else if (order_mode == "bfs") {
      cfg.traversal = lg::TraversalMode::Bfs;
    } else {
      throw lg::ParseError("--order must be 'dfs' or 'bfs'");
    }
  }

  if (build_graph->parsed()) {
    lg::LayoutGraph graph =
        lg::build_layout_graph(load_document(opts), cfg.center_epsilon);
    emit(opts, lg::canonical_json_dump(lg::graph_to_json(graph)));
  } else if (reorder_cmd->parsed()) {
    lg::LayoutGraph graph =
        lg::build_layout_graph(load_document(opts), cfg.center_epsilon);
    lg::ReadingOrder order =
        lg::reorder(graph, cfg.traversal, cfg.tie_tolerance);
    emit(opts, lg::canonical_json_dump(lg::order_to_json(order)));
  } else if (mask_cmd->parsed()) {
    lg::LayoutGraph graph =
        lg::build_layout_graph(load_document(opts), cfg.center_epsilon);
    lg::ReadingOrder order =
        lg::reorder(graph, cfg.traversal, cfg.tie_tolerance);
    lg::TokenMap tm = build_token_map(graph, order, cfg);
    lg::GraphMask mask = lg::build_graph_mask(tm, graph, cfg.weights);
    emit(opts, json_mask ? lg::canonical_json_dump(lg::mask_to_json(mask))
                         : lg::encode_mask(mask, cfg.precision));
  } else if (demo->parsed()) {
    lg::ModelConfig mc;
    mc.hidden_size = 12;
    mc.graph_heads = 2;
    mc.alpha = cfg.alpha;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 6;
    lg::Matrix h(n, mc.hidden_size), upstream(n, mc.hidden_size);
    for (size_t i = 0; i < h.size(); ++i) h.data()[i] = dist(rng);
    for (size_t i = 0; i < upstream.size(); ++i) upstream.data()[i] = dist(rng);
    lg::GraphMask mask;
    mask.size = n;
    mask.values.assign(static_cast<size_t>(n) * n, 0.0);
    mask.labels.assign(static_cast<size_t>(n) * n, lg::GraphMask::kSelf);
    std::bernoulli_distribution coin(0.3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && coin(rng)) {
          mask.values[static_cast<size_t>(i) * n + j] = cfg.weights.fill;
          mask.labels[static_cast<size_t>(i) * n + j] = lg::GraphMask::kFill;
        }
      }
    }
    lg::AttentionParams params = lg::AttentionParams::random(mc, seed + 1);
    const double err = gradient_check(h, mask, params, mc, upstream, rng);
    std::cout << "gradient check max relative error: " << err << "\n";
    if (err > 1e-4) return kExitInvariantViolation;
  } else if (validate->parsed()) {
    lg::GenericDocument doc = load_document(opts);
    lg::LayoutGraph graph = lg::build_layout_graph(doc, cfg.center_epsilon);
    graph.check_invariants();
    lg::ReadingOrder order =
        lg::reorder(graph, cfg.traversal, cfg.tie_tolerance);
    if (order.sequence.size() != graph.nodes.size() - 1) {
      throw lg::GraphError("reading order misses nodes");
    }
    lg::TokenMap tm = build_token_map(graph, order, cfg);
    lg::GraphMask mask = lg::build_graph_mask(tm, graph, cfg.weights);
    for (int i = 0; i < mask.size; ++i) {
      if (mask.at(i, i) == cfg.weights.fill) {
        throw lg::GraphError("mask diagonal carries fill");
      }
    }
    std::cout << "ok: " << graph.nodes.size() - 1 << " nodes, "
              << graph.sibling_edges.size() << " sibling edges, "
              << tm.token_count << " tokens\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lg::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const lg::SerializeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const lg::TokenMapError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const lg::GraphError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}
