// Compares the parallel attention kernels against the serial reference on a
// few sequence lengths. Run with no arguments; prints one line per case.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "layoutgraph/attention.hpp"

using namespace layoutgraph;
using Clock = std::chrono::steady_clock;

namespace {

Matrix random_matrix(std::mt19937& rng, int rows, int cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

GraphMask random_mask(std::mt19937& rng, int n, double p_fill, double fill) {
  GraphMask mask;
  mask.size = n;
  mask.values.assign(static_cast<size_t>(n) * n, 0.0);
  mask.labels.assign(static_cast<size_t>(n) * n, GraphMask::kSelf);
  std::bernoulli_distribution coin(p_fill);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        mask.values[static_cast<size_t>(i) * n + j] = fill;
        mask.values[static_cast<size_t>(j) * n + i] = fill;
        mask.labels[static_cast<size_t>(i) * n + j] = GraphMask::kFill;
        mask.labels[static_cast<size_t>(j) * n + i] = GraphMask::kFill;
      }
    }
  }
  return mask;
}

template <typename Fn>
double time_best_of(int reps, const Fn& fn) {
  double best = 1e30;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    fn();
    best = std::min(best,
                    std::chrono::duration<double>(Clock::now() - start).count());
  }
  return best;
}

}  // namespace

int main() {
  ModelConfig cfg;
  cfg.hidden_size = 768;
  cfg.graph_heads = 6;

  std::printf("%6s %12s %12s %8s %12s\n", "seq", "parallel(s)", "serial(s)",
              "speedup", "max|diff|");
  for (int n : {64, 128, 256, 512}) {
    std::mt19937 rng(static_cast<unsigned>(n));
    Matrix h = random_matrix(rng, n, cfg.hidden_size);
    GraphMask mask = random_mask(rng, n, 0.5, RelationWeights{}.fill);
    AttentionParams params = AttentionParams::random(cfg, 1);

    Matrix parallel_out, serial_out;
    const double t_par = time_best_of(3, [&] {
      parallel_out = graph_attention_forward(h, mask, params, cfg);
    });
    const double t_ser = time_best_of(3, [&] {
      serial_out = reference::graph_attention_forward(h, mask, params, cfg);
    });

    double max_diff = 0.0;
    for (size_t i = 0; i < parallel_out.size(); ++i) {
      max_diff = std::max(
          max_diff, std::abs(parallel_out.data()[i] - serial_out.data()[i]));
    }
    std::printf("%6d %12.6f %12.6f %8.2fx %12.3e\n", n, t_par, t_ser,
                t_ser / t_par, max_diff);
  }
  return 0;
}
