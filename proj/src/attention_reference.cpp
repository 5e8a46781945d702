#include <cmath>
#include <limits>

#include "layoutgraph/attention.hpp"

// Serial reference path. Everything here is written as plain per-cell loops;
// the parallel kernels in attention.cpp are checked against these in the test
// suite and in the benchmark target.

namespace layoutgraph::reference {

void stabilized_softmax(Matrix& scores, double alpha) {
  if (alpha <= 0.0) throw AttentionError("alpha must be positive");
  for (int i = 0; i < scores.rows(); ++i) {
    double rowmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < scores.cols(); ++j) {
      rowmax = std::max(rowmax, scores(i, j) / alpha);
    }
    double denom = 0.0;
    for (int j = 0; j < scores.cols(); ++j) {
      scores(i, j) = std::exp((scores(i, j) / alpha - rowmax) * alpha);
      denom += scores(i, j);
    }
    for (int j = 0; j < scores.cols(); ++j) scores(i, j) /= denom;
  }
}

Matrix graph_attention_forward(const Matrix& h, const GraphMask& mask,
                               const AttentionParams& params,
                               const ModelConfig& cfg,
                               const std::vector<Matrix>* head_bias) {
  cfg.validate();
  params.validate(cfg);
  if (h.cols() != cfg.hidden_size) {
    throw AttentionError("input feature dimension mismatch");
  }
  if (mask.size != h.rows()) {
    throw AttentionError("mask size does not match sequence length");
  }
  const int n = h.rows();
  const int d_model = cfg.hidden_size;
  const int dk = cfg.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  auto project = [&](const Matrix& w) {
    Matrix out(n, d_model);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d_model; ++j) {
        double acc = 0.0;
        for (int k = 0; k < d_model; ++k) acc += h(i, k) * w(k, j);
        out(i, j) = acc;
      }
    }
    return out;
  };
  Matrix q = project(params.w_q);
  Matrix k = project(params.w_k);
  Matrix v = project(params.w_v);

  Matrix concat(n, d_model);
  for (int head = 0; head < cfg.graph_heads; ++head) {
    const int off = head * dk;
    Matrix scores(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int d = 0; d < dk; ++d) acc += q(i, off + d) * k(j, off + d);
        scores(i, j) = acc * scale + mask.at(i, j);
        if (head_bias) scores(i, j) += (*head_bias)[static_cast<size_t>(head)](i, j);
      }
    }
    reference::stabilized_softmax(scores, cfg.alpha);
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < dk; ++d) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += scores(i, j) * v(j, off + d);
        concat(i, off + d) = acc;
      }
    }
  }

  Matrix h_g(n, d_model);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d_model; ++j) {
      double acc = params.b_out[static_cast<size_t>(j)];
      for (int k2 = 0; k2 < d_model; ++k2) acc += concat(i, k2) * params.w_out(k2, j);
      h_g(i, j) = acc;
    }
  }
  return h_g;
}

}  // namespace layoutgraph::reference
