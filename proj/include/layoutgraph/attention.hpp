#pragma once

#include <optional>
#include <vector>

#include "layoutgraph/geometry.hpp"
#include "layoutgraph/tensor.hpp"
#include "layoutgraph/token_mask.hpp"

namespace layoutgraph {

struct ModelConfig {
  int hidden_size = 768;
  int graph_heads = 6;   // 8 in the large preset
  int max_len = 512;
  double alpha = 32.0;

  // Relative-bias bucketing: offsets clipped to [-k, k], coordinates
  // quantized to a fixed page grid before the 2D clip.
  int bucket_1d = 128;
  int bucket_2d = 256;
  int grid_bins = 1024;

  // Vision-side constants of the backbone, unused here but part of the
  // published configuration.
  static constexpr int kImageChannels = 3;
  static constexpr int kImageSize = 224;
  static constexpr int kPatchSize = 16;
  static constexpr int kVisualSeqLen = 196;

  int head_dim() const { return hidden_size / graph_heads; }
  void validate() const;
};

struct AttentionError : std::runtime_error {
  explicit AttentionError(const std::string& what) : std::runtime_error(what) {}
};

struct AttentionParams {
  Matrix w_q;       // D x D
  Matrix w_k;       // D x D
  Matrix w_v;       // D x D
  Matrix w_out;     // D x D
  std::vector<double> b_out;  // D

  static AttentionParams zeros(const ModelConfig& cfg);
  // Uniform [-scale, scale] entries, zero output bias.
  static AttentionParams random(const ModelConfig& cfg, unsigned seed,
                                double scale = 0.2);
  void validate(const ModelConfig& cfg) const;
};

// Learnable per-head position biases indexed by clipped offsets.
struct RelPosBias {
  // One row per head; columns cover offsets -k..k (2k+1 entries).
  Matrix b_1d;
  Matrix b_2dx;
  Matrix b_2dy;

  static RelPosBias zeros(const ModelConfig& cfg);
  static RelPosBias random(const ModelConfig& cfg, unsigned seed,
                           double scale = 0.1);
};

// Clips offset to [-k, k] and shifts it into table index 0..2k.
int clip_bucket(long long offset, int k);

// bias[h](i,j) = b_1d[d(j-i)] + b_2dx[d(x_j-x_i)] + b_2dy[d(y_j-y_i)], with
// box anchors at the top-left corner, quantized to the page grid.
std::vector<Matrix> spatial_bias(const std::vector<int>& positions_1d,
                                 const std::vector<Point>& anchors,
                                 const RelPosBias& bias,
                                 const ModelConfig& cfg,
                                 double page_width, double page_height);

// Max-subtracted softmax rescaled by alpha, applied row-wise in place.
// Analytically identical to the naive softmax on finite rows.
void stabilized_softmax(Matrix& scores, double alpha);

// One graph-aware multi-head self-attention layer. Per head
//   e = Q K^T / sqrt(d_k) + mask (+ optional spatial bias),
// attention weights from the stabilized softmax, output the concatenated
// weighted values through the output projection.
Matrix graph_attention_forward(const Matrix& h, const GraphMask& mask,
                               const AttentionParams& params,
                               const ModelConfig& cfg,
                               const std::vector<Matrix>* head_bias = nullptr);

Matrix residual_combine(const Matrix& h, const Matrix& h_g);

struct AttentionGradients {
  Matrix d_h;
  Matrix d_w_q;
  Matrix d_w_k;
  Matrix d_w_v;
  Matrix d_w_out;
  std::vector<double> d_b_out;
  // Per relation label, filled only when relation-weight gradients are
  // requested; fill cells contribute nothing.
  std::map<Relation, double> d_relation_weights;
};

// Gradients of L = <upstream, H_output> with H_output = H + layer(H).
AttentionGradients graph_attention_backward(const Matrix& h,
                                            const GraphMask& mask,
                                            const AttentionParams& params,
                                            const ModelConfig& cfg,
                                            const Matrix& upstream,
                                            bool relation_weight_grads = false);

// Serial reference path. Plain per-cell loops with no parallelism or
// blocking; kept as the oracle the parallel kernels are tested against.
namespace reference {

void stabilized_softmax(Matrix& scores, double alpha);

Matrix graph_attention_forward(const Matrix& h, const GraphMask& mask,
                               const AttentionParams& params,
                               const ModelConfig& cfg,
                               const std::vector<Matrix>* head_bias = nullptr);

}  // namespace reference

}  // namespace layoutgraph
