#include "layoutgraph/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace layoutgraph {

void ModelConfig::validate() const {
  if (hidden_size <= 0 || graph_heads <= 0 ||
      hidden_size % graph_heads != 0) {
    throw AttentionError("hidden size must be a positive multiple of the head count");
  }
  if (alpha <= 0.0) throw AttentionError("alpha must be positive");
  if (max_len < 1) throw AttentionError("max_len must be at least 1");
  if (bucket_1d < 0 || bucket_2d < 0 || grid_bins < 1) {
    throw AttentionError("invalid bucketing parameters");
  }
}

AttentionParams AttentionParams::zeros(const ModelConfig& cfg) {
  AttentionParams p;
  const int d = cfg.hidden_size;
  p.w_q = Matrix(d, d);
  p.w_k = Matrix(d, d);
  p.w_v = Matrix(d, d);
  p.w_out = Matrix(d, d);
  p.b_out.assign(static_cast<size_t>(d), 0.0);
  return p;
}

AttentionParams AttentionParams::random(const ModelConfig& cfg, unsigned seed,
                                        double scale) {
  AttentionParams p = zeros(cfg);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Matrix* m : {&p.w_q, &p.w_k, &p.w_v, &p.w_out}) {
    for (size_t i = 0; i < m->size(); ++i) m->data()[i] = dist(rng);
  }
  return p;
}

void AttentionParams::validate(const ModelConfig& cfg) const {
  const int d = cfg.hidden_size;
  for (const Matrix* m : {&w_q, &w_k, &w_v, &w_out}) {
    if (m->rows() != d || m->cols() != d) {
      throw AttentionError("projection weight shape mismatch");
    }
    if (!m->all_finite()) throw AttentionError("non-finite projection weight");
  }
  if (static_cast<int>(b_out.size()) != d) {
    throw AttentionError("output bias size mismatch");
  }
  for (double v : b_out) {
    if (!std::isfinite(v)) throw AttentionError("non-finite output bias");
  }
}

RelPosBias RelPosBias::zeros(const ModelConfig& cfg) {
  RelPosBias b;
  b.b_1d = Matrix(cfg.graph_heads, 2 * cfg.bucket_1d + 1);
  b.b_2dx = Matrix(cfg.graph_heads, 2 * cfg.bucket_2d + 1);
  b.b_2dy = Matrix(cfg.graph_heads, 2 * cfg.bucket_2d + 1);
  return b;
}

RelPosBias RelPosBias::random(const ModelConfig& cfg, unsigned seed,
                              double scale) {
  RelPosBias b = zeros(cfg);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Matrix* m : {&b.b_1d, &b.b_2dx, &b.b_2dy}) {
    for (size_t i = 0; i < m->size(); ++i) m->data()[i] = dist(rng);
  }
  return b;
}

int clip_bucket(long long offset, int k) {
  return static_cast<int>(std::clamp<long long>(offset, -k, k)) + k;
}

namespace {

int quantize(double v, double extent, int bins) {
  if (extent <= 0.0) return 0;
  int bin = static_cast<int>(v / extent * bins);
  return std::clamp(bin, 0, bins - 1);
}

// out = a * b, shapes (n x k) (k x m)
void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
#pragma omp parallel for
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    std::fill(orow, orow + out.cols(), 0.0);
    for (int k = 0; k < a.cols(); ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols(); ++j) orow[j] += av * brow[j];
    }
  }
}

// out += a^T * b, shapes (n x r)^T (n x c)
void matmul_at_b_accum(const Matrix& a, const Matrix& b, Matrix& out) {
#pragma omp parallel for
  for (int i = 0; i < a.cols(); ++i) {
    double* orow = out.row(i);
    for (int n = 0; n < a.rows(); ++n) {
      const double av = a(n, i);
      if (av == 0.0) continue;
      const double* brow = b.row(n);
      for (int j = 0; j < b.cols(); ++j) orow[j] += av * brow[j];
    }
  }
}

// out += a * b^T, shapes (n x k) (m x k)
void matmul_a_bt_accum(const Matrix& a, const Matrix& b, Matrix& out) {
#pragma omp parallel for
  for (int i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
      orow[j] += acc;
    }
  }
}

struct ForwardState {
  Matrix q, k, v;                 // n x D projections
  std::vector<Matrix> weights;    // per-head n x n attention weights
  Matrix concat;                  // n x D concatenated head outputs
};

ForwardState run_forward(const Matrix& h, const GraphMask& mask,
                         const AttentionParams& params, const ModelConfig& cfg,
                         const std::vector<Matrix>* head_bias) {
  cfg.validate();
  params.validate(cfg);
  if (h.cols() != cfg.hidden_size) {
    throw AttentionError("input feature dimension mismatch");
  }
  if (mask.size != h.rows()) {
    throw AttentionError("mask size does not match sequence length");
  }
  if (!h.all_finite()) throw AttentionError("non-finite input activations");
  if (head_bias && static_cast<int>(head_bias->size()) != cfg.graph_heads) {
    throw AttentionError("head bias count mismatch");
  }

  const int n = h.rows();
  const int dk = cfg.head_dim();
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  ForwardState st;
  st.q = Matrix(n, cfg.hidden_size);
  st.k = Matrix(n, cfg.hidden_size);
  st.v = Matrix(n, cfg.hidden_size);
  matmul(h, params.w_q, st.q);
  matmul(h, params.w_k, st.k);
  matmul(h, params.w_v, st.v);

  st.concat = Matrix(n, cfg.hidden_size);
  st.weights.resize(static_cast<size_t>(cfg.graph_heads));
  for (int head = 0; head < cfg.graph_heads; ++head) {
    const int off = head * dk;
    Matrix scores(n, n);
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
      const double* qi = st.q.row(i) + off;
      for (int j = 0; j < n; ++j) {
        const double* kj = st.k.row(j) + off;
        double acc = 0.0;
        for (int d = 0; d < dk; ++d) acc += qi[d] * kj[d];
        double s = acc * inv_sqrt_dk + mask.at(i, j);
        if (head_bias) s += (*head_bias)[head](i, j);
        scores(i, j) = s;
      }
    }
    stabilized_softmax(scores, cfg.alpha);
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
      const double* w = scores.row(i);
      double* orow = st.concat.row(i) + off;
      for (int j = 0; j < n; ++j) {
        const double wij = w[j];
        if (wij == 0.0) continue;
        const double* vj = st.v.row(j) + off;
        for (int d = 0; d < dk; ++d) orow[d] += wij * vj[d];
      }
    }
    st.weights[head] = std::move(scores);
  }
  return st;
}

}  // namespace

std::vector<Matrix> spatial_bias(const std::vector<int>& positions_1d,
                                 const std::vector<Point>& anchors,
                                 const RelPosBias& bias, const ModelConfig& cfg,
                                 double page_width, double page_height) {
  const int n = static_cast<int>(positions_1d.size());
  if (anchors.size() != positions_1d.size()) {
    throw AttentionError("positions/anchors length mismatch");
  }
  std::vector<int> xg(n), yg(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(anchors[i].x) || !std::isfinite(anchors[i].y)) {
      throw AttentionError("non-finite anchor");
    }
    xg[i] = quantize(anchors[i].x, page_width, cfg.grid_bins);
    yg[i] = quantize(anchors[i].y, page_height, cfg.grid_bins);
  }
  std::vector<Matrix> out(static_cast<size_t>(cfg.graph_heads));
  for (int head = 0; head < cfg.graph_heads; ++head) {
    Matrix m(n, n);
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        m(i, j) = bias.b_1d(head, clip_bucket(positions_1d[j] - positions_1d[i],
                                              cfg.bucket_1d)) +
                  bias.b_2dx(head, clip_bucket(xg[j] - xg[i], cfg.bucket_2d)) +
                  bias.b_2dy(head, clip_bucket(yg[j] - yg[i], cfg.bucket_2d));
      }
    }
    out[head] = std::move(m);
  }
  return out;
}

void stabilized_softmax(Matrix& scores, double alpha) {
  if (alpha <= 0.0) throw AttentionError("alpha must be positive");
#pragma omp parallel for
  for (int i = 0; i < scores.rows(); ++i) {
    double* row = scores.row(i);
    const int n = scores.cols();
    double rowmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) rowmax = std::max(rowmax, row[j] / alpha);
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      row[j] = std::exp((row[j] / alpha - rowmax) * alpha);
      denom += row[j];
    }
    for (int j = 0; j < n; ++j) row[j] /= denom;
  }
}

Matrix graph_attention_forward(const Matrix& h, const GraphMask& mask,
                               const AttentionParams& params,
                               const ModelConfig& cfg,
                               const std::vector<Matrix>* head_bias) {
  ForwardState st = run_forward(h, mask, params, cfg, head_bias);
  Matrix h_g(h.rows(), cfg.hidden_size);
  matmul(st.concat, params.w_out, h_g);
#pragma omp parallel for
  for (int i = 0; i < h_g.rows(); ++i) {
    double* row = h_g.row(i);
    for (int j = 0; j < h_g.cols(); ++j) row[j] += params.b_out[static_cast<size_t>(j)];
  }
  return h_g;
}

Matrix residual_combine(const Matrix& h, const Matrix& h_g) {
  if (!h.same_shape(h_g)) throw AttentionError("residual shape mismatch");
  Matrix out = h;
#pragma omp parallel for
  for (int i = 0; i < out.rows(); ++i) {
    double* orow = out.row(i);
    const double* grow = h_g.row(i);
    for (int j = 0; j < out.cols(); ++j) orow[j] += grow[j];
  }
  return out;
}

AttentionGradients graph_attention_backward(const Matrix& h,
                                            const GraphMask& mask,
                                            const AttentionParams& params,
                                            const ModelConfig& cfg,
                                            const Matrix& upstream,
                                            bool relation_weight_grads) {
  if (!upstream.same_shape(Matrix(h.rows(), cfg.hidden_size))) {
    throw AttentionError("upstream gradient shape mismatch");
  }
  ForwardState st = run_forward(h, mask, params, cfg, nullptr);
  const int n = h.rows();
  const int dk = cfg.head_dim();
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  AttentionGradients g;
  g.d_h = upstream;  // residual path
  g.d_w_q = Matrix(cfg.hidden_size, cfg.hidden_size);
  g.d_w_k = Matrix(cfg.hidden_size, cfg.hidden_size);
  g.d_w_v = Matrix(cfg.hidden_size, cfg.hidden_size);
  g.d_w_out = Matrix(cfg.hidden_size, cfg.hidden_size);
  g.d_b_out.assign(static_cast<size_t>(cfg.hidden_size), 0.0);
  if (relation_weight_grads) {
    for (auto rel : {Relation::ParentChild, Relation::ChildParent,
                     Relation::Left, Relation::Right, Relation::Up,
                     Relation::Down}) {
      g.d_relation_weights[rel] = 0.0;
    }
  }

  // H_g = concat * W_out + b_out.
  Matrix d_concat(n, cfg.hidden_size);
  matmul_a_bt_accum(upstream, params.w_out, d_concat);
  matmul_at_b_accum(st.concat, upstream, g.d_w_out);
  for (int i = 0; i < n; ++i) {
    const double* urow = upstream.row(i);
    for (int j = 0; j < cfg.hidden_size; ++j) g.d_b_out[static_cast<size_t>(j)] += urow[j];
  }

  Matrix d_q(n, cfg.hidden_size);
  Matrix d_k(n, cfg.hidden_size);
  Matrix d_v(n, cfg.hidden_size);
  for (int head = 0; head < cfg.graph_heads; ++head) {
    const int off = head * dk;
    const Matrix& p = st.weights[static_cast<size_t>(head)];

    // dP = dO V^T ; dV += P^T dO, all within the head slice.
    Matrix d_p(n, n);
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
      const double* doi = d_concat.row(i) + off;
      for (int j = 0; j < n; ++j) {
        const double* vj = st.v.row(j) + off;
        double acc = 0.0;
        for (int d = 0; d < dk; ++d) acc += doi[d] * vj[d];
        d_p(i, j) = acc;
      }
    }
#pragma omp parallel for
    for (int j = 0; j < n; ++j) {
      double* dvj = d_v.row(j) + off;
      for (int i = 0; i < n; ++i) {
        const double pij = p(i, j);
        if (pij == 0.0) continue;
        const double* doi = d_concat.row(i) + off;
        for (int d = 0; d < dk; ++d) dvj[d] += pij * doi[d];
      }
    }

    // Softmax backward: dS = P o (dP - rowdot(dP, P)).
    Matrix d_s(n, n);
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
      const double* pi = p.row(i);
      const double* dpi = d_p.row(i);
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += dpi[j] * pi[j];
      double* dsi = d_s.row(i);
      for (int j = 0; j < n; ++j) dsi[j] = pi[j] * (dpi[j] - dot);
    }

    if (relation_weight_grads) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const int8_t label = mask.label_at(i, j);
          if (label >= 0) {
            g.d_relation_weights[static_cast<Relation>(label)] += d_s(i, j);
          }
        }
      }
    }

    // dQ += dS K / sqrt(dk); dK += dS^T Q / sqrt(dk).
#pragma omp parallel for
    for (int i = 0; i < n; ++i) {
      double* dqi = d_q.row(i) + off;
      for (int j = 0; j < n; ++j) {
        const double s = d_s(i, j) * inv_sqrt_dk;
        if (s == 0.0) continue;
        const double* kj = st.k.row(j) + off;
        for (int d = 0; d < dk; ++d) dqi[d] += s * kj[d];
      }
    }
#pragma omp parallel for
    for (int j = 0; j < n; ++j) {
      double* dkj = d_k.row(j) + off;
      for (int i = 0; i < n; ++i) {
        const double s = d_s(i, j) * inv_sqrt_dk;
        if (s == 0.0) continue;
        const double* qi = st.q.row(i) + off;
        for (int d = 0; d < dk; ++d) dkj[d] += s * qi[d];
      }
    }
  }

  // Through the projections: X = H W -> dW += H^T dX, dH += dX W^T.
  matmul_at_b_accum(h, d_q, g.d_w_q);
  matmul_at_b_accum(h, d_k, g.d_w_k);
  matmul_at_b_accum(h, d_v, g.d_w_v);
  matmul_a_bt_accum(d_q, params.w_q, g.d_h);
  matmul_a_bt_accum(d_k, params.w_k, g.d_h);
  matmul_a_bt_accum(d_v, params.w_v, g.d_h);
  return g;
}

}  // namespace layoutgraph
