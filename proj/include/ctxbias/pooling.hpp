// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Speech-driven attention pooling.
//
// Speech frames h_x (T x d) attend over context tokens h_z (C x d) with H
// heads. The per-head attention is averaged over the T frames into a token
// weight alpha (H x C). Tokens are grouped into consecutive windows of n; inside
// each window alpha is softmaxed and used to take a weighted sum of the token
// embeddings, giving ceil(C / n) pooled vectors.
//
//   Q = h_x W_Q, K = h_z W_K           split column-wise into H heads of d/H
//   A_h = softmax_rows(Q_h K_h^T / sqrt(d/H))          (T x C)
//   alpha_h = mean_t A_h[t, :]                         (C)
//   w_h[i] = exp(alpha_h[i]) / sum_{i' in W_j} exp(alpha_h[i'])
//   pooled[j, k] = sum_{i in W_j} w_{head(k)}[i] h_z[i, k]

#pragma once

#include <cstddef>
#include <vector>

#include "ctxbias/matrix.hpp"

namespace ctxbias::pooling {

enum class HeadMode {
  /// Coordinate k is weighted by head floor(k * H / d), i.e. the head owning that slice.
  kPerHeadSlice,
  /// One weight vector, the mean of alpha over heads, for every coordinate.
  kHeadAveraged,
};

struct PoolingConfig {
  std::size_t hidden = 0;  // d
  std::size_t heads = 1;   // H
  std::size_t window = 2;  // n
  HeadMode head_mode = HeadMode::kPerHeadSlice;

  std::size_t head_dim() const { return hidden / heads; }
  /// Throws ArgumentError unless d, H, n >= 1 and H divides d.
  void validate() const;
};

struct ProjectionParams {
  Matrix w_q;  // d x d
  Matrix w_k;  // d x d
};

/// Half-open token range [begin, end) of one pooling window.
struct Window {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const Window&, const Window&) = default;
};

/// Per-head matrices, heads[h] is rows x (d/H).
struct HeadSplit {
  std::vector<Matrix> heads;
};

struct PooledContext {
  Matrix pooled;               // ceil(C/n) x d
  std::vector<Window> windows;
  /// One row per weight head (H rows in per-head-slice mode, 1 row when
  /// head-averaged), C columns. Each window's segment of a row sums to 1.
  Matrix window_weights;
};

struct PoolingGradients {
  Matrix grad_h_z;  // C x d
  Matrix grad_h_x;  // T x d
  Matrix grad_w_q;  // d x d
  Matrix grad_w_k;  // d x d
};

/// ceil(C / n) consecutive windows; the last one holds the remainder.
std::vector<Window> make_windows(std::size_t tokens, std::size_t window);

std::pair<HeadSplit, HeadSplit> project_qk(const Matrix& h_x, const Matrix& h_z, const ProjectionParams& params,
                                           const PoolingConfig& config);

/// Softmax(Q_h K_h^T / sqrt(d/H)) for each head; result heads[h] is T x C.
HeadSplit attention_scores(const HeadSplit& q, const HeadSplit& k, const PoolingConfig& config);

/// Mean over the T axis: row h of the result is mean_t A_h[t, :].
Matrix time_aggregate(const HeadSplit& attention);

PooledContext window_pool(const Matrix& h_z, const Matrix& alpha, const PoolingConfig& config);

PooledContext pool_forward(const Matrix& h_x, const Matrix& h_z, const ProjectionParams& params,
                           const PoolingConfig& config);

/// Gradients of <upstream, pool_forward(...).pooled> w.r.t. every input.
PoolingGradients pool_vjp(const Matrix& h_x, const Matrix& h_z, const ProjectionParams& params,
                          const PoolingConfig& config, const Matrix& upstream);

}  // namespace ctxbias::pooling
