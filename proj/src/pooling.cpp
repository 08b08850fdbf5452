// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/pooling.hpp"

#include <cmath>
#include <string>

#include "ctxbias/error.hpp"
#include "ctxbias/simd.hpp"

namespace ctxbias::pooling {
namespace {

void require_params(const ProjectionParams& params, const PoolingConfig& config) {
  const std::size_t d = config.hidden;
  if (params.w_q.rows() != d || params.w_q.cols() != d) {
    throw ShapeError("W_Q is " + params.w_q.shape() + ", expected " + std::to_string(d) + "x" + std::to_string(d));
  }
  if (params.w_k.rows() != d || params.w_k.cols() != d) {
    throw ShapeError("W_K is " + params.w_k.shape() + ", expected " + std::to_string(d) + "x" + std::to_string(d));
  }
}

void require_inputs(const Matrix& h_x, const Matrix& h_z, const PoolingConfig& config) {
  config.validate();
  if (h_x.cols() != config.hidden) {
    throw ShapeError("h_x is " + h_x.shape() + ", expected " + std::to_string(config.hidden) + " columns");
  }
  if (h_z.cols() != config.hidden) {
    throw ShapeError("h_z is " + h_z.shape() + ", expected " + std::to_string(config.hidden) + " columns");
  }
  if (h_x.rows() == 0) throw ShapeError("h_x has no speech frames");
  if (h_z.rows() == 0) throw ShapeError("h_z has no context tokens");
}

HeadSplit split_heads(const Matrix& full, std::size_t heads) {
  const std::size_t dh = full.cols() / heads;
  HeadSplit out;
  out.heads.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Matrix m(full.rows(), dh);
    for (std::size_t r = 0; r < full.rows(); ++r) {
      const auto src = full.row(r).subspan(h * dh, dh);
      std::copy(src.begin(), src.end(), m.row(r).begin());
    }
    out.heads.push_back(std::move(m));
  }
  return out;
}

Matrix merge_heads(const HeadSplit& split) {
  const std::size_t dh = split.heads.front().cols();
  const std::size_t rows = split.heads.front().rows();
  Matrix full(rows, dh * split.heads.size());
  for (std::size_t h = 0; h < split.heads.size(); ++h) {
    for (std::size_t r = 0; r < rows; ++r) {
      const auto src = split.heads[h].row(r);
      std::copy(src.begin(), src.end(), full.row(r).begin() + static_cast<std::ptrdiff_t>(h * dh));
    }
  }
  return full;
}

/// alpha with head rows collapsed to one when head-averaged.
Matrix weight_source(const Matrix& alpha, HeadMode mode) {
  if (mode == HeadMode::kPerHeadSlice) return alpha;
  Matrix mean(1, alpha.cols());
  for (std::size_t h = 0; h < alpha.rows(); ++h) simd::axpy(1.0, alpha.row(h), mean.row(0));
  simd::active().scale(1.0 / static_cast<double>(alpha.rows()), mean.row(0).data(), alpha.cols());
  return mean;
}

/// Softmax of `source` restricted to each window, row by row.
Matrix window_softmax(const Matrix& source, const std::vector<Window>& windows) {
  Matrix w(source.rows(), source.cols());
  for (std::size_t r = 0; r < source.rows(); ++r) {
    const auto src = source.row(r);
    auto dst = w.row(r);
    for (const Window& win : windows) {
      double shift = src[win.begin];
      for (std::size_t i = win.begin; i < win.end; ++i) shift = std::max(shift, src[i]);
      double total = 0.0;
      for (std::size_t i = win.begin; i < win.end; ++i) {
        dst[i] = std::exp(src[i] - shift);
        total += dst[i];
      }
      for (std::size_t i = win.begin; i < win.end; ++i) dst[i] /= total;
    }
  }
  return w;
}

/// Which row of the weight matrix drives hidden coordinate k.
inline std::size_t weight_row(std::size_t k, std::size_t weight_rows, std::size_t hidden) {
  return weight_rows == 1 ? 0 : k * weight_rows / hidden;
}

}  // namespace

void PoolingConfig::validate() const {
  if (hidden == 0) throw ArgumentError("pooling: hidden size d must be >= 1");
  if (heads == 0) throw ArgumentError("pooling: head count H must be >= 1");
  if (window == 0) throw ArgumentError("pooling: window size n must be >= 1");
  if (hidden % heads != 0) {
    throw ArgumentError("pooling: d=" + std::to_string(hidden) + " is not divisible by H=" + std::to_string(heads));
  }
}

std::vector<Window> make_windows(std::size_t tokens, std::size_t window) {
  if (window == 0) throw ArgumentError("pooling: window size n must be >= 1");
  std::vector<Window> out;
  out.reserve((tokens + window - 1) / window);
  for (std::size_t b = 0; b < tokens; b += window) out.push_back({b, std::min(tokens, b + window)});
  return out;
}

std::pair<HeadSplit, HeadSplit> project_qk(const Matrix& h_x, const Matrix& h_z, const ProjectionParams& params,
                                           const PoolingConfig& config) {
  require_inputs(h_x, h_z, config);
  require_params(params, config);
  return {split_heads(matmul(h_x, params.w_q), config.heads), split_heads(matmul(h_z, params.w_k), config.heads)};
}

HeadSplit attention_scores(const HeadSplit& q, const HeadSplit& k, const PoolingConfig& config) {
  if (q.heads.size() != config.heads || k.heads.size() != config.heads) {
    throw ShapeError("attention_scores: head count differs from config H=" + std::to_string(config.heads));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.head_dim()));
  HeadSplit a;
  a.heads.reserve(config.heads);
  for (std::size_t h = 0; h < config.heads; ++h) a.heads.push_back(row_softmax(matmul_nt(q.heads[h], k.heads[h]), scale));
  return a;
}

Matrix time_aggregate(const HeadSplit& attention) {
  if (attention.heads.empty()) throw ShapeError("time_aggregate: no heads");
  const std::size_t frames = attention.heads.front().rows();
  const std::size_t tokens = attention.heads.front().cols();
  Matrix alpha(attention.heads.size(), tokens);
  for (std::size_t h = 0; h < attention.heads.size(); ++h) {
    auto out = alpha.row(h);
    for (std::size_t t = 0; t < frames; ++t) simd::axpy(1.0, attention.heads[h].row(t), out);
    simd::active().scale(1.0 / static_cast<double>(frames), out.data(), out.size());
  }
  return alpha;
}

PooledContext window_pool(const Matrix& h_z, const Matrix& alpha, const PoolingConfig& config) {
  config.validate();
  if (alpha.cols() != h_z.rows()) {
    throw ShapeError("window_pool: alpha has " + std::to_string(alpha.cols()) + " tokens, h_z has " +
                     std::to_string(h_z.rows()));
  }
  if (h_z.cols() != config.hidden) throw ShapeError("window_pool: h_z is " + h_z.shape());
  if (config.head_mode == HeadMode::kPerHeadSlice && alpha.rows() != config.heads) {
    throw ShapeError("window_pool: alpha has " + std::to_string(alpha.rows()) + " head rows, config H=" +
                     std::to_string(config.heads));
  }

  PooledContext out;
  out.windows = make_windows(h_z.rows(), config.window);
  out.window_weights = window_softmax(weight_source(alpha, config.head_mode), out.windows);
  out.pooled = Matrix(out.windows.size(), config.hidden);

  const Matrix& w = out.window_weights;
  const std::size_t d = config.hidden;
  if (w.rows() == 1) {
    for (std::size_t j = 0; j < out.windows.size(); ++j) {
      for (std::size_t i = out.windows[j].begin; i < out.windows[j].end; ++i) {
        simd::axpy(w(0, i), h_z.row(i), out.pooled.row(j));
      }
    }
    return out;
  }
  const std::size_t dh = d / w.rows();
  for (std::size_t j = 0; j < out.windows.size(); ++j) {
    for (std::size_t i = out.windows[j].begin; i < out.windows[j].end; ++i) {
      for (std::size_t h = 0; h < w.rows(); ++h) {
        simd::axpy(w(h, i), h_z.row(i).subspan(h * dh, dh), out.pooled.row(j).subspan(h * dh, dh));
      }
    }
  }
  return out;
}

PooledContext pool_forward(const Matrix& h_x, const Matrix& h_z, const ProjectionParams& params,
                           const PoolingConfig& config) {
  auto [q, k] = project_qk(h_x, h_z, params, config);
  const HeadSplit a = attention_scores(q, k, config);
  return window_pool(h_z, time_aggregate(a), config);
}

PoolingGradients pool_vjp(const Matrix& h_x, const Matrix& h_z, const ProjectionParams& params,
                          const PoolingConfig& config, const Matrix& upstream) {
  auto [q, k] = project_qk(h_x, h_z, params, config);
  const HeadSplit a = attention_scores(q, k, config);
  const Matrix alpha = time_aggregate(a);
  const PooledContext fwd = window_pool(h_z, alpha, config);
  if (upstream.rows() != fwd.pooled.rows() || upstream.cols() != fwd.pooled.cols()) {
    throw ShapeError("pool_vjp: upstream is " + upstream.shape() + ", pooled output is " + fwd.pooled.shape());
  }

  const std::size_t d = config.hidden;
  const std::size_t heads = config.heads;
  const std::size_t frames = h_x.rows();
  const std::size_t tokens = h_z.rows();
  const Matrix& w = fwd.window_weights;
  const std::size_t wrows = w.rows();

  PoolingGradients g;
  g.grad_h_z = Matrix(tokens, d);

  // Weighted sum: direct path into h_z, and d loss / d w.
  Matrix grad_w(wrows, tokens);
  for (std::size_t j = 0; j < fwd.windows.size(); ++j) {
    const auto up = upstream.row(j);
    for (std::size_t i = fwd.windows[j].begin; i < fwd.windows[j].end; ++i) {
      const auto z = h_z.row(i);
      auto gz = g.grad_h_z.row(i);
      for (std::size_t c = 0; c < d; ++c) {
        const std::size_t r = weight_row(c, wrows, d);
        gz[c] += w(r, i) * up[c];
        grad_w(r, i) += up[c] * z[c];
      }
    }
  }

  // Window softmax backward.
  Matrix grad_src(wrows, tokens);
  for (std::size_t r = 0; r < wrows; ++r) {
    for (const Window& win : fwd.windows) {
      double mix = 0.0;
      for (std::size_t i = win.begin; i < win.end; ++i) mix += w(r, i) * grad_w(r, i);
      for (std::size_t i = win.begin; i < win.end; ++i) grad_src(r, i) = w(r, i) * (grad_w(r, i) - mix);
    }
  }

  // Head averaging backward.
  Matrix grad_alpha(heads, tokens);
  if (config.head_mode == HeadMode::kPerHeadSlice) {
    grad_alpha = grad_src;
  } else {
    for (std::size_t h = 0; h < heads; ++h) simd::axpy(1.0 / static_cast<double>(heads), grad_src.row(0), grad_alpha.row(h));
  }

  // Time mean, row softmax and score backward per head.
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.head_dim()));
  HeadSplit grad_q;
  HeadSplit grad_k;
  for (std::size_t h = 0; h < heads; ++h) {
    const Matrix& ah = a.heads[h];
    Matrix grad_scores(frames, tokens);
    const auto ga = grad_alpha.row(h);
    for (std::size_t t = 0; t < frames; ++t) {
      const auto arow = ah.row(t);
      // dA[t, i] = ga[i] / T for every frame.
      const double mix = simd::dot(arow, ga) / static_cast<double>(frames);
      auto gs = grad_scores.row(t);
      for (std::size_t i = 0; i < tokens; ++i) gs[i] = arow[i] * (ga[i] / static_cast<double>(frames) - mix) * scale;
    }
    grad_q.heads.push_back(matmul(grad_scores, k.heads[h]));
    grad_k.heads.push_back(matmul_tn(grad_scores, q.heads[h]));
  }

  const Matrix grad_qf = merge_heads(grad_q);
  const Matrix grad_kf = merge_heads(grad_k);
  g.grad_w_q = matmul_tn(h_x, grad_qf);
  g.grad_h_x = matmul_nt(grad_qf, params.w_q);
  g.grad_w_k = matmul_tn(h_z, grad_kf);
  const Matrix via_keys = matmul_nt(grad_kf, params.w_k);
  for (std::size_t i = 0; i < tokens; ++i) simd::axpy(1.0, via_keys.row(i), g.grad_h_z.row(i));
  return g;
}

}  // namespace ctxbias::pooling
