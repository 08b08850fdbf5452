// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "ctxbias/error.hpp"
#include "ctxbias/simd.hpp"

namespace ctxbias {

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix " + shape() + " needs " + std::to_string(rows_ * cols_) + " values, got " +
                     std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ArgumentError("matrix " + shape() + " has a non-finite entry at flat index " + std::to_string(i));
    }
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged row literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Reject the top sliver so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: cannot multiply " + a.shape() + " by " + b.shape());
  const auto& k = simd::active();
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      k.axpy(a(i, p), b.row(p).data(), out.data(), out.size());
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_nt: cannot multiply " + a.shape() + " by transpose of " + b.shape());
  const auto& k = simd::active();
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = k.dot(a.row(i).data(), b.row(j).data(), a.cols());
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("matmul_tn: cannot multiply transpose of " + a.shape() + " by " + b.shape());
  const auto& k = simd::active();
  Matrix c(a.cols(), b.cols());
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const auto brow = b.row(p);
    for (std::size_t i = 0; i < a.cols(); ++i) k.axpy(a(p, i), brow.data(), c.row(i).data(), brow.size());
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  }
  return t;
}

Matrix row_softmax(const Matrix& m, double scale) {
  if (!std::isfinite(scale)) throw ArgumentError("row_softmax: scale must be finite");
  const auto& k = simd::active();
  Matrix out(m.rows(), m.cols());
  if (m.cols() == 0) return out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto in = m.row(r);
    auto dst = out.row(r);
    // max(scale * x) is scale * max(x) for scale >= 0, scale * min(x) otherwise.
    double shift;
    if (scale >= 0.0) {
      shift = scale * k.max(in.data(), in.size());
    } else {
      shift = scale * *std::min_element(in.begin(), in.end());
    }
    double total = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      dst[c] = std::exp(scale * in[c] - shift);
      total += dst[c];
    }
    k.scale(1.0 / total, dst.data(), dst.size());
  }
  return out;
}

Matrix random_init(std::size_t rows, std::size_t cols, std::uint64_t seed, double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ArgumentError("random_init: amplitude must be >= 0");
  Rng rng(seed);
  std::vector<double> data(rows * cols);
  for (double& v : data) v = amplitude * (2.0 * rng.uniform01() - 1.0);
  return Matrix(rows, cols, std::move(data));
}

Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double step) {
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + step;
    const double up = f(probe);
    probe.data()[i] = orig - step;
    const double down = f(probe);
    probe.data()[i] = orig;
    grad.data()[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("inner: " + a.shape() + " vs " + b.shape());
  return simd::active().dot(a.data().data(), b.data().data(), a.size());
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("max_abs_diff: " + a.shape() + " vs " + b.shape());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

}  // namespace ctxbias
