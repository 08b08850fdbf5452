// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ctxbias {

/// Dense row-major matrix of doubles. Holds speech features (T x d), context
/// embeddings (C x d) and projection weights. Entries are always finite.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  /// Throws ShapeError if data.size() != rows * cols, ArgumentError on NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Nested initializer for small literals: Matrix::from_rows({{1, 2}, {3, 4}}).
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// "RxC"
  std::string shape() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// SplitMix64 (Steele, Lea & Flood). Same seed, same stream, on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), unbiased by rejection; bound >= 1.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi] inclusive.
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::uint64_t state_;
};

/// a * b. Throws ShapeError naming both shapes on mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T * b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

/// Row-wise softmax of scale * m, stabilized by subtracting the row max.
Matrix row_softmax(const Matrix& m, double scale);

/// Entries uniform in [-amplitude, amplitude]: amplitude * (2u - 1), u = uniform01().
Matrix random_init(std::size_t rows, std::size_t cols, std::uint64_t seed, double amplitude);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every entry of x.
Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double step);

/// Frobenius inner product; shapes must match.
double inner(const Matrix& a, const Matrix& b);

/// Largest |a_ij - b_ij|; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace ctxbias
