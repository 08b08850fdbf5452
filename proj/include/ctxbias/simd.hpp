// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Inner-loop kernels with a portable scalar reference and vectorized variants
// (AVX2+FMA on x86-64, NEON on AArch64). The active table is chosen once at
// startup from CPUID; CTXBIAS_ISA=scalar|avx2|neon overrides the choice.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ctxbias::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  /// max_i x[i]; n >= 1
  double (*max)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

/// True when this binary was built with, and the CPU supports, the given ISA.
bool isa_available(Isa isa);

/// All kernel tables usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Table used by the library; resolved on first call.
const KernelTable& active();

/// Forces a specific table (tests, benchmarking). Throws ArgumentError when
/// the ISA is unavailable. Not thread-safe against concurrent kernel use.
void force(Isa isa);

std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace ctxbias::simd
