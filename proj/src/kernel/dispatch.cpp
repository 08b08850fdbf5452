// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "ctxbias/error.hpp"
#include "ctxbias/simd.hpp"

namespace ctxbias::simd {
namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return &scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::kAvx2:
      return &avx2_kernels();
#endif
#if defined(__aarch64__)
    case Isa::kNeon:
      return &neon_kernels();
#endif
    default:
      return nullptr;
  }
}

const KernelTable* detect() {
  if (const char* env = std::getenv("CTXBIAS_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == isa_name(isa) && isa_available(isa)) return table_for(isa);
    }
  }
  if (isa_available(Isa::kAvx2)) return table_for(Isa::kAvx2);
  if (isa_available(Isa::kNeon)) return table_for(Isa::kNeon);
  return &scalar_kernels();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (isa_available(isa)) out.push_back(table_for(isa));
  }
  return out;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force(Isa isa) {
  if (!isa_available(isa)) {
    throw ArgumentError("kernel ISA '" + std::string(isa_name(isa)) + "' is not available on this machine");
  }
  g_active.store(table_for(isa), std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

}  // namespace ctxbias::simd
