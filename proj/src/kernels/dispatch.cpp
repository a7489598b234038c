// SPDX-License-Identifier: Apache-2.0
#include <atomic>

#include "detail.hpp"
#include "iscc/errors.hpp"

namespace iscc::kernels {
namespace {

[[maybe_unused]] bool cpu_has_avx2() {
#if defined(ISCC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& detect() {
#if defined(ISCC_HAVE_AVX2)
  if (cpu_has_avx2()) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

std::atomic<const KernelTable*> g_forced{nullptr};

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return detail::scalar_kernels(); }

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &detail::scalar_kernels();
    case Isa::Avx2:
#if defined(ISCC_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_kernels();
#endif
      return nullptr;
  }
  return nullptr;
}

const KernelTable& active() {
  if (const KernelTable* forced = g_forced.load(std::memory_order_acquire)) return *forced;
  static const KernelTable& best = detect();
  return best;
}

void force(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (t == nullptr) {
    throw ArgumentError("kernel variant '" + std::string(name(isa)) + "' is not available");
  }
  g_forced.store(t, std::memory_order_release);
}

void reset() { g_forced.store(nullptr, std::memory_order_release); }

}  // namespace iscc::kernels
