#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace phasespace::kernels {
namespace {

const KernelTable* detect() {
  if (const char* env = std::getenv("PHASESPACE_KERNELS")) {
    if (std::string_view(env) == "scalar") return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() {
#ifdef PHASESPACE_BUILD_AVX2
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &detail::avx2_table();
#endif
  return nullptr;
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void select(const KernelTable& table) {
  slot().store(&table, std::memory_order_relaxed);
}

}  // namespace phasespace::kernels
