#include <atomic>
#include <cstdlib>
#include <string_view>

#include "asymdex/kernels.hpp"

namespace asymdex::kernels {

#if defined(ASYMDEX_HAVE_AVX2_TU)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(ASYMDEX_HAVE_AVX2_TU)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* pick_default() {
  if (const char* forced = std::getenv("ASYMDEX_KERNELS"); forced && std::string_view(forced) == "scalar")
    return &scalar_table();
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(const KernelTable& table) { slot().store(&table, std::memory_order_release); }

}  // namespace asymdex::kernels
