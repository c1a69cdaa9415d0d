#include <cstdlib>
#include <string_view>

#include "borpic/kernels.hpp"

namespace borpic::kernels {

#if defined(BORPIC_HAVE_AVX2)
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(BORPIC_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() {
  const char* isa = std::getenv("BORPIC_ISA");
  if (isa && std::string_view(isa) == "scalar") return &scalar_table();
  const KernelTable* simd = avx2_table();
  return simd ? simd : &scalar_table();
}

const KernelTable*& current() {
  static const KernelTable* table = initial_table();
  return table;
}

}  // namespace

const KernelTable& active() { return *current(); }
void set_active(const KernelTable& table) { current() = &table; }

}  // namespace borpic::kernels
