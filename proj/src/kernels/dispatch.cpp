#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "uavswarm/kernels.hpp"

namespace uavswarm::kernels {

namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, scalar::dot, scalar::axpy, scalar::add,
                                   scalar::scale};
#if defined(UAVSWARM_WITH_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, avx2::dot, avx2::axpy, avx2::add, avx2::scale};
#endif
#if defined(UAVSWARM_WITH_NEON)
constexpr KernelTable kNeonTable{Isa::kNeon, neon::dot, neon::axpy, neon::add, neon::scale};
#endif

Isa best_available() {
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("UAVSWARM_ISA")) {
    const std::string name(env);
    if (name == "scalar") return Isa::kScalar;
    if (name == "avx2" && isa_available(Isa::kAvx2)) return Isa::kAvx2;
    if (name == "neon" && isa_available(Isa::kNeon)) return Isa::kNeon;
  }
  return best_available();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{&table_for(initial_isa())};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2:
#if defined(UAVSWARM_WITH_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(UAVSWARM_WITH_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel variant not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(UAVSWARM_WITH_AVX2)
    case Isa::kAvx2: return kAvx2Table;
#endif
#if defined(UAVSWARM_WITH_NEON)
    case Isa::kNeon: return kNeonTable;
#endif
    default: return kScalarTable;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void force_isa(Isa isa) { current().store(&table_for(isa), std::memory_order_release); }

}  // namespace uavswarm::kernels
