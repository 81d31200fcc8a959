#pragma once

// Dense double-precision primitives used by the network layers.
//
// Every primitive has a scalar reference implementation; vectorized variants
// (AVX2 on x86-64, NEON on AArch64) are selected once at startup from the
// host CPU's capabilities. Setting UAVSWARM_ISA=scalar|avx2|neon in the
// environment overrides the choice, and force_isa() does the same from code.

#include <cstddef>
#include <span>
#include <string_view>

namespace uavswarm::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += x
  void (*add)(const double* x, double* y, std::size_t n);
  // y *= alpha
  void (*scale)(double alpha, double* y, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void add(const double* x, double* y, std::size_t n);
void scale(double alpha, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void add(const double* x, double* y, std::size_t n);
void scale(double alpha, double* y, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void add(const double* x, double* y, std::size_t n);
void scale(double alpha, double* y, std::size_t n);
}  // namespace neon

// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

const KernelTable& table_for(Isa isa);
const KernelTable& active();

// Throws std::invalid_argument if the ISA is unavailable on this host.
void force_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void add(std::span<const double> x, std::span<double> y) {
  active().add(x.data(), y.data(), x.size());
}
inline void scale(double alpha, std::span<double> y) {
  active().scale(alpha, y.data(), y.size());
}

}  // namespace uavswarm::kernels
