#include "pintlfa/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "pintlfa/errors.hpp"
#include "kernels_impl.hpp"

namespace pintlfa::kernels {

namespace {

using detail::cd;
using detail::Table;

double s_ddot(std::size_t n, const double* x, const double* y) { return ref::dot(n, x, y); }
void s_daxpy(std::size_t n, double a, const double* x, double* y) { ref::axpy(n, a, x, y); }
void s_dgemv(std::size_t m, std::size_t n, const double* a, const double* x, double* y) {
  ref::gemv(m, n, a, x, y);
}
void s_dgemm(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  ref::gemm(m, n, k, a, b, c);
}
cd s_zdot(std::size_t n, const cd* x, const cd* y) { return ref::dot(n, x, y); }
cd s_zdotc(std::size_t n, const cd* x, const cd* y) { return ref::dotc(n, x, y); }
void s_zaxpy(std::size_t n, cd a, const cd* x, cd* y) { ref::axpy(n, a, x, y); }
void s_zgemv(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) { ref::gemv(m, n, a, x, y); }
void s_zgemm(std::size_t m, std::size_t n, std::size_t k, const cd* a, const cd* b, cd* c) {
  ref::gemm(m, n, k, a, b, c);
}
void s_zrot(std::size_t n, double c, cd s, cd* x, cd* y) { ref::rot(n, c, s, x, y); }

constexpr Table scalar_table{s_ddot, s_daxpy, s_dgemv, s_dgemm, s_zdot,
                             s_zdotc, s_zaxpy, s_zgemv, s_zgemm, s_zrot};

#if defined(PINTLFA_HAVE_AVX2)
constexpr Table avx2_table{avx2::ddot,  avx2::daxpy, avx2::dgemv, avx2::dgemm, avx2::zdot,
                           avx2::zdotc, avx2::zaxpy, avx2::zgemv, avx2::zgemm, avx2::zrot};
#endif

struct State {
  Isa isa;
  const Table* table;
};

State initial_state() {
  const char* env = std::getenv("PINTLFA_ISA");
  if (env && std::strcmp(env, "scalar") == 0) return {Isa::scalar, &scalar_table};
#if defined(PINTLFA_HAVE_AVX2)
  if (isa_available(Isa::avx2)) return {Isa::avx2, &avx2_table};
#endif
  return {Isa::scalar, &scalar_table};
}

State& state() {
  static State s = initial_state();
  return s;
}

} // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(PINTLFA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return state().isa; }

void set_isa(Isa isa) {
  if (!isa_available(isa)) throw CapabilityError(std::string("ISA not available: ") + isa_name(isa));
#if defined(PINTLFA_HAVE_AVX2)
  state() = {isa, isa == Isa::avx2 ? &avx2_table : &scalar_table};
#else
  state() = {isa, &scalar_table};
#endif
}

const detail::Table& detail::table() { return *state().table; }

} // namespace pintlfa::kernels
