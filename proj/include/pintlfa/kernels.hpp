#ifndef PINTLFA_KERNELS_HPP
#define PINTLFA_KERNELS_HPP

// Dense inner loops. The templates in `ref` are the reference versions and
// serve every scalar type; double and complex<double> are routed through a
// table that is filled once with either the reference or the AVX2 variant.

#include <complex>
#include <cstddef>
#include <type_traits>

#include "pintlfa/scalar.hpp"

namespace pintlfa::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
/// Current selection. First call picks the best available ISA unless
/// PINTLFA_ISA=scalar is set in the environment.
Isa active_isa();
/// Force an ISA (tests). Throws CapabilityError if the CPU lacks it.
void set_isa(Isa isa);

namespace ref {

template <class T> T dot(std::size_t n, const T* x, const T* y) {
  T s{};
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

// sum conj(x_i) y_i
template <class T> T dotc(std::size_t n, const T* x, const T* y) {
  T s{};
  for (std::size_t i = 0; i < n; ++i) s += conj_of(x[i]) * y[i];
  return s;
}

template <class T> void axpy(std::size_t n, const T& a, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// y = A x, A row-major m x n
template <class T> void gemv(std::size_t m, std::size_t n, const T* a, const T* x, T* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = dot(n, a + i * n, x);
}

// C = A B, row-major, A m x k, B k x n
template <class T>
void gemm(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  for (std::size_t i = 0; i < m; ++i) {
    T* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = T{};
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = a[i * k + p];
      if (aip == T{}) continue;
      axpy(n, aip, b + p * n, ci);
    }
  }
}

// plane rotation of two rows: x <- c x + s y, y <- -conj(s) x + c y
template <class T, class R>
void rot(std::size_t n, const R& c, const T& s, T* x, T* y) {
  const T sc = conj_of(s);
  for (std::size_t i = 0; i < n; ++i) {
    const T xi = x[i];
    const T yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - sc * xi;
  }
}

} // namespace ref

namespace detail {

using cd = std::complex<double>;

struct Table {
  double (*ddot)(std::size_t, const double*, const double*);
  void (*daxpy)(std::size_t, double, const double*, double*);
  void (*dgemv)(std::size_t, std::size_t, const double*, const double*, double*);
  void (*dgemm)(std::size_t, std::size_t, std::size_t, const double*, const double*, double*);
  cd (*zdot)(std::size_t, const cd*, const cd*);
  cd (*zdotc)(std::size_t, const cd*, const cd*);
  void (*zaxpy)(std::size_t, cd, const cd*, cd*);
  void (*zgemv)(std::size_t, std::size_t, const cd*, const cd*, cd*);
  void (*zgemm)(std::size_t, std::size_t, std::size_t, const cd*, const cd*, cd*);
  void (*zrot)(std::size_t, double, cd, cd*, cd*);
};

const Table& table();

template <class T> inline constexpr bool is_d = std::is_same_v<T, double>;
template <class T> inline constexpr bool is_z = std::is_same_v<T, std::complex<double>>;

} // namespace detail

template <class T> T dot(std::size_t n, const T* x, const T* y) {
  if constexpr (detail::is_d<T>) return detail::table().ddot(n, x, y);
  else if constexpr (detail::is_z<T>) return detail::table().zdot(n, x, y);
  else return ref::dot(n, x, y);
}

template <class T> T dotc(std::size_t n, const T* x, const T* y) {
  if constexpr (detail::is_d<T>) return detail::table().ddot(n, x, y);
  else if constexpr (detail::is_z<T>) return detail::table().zdotc(n, x, y);
  else return ref::dotc(n, x, y);
}

template <class T> void axpy(std::size_t n, const T& a, const T* x, T* y) {
  if constexpr (detail::is_d<T>) detail::table().daxpy(n, a, x, y);
  else if constexpr (detail::is_z<T>) detail::table().zaxpy(n, a, x, y);
  else ref::axpy(n, a, x, y);
}

template <class T> void gemv(std::size_t m, std::size_t n, const T* a, const T* x, T* y) {
  if constexpr (detail::is_d<T>) detail::table().dgemv(m, n, a, x, y);
  else if constexpr (detail::is_z<T>) detail::table().zgemv(m, n, a, x, y);
  else ref::gemv(m, n, a, x, y);
}

template <class T>
void gemm(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  if constexpr (detail::is_d<T>) detail::table().dgemm(m, n, k, a, b, c);
  else if constexpr (detail::is_z<T>) detail::table().zgemm(m, n, k, a, b, c);
  else ref::gemm(m, n, k, a, b, c);
}

template <class T, class R> void rot(std::size_t n, const R& c, const T& s, T* x, T* y) {
  if constexpr (detail::is_z<T> && std::is_same_v<R, double>) detail::table().zrot(n, c, s, x, y);
  else ref::rot(n, c, s, x, y);
}

} // namespace pintlfa::kernels

#endif
