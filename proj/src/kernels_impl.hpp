#ifndef PINTLFA_KERNELS_IMPL_HPP
#define PINTLFA_KERNELS_IMPL_HPP

#include <complex>
#include <cstddef>

namespace pintlfa::kernels::avx2 {
using cd = std::complex<double>;
double ddot(std::size_t n, const double* x, const double* y);
void daxpy(std::size_t n, double a, const double* x, double* y);
void dgemv(std::size_t m, std::size_t n, const double* a, const double* x, double* y);
void dgemm(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c);
cd zdot(std::size_t n, const cd* x, const cd* y);
cd zdotc(std::size_t n, const cd* x, const cd* y);
void zaxpy(std::size_t n, cd a, const cd* x, cd* y);
void zgemv(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y);
void zgemm(std::size_t m, std::size_t n, std::size_t k, const cd* a, const cd* b, cd* c);
void zrot(std::size_t n, double c, cd s, cd* x, cd* y);
} // namespace pintlfa::kernels::avx2

#endif
