// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma and is only
// entered after a runtime CPU check.

#include <immintrin.h>

#include <complex>
#include <cstddef>

#include "kernels_impl.hpp"

namespace pintlfa::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// (ar + i ai) * x for two packed complex numbers
inline __m256d cmul(__m256d ar, __m256d ai, __m256d x) {
  __m256d sw = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, sw));
}

} // namespace

double ddot(std::size_t n, const double* x, const double* y) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4)
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void daxpy(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void dgemv(std::size_t m, std::size_t n, const double* a, const double* x, double* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = ddot(n, a + i * n, x);
}

void dgemm(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    std::size_t p = 0;
    // four rows of B per pass keeps C_i in registers longer
    for (; p + 4 <= k; p += 4) {
      const __m256d s0 = _mm256_set1_pd(a[i * k + p]);
      const __m256d s1 = _mm256_set1_pd(a[i * k + p + 1]);
      const __m256d s2 = _mm256_set1_pd(a[i * k + p + 2]);
      const __m256d s3 = _mm256_set1_pd(a[i * k + p + 3]);
      const double* b0 = b + p * n;
      const double* b1 = b0 + n;
      const double* b2 = b1 + n;
      const double* b3 = b2 + n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_loadu_pd(ci + j);
        acc = _mm256_fmadd_pd(s0, _mm256_loadu_pd(b0 + j), acc);
        acc = _mm256_fmadd_pd(s1, _mm256_loadu_pd(b1 + j), acc);
        acc = _mm256_fmadd_pd(s2, _mm256_loadu_pd(b2 + j), acc);
        acc = _mm256_fmadd_pd(s3, _mm256_loadu_pd(b3 + j), acc);
        _mm256_storeu_pd(ci + j, acc);
      }
      for (; j < n; ++j)
        ci[j] += a[i * k + p] * b0[j] + a[i * k + p + 1] * b1[j] + a[i * k + p + 2] * b2[j] +
                 a[i * k + p + 3] * b3[j];
    }
    for (; p < k; ++p) daxpy(n, a[i * k + p], b + p * n, ci);
  }
}

using cd = std::complex<double>;

cd zdot(std::size_t n, const cd* x, const cd* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xp + 2 * i);
    __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    re = _mm256_fmadd_pd(vx, _mm256_movedup_pd(vy), re);       // xr yr, xi yr
    im = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0xF), im);  // xr yi, xi yi
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(m, im);
  cd s((r[0] + r[2]) - (m[1] + m[3]), (r[1] + r[3]) + (m[0] + m[2]));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

cd zdotc(std::size_t n, const cd* x, const cd* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xp + 2 * i);
    __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    re = _mm256_fmadd_pd(vx, _mm256_movedup_pd(vy), re);
    im = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0xF), im);
  }
  alignas(32) double r[4], m[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(m, im);
  // conj(x) y = (xr yr + xi yi) + i (xr yi - xi yr)
  cd s((r[0] + r[2]) + (m[1] + m[3]), (m[0] + m[2]) - (r[1] + r[3]));
  for (; i < n; ++i) s += std::conj(x[i]) * y[i];
  return s;
}

void zaxpy(std::size_t n, cd a, const cd* x, cd* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(vy, cmul(ar, ai, _mm256_loadu_pd(xp + 2 * i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void zgemv(std::size_t m, std::size_t n, const cd* a, const cd* x, cd* y) {
  for (std::size_t i = 0; i < m; ++i) y[i] = zdot(n, a + i * n, x);
}

void zgemm(std::size_t m, std::size_t n, std::size_t k, const cd* a, const cd* b, cd* c) {
  for (std::size_t i = 0; i < m; ++i) {
    cd* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const cd aip = a[i * k + p];
      if (aip == cd{}) continue;
      zaxpy(n, aip, b + p * n, ci);
    }
  }
}

void zrot(std::size_t n, double c, cd s, cd* x, cd* y) {
  double* xp = reinterpret_cast<double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d sr = _mm256_set1_pd(s.real());
  const __m256d si = _mm256_set1_pd(s.imag());
  const __m256d nsi = _mm256_set1_pd(-s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xp + 2 * i);
    __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    // x' = c x + s y ; y' = c y - conj(s) x
    __m256d nx = _mm256_fmadd_pd(vc, vx, cmul(sr, si, vy));
    __m256d ny = _mm256_fmsub_pd(vc, vy, cmul(sr, nsi, vx));
    _mm256_storeu_pd(xp + 2 * i, nx);
    _mm256_storeu_pd(yp + 2 * i, ny);
  }
  const cd sc = std::conj(s);
  for (; i < n; ++i) {
    const cd xi = x[i], yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - sc * xi;
  }
}

} // namespace pintlfa::kernels::avx2
