#ifndef PINTLFA_LINALG_HPP
#define PINTLFA_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/kernels.hpp"
#include "pintlfa/matrix.hpp"
#include "pintlfa/scalar.hpp"

namespace pintlfa {

/// LU factorization with partial pivoting, P A = L U.
template <class T> class LU {
public:
  using R = real_of<T>;

  LU() = default;
  explicit LU(Matrix<T> a) : lu_(std::move(a)) {
    if (!lu_.square()) throw DimensionError("LU needs a square matrix");
    const std::size_t n = lu_.rows();
    piv_.resize(n);
    std::iota(piv_.begin(), piv_.end(), std::size_t(0));
    const R scale = lu_.max_abs();
    const R tiny = R(n) * epsilon<R>() * scale;
    if (scale == R(0)) throw FactorizationError("LU of the zero matrix");
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      R best = magnitude(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        const R v = magnitude(lu_(i, k));
        if (v > best) best = v, p = i;
      }
      if (!(best > tiny)) throw FactorizationError("matrix is singular to working precision");
      if (p != k) {
        std::swap_ranges(lu_.row(k), lu_.row(k) + n, lu_.row(p));
        std::swap(piv_[k], piv_[p]);
        sign_ = -sign_;
      }
      const T inv = T(1) / lu_(k, k);
      const std::size_t rest = n - k - 1;
      for (std::size_t i = k + 1; i < n; ++i) {
        T& lik = lu_(i, k);
        if (lik == T{}) continue;
        lik *= inv;
        kernels::axpy(rest, T(-lik), lu_.row(k) + k + 1, lu_.row(i) + k + 1);
      }
    }
  }

  std::size_t size() const { return lu_.rows(); }
  const Matrix<T>& factors() const { return lu_; }

  Vector<T> solve(const Vector<T>& b) const {
    const std::size_t n = size();
    if (b.size() != n) throw DimensionError("LU solve size mismatch");
    Vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (std::size_t i = 1; i < n; ++i) x[i] -= kernels::dot(i, lu_.row(i), x.data());
    for (std::size_t i = n; i-- > 0;) {
      const std::size_t rest = n - i - 1;
      x[i] = (x[i] - kernels::dot(rest, lu_.row(i) + i + 1, x.data() + i + 1)) / lu_(i, i);
    }
    return x;
  }

  /// Solve with many right-hand sides stored as the columns of b.
  Matrix<T> solve(const Matrix<T>& b) const {
    const std::size_t n = size();
    if (b.rows() != n) throw DimensionError("LU solve size mismatch");
    const std::size_t r = b.cols();
    Matrix<T> x(n, r);
    for (std::size_t i = 0; i < n; ++i) std::copy(b.row(piv_[i]), b.row(piv_[i]) + r, x.row(i));
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const T l = lu_(i, j);
        if (l != T{}) kernels::axpy(r, T(-l), x.row(j), x.row(i));
      }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const T u = lu_(i, j);
        if (u != T{}) kernels::axpy(r, T(-u), x.row(j), x.row(i));
      }
      const T inv = T(1) / lu_(i, i);
      T* xi = x.row(i);
      for (std::size_t c = 0; c < r; ++c) xi[c] *= inv;
    }
    return x;
  }

  Matrix<T> inverse() const { return solve(Matrix<T>::identity(size())); }

  T determinant() const {
    T d = T(sign_);
    for (std::size_t i = 0; i < size(); ++i) d *= lu_(i, i);
    return d;
  }

private:
  Matrix<T> lu_;
  std::vector<std::size_t> piv_;
  int sign_ = 1;
};

template <class T> Matrix<T> inverse(const Matrix<T>& a) { return LU<T>(a).inverse(); }

/// Eigenvalues of a square matrix with the dimension it came from.
template <class R> struct Spectrum {
  std::vector<std::complex<R>> values;
  std::size_t source_dim = 0;

  R radius() const {
    R r(0);
    for (const auto& v : values) r = std::max(r, magnitude(v));
    return r;
  }
};

/// Real part descending, then imaginary part descending.
template <class R> void sort_spectrum(std::vector<std::complex<R>>& v) {
  std::sort(v.begin(), v.end(), [](const std::complex<R>& a, const std::complex<R>& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

namespace detail {

// Complex Givens rotation G with G [x; y] = [r; 0], G = [[c, s], [-conj(s), c]].
template <class R>
void givens(const std::complex<R>& x, const std::complex<R>& y, R& c, std::complex<R>& s) {
  using std::sqrt;
  const R ax = magnitude(x), ay = magnitude(y);
  if (ay == R(0)) {
    c = R(1);
    s = {};
    return;
  }
  if (ax == R(0)) {
    c = R(0);
    s = std::complex<R>(1);
    return;
  }
  const R scale = ax + ay;
  const R nrm = scale * sqrt(abs2(x / scale) + abs2(y / scale));
  c = ax / nrm;
  s = (x / ax) * std::conj(y) / nrm;
}

// Householder reduction to upper Hessenberg form, in place.
template <class R> void hessenberg(Matrix<std::complex<R>>& h) {
  using C = std::complex<R>;
  using std::sqrt;
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<C> v(n), vc(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    R scale(0);
    for (std::size_t i = 0; i < len; ++i) scale = std::max(scale, magnitude(h(k + 1 + i, k)));
    if (scale == R(0)) continue;
    R s2(0);
    for (std::size_t i = 0; i < len; ++i) {
      v[i] = h(k + 1 + i, k) / scale;
      s2 += abs2(v[i]);
    }
    const R nx = sqrt(s2);
    const R a0 = magnitude(v[0]);
    const C phase = a0 == R(0) ? C(1) : v[0] / a0;
    const C alpha = -phase * nx;
    v[0] -= alpha;
    R vn(0);
    for (std::size_t i = 0; i < len; ++i) vn += abs2(v[i]);
    if (vn == R(0)) continue;
    vn = sqrt(vn);
    for (std::size_t i = 0; i < len; ++i) {
      v[i] /= vn;
      vc[i] = std::conj(v[i]);
    }
    // left: rows k+1.., columns k..
    const std::size_t cols = n - k;
    std::fill(w.begin(), w.begin() + cols, C{});
    for (std::size_t i = 0; i < len; ++i) kernels::axpy(cols, vc[i], h.row(k + 1 + i) + k, w.data());
    for (std::size_t i = 0; i < len; ++i) kernels::axpy(cols, C(R(-2) * v[i]), w.data(), h.row(k + 1 + i) + k);
    // right: all rows, columns k+1..
    for (std::size_t i = 0; i < n; ++i) {
      const C si = kernels::dot(len, h.row(i) + k + 1, v.data());
      if (si != C{}) kernels::axpy(len, C(R(-2) * si), vc.data(), h.row(i) + k + 1);
    }
    h(k + 1, k) = alpha * scale;
    for (std::size_t i = 1; i < len; ++i) h(k + 1 + i, k) = C{};
  }
}

template <class R>
std::pair<std::complex<R>, std::complex<R>> eig2(const std::complex<R>& a, const std::complex<R>& b,
                                                 const std::complex<R>& c, const std::complex<R>& d) {
  using std::sqrt;
  const std::complex<R> half = (a - d) / R(2);
  const std::complex<R> disc = sqrt(half * half + b * c);
  const std::complex<R> mid = (a + d) / R(2);
  return {mid + disc, mid - disc};
}

} // namespace detail

/// All eigenvalues of a square real or complex matrix: Hessenberg reduction
/// followed by single-shift complex QR with deflation.
template <class T> Spectrum<real_of<T>> eigenvalues(const Matrix<T>& a) {
  using R = real_of<T>;
  using C = std::complex<R>;
  using std::abs;
  if (!a.square()) throw DimensionError("eigenvalues need a square matrix");
  const std::size_t n = a.rows();
  Matrix<C> h = a.template cast<C>();
  detail::hessenberg(h);

  const R eps = epsilon<R>();
  const R hnorm = std::max(h.max_abs(), std::numeric_limits<R>::min());
  std::vector<C> eig;
  eig.reserve(n);
  const std::size_t cap = 100 * n;
  std::size_t total = 0, its = 0;
  long hi = static_cast<long>(n) - 1;
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(h(0, 0));
      break;
    }
    long l = hi;
    for (; l > 0; --l) {
      const R sub = magnitude(h(l, l - 1));
      R ref = magnitude(h(l - 1, l - 1)) + magnitude(h(l, l));
      if (ref == R(0)) ref = hnorm;
      if (sub <= eps * ref || sub <= eps * eps * hnorm) {
        h(l, l - 1) = C{};
        break;
      }
    }
    if (l == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      its = 0;
      continue;
    }
    if (l == hi - 1) {
      auto [e1, e2] = detail::eig2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      eig.push_back(e1);
      eig.push_back(e2);
      hi -= 2;
      its = 0;
      continue;
    }
    if (total >= cap)
      throw ConvergenceError("QR iteration did not converge", static_cast<double>(magnitude(h(hi, hi - 1))));

    C shift;
    if (its > 0 && its % 10 == 0) {
      shift = h(hi, hi) + C(magnitude(h(hi, hi - 1)) + magnitude(h(hi - 1, hi - 2)));
    } else {
      auto [e1, e2] = detail::eig2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
      shift = magnitude(e1 - h(hi, hi)) < magnitude(e2 - h(hi, hi)) ? e1 : e2;
    }

    // implicit single-shift sweep on the window [l, hi]
    const std::size_t lo = static_cast<std::size_t>(l), up = static_cast<std::size_t>(hi);
    for (std::size_t k = lo; k < up; ++k) {
      C x, y;
      if (k == lo) {
        x = h(k, k) - shift;
        y = h(k + 1, k);
      } else {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      R c;
      C s;
      detail::givens(x, y, c, s);
      const std::size_t c0 = k == lo ? k : k - 1;
      kernels::rot(up - c0 + 1, c, s, h.row(k) + c0, h.row(k + 1) + c0);
      if (k != lo) h(k + 1, k - 1) = C{};
      const std::size_t rmax = std::min(k + 2, up);
      const C sc = std::conj(s);
      for (std::size_t i = lo; i <= rmax; ++i) {
        const C hik = h(i, k), hik1 = h(i, k + 1);
        h(i, k) = c * hik + sc * hik1;
        h(i, k + 1) = c * hik1 - s * hik;
      }
    }
    ++its;
    ++total;
  }
  Spectrum<R> out;
  out.values = std::move(eig);
  out.source_dim = n;
  sort_spectrum(out.values);
  return out;
}

/// Eigenvalues of a real symmetric tridiagonal matrix (implicit QL), ascending.
template <class R> std::vector<R> tridiagonal_eigenvalues(std::vector<R> d, std::vector<R> e) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = d.size();
  if (n == 0) throw DimensionError("empty tridiagonal matrix");
  e.resize(n, R(0));
  const R eps = epsilon<R>();
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    for (;;) {
      std::size_t m = l;
      for (; m + 1 < n; ++m) {
        const R dd = abs(d[m]) + abs(d[m + 1]);
        if (abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iter > 60 * n) throw ConvergenceError("tridiagonal QL did not converge", static_cast<double>(abs(e[l])));
      R g = (d[l + 1] - d[l]) / (R(2) * e[l]);
      R r = sqrt(g * g + R(1));
      g = d[m] - d[l] + e[l] / (g + (g >= R(0) ? r : -r));
      R s(1), c(1), p(0);
      std::size_t i = m;
      bool underflow = false;
      while (i-- > l) {
        R f = s * e[i];
        const R b = c * e[i];
        r = sqrt(f * f + g * g);
        e[i + 1] = r;
        if (r == R(0)) {
          d[i + 1] -= p;
          e[m] = R(0);
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + R(2) * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = R(0);
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

/// Eigenvalues of a Hermitian (or real symmetric) matrix, ascending.
template <class T> std::vector<real_of<T>> hermitian_eigenvalues(const Matrix<T>& a) {
  using R = real_of<T>;
  using C = std::complex<R>;
  if (!a.square()) throw DimensionError("eigenvalues need a square matrix");
  const std::size_t n = a.rows();
  Matrix<C> h = a.template cast<C>();
  // symmetrize against roundoff in the input
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const C avg = (h(i, j) + std::conj(h(j, i))) / R(2);
      h(i, j) = avg;
      h(j, i) = std::conj(avg);
    }
  detail::hessenberg(h); // Hermitian in, tridiagonal out
  std::vector<R> d(n), e(n, R(0));
  for (std::size_t i = 0; i < n; ++i) d[i] = h(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = magnitude(h(i + 1, i));
  return tridiagonal_eigenvalues(std::move(d), std::move(e));
}

/// Largest singular value. Power iteration on A^H A with a residual test;
/// falls back to a dense Hermitian eigen-solve when it stalls.
template <class T> real_of<T> spectral_norm(const Matrix<T>& a, real_of<T> tol = real_of<T>(1e-12),
                                            std::size_t max_iter = 10000) {
  using R = real_of<T>;
  using std::sqrt;
  const std::size_t n = a.cols();
  if (a.max_abs() == R(0)) return R(0);
  const Matrix<T> ah = adjoint(a);
  Vector<T> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = T(R(1) + R(i % 7) / R(10));
  {
    const R nv = norm2(v);
    for (auto& x : v) x /= T(nv);
  }
  R sigma2(0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector<T> w = a * v;
    Vector<T> z = ah * w;
    const R nw = norm2(w);
    sigma2 = nw * nw;
    if (sigma2 == R(0)) break;
    R res(0);
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, magnitude(z[i] - T(sigma2) * v[i]));
    const R nz = norm2(z);
    if (res <= tol * sigma2) return sqrt(sigma2);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / T(nz);
  }
  const auto ev = hermitian_eigenvalues(Matrix<T>(ah * a));
  return sqrt(std::max(ev.back(), R(0)));
}

/// Rectangular matrices padded to square are not needed; this helper raises a
/// square matrix to a non-negative integer power by repeated squaring.
template <class T> Matrix<T> matrix_power(const Matrix<T>& a, unsigned k) {
  if (!a.square()) throw DimensionError("matrix power needs a square matrix");
  Matrix<T> result = Matrix<T>::identity(a.rows());
  Matrix<T> base = a;
  while (k) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return result;
}

} // namespace pintlfa

#endif
