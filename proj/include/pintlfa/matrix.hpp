#ifndef PINTLFA_MATRIX_HPP
#define PINTLFA_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/kernels.hpp"
#include "pintlfa/scalar.hpp"

namespace pintlfa {

template <class T> using Vector = std::vector<T>;

/// Largest row or column count a Kronecker product may produce (desk scale).
inline constexpr std::size_t max_dense_dimension = 16384;

/// Dense row-major matrix. A default-constructed matrix is empty and only
/// useful as a placeholder; every sized matrix has at least one row and column.
template <class T> class Matrix {
public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be positive");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix dimensions must be positive");
    data_.reserve(rows_ * cols_);
    for (const auto& r : init) {
      if (r.size() != cols_) throw DimensionError("ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  T* row(std::size_t i) { return data_.data() + i * cols_; }
  const T* row(std::size_t i) const { return data_.data() + i * cols_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  Matrix& operator+=(const Matrix& o) {
    require_same(o, "+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    require_same(o, "-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  template <class U> Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = scalar_cast<U>(data_[i]);
    return out;
  }

  real_of<T> max_abs() const {
    real_of<T> m(0);
    for (const auto& x : data_) m = std::max(m, magnitude(x));
    return m;
  }

  bool is_finite() const {
    using std::isfinite;
    for (const auto& x : data_) {
      if constexpr (is_complex_v<T>) {
        if (!isfinite(x.real()) || !isfinite(x.imag())) return false;
      } else if (!isfinite(x)) {
        return false;
      }
    }
    return true;
  }

private:
  void require_same(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError(std::string("shape mismatch in ") + op);
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

template <class T> Matrix<T> operator+(Matrix<T> a, const Matrix<T>& b) { return a += b; }
template <class T> Matrix<T> operator-(Matrix<T> a, const Matrix<T>& b) { return a -= b; }
template <class T> Matrix<T> operator*(const T& s, Matrix<T> a) { return a *= s; }

template <class T> Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw DimensionError("inner dimensions differ in matrix product");
  Matrix<T> c(a.rows(), b.cols());
  kernels::gemm(a.rows(), b.cols(), a.cols(), a.data(), b.data(), c.data());
  return c;
}

template <class T> Vector<T> operator*(const Matrix<T>& a, const Vector<T>& x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector size mismatch");
  Vector<T> y(a.rows());
  kernels::gemv(a.rows(), a.cols(), a.data(), x.data(), y.data());
  return y;
}

template <class T> Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

template <class T> Matrix<T> adjoint(const Matrix<T>& a) {
  Matrix<T> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = conj_of(a(i, j));
  return t;
}

template <class T> Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() * b.rows() > max_dense_dimension || a.cols() * b.cols() > max_dense_dimension)
    throw SizeError("Kronecker product exceeds the dense dimension cap");
  Matrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const T aij = a(i, j);
      if (aij == T{}) continue;
      for (std::size_t p = 0; p < b.rows(); ++p) {
        T* dst = k.row(i * b.rows() + p) + j * b.cols();
        const T* src = b.row(p);
        for (std::size_t q = 0; q < b.cols(); ++q) dst[q] = aij * src[q];
      }
    }
  return k;
}

/// Unitary DFT basis, Psi(j, k) = e^{i 2 pi j k / n} / sqrt(n).
template <class R> Matrix<std::complex<R>> dft_matrix(std::size_t n) {
  using std::sqrt;
  if (n == 0) throw DimensionError("dft size must be positive");
  Matrix<std::complex<R>> psi(n, n);
  const R s = R(1) / sqrt(R(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      psi(j, k) = unit_root<R>(static_cast<long long>(j * k), static_cast<long long>(n)) * s;
  return psi;
}

/// Shift-down matrix of size n: ones on the first subdiagonal.
template <class T> Matrix<T> subdiagonal_ones(std::size_t n) {
  Matrix<T> e(n, n);
  for (std::size_t i = 1; i < n; ++i) e(i, i - 1) = T(1);
  return e;
}

// vector helpers

template <class T> real_of<T> norm2(const Vector<T>& x) {
  using std::sqrt;
  // scaled sum keeps tiny errors from underflowing in double
  real_of<T> scale(0);
  for (const auto& v : x) scale = std::max(scale, magnitude(v));
  if (scale == real_of<T>(0)) return scale;
  real_of<T> s(0);
  for (const auto& v : x) s += abs2(v / scale);
  return scale * sqrt(s);
}

template <class T> real_of<T> norm_inf(const Vector<T>& x) {
  real_of<T> m(0);
  for (const auto& v : x) m = std::max(m, magnitude(v));
  return m;
}

template <class T> Vector<T> operator+(Vector<T> a, const Vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("vector size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

template <class T> Vector<T> operator-(Vector<T> a, const Vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("vector size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <class U, class T> Vector<U> cast_vector(const Vector<T>& x) {
  Vector<U> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = scalar_cast<U>(x[i]);
  return y;
}

template <class T> real_of<T> max_abs_diff(const Vector<T>& a, const Vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("vector size mismatch");
  real_of<T> m(0);
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, magnitude(a[i] - b[i]));
  return m;
}

template <class T> real_of<T> max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  return (a - b).max_abs();
}

} // namespace pintlfa

#endif
