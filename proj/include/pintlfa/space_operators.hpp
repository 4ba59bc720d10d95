#ifndef PINTLFA_SPACE_OPERATORS_HPP
#define PINTLFA_SPACE_OPERATORS_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/linalg.hpp"
#include "pintlfa/matrix.hpp"

namespace pintlfa {

/// Periodic stencil operator: (C v)_i = scale * sum_o c_o v_{(i+o) mod n}.
template <class R> class CirculantOperator {
public:
  CirculantOperator() = default;
  CirculantOperator(std::size_t n, std::map<long, R> stencil, R scale = R(1))
      : n_(n), stencil_(std::move(stencil)), scale_(scale) {
    if (n == 0) throw DimensionError("circulant size must be positive");
  }

  std::size_t n() const { return n_; }
  const std::map<long, R>& stencil() const { return stencil_; }
  R scale() const { return scale_; }

  Matrix<R> materialize() const {
    Matrix<R> c(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (const auto& [o, v] : stencil_) c(i, wrap(long(i) + o)) += scale_ * v;
    return c;
  }

  /// lambda_k = scale * sum_o c_o e^{i 2 pi k o / n}, k in index order
  std::vector<std::complex<R>> spectrum() const {
    std::vector<std::complex<R>> lam(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      std::complex<R> s{};
      for (const auto& [o, v] : stencil_) s += v * unit_root<R>(static_cast<long long>(k) * o, static_cast<long long>(n_));
      lam[k] = scale_ * s;
    }
    return lam;
  }

  template <class T> void apply(const T* in, T* out) const {
    for (std::size_t i = 0; i < n_; ++i) {
      T s{};
      for (const auto& [o, v] : stencil_) s += T(v) * in[wrap(long(i) + o)];
      out[i] = T(scale_) * s;
    }
  }

  template <class T> Vector<T> apply(const Vector<T>& v) const {
    if (v.size() != n_) throw DimensionError("circulant apply size mismatch");
    Vector<T> out(n_);
    apply(v.data(), out.data());
    return out;
  }

  /// Same operator shifted by sigma * I (used to build invertible test cases).
  CirculantOperator shifted(R sigma) const {
    auto st = stencil_;
    st[0] += sigma / scale_;
    return {n_, st, scale_};
  }

  template <class U> CirculantOperator<U> cast() const {
    std::map<long, U> st;
    for (const auto& [o, v] : stencil_) st[o] = static_cast<U>(v);
    return {n_, st, static_cast<U>(scale_)};
  }

private:
  std::size_t wrap(long j) const {
    const long n = static_cast<long>(n_);
    long r = j % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
  }

  std::size_t n_ = 0;
  std::map<long, R> stencil_;
  R scale_ = R(1);
};

enum class ProblemKind { diffusion, advection };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(const std::string& name);

template <class R> struct ModelProblem {
  ProblemKind kind;
  std::size_t n;
  R coefficient; // nu or c
  CirculantOperator<R> op;
  R dx;

  /// c * dt / dx (advection); nu * dt / dx^2 (diffusion).
  R cfl(const R& dt) const {
    if (kind == ProblemKind::advection) return coefficient * dt * R(n);
    return coefficient * dt * R(n) * R(n);
  }
};

template <class R> CirculantOperator<R> diffusion_operator(std::size_t n, const R& nu) {
  const R dx = R(1) / R(n);
  return {n, {{-1, R(1)}, {0, R(-2)}, {1, R(1)}}, nu / (dx * dx)};
}

template <class R> CirculantOperator<R> advection_operator(std::size_t n, const R& c) {
  const R dx = R(1) / R(n);
  return {n, {{-2, R(1)}, {-1, R(-6)}, {0, R(3)}, {1, R(2)}}, -c / (R(6) * dx)};
}

template <class R> ModelProblem<R> make_diffusion(std::size_t n, const R& nu) {
  if (n % 2 != 0) throw ParityError("grid size must be even");
  if (n < 4) throw RangeError("diffusion needs n >= 4");
  if (!(nu > R(0))) throw RangeError("diffusion coefficient must be positive");
  return {ProblemKind::diffusion, n, nu, diffusion_operator(n, nu), R(1) / R(n)};
}

template <class R> ModelProblem<R> make_advection(std::size_t n, const R& c) {
  if (n % 2 != 0) throw ParityError("grid size must be even");
  if (n < 6) throw RangeError("advection needs n >= 6");
  if (!(c > R(0))) throw RangeError("advection speed must be positive");
  return {ProblemKind::advection, n, c, advection_operator(n, c), R(1) / R(n)};
}

/// Same PDE on the grid with half the points (spacing 2/n).
template <class R> ModelProblem<R> coarsen(const ModelProblem<R>& p) {
  if (p.n % 2 != 0) throw ParityError("grid size must be even");
  const std::size_t nc = p.n / 2;
  if (p.kind == ProblemKind::diffusion)
    return {p.kind, nc, p.coefficient, diffusion_operator(nc, p.coefficient), R(1) / R(nc)};
  return {p.kind, nc, p.coefficient, advection_operator(nc, p.coefficient), R(1) / R(nc)};
}

/// PDE solution for u0 = sin(2 pi k x) sampled at x_j = j / n.
template <class R> Vector<R> exact_solution(const ModelProblem<R>& p, std::size_t k, const R& t) {
  using std::exp;
  using std::sin;
  if (k < 1 || k >= p.n) throw RangeError("wavenumber must be in 1..n-1");
  Vector<R> u(p.n);
  const R twopi = R(2) * pi<R>();
  const R kk = R(k);
  if (p.kind == ProblemKind::diffusion) {
    const R amp = exp(-p.coefficient * twopi * twopi * kk * kk * t);
    for (std::size_t j = 0; j < p.n; ++j) {
      // reduce k*j mod n before the angle so sin stays accurate
      const R x = R((k * j) % p.n) / R(p.n);
      u[j] = amp * sin(twopi * x);
    }
  } else {
    for (std::size_t j = 0; j < p.n; ++j) {
      const R x = R((k * j) % p.n) / R(p.n) - kk * p.coefficient * t;
      u[j] = sin(twopi * x);
    }
  }
  return u;
}

} // namespace pintlfa

#endif
