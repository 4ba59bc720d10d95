#ifndef PINTLFA_COLLOCATION_HPP
#define PINTLFA_COLLOCATION_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/linalg.hpp"
#include "pintlfa/matrix.hpp"
#include "pintlfa/quadrature.hpp"
#include "pintlfa/transfer.hpp"

namespace pintlfa {

// Space-time vectors are ordered interval-major, then node, then grid point:
// index = (l * M + m) * N + x.

template <class R> struct CollocationProblem {
  Matrix<R> a;
  QuadratureRule<R> rule;
  R dt;
  Matrix<R> matrix; // I - dt Q (x) A

  std::size_t n() const { return a.rows(); }
  std::size_t m() const { return rule.m(); }
};

template <class R>
CollocationProblem<R> collocation_matrix(const Matrix<R>& a, const QuadratureRule<R>& rule, const R& dt) {
  if (!a.square()) throw DimensionError("spatial operator must be square");
  if (!(dt > R(0))) throw RangeError("time step must be positive");
  const std::size_t mn = rule.m() * a.rows();
  Matrix<R> mat = Matrix<R>::identity(mn) - kron(Matrix<R>(dt * rule.q), a);
  return {a, rule, dt, std::move(mat)};
}

/// N = (last-column-ones) (x) I_n
template <class R> Matrix<R> node_propagation(std::size_t m, std::size_t n) {
  return kron(last_column_ones<R>(m), Matrix<R>::identity(n));
}

template <class R> Vector<R> spread_initial(const Vector<R>& u0, std::size_t m, std::size_t l) {
  Vector<R> u;
  u.reserve(u0.size() * m * l);
  for (std::size_t i = 0; i < m * l; ++i) u.insert(u.end(), u0.begin(), u0.end());
  return u;
}

/// u0 spread over the first interval, zero elsewhere.
template <class R> Vector<R> composite_rhs(const Vector<R>& u0, std::size_t m, std::size_t l) {
  Vector<R> c(u0.size() * m * l, R(0));
  for (std::size_t i = 0; i < m; ++i) std::copy(u0.begin(), u0.end(), c.begin() + i * u0.size());
  return c;
}

template <class R> struct CompositeSystem {
  std::size_t l;
  CollocationProblem<R> interval;
  Matrix<R> n_matrix;
  Matrix<R> matrix;
  Vector<R> rhs;

  std::size_t dim() const { return matrix.rows(); }

  /// I_L (x) I_M (x) I_N - dt I_L (x) Q (x) A - E (x) N, assembled independently.
  Matrix<R> three_layer() const {
    const std::size_t m = interval.m(), n = interval.n();
    Matrix<R> out = Matrix<R>::identity(l * m * n);
    out -= kron(Matrix<R>::identity(l), kron(Matrix<R>(interval.dt * interval.rule.q), interval.a));
    out -= kron(subdiagonal_ones<R>(l), kron(last_column_ones<R>(m), Matrix<R>::identity(n)));
    return out;
  }
};

template <class R>
CompositeSystem<R> composite_system(const CollocationProblem<R>& problem, std::size_t l, const Vector<R>& u0) {
  if (l == 0) throw RangeError("at least one interval is needed");
  const std::size_t m = problem.m(), n = problem.n();
  if (u0.size() != n) throw DimensionError("initial value has the wrong size");
  const std::size_t mn = m * n;
  CompositeSystem<R> s{l, problem, node_propagation<R>(m, n), Matrix<R>(l * mn, l * mn), composite_rhs(u0, m, l)};
  for (std::size_t b = 0; b < l; ++b)
    for (std::size_t i = 0; i < mn; ++i) {
      std::copy(problem.matrix.row(i), problem.matrix.row(i) + mn, s.matrix.row(b * mn + i) + b * mn);
      if (b > 0)
        for (std::size_t j = 0; j < mn; ++j) s.matrix(b * mn + i, (b - 1) * mn + j) = -s.n_matrix(i, j);
    }
  return s;
}

/// Matrix-free composite collocation operator. Used where a dense LMN matrix
/// would be wasteful, in particular for the quad-precision reference solution.
template <class R> class CompositeOperator {
public:
  CompositeOperator(Matrix<R> a, QuadratureRule<R> rule, R dt, std::size_t l)
      : a_(std::move(a)), rule_(std::move(rule)), dt_(dt), l_(l) {
    if (!a_.square()) throw DimensionError("spatial operator must be square");
    if (l_ == 0) throw RangeError("at least one interval is needed");
    const Matrix<double> ad = a_.template cast<double>();
    QuadratureRule<double> rd{cast_vector<double>(rule_.nodes), rule_.q.template cast<double>()};
    lu_ = std::make_shared<const LU<double>>(collocation_matrix(ad, rd, static_cast<double>(dt_)).matrix);
  }

  std::size_t n() const { return a_.rows(); }
  std::size_t m() const { return rule_.m(); }
  std::size_t l() const { return l_; }
  std::size_t dim() const { return l_ * m() * n(); }
  const Matrix<R>& a() const { return a_; }
  const QuadratureRule<R>& rule() const { return rule_; }
  R dt() const { return dt_; }

  /// out = (I - dt Q (x) A) u for one interval
  void apply_interval(const R* u, R* out) const {
    const std::size_t m = this->m(), n = this->n();
    std::vector<R> f(m * n);
    for (std::size_t j = 0; j < m; ++j) kernels::gemv(n, n, a_.data(), u + j * n, f.data() + j * n);
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(u + i * n, u + (i + 1) * n, out + i * n);
      for (std::size_t j = 0; j < m; ++j) kernels::axpy(n, R(-dt_ * rule_.q(i, j)), f.data() + j * n, out + i * n);
    }
  }

  Vector<R> apply(const Vector<R>& u) const {
    if (u.size() != dim()) throw DimensionError("composite apply size mismatch");
    const std::size_t mn = m() * n(), n = this->n();
    Vector<R> out(dim());
    for (std::size_t b = 0; b < l_; ++b) {
      apply_interval(u.data() + b * mn, out.data() + b * mn);
      if (b > 0) {
        const R* last = u.data() + (b - 1) * mn + (m() - 1) * n;
        for (std::size_t i = 0; i < m(); ++i)
          for (std::size_t x = 0; x < n; ++x) out[b * mn + i * n + x] -= last[x];
      }
    }
    return out;
  }

  /// M^{-1} c by block forward substitution. Each interval is solved with a
  /// double-precision LU and refined in R until the correction stalls.
  Vector<R> solve(const Vector<R>& c) const {
    if (c.size() != dim()) throw DimensionError("composite solve size mismatch");
    const std::size_t mn = m() * n(), n = this->n();
    Vector<R> x(dim());
    Vector<R> rhs(mn), r(mn), ax(mn);
    for (std::size_t b = 0; b < l_; ++b) {
      std::copy(c.begin() + b * mn, c.begin() + (b + 1) * mn, rhs.begin());
      if (b > 0) {
        const R* last = x.data() + (b - 1) * mn + (m() - 1) * n;
        for (std::size_t i = 0; i < m(); ++i)
          for (std::size_t p = 0; p < n; ++p) rhs[i * n + p] += last[p];
      }
      R* xb = x.data() + b * mn;
      std::fill(xb, xb + mn, R(0));
      r = rhs;
      for (int it = 0; it < 12; ++it) {
        const Vector<double> dx = lu_->solve(cast_vector<double>(r));
        R step(0), size(0);
        for (std::size_t i = 0; i < mn; ++i) {
          xb[i] += R(dx[i]);
          step = std::max(step, magnitude(R(dx[i])));
          size = std::max(size, magnitude(xb[i]));
        }
        apply_interval(xb, ax.data());
        for (std::size_t i = 0; i < mn; ++i) r[i] = rhs[i] - ax[i];
        if (step <= R(4) * epsilon<R>() * size) break;
      }
    }
    return x;
  }

private:
  Matrix<R> a_;
  QuadratureRule<R> rule_;
  R dt_;
  std::size_t l_;
  std::shared_ptr<const LU<double>> lu_;
};

} // namespace pintlfa

#endif
