#ifndef PINTLFA_QUADRATURE_HPP
#define PINTLFA_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/linalg.hpp"
#include "pintlfa/matrix.hpp"

namespace pintlfa {

/// Collocation rule on the unit interval: nodes in (0,1] and the integration
/// matrix q(i,j) = int_0^{tau_i} l_j.
template <class R> struct QuadratureRule {
  std::vector<R> nodes;
  Matrix<R> q;

  std::size_t m() const { return nodes.size(); }
};

enum class QDeltaKind { implicit_euler, lu };

std::string to_string(QDeltaKind kind);
QDeltaKind parse_qdelta_kind(const std::string& name);

template <class R> struct QDelta {
  QDeltaKind kind;
  Matrix<R> matrix;
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence
template <class R> std::pair<R, R> legendre(std::size_t n, const R& x) {
  R p0(1), p1 = x, d0(0), d1(1);
  if (n == 0) return {p0, d0};
  for (std::size_t k = 1; k < n; ++k) {
    const R p2 = (R(2 * k + 1) * x * p1 - R(k) * p0) / R(k + 1);
    const R d2 = d0 + R(2 * k + 1) * p1;
    p0 = p1, p1 = p2, d0 = d1, d1 = d2;
  }
  return {p1, d1};
}

template <class R, class F> R newton_polish(R x, F&& f) {
  using std::abs;
  for (int it = 0; it < 50; ++it) {
    const auto [v, d] = f(x);
    const R step = v / d;
    x -= step;
    if (abs(step) <= R(4) * epsilon<R>() * (R(1) + abs(x))) break;
  }
  return x;
}

// Gauss-Legendre nodes and weights on [-1, 1].
template <class R> void gauss_legendre(std::size_t n, std::vector<R>& x, std::vector<R>& w) {
  using std::sqrt;
  std::vector<double> d(n, 0.0), e(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) e[k - 1] = double(k) / std::sqrt(4.0 * double(k * k) - 1.0);
  const auto guess = tridiagonal_eigenvalues(d, e);
  x.resize(n);
  w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const R xi = newton_polish(R(guess[i]), [n](const R& t) { return legendre(n, t); });
    const R dp = legendre(n, xi).second;
    x[i] = xi;
    w[i] = R(2) / ((R(1) - xi * xi) * dp * dp);
  }
}

} // namespace detail

/// Right Gauss-Radau nodes on (0,1]. Interior nodes start from the Jacobi
/// matrix of P^{(1,0)}_{m-1} and are polished on P_m - P_{m-1}.
template <class R> std::vector<R> radau_nodes(std::size_t m) {
  if (m == 0 || m > 12) throw RangeError("Radau node count must be in 1..12");
  std::vector<R> nodes;
  if (m > 1) {
    const std::size_t n = m - 1;
    const double a = 1.0, b = 0.0;
    std::vector<double> d(n), e(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double s = 2.0 * k + a + b;
      d[k] = (b * b - a * a) / (s * (s + 2.0));
    }
    for (std::size_t k = 1; k < n; ++k) {
      const double s = 2.0 * k + a + b;
      e[k - 1] = std::sqrt(4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0)));
    }
    const auto guess = tridiagonal_eigenvalues(d, e);
    auto radau = [m](const R& x) {
      const auto [pm, dm] = detail::legendre(m, x);
      const auto [pl, dl] = detail::legendre(m - 1, x);
      return std::pair<R, R>{pm - pl, dm - dl};
    };
    for (double g : guess) nodes.push_back((detail::newton_polish(R(g), radau) + R(1)) / R(2));
  }
  nodes.push_back(R(1));
  return nodes;
}

template <class R> Matrix<R> build_q(const std::vector<R>& nodes) {
  using std::abs;
  const std::size_t m = nodes.size();
  if (m == 0) throw DimensionError("empty node set");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(nodes[i] > R(0)) || nodes[i] > R(1)) throw RangeError("nodes must lie in (0,1]");
    if (i > 0) {
      if (abs(nodes[i] - nodes[i - 1]) <= R(16) * epsilon<R>()) throw DegeneracyError("duplicate quadrature nodes");
      if (nodes[i] < nodes[i - 1]) throw RangeError("nodes must be ascending");
    }
  }
  std::vector<R> gx, gw;
  detail::gauss_legendre<R>(m, gx, gw);
  Matrix<R> q(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const R half = nodes[i] / R(2);
    for (std::size_t g = 0; g < m; ++g) {
      const R s = half * (gx[g] + R(1));
      for (std::size_t j = 0; j < m; ++j) {
        R l(1);
        for (std::size_t p = 0; p < m; ++p)
          if (p != j) l *= (s - nodes[p]) / (nodes[j] - nodes[p]);
        q(i, j) += half * gw[g] * l;
      }
    }
  }
  return q;
}

template <class R> QuadratureRule<R> radau_rule(std::size_t m) {
  QuadratureRule<R> rule;
  rule.nodes = radau_nodes<R>(m);
  rule.q = build_q(rule.nodes);
  return rule;
}

template <class R> QDelta<R> build_qdelta(const QuadratureRule<R>& rule, QDeltaKind kind) {
  const std::size_t m = rule.m();
  Matrix<R> qd(m, m);
  if (kind == QDeltaKind::implicit_euler) {
    for (std::size_t j = 0; j < m; ++j) {
      const R dtau = rule.nodes[j] - (j == 0 ? R(0) : rule.nodes[j - 1]);
      for (std::size_t i = j; i < m; ++i) qd(i, j) = dtau;
    }
  } else {
    // Doolittle on Q^T without pivoting; Q_delta = U^T
    Matrix<R> u = transpose(rule.q);
    const R scale = u.max_abs();
    for (std::size_t k = 0; k < m; ++k) {
      if (!(magnitude(u(k, k)) > R(m) * epsilon<R>() * scale))
        throw FactorizationError("LU of Q^T hit a zero pivot");
      for (std::size_t i = k + 1; i < m; ++i) {
        const R l = u(i, k) / u(k, k);
        for (std::size_t j = k; j < m; ++j) u(i, j) -= l * u(k, j);
        u(i, k) = R(0);
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j) qd(i, j) = u(j, i);
  }
  return {kind, std::move(qd)};
}

} // namespace pintlfa

#endif
