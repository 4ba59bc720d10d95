#ifndef PINTLFA_TRANSFER_HPP
#define PINTLFA_TRANSFER_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/linalg.hpp"
#include "pintlfa/matrix.hpp"
#include "pintlfa/space_operators.hpp"

namespace pintlfa {

/// Stack rows alternately: output row 2i is a's row i, row 2i+1 is b's row i.
template <class T> Matrix<T> interweave(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("interweave needs equal shapes");
  Matrix<T> w(2 * a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::copy(a.row(i), a.row(i) + a.cols(), w.row(2 * i));
    std::copy(b.row(i), b.row(i) + b.cols(), w.row(2 * i + 1));
  }
  return w;
}

/// Width of the symmetric midpoint stencil that is exact for polynomials of
/// the given degree: the smallest even number above it.
inline std::size_t midpoint_stencil_width(int degree) {
  if (degree < 0) throw RangeError("exactness degree must be non-negative");
  const std::size_t w = static_cast<std::size_t>(degree) + 1;
  return w % 2 == 0 ? w : w + 1;
}

/// Lagrange weights for the point half-way between coarse j and j+1, using
/// coarse offsets -(w/2-1) .. w/2.
template <class R> CirculantOperator<R> midpoint_generator(std::size_t n_coarse, int degree) {
  const std::size_t w = midpoint_stencil_width(degree);
  if (w > n_coarse) throw SizeError("transfer stencil wider than the coarse grid");
  const long lo = -static_cast<long>(w / 2) + 1, hi = static_cast<long>(w / 2);
  std::map<long, R> st;
  const R x = R(1) / R(2);
  for (long o = lo; o <= hi; ++o) {
    R l(1);
    for (long p = lo; p <= hi; ++p)
      if (p != o) l *= (x - R(p)) / R(o - p);
    st[o] = l;
  }
  return {n_coarse, st, R(1)};
}

template <class R> struct TransferPair {
  std::size_t n_fine = 0, n_coarse = 0;
  Matrix<R> interpolation; // n_fine x n_coarse
  Matrix<R> restriction;   // n_coarse x n_fine
  CirculantOperator<R> generator_interp, generator_restr;
  R restriction_scale = R(1) / R(2);

  Vector<R> interpolate(const Vector<R>& coarse) const { return interpolation * coarse; }
  Vector<R> restrict_to_coarse(const Vector<R>& fine) const { return restriction * fine; }
};

template <class R>
TransferPair<R> transfer_from_generators(std::size_t n_fine, CirculantOperator<R> gi, CirculantOperator<R> gr) {
  if (n_fine % 2 != 0) throw ParityError("fine grid size must be even");
  const std::size_t nc = n_fine / 2;
  if (gi.n() != nc || gr.n() != nc) throw DimensionError("generators must live on the coarse grid");
  TransferPair<R> p;
  p.n_fine = n_fine;
  p.n_coarse = nc;
  const Matrix<R> id = Matrix<R>::identity(nc);
  p.interpolation = interweave(id, gi.materialize());
  p.restriction = transpose(interweave(id, gr.materialize()));
  p.restriction *= p.restriction_scale;
  p.generator_interp = std::move(gi);
  p.generator_restr = std::move(gr);
  return p;
}

template <class R> TransferPair<R> build_ci_pair(std::size_t n_fine, int interp_degree, int restr_degree) {
  if (n_fine % 2 != 0) throw ParityError("fine grid size must be even");
  const std::size_t nc = n_fine / 2;
  return transfer_from_generators<R>(n_fine, midpoint_generator<R>(nc, interp_degree),
                                     midpoint_generator<R>(nc, restr_degree));
}

template <class R> struct HarmonicDiagonals {
  std::vector<std::complex<R>> d, d_hat, f, f_hat;
  R restriction_scale = R(1) / R(2);
  /// largest off-structure entry found when checking the materialized transforms
  R structure_residual = R(0);
};

namespace detail {

// (1 +- lambda_k e^{-i 2 pi k / N}) / sqrt(2) for k = 0 .. N/2-1
template <class R>
void ci_diagonals(const CirculantOperator<R>& gen, std::size_t n_fine, std::vector<std::complex<R>>& plus,
                  std::vector<std::complex<R>>& minus) {
  using std::sqrt;
  const auto lam = gen.spectrum();
  const R s = R(1) / sqrt(R(2));
  plus.resize(lam.size());
  minus.resize(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const std::complex<R> mu = lam[k] * unit_root<R>(-static_cast<long long>(k), static_cast<long long>(n_fine));
    plus[k] = (R(1) + mu) * s;
    minus[k] = (R(1) - mu) * s;
  }
}

} // namespace detail

/// Closed-form harmonic diagonals plus a numerical check of the transforms.
template <class R> HarmonicDiagonals<R> harmonic_diagonals(const TransferPair<R>& pair, R tol = R(1e-12)) {
  using C = std::complex<R>;
  HarmonicDiagonals<R> h;
  h.restriction_scale = pair.restriction_scale;
  detail::ci_diagonals(pair.generator_interp, pair.n_fine, h.d, h.d_hat);
  detail::ci_diagonals(pair.generator_restr, pair.n_fine, h.f, h.f_hat);

  const std::size_t n = pair.n_fine, nc = pair.n_coarse;
  const auto psi = dft_matrix<R>(n);
  const auto psic = dft_matrix<R>(nc);
  const Matrix<C> ti = adjoint(psi) * (pair.interpolation.template cast<C>() * psic);
  const Matrix<C> tr = adjoint(psic) * (pair.restriction.template cast<C>() * psi);
  R resid(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < nc; ++k) {
      C expect{};
      if (i == k) expect = h.d[k];
      else if (i == k + nc) expect = h.d_hat[k];
      resid = std::max(resid, magnitude(ti(i, k) - expect));
    }
  for (std::size_t k = 0; k < nc; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      C expect{};
      if (j == k) expect = h.restriction_scale * std::conj(h.f[k]);
      else if (j == k + nc) expect = h.restriction_scale * std::conj(h.f_hat[k]);
      resid = std::max(resid, magnitude(tr(k, j) - expect));
    }
  h.structure_residual = resid;
  if (resid > tol) throw ConsistencyError("transfer operator is not circulant-interweaved");
  return h;
}

/// M x M matrix with ones in the last column: copies the last node value to all nodes.
template <class R> Matrix<R> last_column_ones(std::size_t m) {
  Matrix<R> nb(m, m);
  for (std::size_t i = 0; i < m; ++i) nb(i, m - 1) = R(1);
  return nb;
}

template <class R> struct RestrictionCheck {
  bool ok = false;
  Matrix<R> violation;
};

/// L = T_F^C N - N~ T_F^C for one interval, with T_F^C = R_t (x) R_space.
template <class R>
RestrictionCheck<R> check_restriction_condition(const TransferPair<R>& pair, std::size_t m_nodes,
                                                const Matrix<R>& temporal) {
  if (temporal.cols() != m_nodes) throw DimensionError("temporal restriction must have m columns");
  const std::size_t mc = temporal.rows();
  const Matrix<R> rst = kron(temporal, pair.restriction);
  const Matrix<R> nf = kron(last_column_ones<R>(m_nodes), Matrix<R>::identity(pair.n_fine));
  const Matrix<R> nc = kron(last_column_ones<R>(mc), Matrix<R>::identity(pair.n_coarse));
  RestrictionCheck<R> out;
  out.violation = rst * nf - nc * rst;
  out.ok = out.violation.max_abs() == R(0);
  return out;
}

template <class R> RestrictionCheck<R> check_restriction_condition(const TransferPair<R>& pair, std::size_t m_nodes) {
  return check_restriction_condition(pair, m_nodes, Matrix<R>::identity(m_nodes));
}

} // namespace pintlfa

#endif
