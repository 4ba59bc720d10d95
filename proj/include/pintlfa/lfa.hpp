#ifndef PINTLFA_LFA_HPP
#define PINTLFA_LFA_HPP

// Block Fourier diagonalization of the two-level PFASST iteration matrix.
//
// Time-collocation blocks: every (interval, node) slice is transformed with
// the spatial DFT and harmonics k, k + N/2 are paired, giving N/2 blocks of
// size 2LM. Collocation blocks additionally treat time as periodic and
// transform over intervals, giving (N/2) x L blocks of size 2M.

#include <complex>
#include <cstddef>
#include <set>
#include <string>
#include <future>
#include <thread>
#include <vector>

#include "pintlfa/errors.hpp"
#include "pintlfa/linalg.hpp"
#include "pintlfa/matrix.hpp"
#include "pintlfa/solvers.hpp"
#include "pintlfa/transfer.hpp"

namespace pintlfa {

enum class BlockMode { time_collocation, collocation, full };

std::string to_string(BlockMode mode);
BlockMode parse_block_mode(const std::string& name);

/// Everything the blocks depend on: operator spectra, quadrature matrices and
/// the harmonic diagonals of the transfer pair.
template <class R> struct LfaSetup {
  std::size_t n = 0, m = 0, l = 0;
  R dt;
  std::vector<std::complex<R>> lambda_fine;   // N values
  std::vector<std::complex<R>> lambda_coarse; // N/2 values
  Matrix<R> q, qdelta;
  HarmonicDiagonals<R> harmonics;
};

template <class R> LfaSetup<R> lfa_setup(const TwoLevelSetup<R>& s) {
  if (s.n() % 2 != 0) throw ParityError("block transform needs an even grid");
  LfaSetup<R> out;
  out.n = s.n();
  out.m = s.m();
  out.l = s.l;
  out.dt = s.dt;
  out.lambda_fine = s.fine.op.spectrum();
  out.lambda_coarse = s.coarse.op.spectrum();
  out.q = s.rule.q;
  out.qdelta = s.qdelta.matrix;
  out.harmonics = harmonic_diagonals(s.pair);
  return out;
}

/// Diagonal of Psi^H A Psi, after checking that A really is diagonalized.
template <class R> std::vector<std::complex<R>> fourier_diagonal(const Matrix<R>& a, R tol = R(1e-10)) {
  using C = std::complex<R>;
  if (!a.square()) throw DimensionError("operator must be square");
  const auto psi = dft_matrix<R>(a.rows());
  const Matrix<C> d = adjoint(psi) * (a.template cast<C>() * psi);
  const R scale = std::max(R(1), d.max_abs());
  std::vector<C> diag(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) {
      if (i == j) diag[i] = d(i, i);
      else if (magnitude(d(i, j)) > tol * scale) throw BasisError("operator is not diagonalized by the Fourier basis");
    }
  return diag;
}

/// Setup from dense operators; rejects anything that is not circulant.
template <class R>
LfaSetup<R> lfa_setup_dense(const Matrix<R>& a, const Matrix<R>& ac, const QuadratureRule<R>& rule,
                            const QDelta<R>& qd, const R& dt, std::size_t l, const TransferPair<R>& pair) {
  if (a.rows() % 2 != 0) throw ParityError("block transform needs an even grid");
  if (ac.rows() * 2 != a.rows()) throw DimensionError("coarse operator must have half the size");
  LfaSetup<R> out;
  out.n = a.rows();
  out.m = rule.m();
  out.l = l;
  out.dt = dt;
  out.lambda_fine = fourier_diagonal(a);
  out.lambda_coarse = fourier_diagonal(ac);
  out.q = rule.q;
  out.qdelta = qd.matrix;
  out.harmonics = harmonic_diagonals(pair);
  return out;
}

template <class R> struct BlockDecomposition {
  BlockMode mode;
  std::size_t n = 0, m = 0, l = 0;
  std::vector<Matrix<std::complex<R>>> blocks; // tc: index k; c: index k * L + j
  std::vector<bool> zeroed;                    // c mode: j = 0 blocks replaced by zero
  std::vector<Matrix<std::complex<R>>> raw;    // c mode: blocks before zeroing (empty matrix if singular)

  std::size_t half() const { return n / 2; }
  std::size_t block_size() const { return mode == BlockMode::time_collocation ? 2 * l * m : 2 * m; }
  std::size_t index(std::size_t k, std::size_t j = 0) const {
    return mode == BlockMode::time_collocation ? k : k * l + j;
  }
};

namespace detail {

template <class R> using CM = Matrix<std::complex<R>>;

template <class R> CM<R> complexify(const Matrix<R>& a) { return a.template cast<std::complex<R>>(); }

// I - coupling - lambda dt (I_L (x) Q), with coupling = E (x) Nbar or omega Nbar
template <class R>
CM<R> basic_block(const CM<R>& coupling, const CM<R>& quad, const std::complex<R>& lambda, const R& dt) {
  const std::size_t d = quad.rows();
  CM<R> b = CM<R>::identity(d);
  b -= coupling;
  CM<R> qq = quad;
  qq *= lambda * dt;
  b -= qq;
  return b;
}

// S * CGC assembled from basic blocks
template <class R>
CM<R> two_grid_block(const CM<R>& bm_lo, const CM<R>& bm_hi, const CM<R>& bp_lo, const CM<R>& bp_hi,
                     const CM<R>& bpc, const std::complex<R>& d, const std::complex<R>& dh,
                     const std::complex<R>& fr, const std::complex<R>& fhr) {
  using C = std::complex<R>;
  const std::size_t s = bm_lo.rows();
  const CM<R> id = CM<R>::identity(s);
  const CM<R> s_lo = id - LU<C>(bp_lo).solve(bm_lo);
  const CM<R> s_hi = id - LU<C>(bp_hi).solve(bm_hi);
  // right factor [fr Bm_lo, fhr Bm_hi], then B~^{-1}
  CM<R> right(s, 2 * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      right(i, j) = fr * bm_lo(i, j);
      right(i, s + j) = fhr * bm_hi(i, j);
    }
  const CM<R> x = LU<C>(bpc).solve(right);
  CM<R> cgc = CM<R>::identity(2 * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < 2 * s; ++j) {
      cgc(i, j) -= d * x(i, j);
      cgc(s + i, j) -= dh * x(i, j);
    }
  CM<R> out(2 * s, 2 * s);
  for (std::size_t i = 0; i < s; ++i) {
    kernels::gemm(1, 2 * s, s, s_lo.row(i), cgc.row(0), out.row(i));
    kernels::gemm(1, 2 * s, s, s_hi.row(i), cgc.row(s), out.row(s + i));
  }
  return out;
}

} // namespace detail

/// Time-collocation block k (harmonics k and k + N/2), size 2LM.
template <class R> Matrix<std::complex<R>> tc_block(const LfaSetup<R>& s, std::size_t k) {
  using C = std::complex<R>;
  const std::size_t h = s.n / 2;
  const Matrix<R> il = Matrix<R>::identity(s.l);
  const auto coupling = detail::complexify(kron(subdiagonal_ones<R>(s.l), last_column_ones<R>(s.m)));
  const auto iq = detail::complexify(kron(il, s.q));
  const auto iqd = detail::complexify(kron(il, s.qdelta));
  const detail::CM<R> none(s.l * s.m, s.l * s.m);
  const C lo = s.lambda_fine[k], hi = s.lambda_fine[k + h];
  const auto& hd = s.harmonics;
  const R sc = hd.restriction_scale;
  return detail::two_grid_block<R>(detail::basic_block(coupling, iq, lo, s.dt), detail::basic_block(coupling, iq, hi, s.dt),
                                   detail::basic_block(none, iqd, lo, s.dt), detail::basic_block(none, iqd, hi, s.dt),
                                   detail::basic_block(coupling, iqd, s.lambda_coarse[k], s.dt), hd.d[k], hd.d_hat[k],
                                   sc * std::conj(hd.f[k]), sc * std::conj(hd.f_hat[k]));
}

/// Collocation block (k, j) under periodicity in time, size 2M.
template <class R> Matrix<std::complex<R>> c_block(const LfaSetup<R>& s, std::size_t k, std::size_t j) {
  using C = std::complex<R>;
  const std::size_t h = s.n / 2;
  const C omega = unit_root<R>(-static_cast<long long>(j), static_cast<long long>(s.l));
  detail::CM<R> coupling = detail::complexify(last_column_ones<R>(s.m));
  coupling *= omega;
  const auto q = detail::complexify(s.q);
  const auto qd = detail::complexify(s.qdelta);
  const detail::CM<R> none(s.m, s.m);
  const C lo = s.lambda_fine[k], hi = s.lambda_fine[k + h];
  const auto& hd = s.harmonics;
  const R sc = hd.restriction_scale;
  return detail::two_grid_block<R>(detail::basic_block(coupling, q, lo, s.dt), detail::basic_block(coupling, q, hi, s.dt),
                                   detail::basic_block(none, qd, lo, s.dt), detail::basic_block(none, qd, hi, s.dt),
                                   detail::basic_block(coupling, qd, s.lambda_coarse[k], s.dt), hd.d[k], hd.d_hat[k],
                                   sc * std::conj(hd.f[k]), sc * std::conj(hd.f_hat[k]));
}

template <class R> BlockDecomposition<R> tc_decompose(const LfaSetup<R>& s) {
  if (s.n % 2 != 0) throw ParityError("block transform needs an even grid");
  BlockDecomposition<R> d{BlockMode::time_collocation, s.n, s.m, s.l, {}, {}, {}};
  for (std::size_t k = 0; k < s.n / 2; ++k) d.blocks.push_back(tc_block(s, k));
  d.zeroed.assign(d.blocks.size(), false);
  return d;
}

template <class R> BlockDecomposition<R> c_decompose(const LfaSetup<R>& s) {
  if (s.n % 2 != 0) throw ParityError("block transform needs an even grid");
  BlockDecomposition<R> d{BlockMode::collocation, s.n, s.m, s.l, {}, {}, {}};
  const std::size_t sz = 2 * s.m;
  for (std::size_t k = 0; k < s.n / 2; ++k)
    for (std::size_t j = 0; j < s.l; ++j) {
      Matrix<std::complex<R>> raw;
      try {
        raw = c_block(s, k, j);
      } catch (const FactorizationError&) {
        // k = 0, j = 0 is singular for operators with a zero mode
      }
      const bool zero = j == 0;
      d.blocks.push_back(zero ? Matrix<std::complex<R>>(sz, sz) : raw);
      if (!zero && raw.empty()) throw FactorizationError("singular collocation block");
      d.raw.push_back(std::move(raw));
      d.zeroed.push_back(zero);
    }
  return d;
}

/// Maps space-time vectors to block coordinates and back. Block b occupies
/// coordinates [b * size, (b + 1) * size) of the flat transformed vector.
template <class R> class BlockTransform {
public:
  using C = std::complex<R>;

  BlockTransform(BlockMode mode, std::size_t n, std::size_t m, std::size_t l)
      : mode_(mode), n_(n), m_(m), l_(l), psi_(dft_matrix<R>(n)), psit_(dft_matrix<R>(l)) {
    if (n % 2 != 0) throw ParityError("block transform needs an even grid");
    if (mode == BlockMode::full) throw ConfigurationError("the full mode has no block transform");
  }

  template <class T> explicit BlockTransform(const BlockDecomposition<T>& d) : BlockTransform(d.mode, d.n, d.m, d.l) {}

  std::size_t dim() const { return l_ * m_ * n_; }
  std::size_t block_size() const { return mode_ == BlockMode::time_collocation ? 2 * l_ * m_ : 2 * m_; }
  std::size_t block_count() const { return mode_ == BlockMode::time_collocation ? n_ / 2 : n_ / 2 * l_; }

  /// Blocks touched by spatial harmonic k (k and N-k both end up in k mod N/2).
  std::vector<std::size_t> blocks_for_wavenumber(std::size_t k) const {
    std::set<std::size_t> sp{k % (n_ / 2), (n_ - k % n_) % n_ % (n_ / 2)};
    std::vector<std::size_t> out;
    for (std::size_t s : sp) {
      if (mode_ == BlockMode::time_collocation) out.push_back(s);
      else
        for (std::size_t j = 0; j < l_; ++j) out.push_back(s * l_ + j);
    }
    return out;
  }

  template <class T> std::vector<C> to_blocks(const Vector<T>& v) const {
    if (v.size() != dim()) throw DimensionError("space-time vector has the wrong size");
    const std::size_t slices = l_ * m_, h = n_ / 2;
    // spatial transform of every (interval, node) slice
    std::vector<C> hat(dim()), in(n_);
    for (std::size_t p = 0; p < slices; ++p) {
      for (std::size_t x = 0; x < n_; ++x) in[x] = scalar_cast<C>(v[p * n_ + x]);
      for (std::size_t k = 0; k < n_; ++k) {
        C s{};
        for (std::size_t x = 0; x < n_; ++x) s += std::conj(psi_(x, k)) * in[x];
        hat[p * n_ + k] = s;
      }
    }
    std::vector<C> out(dim());
    if (mode_ == BlockMode::time_collocation) {
      const std::size_t lm = slices;
      for (std::size_t k = 0; k < h; ++k)
        for (std::size_t p = 0; p < lm; ++p) {
          out[2 * lm * k + p] = hat[p * n_ + k];
          out[2 * lm * k + lm + p] = hat[p * n_ + k + h];
        }
    } else {
      for (std::size_t k = 0; k < h; ++k)
        for (std::size_t j = 0; j < l_; ++j)
          for (std::size_t i = 0; i < m_; ++i) {
            C lo{}, hi{};
            for (std::size_t b = 0; b < l_; ++b) {
              const C w = std::conj(psit_(b, j));
              lo += w * hat[(b * m_ + i) * n_ + k];
              hi += w * hat[(b * m_ + i) * n_ + k + h];
            }
            const std::size_t base = (k * l_ + j) * 2 * m_;
            out[base + i] = lo;
            out[base + m_ + i] = hi;
          }
    }
    return out;
  }

  std::vector<C> from_blocks(const std::vector<C>& w) const {
    if (w.size() != dim()) throw DimensionError("block vector has the wrong size");
    const std::size_t slices = l_ * m_, h = n_ / 2;
    std::vector<C> hat(dim());
    if (mode_ == BlockMode::time_collocation) {
      for (std::size_t k = 0; k < h; ++k)
        for (std::size_t p = 0; p < slices; ++p) {
          hat[p * n_ + k] = w[2 * slices * k + p];
          hat[p * n_ + k + h] = w[2 * slices * k + slices + p];
        }
    } else {
      for (std::size_t k = 0; k < h; ++k)
        for (std::size_t b = 0; b < l_; ++b)
          for (std::size_t i = 0; i < m_; ++i) {
            C lo{}, hi{};
            for (std::size_t j = 0; j < l_; ++j) {
              const std::size_t base = (k * l_ + j) * 2 * m_;
              lo += psit_(b, j) * w[base + i];
              hi += psit_(b, j) * w[base + m_ + i];
            }
            hat[(b * m_ + i) * n_ + k] = lo;
            hat[(b * m_ + i) * n_ + k + h] = hi;
          }
    }
    std::vector<C> out(dim());
    for (std::size_t p = 0; p < slices; ++p)
      for (std::size_t x = 0; x < n_; ++x) {
        C s{};
        for (std::size_t k = 0; k < n_; ++k) s += psi_(x, k) * hat[p * n_ + k];
        out[p * n_ + x] = s;
      }
    return out;
  }

private:
  BlockMode mode_;
  std::size_t n_, m_, l_;
  Matrix<C> psi_, psit_;
};

/// Apply the block-diagonal operator to a flat block vector, blocks listed in `which`.
template <class R>
void apply_blocks(const BlockDecomposition<R>& d, const std::vector<std::size_t>& which,
                  std::vector<std::complex<R>>& w) {
  const std::size_t s = d.block_size();
  std::vector<std::complex<R>> tmp(s);
  for (std::size_t b : which) {
    kernels::gemv(s, s, d.blocks[b].data(), w.data() + b * s, tmp.data());
    std::copy(tmp.begin(), tmp.end(), w.begin() + b * s);
  }
}

template <class R> struct BlockSpectra {
  std::vector<Spectrum<R>> spectra;
  std::vector<R> norms;
  R rho = R(0), norm = R(0);
  // collocation mode: aggregates over the raw (unzeroed, invertible) blocks
  R rho_raw = R(0), norm_raw = R(0);
};

namespace detail {

// Runs body(i) for i in [0, count) on up to hardware_concurrency workers.
// Exceptions surface through the futures in index order.
template <class F> void parallel_for(std::size_t count, F body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    }));
  for (auto& j : jobs) j.get();
}

} // namespace detail

template <class R> BlockSpectra<R> block_spectra(const BlockDecomposition<R>& d) {
  BlockSpectra<R> out;
  const std::size_t nb = d.blocks.size();
  out.spectra.resize(nb);
  out.norms.resize(nb);
  std::vector<R> raw_rho(nb, R(0)), raw_norm(nb, R(0));
  const bool coll = d.mode == BlockMode::collocation;
  detail::parallel_for(nb, [&](std::size_t b) {
    out.spectra[b] = eigenvalues(d.blocks[b]);
    out.norms[b] = spectral_norm(d.blocks[b]);
    if (coll && b < d.raw.size() && !d.raw[b].empty()) {
      raw_rho[b] = eigenvalues(d.raw[b]).radius();
      raw_norm[b] = spectral_norm(d.raw[b]);
    }
  });
  for (std::size_t b = 0; b < nb; ++b) {
    out.rho = std::max(out.rho, out.spectra[b].radius());
    out.norm = std::max(out.norm, out.norms[b]);
    out.rho_raw = std::max(out.rho_raw, raw_rho[b]);
    out.norm_raw = std::max(out.norm_raw, raw_norm[b]);
  }
  if (!coll) {
    out.rho_raw = out.rho;
    out.norm_raw = out.norm;
  }
  return out;
}

/// max over blocks of ||B^kappa||_2 for kappa = 0..K.
template <class R> std::vector<R> block_power_norms(const BlockDecomposition<R>& d, std::size_t iterations) {
  const std::size_t nb = d.blocks.size();
  std::vector<std::vector<R>> per(nb, std::vector<R>(iterations + 1, R(0)));
  detail::parallel_for(nb, [&](std::size_t b) {
    Matrix<std::complex<R>> p = d.blocks[b];
    for (std::size_t k = 1; k <= iterations; ++k) {
      per[b][k] = spectral_norm(p);
      if (k < iterations) p = p * d.blocks[b];
    }
  });
  std::vector<R> out(iterations + 1, R(0));
  out[0] = R(1);
  for (const auto& v : per)
    for (std::size_t k = 1; k <= iterations; ++k) out[k] = std::max(out[k], v[k]);
  return out;
}

} // namespace pintlfa

#endif
