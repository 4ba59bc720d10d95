#ifndef PINTLFA_SOLVERS_HPP
#define PINTLFA_SOLVERS_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "pintlfa/collocation.hpp"
#include "pintlfa/errors.hpp"
#include "pintlfa/linalg.hpp"
#include "pintlfa/matrix.hpp"
#include "pintlfa/quadrature.hpp"
#include "pintlfa/space_operators.hpp"
#include "pintlfa/transfer.hpp"

namespace pintlfa {

enum class PreconditionerKind { sdc_fine, sdc_coarse, mlsdc, block_gs, block_jacobi, pfasst_composite };
enum class Level { fine, coarse };

/// Block lower-bidiagonal preconditioner with identical diagonal blocks
/// I - dt Q_delta (x) A and, for Gauss-Seidel, -N on the subdiagonal.
/// A single block is plain SDC.
template <class R> class Preconditioner {
public:
  static Preconditioner sdc(const Matrix<R>& a, const QuadratureRule<R>& rule, const QDelta<R>& qd, const R& dt,
                            Level level = Level::fine) {
    return Preconditioner(level == Level::fine ? PreconditionerKind::sdc_fine : PreconditionerKind::sdc_coarse,
                          level, a, rule, qd, dt, 1, false);
  }
  static Preconditioner block_gauss_seidel(const Matrix<R>& a, const QuadratureRule<R>& rule, const QDelta<R>& qd,
                                           const R& dt, std::size_t l, Level level = Level::coarse) {
    return Preconditioner(PreconditionerKind::block_gs, level, a, rule, qd, dt, l, true);
  }
  static Preconditioner block_jacobi(const Matrix<R>& a, const QuadratureRule<R>& rule, const QDelta<R>& qd,
                                     const R& dt, std::size_t l, Level level = Level::fine) {
    return Preconditioner(PreconditionerKind::block_jacobi, level, a, rule, qd, dt, l, false);
  }

  PreconditionerKind kind() const { return kind_; }
  Level level() const { return level_; }
  std::size_t blocks() const { return blocks_; }
  std::size_t block_dim() const { return block_.rows(); }
  std::size_t dim() const { return blocks_ * block_.rows(); }
  std::size_t m() const { return m_; }
  bool coupled() const { return coupled_; }
  const Matrix<R>& block() const { return block_; }

  Matrix<R> matrix() const {
    const std::size_t b = block_dim(), n = b / m_;
    Matrix<R> p(dim(), dim());
    for (std::size_t l = 0; l < blocks_; ++l)
      for (std::size_t i = 0; i < b; ++i) {
        std::copy(block_.row(i), block_.row(i) + b, p.row(l * b + i) + l * b);
        if (coupled_ && l > 0) p(l * b + i, (l - 1) * b + (m_ - 1) * n + i % n) = R(-1);
      }
    return p;
  }

  /// P^{-1} r by block forward substitution.
  Vector<R> solve(const Vector<R>& r) const {
    if (r.size() != dim()) throw DimensionError("preconditioner solve size mismatch");
    const std::size_t b = block_dim(), n = b / m_;
    Vector<R> x(dim());
    Vector<R> rhs(b);
    for (std::size_t l = 0; l < blocks_; ++l) {
      std::copy(r.begin() + l * b, r.begin() + (l + 1) * b, rhs.begin());
      if (coupled_ && l > 0) {
        const R* last = x.data() + (l - 1) * b + (m_ - 1) * n;
        for (std::size_t i = 0; i < m_; ++i)
          for (std::size_t p = 0; p < n; ++p) rhs[i * n + p] += last[p];
      }
      const Vector<R> xl = lu_->solve(rhs);
      std::copy(xl.begin(), xl.end(), x.begin() + l * b);
    }
    return x;
  }

  /// P^{-1} X column by column, done block-row-wise.
  Matrix<R> solve(const Matrix<R>& r) const {
    if (r.rows() != dim()) throw DimensionError("preconditioner solve size mismatch");
    const std::size_t b = block_dim(), n = b / m_, cols = r.cols();
    Matrix<R> x(dim(), cols);
    Matrix<R> rhs(b, cols);
    for (std::size_t l = 0; l < blocks_; ++l) {
      for (std::size_t i = 0; i < b; ++i) std::copy(r.row(l * b + i), r.row(l * b + i) + cols, rhs.row(i));
      if (coupled_ && l > 0)
        for (std::size_t i = 0; i < m_; ++i)
          for (std::size_t p = 0; p < n; ++p)
            kernels::axpy(cols, R(1), x.row((l - 1) * b + (m_ - 1) * n + p), rhs.row(i * n + p));
      const Matrix<R> xl = lu_->solve(rhs);
      for (std::size_t i = 0; i < b; ++i) std::copy(xl.row(i), xl.row(i) + cols, x.row(l * b + i));
    }
    return x;
  }

private:
  Preconditioner(PreconditionerKind kind, Level level, const Matrix<R>& a, const QuadratureRule<R>& rule,
                 const QDelta<R>& qd, const R& dt, std::size_t blocks, bool coupled)
      : kind_(kind), level_(level), blocks_(blocks), m_(rule.m()), coupled_(coupled) {
    if (blocks == 0) throw RangeError("at least one block is needed");
    if (qd.matrix.rows() != rule.m()) throw DimensionError("Q_delta does not match the rule");
    block_ = Matrix<R>::identity(rule.m() * a.rows()) - kron(Matrix<R>(dt * qd.matrix), a);
    lu_ = std::make_shared<const LU<R>>(block_);
  }

  PreconditionerKind kind_;
  Level level_;
  std::size_t blocks_, m_;
  bool coupled_;
  Matrix<R> block_;
  std::shared_ptr<const LU<R>> lu_;
};

/// Space-time transfer I_L (x) R_t (x) T for every interval.
template <class R> struct SpaceTimeTransfer {
  Matrix<R> interpolation; // fine x coarse
  Matrix<R> restriction;   // coarse x fine
  bool condition_ok = false;
};

template <class R>
SpaceTimeTransfer<R> make_space_time_transfer(const TransferPair<R>& pair, std::size_t m, std::size_t l,
                                              const Matrix<R>* temporal = nullptr) {
  const Matrix<R> rt = temporal ? *temporal : Matrix<R>::identity(m);
  if (rt.rows() != m || rt.cols() != m) throw DimensionError("temporal restriction must be m x m");
  SpaceTimeTransfer<R> t;
  const Matrix<R> il = Matrix<R>::identity(l);
  t.interpolation = kron(il, kron(Matrix<R>::identity(m), pair.interpolation));
  t.restriction = kron(il, kron(rt, pair.restriction));
  t.condition_ok = check_restriction_condition(pair, m, rt).ok;
  return t;
}

template <class R>
Vector<R> richardson_step(const Preconditioner<R>& p, const Matrix<R>& m, const Vector<R>& c, const Vector<R>& u) {
  return u + p.solve(c - m * u);
}

namespace detail {
template <class R> void require_condition(const SpaceTimeTransfer<R>& t) {
  if (!t.condition_ok)
    throw ConfigurationError("restriction does not commute with node propagation (T N != N~ T)");
}
} // namespace detail

/// Coarse-corrected half step, then one fine sweep.
template <class R>
Vector<R> mlsdc_step(const Preconditioner<R>& fine, const Preconditioner<R>& coarse, const SpaceTimeTransfer<R>& tr,
                     const Matrix<R>& m, const Vector<R>& c, const Vector<R>& u) {
  detail::require_condition(tr);
  const Vector<R> half = u + tr.interpolation * coarse.solve(tr.restriction * (c - m * u));
  return half + fine.solve(c - m * half);
}

/// T P~^{-1} R + P^{-1} - P^{-1} M T P~^{-1} R
template <class R>
Matrix<R> mlsdc_preconditioner_inverse(const Preconditioner<R>& fine, const Preconditioner<R>& coarse,
                                       const SpaceTimeTransfer<R>& tr, const Matrix<R>& m) {
  const Matrix<R> cgc = tr.interpolation * coarse.solve(tr.restriction);
  return cgc + fine.solve(Matrix<R>::identity(m.rows())) - fine.solve(Matrix<R>(m * cgc));
}

/// Second half step: `consistent` sweeps from the half-step iterate (what the
/// algorithm and the iteration matrix describe); `as_printed` restarts from u^k.
enum class PfasstUpdate { consistent, as_printed };

template <class R>
Vector<R> pfasst_step_matrix(const Preconditioner<R>& coarse_gs, const Preconditioner<R>& fine_jacobi,
                             const SpaceTimeTransfer<R>& tr, const Matrix<R>& m, const Vector<R>& c,
                             const Vector<R>& u, PfasstUpdate variant = PfasstUpdate::consistent) {
  detail::require_condition(tr);
  const Vector<R> half = u + tr.interpolation * coarse_gs.solve(tr.restriction * (c - m * u));
  const Vector<R>& base = variant == PfasstUpdate::consistent ? half : u;
  return base + fine_jacobi.solve(c - m * half);
}

enum class IterationKind { sdc, mlsdc, pfasst };

template <class R> struct IterationOperator {
  Matrix<R> t;
  std::string builder;
};

template <class R> struct IterationComponents {
  const Matrix<R>* m = nullptr;
  const Preconditioner<R>* fine = nullptr;   // SDC / block Jacobi
  const Preconditioner<R>* coarse = nullptr; // SDC / block Gauss-Seidel
  const SpaceTimeTransfer<R>* transfer = nullptr;
};

template <class R> IterationOperator<R> build_iteration_matrix(IterationKind kind, const IterationComponents<R>& c) {
  if (!c.m || !c.fine) throw ConfigurationError("iteration matrix needs M and a fine preconditioner");
  const Matrix<R>& m = *c.m;
  const Matrix<R> id = Matrix<R>::identity(m.rows());
  const Matrix<R> smoother = id - c.fine->solve(m);
  if (kind == IterationKind::sdc) return {smoother, "I - P^-1 M"};
  if (!c.coarse || !c.transfer) throw ConfigurationError("two-level iteration matrix needs coarse level and transfer");
  detail::require_condition(*c.transfer);
  const Matrix<R> rm = c.transfer->restriction * m;
  const Matrix<R> cgc = id - c.transfer->interpolation * c.coarse->solve(rm);
  return {smoother * cgc, kind == IterationKind::mlsdc ? "(I - P^-1 M)(I - T P~^-1 R M)"
                                                       : "(I - Phat^-1 M)(I - T P~^-1 R M)"};
}

/// Everything that defines a two-level PFASST run on a periodic problem.
template <class R> struct TwoLevelSetup {
  ModelProblem<R> fine, coarse;
  QuadratureRule<R> rule;
  QDelta<R> qdelta;
  R dt;
  std::size_t l;
  TransferPair<R> pair;
  Vector<R> u0;

  std::size_t n() const { return fine.n; }
  std::size_t m() const { return rule.m(); }
  std::size_t dim() const { return l * m() * n(); }
};

template <class R>
TwoLevelSetup<R> make_two_level(const ModelProblem<R>& fine, std::size_t m, QDeltaKind qkind, const R& dt,
                                std::size_t l, int interp_degree, int restr_degree, Vector<R> u0) {
  if (l == 0) throw RangeError("at least one interval is needed");
  if (u0.size() != fine.n) throw DimensionError("initial value has the wrong size");
  auto rule = radau_rule<R>(m);
  auto qd = build_qdelta(rule, qkind);
  return {fine, coarsen(fine), std::move(rule), std::move(qd), dt, l,
          build_ci_pair<R>(fine.n, interp_degree, restr_degree), std::move(u0)};
}

/// Dense matrix formulation of the same run.
template <class R> struct PfasstMatrixForm {
  CompositeSystem<R> system;
  Preconditioner<R> coarse_gs;
  Preconditioner<R> fine_jacobi;
  SpaceTimeTransfer<R> transfer;
};

template <class R> PfasstMatrixForm<R> assemble_matrix_form(const TwoLevelSetup<R>& s) {
  const Matrix<R> a = s.fine.op.materialize();
  const Matrix<R> ac = s.coarse.op.materialize();
  auto problem = collocation_matrix(a, s.rule, s.dt);
  return {composite_system(problem, s.l, s.u0),
          Preconditioner<R>::block_gauss_seidel(ac, s.rule, s.qdelta, s.dt, s.l, Level::coarse),
          Preconditioner<R>::block_jacobi(a, s.rule, s.qdelta, s.dt, s.l, Level::fine),
          make_space_time_transfer(s.pair, s.m(), s.l)};
}

namespace detail {

// One level of the node-wise sweep machinery used by the algorithmic runner.
template <class R> class SweepLevel {
public:
  SweepLevel(const CirculantOperator<R>& op, const QuadratureRule<R>& rule, const QDelta<R>& qd, const R& dt)
      : op_(op), q_(rule.q), qd_(qd.matrix), dt_(dt), m_(rule.m()), n_(op.n()) {
    const Matrix<R> a = op.materialize();
    for (std::size_t i = 0; i < m_; ++i)
      solvers_.emplace_back(Matrix<R>::identity(n_) - R(dt * qd_(i, i)) * a);
  }

  std::size_t n() const { return n_; }

  Vector<R> eval(const Vector<R>& u) const {
    Vector<R> f(u.size());
    for (std::size_t j = 0; j < m_; ++j) op_.apply(u.data() + j * n_, f.data() + j * n_);
    return f;
  }

  /// One sweep for (I - dt Q (x) A) U = spread(u0) + tau.
  Vector<R> sweep(const Vector<R>& u, const Vector<R>& u0, const Vector<R>* tau) const {
    const Vector<R> f = eval(u);
    Vector<R> unew(u.size()), fnew(u.size()), rhs(n_);
    for (std::size_t i = 0; i < m_; ++i) {
      rhs = u0;
      if (tau) kernels::axpy(n_, R(1), tau->data() + i * n_, rhs.data());
      for (std::size_t j = 0; j < m_; ++j) {
        const R w = dt_ * (q_(i, j) - qd_(i, j));
        if (w != R(0)) kernels::axpy(n_, w, f.data() + j * n_, rhs.data());
      }
      for (std::size_t j = 0; j < i; ++j) {
        const R w = dt_ * qd_(i, j);
        if (w != R(0)) kernels::axpy(n_, w, fnew.data() + j * n_, rhs.data());
      }
      const Vector<R> ui = solvers_[i].solve(rhs);
      std::copy(ui.begin(), ui.end(), unew.begin() + i * n_);
      op_.apply(ui.data(), fnew.data() + i * n_);
    }
    return unew;
  }

  const Matrix<R>& q() const { return q_; }
  R dt() const { return dt_; }

private:
  CirculantOperator<R> op_;
  Matrix<R> q_, qd_;
  R dt_;
  std::size_t m_, n_;
  std::vector<LU<R>> solvers_;
};

template <class R> Vector<R> per_node(const Matrix<R>& t, const Vector<R>& u, std::size_t m) {
  const std::size_t in = t.cols(), out = t.rows();
  Vector<R> v(m * out);
  for (std::size_t j = 0; j < m; ++j) kernels::gemv(out, in, t.data(), u.data() + j * in, v.data() + j * out);
  return v;
}

} // namespace detail

/// PFASST as an algorithm: every interval is a "processor" and the message
/// schedule is replayed serially in dependency order. Returns U^0 .. U^K.
template <class R>
std::vector<Vector<R>> pfasst_run_algorithmic(const TwoLevelSetup<R>& s, std::size_t iterations,
                                              std::size_t fine_sweeps = 1, std::size_t coarse_sweeps = 1) {
  if (fine_sweeps == 0 || coarse_sweeps == 0) throw ConfigurationError("sweep counts must be positive");
  if (!check_restriction_condition(s.pair, s.m()).ok) throw ConfigurationError("restriction condition violated");
  const std::size_t m = s.m(), n = s.n(), nc = s.coarse.n, L = s.l, mn = m * n;
  const detail::SweepLevel<R> fine(s.fine.op, s.rule, s.qdelta, s.dt);
  const detail::SweepLevel<R> coarse(s.coarse.op, s.rule, s.qdelta, s.dt);
  const Matrix<R>& interp = s.pair.interpolation;
  const Matrix<R>& restr = s.pair.restriction;

  std::vector<Vector<R>> u(L, spread_initial(s.u0, m, 1));
  auto flatten = [&]() {
    Vector<R> v;
    v.reserve(L * mn);
    for (const auto& ul : u) v.insert(v.end(), ul.begin(), ul.end());
    return v;
  };
  std::vector<Vector<R>> trace{flatten()};
  const Vector<R> u0_coarse = restr * s.u0;

  for (std::size_t k = 0; k < iterations; ++k) {
    // fine end values sent at the end of the previous iteration
    std::vector<Vector<R>> fine_msg(L);
    for (std::size_t l = 0; l < L; ++l) fine_msg[l].assign(u[l].end() - n, u[l].end());
    Vector<R> coarse_msg;
    for (std::size_t l = 0; l < L; ++l) {
      const Vector<R>& ul = u[l];
      // restriction and FAS correction
      const Vector<R> uc = detail::per_node(restr, ul, m);
      const Vector<R> rf = detail::per_node(restr, fine.eval(ul), m);
      const Vector<R> fc = coarse.eval(uc);
      Vector<R> tau(m * nc, R(0));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const R w = s.dt * s.rule.q(i, j);
          for (std::size_t x = 0; x < nc; ++x) tau[i * nc + x] += w * (rf[j * nc + x] - fc[j * nc + x]);
        }
      // receive the coarse initial value and sweep
      const Vector<R> u0c = l == 0 ? u0_coarse : coarse_msg;
      Vector<R> ucnew = uc;
      for (std::size_t sw = 0; sw < coarse_sweeps; ++sw) ucnew = coarse.sweep(ucnew, u0c, &tau);
      coarse_msg.assign(ucnew.end() - nc, ucnew.end());
      // interpolate the coarse correction
      const Vector<R> half = ul + detail::per_node(interp, ucnew - uc, m);
      // fine initial value, corrected with the coarse update of its sender
      Vector<R> u0f = s.u0;
      if (l > 0) {
        const Vector<R>& ubar = fine_msg[l - 1];
        u0f = ubar + interp * (u0c - restr * ubar);
      }
      Vector<R> unew = half;
      for (std::size_t sw = 0; sw < fine_sweeps; ++sw) unew = fine.sweep(unew, u0f, nullptr);
      u[l] = std::move(unew);
    }
    trace.push_back(flatten());
  }
  return trace;
}

} // namespace pintlfa

#endif
