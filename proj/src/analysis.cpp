#include "pintlfa/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pintlfa/collocation.hpp"
#include "pintlfa/errors.hpp"

namespace pintlfa {

void ExperimentConfig::validate() const {
  if (n % 2 != 0) throw ParityError("grid size must be even");
  if (n < (problem == ProblemKind::advection ? 6u : 4u)) throw ConfigurationError("grid too small for the problem");
  if (m < 1 || m > 12) throw ConfigurationError("node count must be in 1..12");
  if (l < 1) throw ConfigurationError("at least one interval is needed");
  if (!(dt > 0)) throw ConfigurationError("time step must be positive");
  if (mu && problem != ProblemKind::diffusion) throw ConfigurationError("--mu only applies to diffusion");
  if (mu && coefficient) throw ConfigurationError("give either the coefficient or mu, not both");
  if (mu && !(*mu > 0)) throw ConfigurationError("mu must be positive");
  if (coefficient && !(*coefficient > 0)) throw ConfigurationError("coefficient must be positive");
  if (wavenumber < 1 || wavenumber >= n) throw ConfigurationError("wavenumber must be in 1..n-1");
  if (interp_degree < 0 || restr_degree < 0) throw ConfigurationError("exactness degrees must be non-negative");
  const std::size_t widest = std::max(midpoint_stencil_width(interp_degree), midpoint_stencil_width(restr_degree));
  if (widest > n / 2) throw ConfigurationError("transfer stencil wider than the coarse grid");
}

double ExperimentConfig::resolved_coefficient() const {
  if (coefficient) return *coefficient;
  if (problem == ProblemKind::advection) return default_advection_speed;
  const double dx = 1.0 / double(n);
  return mu.value_or(default_mu) * dx * dx / dt;
}

QDeltaKind ExperimentConfig::resolved_qdelta() const {
  if (qdelta) return *qdelta;
  return problem == ProblemKind::advection ? QDeltaKind::lu : QDeltaKind::implicit_euler;
}

namespace {

template <class R> R coefficient_in(const ExperimentConfig& cfg) {
  if (cfg.coefficient) return R(*cfg.coefficient);
  if (cfg.problem == ProblemKind::advection) return R(ExperimentConfig::default_advection_speed);
  // nu = mu dx^2 / dt, evaluated in R
  return R(cfg.mu.value_or(ExperimentConfig::default_mu)) / (R(cfg.n) * R(cfg.n) * R(cfg.dt));
}

template <class R> ModelProblem<R> problem_in(const ExperimentConfig& cfg) {
  const R coef = coefficient_in<R>(cfg);
  return cfg.problem == ProblemKind::diffusion ? make_diffusion<R>(cfg.n, coef) : make_advection<R>(cfg.n, coef);
}

} // namespace

template <class R> TwoLevelSetup<R> make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto p = problem_in<R>(cfg);
  return make_two_level<R>(p, cfg.m, cfg.resolved_qdelta(), R(cfg.dt), cfg.l, cfg.interp_degree, cfg.restr_degree,
                           exact_solution(p, cfg.wavenumber, R(0)));
}

template <class R> Vector<R> pde_error_vector(const ExperimentConfig& cfg, const Vector<R>& iterate) {
  const auto p = problem_in<R>(cfg);
  const auto nodes = radau_nodes<R>(cfg.m);
  const std::size_t n = cfg.n;
  if (iterate.size() != cfg.l * cfg.m * n) throw DimensionError("iterate has the wrong size");
  Vector<R> e(iterate.size());
  const R dt(cfg.dt);
  for (std::size_t l = 0; l < cfg.l; ++l)
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const auto u = exact_solution(p, cfg.wavenumber, (R(l) + nodes[i]) * dt);
      const std::size_t off = (l * cfg.m + i) * n;
      for (std::size_t x = 0; x < n; ++x) e[off + x] = iterate[off + x] - u[x];
    }
  return e;
}

template <class R> Vector<R> collocation_error_vector(const TwoLevelSetup<R>& s, const Vector<R>& iterate) {
  const CompositeOperator<R> op(s.fine.op.materialize(), s.rule, s.dt, s.l);
  return iterate - op.solve(composite_rhs(s.u0, s.m(), s.l));
}

template TwoLevelSetup<double> make_setup(const ExperimentConfig&);
template TwoLevelSetup<quad> make_setup(const ExperimentConfig&);
template Vector<double> pde_error_vector(const ExperimentConfig&, const Vector<double>&);
template Vector<quad> pde_error_vector(const ExperimentConfig&, const Vector<quad>&);
template Vector<double> collocation_error_vector(const TwoLevelSetup<double>&, const Vector<double>&);
template Vector<quad> collocation_error_vector(const TwoLevelSetup<quad>&, const Vector<quad>&);

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Double-precision spectral quantities of one block mode.
ModeSummary summarize_mode(const ExperimentConfig& cfg, BlockMode mode, bool want_powers, bool want_spectrum) {
  ModeSummary out;
  out.mode = mode;
  const auto s = make_setup<double>(cfg);
  if (mode == BlockMode::full) {
    const auto form = assemble_matrix_form(s);
    IterationComponents<double> comp{&form.system.matrix, &form.fine_jacobi, &form.coarse_gs, &form.transfer};
    const auto t = build_iteration_matrix(IterationKind::pfasst, comp).t;
    const auto spec = eigenvalues(t);
    out.rho = out.rho_raw = spec.radius();
    out.norm = out.norm_raw = spectral_norm(t);
    if (want_spectrum)
      for (const auto& v : spec.values) out.spectrum.push_back({-1, -1, v});
    if (want_powers) {
      out.power_norms.assign(cfg.iterations + 1, 1.0);
      Matrix<double> p = t;
      for (std::size_t k = 1; k <= cfg.iterations; ++k) {
        out.power_norms[k] = spectral_norm(p);
        if (k < cfg.iterations) p = p * t;
      }
    }
    return out;
  }
  const auto setup = lfa_setup(s);
  const auto d = mode == BlockMode::time_collocation ? tc_decompose(setup) : c_decompose(setup);
  const auto bs = block_spectra(d);
  out.rho = bs.rho;
  out.norm = bs.norm;
  out.rho_raw = bs.rho_raw;
  out.norm_raw = bs.norm_raw;
  if (want_spectrum)
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
      const long k = static_cast<long>(mode == BlockMode::time_collocation ? b : b / cfg.l);
      const long j = mode == BlockMode::time_collocation ? -1 : static_cast<long>(b % cfg.l);
      for (const auto& v : bs.spectra[b].values) out.spectrum.push_back({k, j, v});
    }
  if (want_powers) out.power_norms = block_power_norms(d, cfg.iterations);
  return out;
}

/// Strategy 4: ||T^kappa e0||_2 from the transformed error, kappa = 0..K.
template <class R>
std::vector<double> apply_prediction(const ExperimentConfig& cfg, const TwoLevelSetup<R>& s, const Vector<R>& e0,
                                     BlockMode mode, bool all_blocks = false) {
  const std::size_t K = cfg.iterations;
  std::vector<double> out;
  if (mode == BlockMode::full) {
    const auto sd = make_setup<double>(cfg);
    const auto form = assemble_matrix_form(sd);
    IterationComponents<double> comp{&form.system.matrix, &form.fine_jacobi, &form.coarse_gs, &form.transfer};
    const auto t = build_iteration_matrix(IterationKind::pfasst, comp).t;
    Vector<double> e = cast_vector<double>(e0);
    out.push_back(norm2(e));
    for (std::size_t k = 1; k <= K; ++k) {
      e = t * e;
      out.push_back(norm2(e));
    }
    return out;
  }
  const auto setup = lfa_setup(s);
  const BlockTransform<R> tr(mode, s.n(), s.m(), s.l);
  std::vector<std::size_t> which;
  if (all_blocks)
    for (std::size_t b = 0; b < tr.block_count(); ++b) which.push_back(b);
  else
    which = tr.blocks_for_wavenumber(cfg.wavenumber);
  BlockDecomposition<R> d{mode, s.n(), s.m(), s.l, {}, {}, {}};
  const std::size_t bsz = tr.block_size();
  d.blocks.assign(tr.block_count(), Matrix<std::complex<R>>());
  for (std::size_t b : which) {
    if (mode == BlockMode::time_collocation) {
      d.blocks[b] = tc_block(setup, b);
    } else {
      const std::size_t k = b / s.l, j = b % s.l;
      d.blocks[b] = j == 0 ? Matrix<std::complex<R>>(bsz, bsz) : c_block(setup, k, j);
    }
  }
  auto w = tr.to_blocks(e0);
  // only the selected blocks carry the error
  std::vector<std::complex<R>> v(w.size());
  for (std::size_t b : which) std::copy(w.begin() + b * bsz, w.begin() + (b + 1) * bsz, v.begin() + b * bsz);
  out.push_back(static_cast<double>(norm2(v)));
  for (std::size_t k = 1; k <= K; ++k) {
    apply_blocks(d, which, v);
    out.push_back(static_cast<double>(norm2(v)));
  }
  return out;
}

template <class R> struct ActualRun {
  TwoLevelSetup<R> setup;
  Vector<R> e0;
  ErrorTrace trace;
};

template <class R> ActualRun<R> actual_run(const ExperimentConfig& cfg) {
  ActualRun<R> run{make_setup<R>(cfg), {}, {}};
  const auto iterates = pfasst_run_algorithmic(run.setup, cfg.iterations);
  const CompositeOperator<R> op(run.setup.fine.op.materialize(), run.setup.rule, run.setup.dt, run.setup.l);
  const Vector<R> ustar = op.solve(composite_rhs(run.setup.u0, run.setup.m(), run.setup.l));
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    const Vector<R> e = iterates[k] - ustar;
    if (k == 0) run.e0 = e;
    run.trace.actual_inf.push_back(static_cast<double>(norm_inf(e)));
    run.trace.actual_2.push_back(static_cast<double>(norm2(e)));
    const Vector<R> ep = pde_error_vector(cfg, iterates[k]);
    run.trace.pde_inf.push_back(static_cast<double>(norm_inf(ep)));
    run.trace.pde_2.push_back(static_cast<double>(norm2(ep)));
  }
  return run;
}

template <class R>
Report run_impl(const ExperimentConfig& cfg, const std::vector<Strategy>& strategies,
                const std::vector<BlockMode>& modes) {
  Report rep;
  rep.config = cfg;
  rep.coefficient = cfg.resolved_coefficient();
  {
    const auto p = cfg.problem == ProblemKind::diffusion ? make_diffusion<double>(cfg.n, rep.coefficient)
                                                         : make_advection<double>(cfg.n, rep.coefficient);
    rep.cfl = p.cfl(cfg.dt);
  }
  auto t0 = Clock::now();
  auto run = actual_run<R>(cfg);
  rep.trace = run.trace;
  rep.stage_seconds["pfasst_run"] = seconds_since(t0);

  const auto has = [&](Strategy s) { return std::find(strategies.begin(), strategies.end(), s) != strategies.end(); };
  const double e0 = rep.trace.actual_2.front();
  const std::size_t K = cfg.iterations;

  for (BlockMode mode : modes) {
    t0 = Clock::now();
    ModeSummary sum = summarize_mode(cfg, mode, has(Strategy::norm_power), true);
    rep.stage_seconds["spectra_" + to_string(mode)] = seconds_since(t0);
    for (Strategy st : strategies) {
      std::vector<double> pred(K + 1);
      if (st == Strategy::rho)
        for (std::size_t k = 0; k <= K; ++k) pred[k] = e0 * std::pow(sum.rho, double(k));
      else if (st == Strategy::norm)
        for (std::size_t k = 0; k <= K; ++k) pred[k] = e0 * std::pow(sum.norm, double(k));
      else if (st == Strategy::norm_power)
        for (std::size_t k = 0; k <= K; ++k) pred[k] = sum.power_norms[k] * e0;
      else {
        t0 = Clock::now();
        pred = apply_prediction(cfg, run.setup, run.e0, mode);
        rep.stage_seconds["apply_" + to_string(mode)] = seconds_since(t0);
      }
      rep.trace.predicted[prediction_key(st, mode)] = std::move(pred);
    }
    rep.modes.push_back(std::move(sum));
  }

  // built-in invariants
  const auto& a2 = rep.trace.actual_2;
  const auto find = [&](Strategy s, BlockMode m) -> const std::vector<double>* {
    auto it = rep.trace.predicted.find(prediction_key(s, m));
    return it == rep.trace.predicted.end() ? nullptr : &it->second;
  };
  if (auto* p4 = find(Strategy::apply, BlockMode::time_collocation)) {
    double worst = 0;
    for (std::size_t k = 0; k <= K; ++k)
      if (a2[k] > 1e-13) worst = std::max(worst, std::abs((*p4)[k] - a2[k]) / a2[k]);
    rep.invariant_values["strategy4_tc_exact"] = worst;
    rep.invariants["strategy4_tc_exact"] = worst < 1e-8;
  }
  for (BlockMode m : modes) {
    if (m == BlockMode::collocation) continue; // not a rigorous bound there
    auto* s2 = find(Strategy::norm, m);
    auto* s3 = find(Strategy::norm_power, m);
    if (!s2 || !s3) continue;
    std::size_t violations = 0;
    for (std::size_t k = 0; k <= K; ++k) {
      if (a2[k] > (*s3)[k] * (1 + 1e-10)) ++violations;
      if ((*s3)[k] > (*s2)[k] * (1 + 1e-10)) ++violations;
    }
    rep.invariant_values["bound_chain_" + to_string(m)] = double(violations);
    rep.invariants["bound_chain_" + to_string(m)] = violations == 0;
  }

  const double floor = std::is_same_v<R, double> ? 1e-12 : 1e-26;
  rep.phases = detect_phases(rep.trace.actual_inf, floor);
  return rep;
}

double fit_sse(const std::vector<double>& y, std::size_t a, std::size_t b, double* slope) {
  // least-squares line through (i, y_i), i in [a, b]
  const double cnt = double(b - a + 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = a; i <= b; ++i) {
    sx += double(i);
    sy += y[i];
    sxx += double(i) * double(i);
    sxy += double(i) * y[i];
  }
  const double den = cnt * sxx - sx * sx;
  const double s = den == 0 ? 0 : (cnt * sxy - sx * sy) / den;
  const double c = (sy - s * sx) / cnt;
  double sse = 0;
  for (std::size_t i = a; i <= b; ++i) sse += (y[i] - (c + s * double(i))) * (y[i] - (c + s * double(i)));
  if (slope) *slope = s;
  return sse;
}

} // namespace

PhaseFit detect_phases(const std::vector<double>& values, double floor, std::size_t max_segments) {
  PhaseFit fit;
  fit.floor = floor;
  if (values.empty() || !(values[0] > 0)) return fit;
  std::vector<double> y;
  for (double v : values) {
    const double r = v / values[0];
    if (!(r > floor)) break;
    y.push_back(std::log10(r));
  }
  fit.points_used = y.size();
  const std::size_t n = y.size();
  constexpr std::size_t min_pts = 3;
  constexpr double noise = 1e-6; // SSE (in decades^2) per point treated as a perfect fit
  if (n == 0) return fit;
  double slope = 0;
  double best = fit_sse(y, 0, n - 1, &slope);
  std::vector<std::size_t> cuts; // segment starts after the first
  for (std::size_t segs = 2; segs <= max_segments; ++segs) {
    if (n < segs * min_pts || best <= noise * double(n)) break;
    double cand = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> cand_cuts;
    if (segs == 2) {
      for (std::size_t c = min_pts; c + min_pts <= n; ++c) {
        const double s = fit_sse(y, 0, c - 1, nullptr) + fit_sse(y, c, n - 1, nullptr);
        if (s < cand) cand = s, cand_cuts = {c};
      }
    } else {
      for (std::size_t c1 = min_pts; c1 + 2 * min_pts <= n; ++c1)
        for (std::size_t c2 = c1 + min_pts; c2 + min_pts <= n; ++c2) {
          const double s = fit_sse(y, 0, c1 - 1, nullptr) + fit_sse(y, c1, c2 - 1, nullptr) + fit_sse(y, c2, n - 1, nullptr);
          if (s < cand) cand = s, cand_cuts = {c1, c2};
        }
    }
    if (!(cand < 0.75 * best)) break;
    best = cand;
    cuts = cand_cuts;
  }
  std::size_t start = 0;
  cuts.push_back(n);
  for (std::size_t c : cuts) {
    Phase p;
    p.first = start;
    p.last = c - 1;
    fit_sse(y, start, c - 1, &p.slope);
    fit.segments.push_back(p);
    start = c;
  }
  return fit;
}

std::vector<double> predict(const ExperimentConfig& cfg, Strategy strategy, BlockMode mode) {
  const auto rep = run_and_compare(cfg, {strategy}, {mode});
  return rep.trace.predicted.at(prediction_key(strategy, mode));
}

Report run_and_compare(const ExperimentConfig& cfg, const std::vector<Strategy>& strategies,
                       const std::vector<BlockMode>& modes) {
  cfg.validate();
  if (cfg.precision == Precision::double_precision) return run_impl<double>(cfg, strategies, modes);
  return run_impl<quad>(cfg, strategies, modes);
}

} // namespace pintlfa
