#ifndef PINTLFA_ANALYSIS_HPP
#define PINTLFA_ANALYSIS_HPP

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pintlfa/lfa.hpp"
#include "pintlfa/quadrature.hpp"
#include "pintlfa/solvers.hpp"
#include "pintlfa/space_operators.hpp"

namespace pintlfa {

enum class Strategy { rho, norm, norm_power, apply };
enum class Precision { double_precision, quad_precision };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);
std::string to_string(Precision p);
Precision parse_precision(const std::string& name);

/// Column name in trace.csv, e.g. "pred_apply_tc".
std::string prediction_key(Strategy s, BlockMode mode);

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::diffusion;
  std::size_t n = 128, m = 5, l = 4;
  double dt = 0.1;
  std::optional<double> coefficient; // nu or c; defaults below
  std::optional<double> mu;          // diffusion only: nu = mu dx^2 / dt
  std::size_t wavenumber = 8;
  std::size_t iterations = 20;
  std::optional<QDeltaKind> qdelta;
  int interp_degree = 6, restr_degree = 2;
  Precision precision = Precision::quad_precision;

  static constexpr double default_mu = 10.0;
  static constexpr double default_advection_speed = 4.88e-3;

  /// Throws ConfigurationError for inconsistent combinations.
  void validate() const;
  double resolved_coefficient() const;
  QDeltaKind resolved_qdelta() const;
};

/// Two-level setup in precision R for the configuration, with u0 = sin(2 pi k x).
template <class R> TwoLevelSetup<R> make_setup(const ExperimentConfig& cfg);

/// e = iterate - PDE solution at every (interval, node, grid point).
template <class R> Vector<R> pde_error_vector(const ExperimentConfig& cfg, const Vector<R>& iterate);

/// e = iterate - composite collocation solution (the fixed point of PFASST).
template <class R> Vector<R> collocation_error_vector(const TwoLevelSetup<R>& setup, const Vector<R>& iterate);

struct ErrorTrace {
  std::vector<double> actual_inf, actual_2; // against the collocation solution
  std::vector<double> pde_inf, pde_2;       // against the PDE solution
  std::map<std::string, std::vector<double>> predicted;
};

/// One strategy/mode prediction of the 2-norm error, kappa = 0..K.
std::vector<double> predict(const ExperimentConfig& cfg, Strategy strategy, BlockMode mode);

struct Phase {
  std::size_t first = 0, last = 0; // iteration indices, inclusive
  double slope = 0;                // log10 decrease per iteration
};

struct PhaseFit {
  std::vector<Phase> segments;
  std::size_t points_used = 0;
  double floor = 0; // relative error below which points were ignored
};

/// Piecewise-linear least-squares fit of log10(values[i] / values[0]) with
/// 1..max_segments segments; a further segment is taken only when it cuts the
/// residual by more than 25%.
PhaseFit detect_phases(const std::vector<double>& values, double floor, std::size_t max_segments = 3);

struct SpectrumEntry {
  long block_k = -1, block_j = -1;
  std::complex<double> value;
};

struct ModeSummary {
  BlockMode mode;
  double rho = 0, norm = 0, rho_raw = 0, norm_raw = 0;
  std::vector<double> power_norms; // kappa = 0..K
  std::vector<SpectrumEntry> spectrum;
};

struct Report {
  ExperimentConfig config;
  double coefficient = 0;
  double cfl = 0;
  ErrorTrace trace;
  std::vector<ModeSummary> modes;
  PhaseFit phases;
  std::map<std::string, bool> invariants;
  std::map<std::string, double> invariant_values; // measured quantity behind each invariant
  std::map<std::string, double> stage_seconds;
};

Report run_and_compare(const ExperimentConfig& cfg, const std::vector<Strategy>& strategies,
                       const std::vector<BlockMode>& modes);

} // namespace pintlfa

#endif
