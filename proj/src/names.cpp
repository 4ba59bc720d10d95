#include <algorithm>
#include <string>

#include "pintlfa/analysis.hpp"
#include "pintlfa/errors.hpp"
#include "pintlfa/lfa.hpp"
#include "pintlfa/quadrature.hpp"
#include "pintlfa/space_operators.hpp"

namespace pintlfa {

namespace {

std::string normalized(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return c == '_' ? '-' : std::tolower(c); });
  return s;
}

[[noreturn]] void unknown(const char* what, const std::string& name) {
  throw ConfigurationError(std::string("unknown ") + what + " '" + name + "'");
}

} // namespace

std::string to_string(QDeltaKind kind) { return kind == QDeltaKind::lu ? "lu" : "implicit-euler"; }

QDeltaKind parse_qdelta_kind(const std::string& name) {
  const auto s = normalized(name);
  if (s == "lu") return QDeltaKind::lu;
  if (s == "implicit-euler" || s == "ie" || s == "euler") return QDeltaKind::implicit_euler;
  unknown("QDelta kind", name);
}

std::string to_string(ProblemKind kind) { return kind == ProblemKind::diffusion ? "diffusion" : "advection"; }

ProblemKind parse_problem_kind(const std::string& name) {
  const auto s = normalized(name);
  if (s == "diffusion") return ProblemKind::diffusion;
  if (s == "advection") return ProblemKind::advection;
  unknown("problem", name);
}

std::string to_string(BlockMode mode) {
  switch (mode) {
  case BlockMode::time_collocation: return "tc";
  case BlockMode::collocation: return "c";
  default: return "full";
  }
}

BlockMode parse_block_mode(const std::string& name) {
  const auto s = normalized(name);
  if (s == "tc" || s == "time-collocation") return BlockMode::time_collocation;
  if (s == "c" || s == "collocation") return BlockMode::collocation;
  if (s == "full") return BlockMode::full;
  unknown("block mode", name);
}

std::string to_string(Strategy s) {
  switch (s) {
  case Strategy::rho: return "rho";
  case Strategy::norm: return "norm";
  case Strategy::norm_power: return "norm-power";
  default: return "apply";
  }
}

Strategy parse_strategy(const std::string& name) {
  const auto s = normalized(name);
  if (s == "rho" || s == "1") return Strategy::rho;
  if (s == "norm" || s == "2") return Strategy::norm;
  if (s == "norm-power" || s == "3") return Strategy::norm_power;
  if (s == "apply" || s == "4") return Strategy::apply;
  unknown("strategy", name);
}

std::string to_string(Precision p) { return p == Precision::double_precision ? "double" : "quad"; }

Precision parse_precision(const std::string& name) {
  const auto s = normalized(name);
  if (s == "double") return Precision::double_precision;
  if (s == "quad") return Precision::quad_precision;
  unknown("precision", name);
}

std::string prediction_key(Strategy s, BlockMode mode) {
  std::string name = to_string(s);
  std::replace(name.begin(), name.end(), '-', '_');
  return "pred_" + name + "_" + to_string(mode);
}

} // namespace pintlfa
