#ifndef PINTLFA_VERIFY_HPP
#define PINTLFA_VERIFY_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace pintlfa {

enum class VerifyScale { small, paper };

struct VerifyOptions {
  VerifyScale scale = VerifyScale::small;
  bool flip_qdelta_sign = false; // fault injection: blocks see -Q_Delta
};

struct CheckResult {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
  double seconds = 0;
};

/// Cross-module equivalence suite: algorithmic vs matrix PFASST, blocks vs
/// the full iteration matrix, transfer structure, restriction condition.
std::vector<CheckResult> run_verification(const VerifyOptions& opt);

} // namespace pintlfa

#endif
