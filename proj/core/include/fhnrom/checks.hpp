#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fhnrom/config.hpp"

namespace fhnrom {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Structural and algebraic invariants on a small instance of `config`
/// (mesh faces, operator symmetry and kernels, Jacobian consistency, POD
/// orthonormality, DEIM interpolation, config round trip). Each check runs
/// independently; an exception inside one is reported as its failure.
std::vector<CheckResult> run_checks(const ExperimentConfig& config);

/// One "PASS|FAIL name: detail" line per result. Returns true if all passed.
bool print_checks(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace fhnrom
