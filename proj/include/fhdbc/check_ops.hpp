#pragma once

// Self-check suite over small grids: summation-by-parts identities, L_h
// symmetry and inversion, mass-decomposition orthogonality, and finite
// difference checks of the step functional's derivatives.

#include <cstdint>
#include <string>
#include <vector>

namespace fhdbc {

struct CheckResult {
  std::string name;
  int n = 0;
  double value = 0.0;  // measured defect (or margin for sign properties)
  double tol = 0.0;
  bool pass = false;
};

/// Runs every property on N = 4 and N = 8 with random data from seed.
std::vector<CheckResult> run_operator_checks(std::uint64_t seed = 20240601);

}  // namespace fhdbc
