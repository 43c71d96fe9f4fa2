#pragma once

#include <string>
#include <vector>

namespace cmc {

struct SelftestResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Reproduction suite on the counterexample family: mean-curvature curve of the
/// homogeneous leaves, the degenerate maximal slice, the timelike convergence
/// condition and the closed-form curvature.
std::vector<SelftestResult> run_selftest(double epsilon = 0.8, int n = 2, std::size_t tcc_samples = 10000,
                                         unsigned long long seed = 1);

}  // namespace cmc
