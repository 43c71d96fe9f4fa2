#include "cmc/spacetime.hpp"

#include <sstream>

#include "cmc/errors.hpp"

namespace cmc {

std::optional<WarpValue> Spacetime::warp(double) const { return std::nullopt; }

void Spacetime::require_time(double x0) const {
  const Interval I = interval();
  if (!I.contains(x0)) {
    std::ostringstream os;
    os.precision(17);
    os << "time coordinate " << x0 << " outside (" << I.lo << ", " << I.hi << ")";
    throw DomainError(os.str());
  }
}

std::vector<JetN> unit_sphere_metric(const Eigen::VectorXd& x) {
  const auto n = x.size();
  const Eigen::Index dim = n + 1;
  std::vector<JetN> sigma(static_cast<std::size_t>(n * n), JetN::constant(0.0, dim));
  if (n == 1) {
    sigma[0] = JetN::constant(1.0, dim);
    return sigma;
  }
  // 4 / (1 + |y|²)² δ_ij
  JetN r2 = JetN::constant(0.0, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const JetN yi = JetN::variable(x(i), i + 1, dim);
    r2 += yi * yi;
  }
  const JetN factor = 4.0 * powi(1.0 + r2, -2);
  for (Eigen::Index i = 0; i < n; ++i) sigma[static_cast<std::size_t>(i * n + i)] = factor;
  return sigma;
}

}  // namespace cmc
