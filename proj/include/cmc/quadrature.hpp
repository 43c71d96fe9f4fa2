#pragma once

#include <functional>

namespace cmc {

/// Adaptive double-exponential (tanh-sinh) quadrature of f over [a, b].
/// Tolerates integrable endpoint singularities: nodes at which f is not
/// finite are skipped. Halves the step until two successive levels agree
/// to `tol` (absolute, or relative once |I| > 1).
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

}  // namespace cmc
