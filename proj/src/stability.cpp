#include "cmc/stability.hpp"

#include <cmath>

#include "cmc/errors.hpp"

namespace cmc {

double smallest_eigenvalue(const Eigen::SparseMatrix<double>& S, double shift, Eigen::VectorXd* vector) {
  const Eigen::Index n = S.rows();
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  const Eigen::SparseMatrix<double> shifted = S - shift * I;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw NonConvergenceError("stability operator: factorization failed", {});

  const double scale = std::max(1.0, S.coeffs().cwiseAbs().maxCoeff());
  // start from a vector with every mode present
  Eigen::VectorXd x(n);
  for (Eigen::Index k = 0; k < n; ++k) x(k) = 1.0 + 0.25 * std::sin(1.0 + 1.7 * static_cast<double>(k));
  x.normalize();
  double lambda = x.dot(S * x);
  std::vector<double> history;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd y = ldlt.solve(x);
    if (!y.allFinite()) throw NonConvergenceError("stability operator: inverse iteration diverged", history);
    y.normalize();
    if (y.dot(x) < 0.0) y = -y;
    const Eigen::VectorXd Sy = S * y;
    const double next = y.dot(Sy);
    const double residual = (Sy - next * y).norm();
    history.push_back(residual);
    const double change = std::abs(next - lambda);
    x = std::move(y);
    lambda = next;
    if (residual <= 1e-10 * scale || (it >= 5 && change <= 1e-15 * scale)) {
      if (vector) *vector = x;
      return lambda;
    }
  }
  throw NonConvergenceError("stability operator: smallest eigenvalue did not converge", history);
}

StabilityOperator assemble_stability_operator(const GraphGeometry& geo, const PeriodicGrid& grid,
                                              double degeneracy_factor) {
  const Eigen::Index n = grid.size();
  if (geo.g.size() != n) throw ArgumentError("geometry does not match the grid");
  const double dx = grid.spacing();

  StabilityOperator op;
  op.c = geo.A2 + geo.ricci_nu;
  op.weight = geo.g.cwiseSqrt() * dx;
  const Eigen::VectorXd a = geo.g.cwiseSqrt().cwiseInverse();  // √g g¹¹ for n = 1

  // K = Dsᵀ diag(a_{k+½} Δx) Ds with Ds the fourth-order staggered derivative
  // onto the half points; then Lφ = W⁻¹Kφ + cφ and S = W^{−½}KW^{−½} + c.
  std::vector<Eigen::Triplet<double>> dt;
  dt.reserve(static_cast<std::size_t>(4 * n));
  Eigen::VectorXd a_half(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index km = grid.wrap(k - 1), kp = grid.wrap(k + 1), kpp = grid.wrap(k + 2);
    dt.emplace_back(k, km, 1.0 / (24.0 * dx));
    dt.emplace_back(k, k, -27.0 / (24.0 * dx));
    dt.emplace_back(k, kp, 27.0 / (24.0 * dx));
    dt.emplace_back(k, kpp, -1.0 / (24.0 * dx));
    a_half(k) = (-a(km) + 9.0 * a(k) + 9.0 * a(kp) - a(kpp)) / 16.0;
  }
  if (a_half.minCoeff() <= 0.0) throw ConsistencyError("stability operator: non-positive interpolated coefficient");
  Eigen::SparseMatrix<double> Ds(n, n);
  Ds.setFromTriplets(dt.begin(), dt.end());
  const Eigen::SparseMatrix<double> K = Ds.transpose() * (a_half * dx).asDiagonal() * Ds;

  const Eigen::VectorXd w_inv = op.weight.cwiseInverse();
  const Eigen::VectorXd w_isqrt = w_inv.cwiseSqrt();
  Eigen::SparseMatrix<double> C(n, n);
  C.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index k = 0; k < n; ++k) C.insert(k, k) = op.c(k);
  op.matrix = w_inv.asDiagonal() * K;
  op.matrix += C;
  Eigen::SparseMatrix<double> S = w_isqrt.asDiagonal() * K * w_isqrt.asDiagonal();
  S += C;
  double scale = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) scale = std::max(scale, K.coeff(k, k) * w_inv(k));

  Eigen::VectorXd y;
  op.lambda_min = smallest_eigenvalue(S, op.c.minCoeff() - 1.0, &y);
  op.mode = y.cwiseQuotient(op.weight.cwiseSqrt());
  op.laplacian_scale = scale;
  op.threshold = degeneracy_factor * scale;
  op.degenerate = op.lambda_min <= op.threshold;
  return op;
}

StabilityOperator assemble_stability_operator(const HomogeneousGeometry& geo, int n, double degeneracy_factor) {
  StabilityOperator op;
  const double c = geo.A2 + geo.ricci_nu;
  op.c = Eigen::VectorXd::Constant(1, c);
  op.weight = Eigen::VectorXd::Ones(1);
  op.matrix.resize(1, 1);
  op.matrix.insert(0, 0) = c;
  op.lambda_min = c;
  op.mode = Eigen::VectorXd::Ones(1);
  op.laplacian_scale = n / geo.radius_sq;
  op.threshold = degeneracy_factor * op.laplacian_scale;
  op.degenerate = op.lambda_min <= op.threshold;
  return op;
}

}  // namespace cmc
