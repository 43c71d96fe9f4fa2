#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cmc/graph.hpp"

namespace cmc {

/// Relative degeneracy threshold: λ_min ≤ factor × (grid Laplacian scale).
inline constexpr double kDegeneracyFactor = 1e-8;

/// Discrete Jacobi operator L φ = −Δφ + cφ, c = ‖A‖² + R̄(ν, ν), on a slice.
struct StabilityOperator {
  Eigen::VectorXd c;
  Eigen::VectorXd weight;              // induced volume weight per node
  Eigen::SparseMatrix<double> matrix;  // L
  double lambda_min = 0.0;
  Eigen::VectorXd mode;                // eigenvector of λ_min (L-variables, unit weighted norm)
  double laplacian_scale = 1.0;
  double threshold = 0.0;
  bool degenerate = false;
};

/// Fourth-order staggered flux-form Laplacian of the induced metric on the periodic
/// grid; symmetric under the weight √g Δx. λ_min by shifted inverse iteration.
StabilityOperator assemble_stability_operator(const GraphGeometry& geo, const PeriodicGrid& grid,
                                              double degeneracy_factor = kDegeneracyFactor);

/// Constant-u slice of a homogeneous spacetime: the spectrum of L is
/// k(k+n−1)/a² + c, so λ_min = c and the Laplacian scale is n/a².
StabilityOperator assemble_stability_operator(const HomogeneousGeometry& geo, int n,
                                              double degeneracy_factor = kDegeneracyFactor);

/// Smallest eigenvalue of a symmetric positive-shiftable matrix: inverse
/// iteration on (S − shift) with a Rayleigh-quotient estimate. `shift` must be
/// below the spectrum.
double smallest_eigenvalue(const Eigen::SparseMatrix<double>& S, double shift, Eigen::VectorXd* vector = nullptr);

}  // namespace cmc
