#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cmc/graph.hpp"
#include "cmc/stability.hpp"

namespace cmc {

/// The discrete mean curvature operator u ↦ H(u) of one discretization.
/// Throws SpacelikeViolation or DomainError for inadmissible u.
class SliceModel {
 public:
  virtual ~SliceModel() = default;

  virtual Eigen::Index size() const = 0;
  virtual const Spacetime& spacetime() const = 0;
  virtual Eigen::VectorXd mean_curvature(const Eigen::VectorXd& u) const = 0;
  virtual Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u) const = 0;
  virtual StabilityOperator stability(const Eigen::VectorXd& u, double degeneracy_factor = kDegeneracyFactor) const = 0;
  /// Spatial coordinate of each node (angle on the circle; 0 for the homogeneous model).
  virtual Eigen::VectorXd nodes() const = 0;
  virtual bool homogeneous() const = 0;
  /// Default Newton tolerance on sup |H − τ|.
  virtual double default_tolerance() const = 0;

  Eigen::VectorXd constant(double t) const { return Eigen::VectorXd::Constant(size(), t); }
};

/// Graphs over the circle of an n = 1 spacetime on a periodic grid.
class GridSliceModel : public SliceModel {
 public:
  GridSliceModel(SpacetimePtr st, Eigen::Index grid_size);

  Eigen::Index size() const override { return grid_.size(); }
  const Spacetime& spacetime() const override { return *st_; }
  Eigen::VectorXd mean_curvature(const Eigen::VectorXd& u) const override;
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u) const override;
  StabilityOperator stability(const Eigen::VectorXd& u, double degeneracy_factor = kDegeneracyFactor) const override;
  Eigen::VectorXd nodes() const override { return grid_.points(); }
  bool homogeneous() const override { return false; }
  double default_tolerance() const override { return 1e-8; }

  const PeriodicGrid& grid() const { return grid_; }

 private:
  SpacetimePtr st_;
  PeriodicGrid grid_;
};

/// Constant-u slices of a spacetime with homogeneous coordinate slices (any n).
class HomogeneousSliceModel : public SliceModel {
 public:
  explicit HomogeneousSliceModel(SpacetimePtr st);

  Eigen::Index size() const override { return 1; }
  const Spacetime& spacetime() const override { return *st_; }
  Eigen::VectorXd mean_curvature(const Eigen::VectorXd& u) const override;
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& u) const override;
  StabilityOperator stability(const Eigen::VectorXd& u, double degeneracy_factor = kDegeneracyFactor) const override;
  Eigen::VectorXd nodes() const override { return Eigen::VectorXd::Zero(1); }
  bool homogeneous() const override { return true; }
  double default_tolerance() const override { return 1e-10; }

 private:
  SpacetimePtr st_;
};

enum class ModelKind { kAuto, kGrid, kHomogeneous };

/// kAuto: grid for n = 1, homogeneous reduction for n ≥ 2.
std::unique_ptr<SliceModel> make_slice_model(SpacetimePtr st, Eigen::Index grid_size, ModelKind kind = ModelKind::kAuto);

struct NewtonOptions {
  double tol = 0.0;         // 0: the model's default
  double step_tol = 1e-10;  // last accepted step must also be this small
  int max_iterations = 100;
  int max_halvings = 20;
  double degeneracy_factor = kDegeneracyFactor;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;  // sup |H(u) − τ| after each accepted step
  double final_residual = 0.0;
  double min_damping = 1.0;
  bool converged = false;
  double lambda_min = 0.0;
  bool degenerate = false;
};

struct SliceGraph {
  double tau = 0.0;
  Eigen::VectorXd u;
  double residual = 0.0;
  bool converged = false;
  NewtonReport report;
};

/// Damped Newton iteration for H(u) = τ with the exact Jacobian of the
/// discretization. Steps are halved on residual increase, spacelike violation
/// or leaving the time interval. Converged slices carry λ_min of the stability
/// operator; a failed solve raises DegenerateSliceError when the last iterate
/// is degenerate and NonConvergenceError otherwise.
SliceGraph newton_solve(const SliceModel& model, double tau, const Eigen::VectorXd& u0,
                        const NewtonOptions& options = {});

inline constexpr double kVelocityPositivity = 1e-10;

struct SliceVelocity {
  Eigen::VectorXd udot;
  double min = 0.0;
  double max = 0.0;
  bool positive = false;  // min > kVelocityPositivity
};

/// Solves J u̇ = 1. Raises DegenerateSliceError at degenerate slices.
SliceVelocity slice_velocity(const SliceModel& model, const SliceGraph& slice,
                             double degeneracy_factor = kDegeneracyFactor);

struct HarnackResult {
  double ratio = 0.0;    // |τ − τ̄| / inf |u − ū|
  double inf_gap = 0.0;  // inf |u − ū|
  bool violation = false;  // τ ≠ τ̄ but the graphs touch
};

HarnackResult harnack_check(const SliceGraph& a, const SliceGraph& b);

}  // namespace cmc
