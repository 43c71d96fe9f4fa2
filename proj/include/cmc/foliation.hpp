#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmc/solver.hpp"

namespace cmc {

/// A solved CMC leaf with its velocity u̇ = ∂u/∂τ.
struct Leaf {
  double tau = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd udot;
  double lambda_min = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool auxiliary = false;  // inserted by step control / refinement, not a requested τ
};

/// Continuation could not reach this τ.
struct GapRecord {
  double tau = 0.0;
  std::string reason;
};

/// A slice whose stability operator is degenerate (u̇ undefined there).
struct DegenerateRecord {
  double tau = 0.0;
  Eigen::VectorXd u;
  double lambda_min = 0.0;
  double residual = 0.0;
  bool converged = false;
};

struct SweepOptions {
  NewtonOptions newton;
  double dtau_min = 1e-6;     // smallest continuation step / refinement offset
  double refine_ratio = 0.25; // geometric ratio of refinement leaves towards τ = 0
  int seed_samples = 201;     // constant slices scanned when seeding
};

struct Foliation {
  double tau_min = 0.0;
  double tau_max = 0.0;
  int steps = 0;
  double dtau_min = 1e-6;
  std::vector<double> targets;
  std::vector<Leaf> leaves;  // strictly increasing τ
  std::vector<GapRecord> gaps;
  std::vector<DegenerateRecord> degenerate;
  Eigen::VectorXd nodes;     // spatial coordinate of each unknown
  bool homogeneous = false;
};

/// Constant slice whose mean H is closest to τ (scan + bisection), if any.
std::optional<Eigen::VectorXd> seed_guess(const SliceModel& model, double tau, int samples = 201);

/// Predictor–corrector continuation over τ_k = linspace(τ_min, τ_max, steps).
/// A range that reaches τ = 0 additionally probes the maximal slice; when it is
/// degenerate, refinement leaves at ±Δτ_min·ratio^{−j} approach it from both sides.
Foliation sweep(const SliceModel& model, double tau_min, double tau_max, int steps, const SweepOptions& options = {});

/// Throws ConsistencyError unless τ is strictly increasing and leaves are ordered.
void check_foliation_order(const Foliation& fol);

enum class Verdict { kGlobalTimeFunction, kAwayFromZero, kDegenerateAtMaximalSlice, kInconclusive };

std::string to_string(Verdict v);

inline constexpr double kGradientThreshold = 1e-6;

struct TimeFunctionOptions {
  int time_samples = 201;
  std::vector<double> times;    // explicit sample times; empty = derived from the foliation
  double probe = 1e-4;          // t-step of the gradient stencil
  double gradient_threshold = kGradientThreshold;
  double delta = 0.0;           // 0: 10·Δτ_min
};

struct TimeFunctionReport {
  std::vector<double> times;
  Eigen::VectorXd nodes;
  Eigen::MatrixXd tau;   // tau(i, k) at (times[i], nodes[k])
  Eigen::MatrixXd grad;  // |Dτ| = sqrt|ḡ^{αβ}τ_ατ_β|
  double delta = 0.0;
  double gradient_threshold = 0.0;
  double min_grad = 0.0;        // over all samples
  double min_grad_away = 0.0;   // over {|τ| > δ}
  double min_grad_near_zero = std::numeric_limits<double>::quiet_NaN();  // over {|τ| ≤ δ}
  std::optional<double> degenerate_time;  // sample row placed on the degenerate leaf
  Verdict verdict = Verdict::kInconclusive;

  /// min |Dτ| over samples with |τ| > level (+∞ when there are none).
  double min_grad_where_abs_tau_above(double level) const;
  /// |Dτ| at the sample row closest to time t (max over nodes).
  double grad_at_time(double t) const;
};

/// Reconstructs τ(t, x) by monotone cubic Hermite interpolation through the
/// leaves at every node (slopes 1/u̇; 0 at degenerate leaves) and grades it.
TimeFunctionReport build_time_function(const Foliation& fol, const Spacetime& st,
                                       const TimeFunctionOptions& options = {});

struct PhiEntry {
  double tau = 0.0;
  double udot_min = 0.0;
  double udot_max = 0.0;
};

struct PhiSummary {
  std::vector<PhiEntry> leaves;
  std::vector<double> excluded;  // τ of degenerate slices
  bool diffeomorphism = false;   // every leaf has min u̇ > 0
};

/// det DΦ = u̇ for Φ(τ, x) = (u(τ, x), x).
PhiSummary phi_determinant(const Foliation& fol);

}  // namespace cmc
