#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmc/jet.hpp"

namespace cmc {

/// Open time interval (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double t) const { return t > lo && t < hi; }
  double width() const { return hi - lo; }
};

/// Conformal factor ψ and spatial metric σ_ij of ds² = e^{2ψ}(−dx⁰² + σ_ij dx^i dx^j),
/// each as a second-order jet in the n+1 coordinates (x⁰, x¹, …, xⁿ).
struct ConformalFields {
  JetN psi;
  std::vector<JetN> sigma;  // n×n, row major, symmetric

  const JetN& sigma_at(int i, int j, int n) const { return sigma[static_cast<std::size_t>(i * n + j)]; }
};

/// f(t), ḟ(t), f̈(t) of a warp function.
struct WarpValue {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// A globally hyperbolic spacetime in conformal Gaussian form. The time
/// coordinate x⁰ is future oriented. For n = 1 the Cauchy surface is the
/// circle with angle coordinate x ∈ [0, 2π); for n ≥ 2 builtin families use
/// stereographic coordinates on the unit sphere.
///
/// Implementations are immutable; evaluation is pure and deterministic.
class Spacetime {
 public:
  virtual ~Spacetime() = default;

  virtual std::string family() const = 0;
  virtual int spatial_dim() const = 0;
  virtual Interval interval() const = 0;
  virtual ConformalFields fields(double x0, const Eigen::VectorXd& x) const = 0;

  /// For warped products −dt² + e^{2f(t)}σ_{Sⁿ} in Gaussian time the warp
  /// data at t; the slices {t = const} are then umbilic with H = −n ḟ.
  virtual std::optional<WarpValue> warp(double t) const;

  /// True when every coordinate slice {x⁰ = const} has constant mean curvature.
  virtual bool homogeneous_slices() const { return false; }

  /// Spatial point at which homogeneous slices are evaluated.
  virtual Eigen::VectorXd reference_point() const { return Eigen::VectorXd::Zero(spatial_dim()); }

  /// Throws DomainError unless x⁰ lies strictly inside the interval.
  void require_time(double x0) const;
};

using SpacetimePtr = std::shared_ptr<const Spacetime>;

/// Unit-sphere metric on Sⁿ as jets in the spatial slots [1, n] of an
/// (n+1)-variable jet; angle coordinate for n = 1, stereographic for n ≥ 2.
std::vector<JetN> unit_sphere_metric(const Eigen::VectorXd& x);

}  // namespace cmc
