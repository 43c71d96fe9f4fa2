#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cmc/expr.hpp"
#include "cmc/spacetime.hpp"

namespace cmc {

// --- Counterexample family: N = (−ε, ε) × Sⁿ, ds² = −dt² + e^{2f(t)} σ_{Sⁿ},
//     f(t) = −∫₀ᵗ s³/(ε² − s²) ds.

/// Closed form f(t) = t²/2 + (ε²/2) log(1 − t²/ε²). Requires |t| < ε.
double counterexample_f(double t, double eps);

/// f, ḟ = −t³/(ε² − t²) and f̈ = −(3t²ε² − t⁴)/(ε² − t²)².
WarpValue counterexample_warp(double t, double eps);

/// f by quadrature of the defining integral.
double counterexample_f_quadrature(double t, double eps);

/// Mean curvature of the slice {t = const}: τ = n t³/(ε² − t²).
double counterexample_tau(double t, double eps, int n);

/// f̈ + ḟ² = −3t²/(ε² − t²) − 2t⁴/(ε² − t²)² + t⁶/(ε² − t²)²; non-positive when ε ≤ 1.
double core_inequality(double t, double eps);

/// Warped product −dt² + e^{2f(t)} σ_{Sⁿ} in Gaussian time (ψ ≡ 0).
class WarpedProduct : public Spacetime {
 public:
  using WarpFn = std::function<WarpValue(double)>;

  WarpedProduct(std::string family, int n, Interval interval, WarpFn warp);

  std::string family() const override { return family_; }
  int spatial_dim() const override { return n_; }
  Interval interval() const override { return interval_; }
  ConformalFields fields(double x0, const Eigen::VectorXd& x) const override;
  std::optional<WarpValue> warp(double t) const override;
  bool homogeneous_slices() const override { return true; }

 private:
  std::string family_;
  int n_;
  Interval interval_;
  WarpFn warp_;
};

/// The same warped product written as e^{2ψ(x⁰)}(−dx⁰² + σ_{Sⁿ}) with
/// dx⁰/dt = e^{−f(t)} and ψ(x⁰) = f(t). Conformal time is computed by
/// quadrature of e^{−f}.
class ConformalWarpedProduct : public Spacetime {
 public:
  ConformalWarpedProduct(std::string family, int n, Interval gaussian_interval, WarpedProduct::WarpFn warp);

  std::string family() const override { return family_; }
  int spatial_dim() const override { return n_; }
  Interval interval() const override { return interval_; }
  ConformalFields fields(double x0, const Eigen::VectorXd& x) const override;
  bool homogeneous_slices() const override { return true; }

  /// x⁰(t) = ∫₀ᵗ e^{−f(s)} ds.
  double conformal_time(double t) const;
  /// Inverse of conformal_time.
  double gaussian_time(double x0) const;
  const Interval& gaussian_interval() const { return gaussian_; }

 private:
  std::string family_;
  int n_;
  Interval gaussian_;
  Interval interval_;
  WarpedProduct::WarpFn warp_;
};

/// 1+1 spacetime e^{2ψ(t,x)}(−dt² + σ(t,x) dx²) on (t_lo, t_hi) × S¹ from expressions.
class ExpressionSpacetime : public Spacetime {
 public:
  ExpressionSpacetime(expr::Expr psi, expr::Expr sigma, Interval interval);

  std::string family() const override { return "expression"; }
  int spatial_dim() const override { return 1; }
  Interval interval() const override { return interval_; }
  ConformalFields fields(double x0, const Eigen::VectorXd& x) const override;

  const expr::Expr& psi() const { return psi_; }
  const expr::Expr& sigma() const { return sigma_; }

 private:
  expr::Expr psi_;
  expr::Expr sigma_;
  Interval interval_;
};

/// Parameters of a builtin family, as read from a run configuration.
///
///   counterexample            epsilon, n
///   counterexample-conformal  epsilon, n
///   flat                      n, interval (default (−1, 1))
///   warped                    warp (expression in t), n, interval
///   expression                psi, sigma (expressions in t, x), interval; n = 1
struct FamilyParams {
  std::string family = "counterexample";
  double epsilon = 0.8;
  int n = 1;
  std::optional<Interval> interval;
  std::string warp;
  std::string psi = "0";
  std::string sigma = "1";
};

SpacetimePtr make_spec(const FamilyParams& params);

}  // namespace cmc
