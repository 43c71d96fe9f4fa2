#include "cmc/families.hpp"

#include <cmath>
#include <limits>

#include "cmc/errors.hpp"
#include "cmc/quadrature.hpp"

namespace cmc {
namespace {

void require_inside(double t, double eps) {
  if (!(std::abs(t) < eps)) throw DomainError("counterexample requires |t| < epsilon");
}

/// e^{2f(t)} as a jet in variable 0 of a dim-variable jet.
JetN warp_factor(const WarpValue& w, double t, Eigen::Index dim) {
  const double e = std::exp(2.0 * w.f);
  return compose(JetN::variable(t, 0, dim), e, 2.0 * w.df * e, (2.0 * w.d2f + 4.0 * w.df * w.df) * e);
}

}  // namespace

double counterexample_f(double t, double eps) {
  require_inside(t, eps);
  const double r = t / eps;
  return 0.5 * t * t + 0.5 * eps * eps * std::log1p(-r * r);
}

WarpValue counterexample_warp(double t, double eps) {
  require_inside(t, eps);
  const double e2 = eps * eps;
  const double t2 = t * t;
  const double den = e2 - t2;
  WarpValue w;
  w.f = counterexample_f(t, eps);
  w.df = -t * t2 / den;
  w.d2f = -(3.0 * t2 * e2 - t2 * t2) / (den * den);
  return w;
}

double counterexample_f_quadrature(double t, double eps) {
  require_inside(t, eps);
  const double e2 = eps * eps;
  return -integrate([e2](double s) { return s * s * s / (e2 - s * s); }, 0.0, t, 1e-15);
}

double counterexample_tau(double t, double eps, int n) {
  require_inside(t, eps);
  return n * t * t * t / (eps * eps - t * t);
}

double core_inequality(double t, double eps) {
  require_inside(t, eps);
  const double den = eps * eps - t * t;
  const double t2 = t * t;
  return -3.0 * t2 / den - 2.0 * t2 * t2 / (den * den) + t2 * t2 * t2 / (den * den);
}

// --- WarpedProduct

WarpedProduct::WarpedProduct(std::string family, int n, Interval interval, WarpFn warp)
    : family_(std::move(family)), n_(n), interval_(interval), warp_(std::move(warp)) {
  if (n < 1) throw ArgumentError("spatial dimension must be >= 1");
  if (!(interval.lo < interval.hi)) throw ArgumentError("empty time interval");
}

ConformalFields WarpedProduct::fields(double x0, const Eigen::VectorXd& x) const {
  const Eigen::Index dim = n_ + 1;
  ConformalFields out;
  out.psi = JetN::constant(0.0, dim);
  const JetN factor = warp_factor(warp_(x0), x0, dim);
  out.sigma = unit_sphere_metric(x);
  for (JetN& s : out.sigma) s = factor * s;
  return out;
}

std::optional<WarpValue> WarpedProduct::warp(double t) const {
  require_time(t);
  return warp_(t);
}

// --- ConformalWarpedProduct

ConformalWarpedProduct::ConformalWarpedProduct(std::string family, int n, Interval gaussian_interval,
                                               WarpedProduct::WarpFn warp)
    : family_(std::move(family)), n_(n), gaussian_(gaussian_interval), warp_(std::move(warp)) {
  if (n < 1) throw ArgumentError("spatial dimension must be >= 1");
  if (!(gaussian_.lo < 0.0 && 0.0 < gaussian_.hi)) throw ArgumentError("conformal chart needs 0 inside the interval");
  interval_ = {conformal_time(gaussian_.lo), conformal_time(gaussian_.hi)};
}

double ConformalWarpedProduct::conformal_time(double t) const {
  const Interval I = gaussian_;
  return integrate(
      [this, I](double s) {
        if (!I.contains(s)) return std::numeric_limits<double>::quiet_NaN();
        return std::exp(-warp_(s).f);
      },
      0.0, t, 1e-14);
}

double ConformalWarpedProduct::gaussian_time(double x0) const {
  require_time(x0);
  double lo = gaussian_.lo;
  double hi = gaussian_.hi;
  double t = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double r = conformal_time(t) - x0;
    if (r > 0.0) hi = t;
    else lo = t;
    if (std::abs(r) <= 1e-15 * std::max(1.0, std::abs(x0))) return t;
    double next = t - r * std::exp(warp_(t).f);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

ConformalFields ConformalWarpedProduct::fields(double x0, const Eigen::VectorXd& x) const {
  const Eigen::Index dim = n_ + 1;
  const double t = gaussian_time(x0);
  const WarpValue w = warp_(t);
  const double e = std::exp(w.f);
  ConformalFields out;
  // ψ(x⁰) = f(t): ψ' = ḟ e^f, ψ'' = (f̈ + ḟ²) e^{2f}
  out.psi = compose(JetN::variable(x0, 0, dim), w.f, w.df * e, (w.d2f + w.df * w.df) * e * e);
  out.sigma = unit_sphere_metric(x);
  return out;
}

// --- ExpressionSpacetime

ExpressionSpacetime::ExpressionSpacetime(expr::Expr psi, expr::Expr sigma, Interval interval)
    : psi_(std::move(psi)), sigma_(std::move(sigma)), interval_(interval) {
  if (!(interval.lo < interval.hi)) throw ArgumentError("empty time interval");
}

ConformalFields ExpressionSpacetime::fields(double x0, const Eigen::VectorXd& x) const {
  ConformalFields out;
  auto same = [](Eigen::Index i) { return i; };
  out.psi = remap<Eigen::Dynamic>(psi_.eval_jet(x0, x(0)), 2, same);
  out.sigma = {remap<Eigen::Dynamic>(sigma_.eval_jet(x0, x(0)), 2, same)};
  return out;
}

// --- factory

SpacetimePtr make_spec(const FamilyParams& p) {
  if (p.n < 1) throw ArgumentError("n must be >= 1");
  if (p.family == "counterexample" || p.family == "counterexample-conformal") {
    if (!(p.epsilon > 0.0)) throw ArgumentError("epsilon must be > 0");
    const double eps = p.epsilon;
    auto warp = [eps](double t) { return counterexample_warp(t, eps); };
    const Interval I{-eps, eps};
    if (p.family == "counterexample") return std::make_shared<WarpedProduct>(p.family, p.n, I, warp);
    return std::make_shared<ConformalWarpedProduct>(p.family, p.n, I, warp);
  }
  if (p.family == "flat") {
    const Interval I = p.interval.value_or(Interval{-1.0, 1.0});
    return std::make_shared<WarpedProduct>("flat", p.n, I, [](double) { return WarpValue{}; });
  }
  if (p.family == "warped") {
    if (!p.interval) throw ArgumentError("warped family needs an interval");
    const expr::Expr f = expr::Expr::parse(p.warp);
    return std::make_shared<WarpedProduct>("warped", p.n, *p.interval, [f](double t) {
      const Jet2 j = f.eval_jet(t, 0.0);
      return WarpValue{j.value, j.d(0), j.d(0, 0)};
    });
  }
  if (p.family == "expression") {
    if (p.n != 1) throw ArgumentError("expression spacetimes are 1+1 dimensional (n = 1)");
    if (!p.interval) throw ArgumentError("expression family needs an interval");
    return std::make_shared<ExpressionSpacetime>(expr::Expr::parse(p.psi), expr::Expr::parse(p.sigma),
                                                 *p.interval);
  }
  throw ArgumentError("unknown spacetime family '" + p.family + "'");
}

}  // namespace cmc
