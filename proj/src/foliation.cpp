#include "cmc/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cmc/errors.hpp"

namespace cmc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double a, double b, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps));
  if (steps == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (steps - 1);
  out.back() = b;
  return out;
}

double mean_residual(const SliceModel& model, double t, double tau) {
  return model.mean_curvature(model.constant(t)).mean() - tau;
}

Leaf make_leaf(const SliceModel& model, const SliceGraph& slice, bool auxiliary, const SweepOptions& opt) {
  if (slice.report.degenerate) {
    std::ostringstream os;
    os.precision(17);
    os << "degenerate slice at tau = " << slice.tau;
    throw DegenerateSliceError(os.str(), slice.report.lambda_min);
  }
  const SliceVelocity vel = slice_velocity(model, slice, opt.newton.degeneracy_factor);
  Leaf leaf;
  leaf.tau = slice.tau;
  leaf.u = slice.u;
  leaf.udot = vel.udot;
  leaf.lambda_min = slice.report.lambda_min;
  leaf.residual = slice.residual;
  leaf.iterations = slice.report.iterations;
  leaf.auxiliary = auxiliary;
  return leaf;
}

class Sweeper {
 public:
  Sweeper(const SliceModel& model, const SweepOptions& opt, Foliation& fol) : model_(model), opt_(opt), fol_(fol) {}

  /// Solves at `target` from the previous leaf (continuation with step halving)
  /// or from a seed. Returns false and records a gap on failure.
  bool advance(double target, bool auxiliary) {
    std::string why;
    const bool ok = prev_ ? continue_to(target, auxiliary, &why) : seeded(target, auxiliary, &why);
    if (!ok) {
      fol_.gaps.push_back({target, why});
      prev_.reset();
    }
    return ok;
  }

  /// Probes τ = 0 and, at a degenerate maximal slice, brackets it with
  /// geometrically refined leaves. `next_positive` bounds the positive side.
  void handle_zero(bool zero_is_target, double next_positive) {
    const std::optional<Leaf> before = prev_;
    std::optional<Eigen::VectorXd> u0;
    if (before) u0 = before->u;
    else u0 = seed_guess(model_, 0.0, opt_.seed_samples);
    if (!u0) {
      fol_.gaps.push_back({0.0, "no constant slice brackets tau = 0"});
      return;
    }

    bool degenerate = false;
    try {
      const SliceGraph s = newton_solve(model_, 0.0, *u0, opt_.newton);
      if (s.report.degenerate) {
        fol_.degenerate.push_back({0.0, s.u, s.report.lambda_min, s.residual, true});
        degenerate = true;
      } else if (zero_is_target || before) {
        push(make_leaf(model_, s, !zero_is_target, opt_));
      }
    } catch (const DegenerateSliceError& e) {
      fol_.degenerate.push_back({0.0, Eigen::VectorXd(), e.lambda_min(), kInf, false});
      degenerate = true;
    } catch (const Error& e) {
      fol_.gaps.push_back({0.0, e.what()});
      prev_.reset();
      return;
    }
    if (!degenerate) return;

    // approach from below, continuing from the last leaf
    prev_ = before;
    if (before && before->tau < 0.0) {
      std::vector<double> below;
      for (double d = opt_.dtau_min; d < -before->tau; d /= opt_.refine_ratio) below.push_back(-d);
      std::reverse(below.begin(), below.end());
      for (double tau : below)
        if (!advance(tau, true)) break;
    }
    // and from above, starting from a fresh seed
    prev_.reset();
    for (double d = opt_.dtau_min; d < next_positive; d /= opt_.refine_ratio)
      if (!advance(d, true)) break;
  }

 private:
  void push(Leaf leaf) {
    fol_.leaves.push_back(leaf);
    prev_ = std::move(leaf);
  }

  bool seeded(double target, bool auxiliary, std::string* why) {
    const std::optional<Eigen::VectorXd> u0 = seed_guess(model_, target, opt_.seed_samples);
    if (!u0) {
      *why = "no constant slice brackets the target mean curvature";
      return false;
    }
    try {
      push(make_leaf(model_, newton_solve(model_, target, *u0, opt_.newton), auxiliary, opt_));
      return true;
    } catch (const Error& e) {
      *why = e.what();
      return false;
    }
  }

  bool continue_to(double target, bool auxiliary, std::string* why) {
    double step = target - prev_->tau;
    while (prev_->tau != target) {
      const double remaining = target - prev_->tau;
      const double next = std::abs(remaining) <= std::abs(step) ? target : prev_->tau + step;
      try {
        const Eigen::VectorXd u0 = prev_->u + (next - prev_->tau) * prev_->udot;
        const SliceGraph s = newton_solve(model_, next, u0, opt_.newton);
        push(make_leaf(model_, s, auxiliary || next != target, opt_));
        step = std::min(std::abs(2.0 * step), std::abs(target - next)) * (step < 0 ? -1.0 : 1.0);
      } catch (const Error& e) {
        step *= 0.5;
        if (std::abs(step) < opt_.dtau_min) {
          *why = e.what();
          return false;
        }
      }
    }
    return true;
  }

  const SliceModel& model_;
  const SweepOptions& opt_;
  Foliation& fol_;
  std::optional<Leaf> prev_;
};

// --- monotone cubic Hermite interpolation through (u_i, τ_i, τ'_i)

struct Knot {
  double u, tau, slope;
};

class MonotoneHermite {
 public:
  explicit MonotoneHermite(std::vector<Knot> knots) : k_(std::move(knots)) {
    // Fritsch–Carlson limiter on the supplied slopes
    for (std::size_t i = 0; i + 1 < k_.size(); ++i) {
      const double d = (k_[i + 1].tau - k_[i].tau) / (k_[i + 1].u - k_[i].u);
      if (d == 0.0) {
        k_[i].slope = k_[i + 1].slope = 0.0;
        continue;
      }
      const double a = k_[i].slope / d;
      const double b = k_[i + 1].slope / d;
      if (a < 0.0) k_[i].slope = 0.0;
      if (b < 0.0) k_[i + 1].slope = 0.0;
      const double r = a * a + b * b;
      if (r > 9.0) {
        const double s = 3.0 / std::sqrt(r);
        k_[i].slope = s * a * d;
        k_[i + 1].slope = s * b * d;
      }
    }
  }

  double lo() const { return k_.front().u; }
  double hi() const { return k_.back().u; }

  double operator()(double t) const {
    auto it = std::upper_bound(k_.begin(), k_.end(), t, [](double v, const Knot& k) { return v < k.u; });
    std::size_t i = it == k_.begin() ? 0 : static_cast<std::size_t>(it - k_.begin()) - 1;
    i = std::min(i, k_.size() - 2);
    const Knot& a = k_[i];
    const Knot& b = k_[i + 1];
    const double h = b.u - a.u;
    const double s = (t - a.u) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * a.tau + (s3 - 2 * s2 + s) * h * a.slope + (-2 * s3 + 3 * s2) * b.tau +
           (s3 - s2) * h * b.slope;
  }

 private:
  std::vector<Knot> k_;
};

}  // namespace

std::optional<Eigen::VectorXd> seed_guess(const SliceModel& model, double tau, int samples) {
  const Interval I = model.spacetime().interval();
  const double mid = 0.5 * (I.lo + I.hi);
  auto residual = [&](double t) -> std::optional<double> {
    try {
      const double r = mean_residual(model, t, tau);
      if (std::isfinite(r)) return r;
    } catch (const Error&) {
    }
    return std::nullopt;
  };
  if (const auto r = residual(mid); r && *r == 0.0) return model.constant(mid);

  const double pad = 1e-3 * I.width();
  std::optional<double> prev_t, prev_r;
  for (int i = 0; i < samples; ++i) {
    const double t = I.lo + pad + (I.width() - 2 * pad) * i / (samples - 1);
    const std::optional<double> r = residual(t);
    if (!r) continue;
    if (*r == 0.0) return model.constant(t);
    if (prev_r && ((*prev_r < 0.0) != (*r < 0.0))) {
      double a = *prev_t, b = t, fa = *prev_r;
      for (int k = 0; k < 100 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
        const double m = 0.5 * (a + b);
        const std::optional<double> fm = residual(m);
        if (!fm) break;
        if ((*fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = *fm;
        } else {
          b = m;
        }
      }
      return model.constant(0.5 * (a + b));
    }
    prev_t = t;
    prev_r = r;
  }
  return std::nullopt;
}

Foliation sweep(const SliceModel& model, double tau_min, double tau_max, int steps, const SweepOptions& options) {
  if (!std::isfinite(tau_min) || !std::isfinite(tau_max)) throw ArgumentError("tau range must be finite");
  if (tau_min > tau_max) throw ArgumentError("tau_min must not exceed tau_max");
  if (steps < 1 || (tau_min < tau_max && steps < 2)) throw ArgumentError("steps must be >= 2 for a proper tau range");
  if (tau_min == tau_max && steps != 1) throw ArgumentError("a single tau value needs steps = 1");
  if (!(options.dtau_min > 0.0) || !(options.refine_ratio > 0.0 && options.refine_ratio < 1.0))
    throw ArgumentError("invalid step-control options");

  Foliation fol;
  fol.tau_min = tau_min;
  fol.tau_max = tau_max;
  fol.steps = steps;
  fol.dtau_min = options.dtau_min;
  fol.targets = linspace(tau_min, tau_max, steps);
  fol.nodes = model.nodes();
  fol.homogeneous = model.homogeneous();

  Sweeper sw(model, options, fol);
  bool zero_done = !(tau_min <= 0.0 && 0.0 <= tau_max);
  for (std::size_t i = 0; i < fol.targets.size(); ++i) {
    const double tau = fol.targets[i];
    if (!zero_done && tau >= 0.0) {
      zero_done = true;
      double next_positive = tau;
      if (tau == 0.0) next_positive = i + 1 < fol.targets.size() ? fol.targets[i + 1] : 0.0;
      sw.handle_zero(tau == 0.0, next_positive);
      if (tau == 0.0) continue;
    }
    sw.advance(tau, false);
  }
  std::sort(fol.leaves.begin(), fol.leaves.end(), [](const Leaf& a, const Leaf& b) { return a.tau < b.tau; });
  check_foliation_order(fol);
  return fol;
}

void check_foliation_order(const Foliation& fol) {
  struct Entry {
    double tau;
    const Eigen::VectorXd* u;
  };
  std::vector<Entry> all;
  for (const Leaf& l : fol.leaves) all.push_back({l.tau, &l.u});
  for (const DegenerateRecord& d : fol.degenerate)
    if (d.converged) all.push_back({d.tau, &d.u});
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.tau < b.tau; });
  for (std::size_t i = 0; i + 1 < all.size(); ++i) {
    if (!(all[i].tau < all[i + 1].tau)) throw ConsistencyError("foliation: tau values are not strictly increasing");
    const Eigen::VectorXd diff = *all[i + 1].u - *all[i].u;
    const double slack = 1e-12 * std::max(1.0, all[i].u->cwiseAbs().maxCoeff());
    if (diff.minCoeff() < -slack) {
      std::ostringstream os;
      os.precision(17);
      os << "foliation: leaves at tau = " << all[i].tau << " and " << all[i + 1].tau << " cross";
      throw ConsistencyError(os.str());
    }
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kGlobalTimeFunction: return "global-time-function";
    case Verdict::kAwayFromZero: return "time-function-away-from-zero";
    case Verdict::kDegenerateAtMaximalSlice: return "degenerate-at-maximal-slice";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double TimeFunctionReport::min_grad_where_abs_tau_above(double level) const {
  double m = kInf;
  for (Eigen::Index i = 0; i < tau.rows(); ++i)
    for (Eigen::Index k = 0; k < tau.cols(); ++k)
      if (std::abs(tau(i, k)) > level) m = std::min(m, grad(i, k));
  return m;
}

double TimeFunctionReport::grad_at_time(double t) const {
  if (times.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  return grad.row(static_cast<Eigen::Index>(best)).maxCoeff();
}

TimeFunctionReport build_time_function(const Foliation& fol, const Spacetime& st, const TimeFunctionOptions& options) {
  check_foliation_order(fol);
  const Eigen::Index n = fol.nodes.size();
  if (n == 0) throw ArgumentError("foliation has no spatial nodes");

  // knots per node
  std::vector<MonotoneHermite> interp;
  interp.reserve(static_cast<std::size_t>(n));
  const DegenerateRecord* zero = nullptr;
  for (const DegenerateRecord& d : fol.degenerate)
    if (d.converged && d.u.size() == n) zero = &d;
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<Knot> knots;
    for (const Leaf& l : fol.leaves) knots.push_back({l.u(k), l.tau, 1.0 / l.udot(k)});
    for (const DegenerateRecord& d : fol.degenerate)
      if (d.converged && d.u.size() == n) knots.push_back({d.u(k), d.tau, 0.0});
    std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.u < b.u; });
    knots.erase(std::unique(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.u == b.u; }),
                knots.end());
    if (knots.size() < 2) throw CoverageError("foliation has fewer than two distinct leaves", {});
    interp.emplace_back(std::move(knots));
  }

  TimeFunctionReport rep;
  rep.nodes = fol.nodes;
  rep.delta = options.delta > 0.0 ? options.delta : 10.0 * fol.dtau_min;
  rep.gradient_threshold = options.gradient_threshold;

  double lo = -kInf, hi = kInf;
  for (const MonotoneHermite& h : interp) {
    lo = std::max(lo, h.lo());
    hi = std::min(hi, h.hi());
  }
  if (!options.times.empty()) {
    rep.times = options.times;
    std::vector<std::size_t> uncovered;
    for (std::size_t i = 0; i < rep.times.size(); ++i)
      for (Eigen::Index k = 0; k < n; ++k) {
        const MonotoneHermite& h = interp[static_cast<std::size_t>(k)];
        if (!(rep.times[i] >= h.lo() && rep.times[i] <= h.hi())) uncovered.push_back(i * static_cast<std::size_t>(n) + k);
      }
    if (!uncovered.empty()) {
      std::ostringstream os;
      os << uncovered.size() << " spacetime sample(s) lie outside the foliation";
      throw CoverageError(os.str(), uncovered);
    }
  } else {
    if (!(lo < hi)) throw CoverageError("leaves do not bracket a common time range", {});
    const int m = std::max(options.time_samples, 2);
    for (int i = 0; i < m; ++i) rep.times.push_back(lo + (hi - lo) * i / (m - 1));
    rep.times.back() = hi;
    if (zero) {
      const double t0 = zero->u.mean();
      if (t0 > lo && t0 < hi) {
        rep.times.push_back(t0);
        rep.degenerate_time = t0;
      }
    }
    std::sort(rep.times.begin(), rep.times.end());
  }

  const auto T = static_cast<Eigen::Index>(rep.times.size());
  rep.tau.resize(T, n);
  rep.grad.resize(T, n);
  Eigen::MatrixXd tau_t(T, n);
  for (Eigen::Index i = 0; i < T; ++i) {
    const double t = rep.times[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      const MonotoneHermite& h = interp[static_cast<std::size_t>(k)];
      rep.tau(i, k) = h(t);
      const double a = std::max(h.lo(), t - options.probe);
      const double b = std::min(h.hi(), t + options.probe);
      tau_t(i, k) = b > a ? (h(b) - h(a)) / (b - a) : 0.0;
    }
  }

  const double dx = 2.0 * std::numbers::pi / static_cast<double>(n);
  auto wrap = [n](Eigen::Index k) { return ((k % n) + n) % n; };
  for (Eigen::Index i = 0; i < T; ++i) {
    const double t = rep.times[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::VectorXd x = st.reference_point();
      double tau_x = 0.0;
      if (!fol.homogeneous && n > 1) {
        x(0) = fol.nodes(k);
        tau_x = (-rep.tau(i, wrap(k + 2)) + 8.0 * rep.tau(i, wrap(k + 1)) - 8.0 * rep.tau(i, wrap(k - 1)) +
                 rep.tau(i, wrap(k - 2))) /
                (12.0 * dx);
      }
      const ConformalFields f = st.fields(t, x);
      const double e2 = std::exp(-2.0 * f.psi.value);
      double q = -e2 * tau_t(i, k) * tau_t(i, k);
      if (tau_x != 0.0) q += e2 / f.sigma[0].value * tau_x * tau_x;
      rep.grad(i, k) = std::sqrt(std::abs(q));
    }
  }

  rep.min_grad = rep.grad.minCoeff();
  rep.min_grad_away = rep.min_grad_where_abs_tau_above(rep.delta);
  for (Eigen::Index i = 0; i < T; ++i)
    for (Eigen::Index k = 0; k < n; ++k)
      if (std::abs(rep.tau(i, k)) <= rep.delta)
        rep.min_grad_near_zero = std::isnan(rep.min_grad_near_zero) ? rep.grad(i, k)
                                                                    : std::min(rep.min_grad_near_zero, rep.grad(i, k));

  const double thr = rep.gradient_threshold;
  if (rep.min_grad > thr) {
    rep.verdict = Verdict::kGlobalTimeFunction;
  } else if (rep.min_grad_away > thr) {
    const bool isolated_zero = !fol.degenerate.empty() && !std::isnan(rep.min_grad_near_zero) &&
                               rep.min_grad_near_zero <= thr;
    rep.verdict = isolated_zero ? Verdict::kDegenerateAtMaximalSlice : Verdict::kAwayFromZero;
  } else {
    rep.verdict = Verdict::kInconclusive;
  }
  return rep;
}

PhiSummary phi_determinant(const Foliation& fol) {
  PhiSummary out;
  out.diffeomorphism = !fol.leaves.empty();
  for (const Leaf& l : fol.leaves) {
    PhiEntry e{l.tau, l.udot.minCoeff(), l.udot.maxCoeff()};
    if (!(e.udot_min > 0.0)) out.diffeomorphism = false;
    out.leaves.push_back(e);
  }
  for (const DegenerateRecord& d : fol.degenerate) out.excluded.push_back(d.tau);
  return out;
}

}  // namespace cmc
