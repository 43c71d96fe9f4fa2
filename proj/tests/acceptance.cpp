// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cmc/errors.hpp"
#include "cmc/expr.hpp"
#include "cmc/families.hpp"
#include "cmc/foliation.hpp"
#include "cmc/geometry.hpp"
#include "cmc/solver.hpp"
#include "cmc/stability.hpp"
#include "oracles.hpp"

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

cmc::SpacetimePtr counterexample(double eps, int n) {
  cmc::FamilyParams p;
  p.epsilon = eps;
  p.n = n;
  return cmc::make_spec(p);
}

// warp f(t) = −t²/2 on (−0.5, 0.5), n = 1, with a 0.05·sin(x) conformal perturbation
cmc::SpacetimePtr strict_tcc() {
  cmc::FamilyParams p;
  p.family = "expression";
  p.psi = "0.05*sin(x)";
  p.sigma = "exp(-t^2)";
  p.interval = cmc::Interval{-0.5, 0.5};
  return cmc::make_spec(p);
}

Eigen::VectorXd sample(const cmc::PeriodicGrid& grid, const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) v(k) = f(grid.x(k));
  return v;
}

Outcome tau_curve() {
  const auto st = counterexample(0.8, 2);
  const cmc::HomogeneousSliceModel model(st);
  const auto start = std::chrono::steady_clock::now();
  const cmc::Foliation fol = cmc::sweep(model, -2.0, 2.0, 81);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double worst = 0.0;
  for (const cmc::Leaf& l : fol.leaves)
    worst = std::max(worst, std::abs(l.u(0) - oracle::counterexample_time(l.tau, 0.8, 2)));
  const bool ok = !fol.leaves.empty() && fol.gaps.empty() && worst <= 1e-8 && secs <= 5.0;
  return {ok, fmt("%zu leaves, max |u - t(tau)| = %.3g (<= 1e-8), runtime %.3f s (<= 5 s)", fol.leaves.size(), worst,
                  secs)};
}

Outcome degenerate_maximal_slice() {
  const auto st = counterexample(0.8, 2);
  const cmc::HomogeneousSliceModel model(st);
  const cmc::Foliation fol = cmc::sweep(model, -2.0, 2.0, 81);
  // slice nearest τ = 0: the degenerate record if present, else the closest leaf
  double lambda = INFINITY, tau_near = INFINITY, t0 = 0.0;
  for (const cmc::DegenerateRecord& d : fol.degenerate)
    if (std::abs(d.tau) < std::abs(tau_near)) tau_near = d.tau, lambda = d.lambda_min, t0 = d.u(0);
  for (const cmc::Leaf& l : fol.leaves)
    if (std::abs(l.tau) < std::abs(tau_near)) tau_near = l.tau, lambda = l.lambda_min, t0 = l.u(0);
  const cmc::TimeFunctionReport rep = cmc::build_time_function(fol, *st);
  const double g0 = rep.grad_at_time(t0);
  const double away = rep.min_grad_where_abs_tau_above(0.01);
  const bool ok = lambda <= 1e-6 && g0 <= 1e-6 && away >= 1e-3;
  return {ok, fmt("lambda_min = %.3g at tau = %g (<= 1e-6), |Dtau|(t=%.2g) = %.3g (<= 1e-6), "
                  "min |Dtau| on |tau| > 0.01 = %.3g (>= 1e-3), verdict %s",
                  lambda, tau_near, t0, g0, away, cmc::to_string(rep.verdict).c_str())};
}

Outcome strict_tcc_time_function() {
  const auto st = strict_tcc();
  const cmc::GridSliceModel model(st, 256);
  const cmc::Foliation fol = cmc::sweep(model, -0.4, 0.4, 81);
  double min_udot = INFINITY;
  for (const cmc::Leaf& l : fol.leaves) min_udot = std::min(min_udot, l.udot.minCoeff());
  const cmc::TimeFunctionReport rep = cmc::build_time_function(fol, *st);
  // central differences of u across adjacent leaves
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < fol.leaves.size(); ++i) {
    const cmc::Leaf &a = fol.leaves[i - 1], &b = fol.leaves[i], &c = fol.leaves[i + 1];
    const Eigen::VectorXd fd = (c.u - a.u) / (c.tau - a.tau);
    worst = std::max(worst, ((fd - b.udot).array().abs() / b.udot.array().abs()).maxCoeff());
  }
  const bool ok = fol.gaps.empty() && fol.leaves.size() >= 3 && min_udot > 0.0 &&
                  rep.verdict == cmc::Verdict::kGlobalTimeFunction && worst <= 1e-3;
  return {ok, fmt("%zu leaves, %zu gaps, min udot = %.4g (> 0), verdict %s, max rel |udot - du/dtau| = %.3g (<= 1e-3)",
                  fol.leaves.size(), fol.gaps.size(), min_udot, cmc::to_string(rep.verdict).c_str(), worst)};
}

Outcome tcc_verification() {
  bool ok = true;
  std::string detail;
  for (double eps : {0.5, 0.8, 1.0}) {
    const auto st = counterexample(eps, 2);
    const cmc::TccReport rep = cmc::tcc_sample(*st, cmc::random_tcc_samples(*st, 10000, 1));
    double core = -INFINITY;
    for (int i = 0; i <= 10000; ++i) core = std::max(core, cmc::core_inequality(0.999 * eps * (2.0 * i / 10000 - 1.0), eps));
    ok = ok && rep.accepted == 10000 && rep.min_value >= -1e-10 && core <= 0.0;
    detail += fmt("eps=%.1f: min Ric(eta,eta) = %.3g over %zu samples, max core = %.3g; ", eps, rep.min_value,
                  rep.accepted, core);
  }
  return {ok, detail + "(min >= -1e-10, core <= 0)"};
}

Outcome curvature_oracles() {
  double closed = 0.0, conformal = 0.0, chris = 0.0;
  for (int n : {1, 2, 3}) {
    const double eps = 0.8;
    const auto st = counterexample(eps, n);
    for (double t : {-0.7, -0.4, -0.1, 0.0, 0.2, 0.5, 0.75}) {
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.3);
      const cmc::RicciData r = cmc::ricci(*st, t, x);
      const double f = -oracle::simpson([&](double s) { return s * s * s / (eps * eps - s * s); }, 0.0, t);
      const double df = -t * t * t / (eps * eps - t * t);
      const double d2f = -(3 * t * t * eps * eps - t * t * t * t) / std::pow(eps * eps - t * t, 2);
      const cmc::MetricPointData m = cmc::eval_metric(*st, t, x);
      const Eigen::MatrixXd sigma = m.g.bottomRightCorner(n, n) / std::exp(2 * f);
      Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(n + 1, n + 1);
      expected(0, 0) = -n * (d2f + df * df);
      expected.bottomRightCorner(n, n) = (n - 1) * sigma + std::exp(2 * f) * (d2f + n * df * df) * sigma;
      closed = std::max(closed, (r.ricci_bar - expected).cwiseAbs().maxCoeff() / std::max(1.0, expected.cwiseAbs().maxCoeff()));
      conformal = std::max(conformal, cmc::conformal_ricci_check(r));
    }
  }
  std::vector<cmc::SpacetimePtr> spaces{counterexample(0.8, 2), strict_tcc()};
  {
    cmc::FamilyParams p;
    p.family = "counterexample-conformal";
    p.n = 2;
    spaces.push_back(cmc::make_spec(p));
    p = {};
    p.family = "expression";
    p.psi = "0.05*sin(x) + 0.1*t*cos(x)";
    p.sigma = "exp(-t^2) * (1 + 0.2*sin(x)^2)";
    p.interval = cmc::Interval{-0.5, 0.5};
    spaces.push_back(cmc::make_spec(p));
  }
  for (const auto& st : spaces) {
    const cmc::Interval I = st->interval();
    for (double s : {0.2, 0.5, 0.8}) {
      const double t = I.lo + s * I.width();
      const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(st->spatial_dim(), 0.4, 0.9);
      conformal = std::max(conformal, cmc::conformal_ricci_check(cmc::ricci(*st, t, x)));
      const cmc::Tensor3 a = cmc::christoffels(cmc::eval_metric(*st, t, x));
      const cmc::Tensor3 b = oracle::christoffels_fd(*st, t, x);
      for (std::size_t k = 0; k < a.size(); ++k) chris = std::max(chris, (a[k] - b[k]).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = closed <= 1e-6 && conformal <= 1e-6 && chris <= 1e-6;
  return {ok, fmt("Ricci vs closed form rel %.3g, conformal residual %.3g, Christoffel vs FD %.3g (all <= 1e-6)",
                  closed, conformal, chris)};
}

Outcome operator_consistency() {
  // (a) graph-form and Gaussian-chart second fundamental forms under refinement
  cmc::FamilyParams p;
  p.family = "expression";
  p.psi = "0";
  p.sigma = "exp(-t^2) * (1 + 0.2*sin(x + t)^2)";
  p.interval = cmc::Interval{-0.5, 0.5};
  const auto gauss = cmc::make_spec(p);
  std::vector<double> path_err;
  for (Eigen::Index n : {128, 256, 512}) {
    const cmc::PeriodicGrid grid(n);
    const Eigen::VectorXd u = sample(grid, [](double x) { return 0.15 + 0.03 * std::sin(6 * x) + 0.02 * std::cos(9 * x); });
    path_err.push_back(cmc::second_fundamental_form(*gauss, grid, u).discrepancy);
  }
  const double order_a = std::min(std::log2(path_err[0] / path_err[1]), std::log2(path_err[1] / path_err[2]));

  // (b) Jacobian against one-sided directional differences: error halves with the step
  const auto st = strict_tcc();
  const cmc::PeriodicGrid grid(128);
  const Eigen::VectorXd u = sample(grid, [](double x) { return 0.1 + 0.08 * std::sin(x) - 0.03 * std::cos(3 * x); });
  const Eigen::VectorXd w = sample(grid, [](double x) { return std::cos(2 * x) + 0.4 * std::sin(7 * x); });
  const Eigen::VectorXd Jw = cmc::mean_curvature_jacobian(*st, grid, u) * w;
  const Eigen::VectorXd H0 = cmc::mean_curvature(*st, grid, u);
  std::vector<double> jac_err;
  for (double s : {4e-3, 2e-3, 1e-3}) jac_err.push_back(((cmc::mean_curvature(*st, grid, u + s * w) - H0) / s - Jw).cwiseAbs().maxCoeff());
  const double order_b = std::min(std::log2(jac_err[0] / jac_err[1]), std::log2(jac_err[1] / jac_err[2]));

  // (c) Newton Jacobian vs stability operator at constant leaves of a homogeneous family
  const auto hom = counterexample(0.8, 1);
  std::vector<double> jl_err;
  for (Eigen::Index n : {64, 128, 256}) {
    const cmc::GridSliceModel model(hom, n);
    const Eigen::VectorXd phi = sample(model.grid(), [](double x) { return std::sin(2 * x) + 0.5 * std::cos(5 * x); });
    double e = 0.0;
    for (double t : {-0.5, 0.3, 0.6}) {
      const Eigen::VectorXd uc = model.constant(t);
      const cmc::StabilityOperator L = model.stability(uc);
      e = std::max(e, ((model.jacobian(uc) - L.matrix) * phi).cwiseAbs().maxCoeff());
    }
    jl_err.push_back(e);
  }
  const double order_c = std::min(std::log2(jl_err[0] / jl_err[1]), std::log2(jl_err[1] / jl_err[2]));

  const bool ok = order_a >= 2.0 && order_b >= 0.9 && order_b <= 1.1 && order_c >= 2.0;
  return {ok, fmt("(a) |h - h_alt| %.2e, %.2e, %.2e: order %.2f (>= 2); (b) |J w - FD| %.2e, %.2e, %.2e: order %.2f "
                  "(first); (c) |(J - L) phi| %.2e, %.2e, %.2e: order %.2f (>= 2)",
                  path_err[0], path_err[1], path_err[2], order_a, jac_err[0], jac_err[1], jac_err[2], order_b,
                  jl_err[0], jl_err[1], jl_err[2], order_c)};
}

Outcome harnack() {
  const auto st = strict_tcc();
  std::vector<double> max_ratio;
  bool finite = true;
  for (Eigen::Index n : {128, 256}) {
    const cmc::GridSliceModel model(st, n);
    const cmc::Foliation fol = cmc::sweep(model, -0.4, 0.4, 51);
    if (fol.leaves.size() != 51) finite = false;
    double worst = 0.0;
    for (std::size_t i = 1; i < fol.leaves.size(); ++i) {
      cmc::SliceGraph a, b;
      a.tau = fol.leaves[i - 1].tau;
      a.u = fol.leaves[i - 1].u;
      b.tau = fol.leaves[i].tau;
      b.u = fol.leaves[i].u;
      const cmc::HarnackResult h = cmc::harnack_check(a, b);
      finite = finite && !h.violation && std::isfinite(h.ratio);
      worst = std::max(worst, h.ratio);
    }
    max_ratio.push_back(worst);
  }
  const double change = std::abs(max_ratio[1] - max_ratio[0]) / max_ratio[0];
  const bool ok = finite && change <= 0.05;
  return {ok, fmt("50 pairs; max ratio %.6g (N=128), %.6g (N=256), relative change %.2e (<= 5%%), all finite: %s",
                  max_ratio[0], max_ratio[1], change, finite ? "yes" : "no")};
}

Outcome parser_suite() {
  using cmc::expr::Expr;
  bool prec = Expr::parse("1+2*3").eval(0, 0) == 7.0 && Expr::parse("2^3^2").eval(0, 0) == 512.0 &&
              Expr::parse("-2^2").eval(0, 0) == -4.0 && Expr::parse("8/4/2").eval(0, 0) == 1.0 &&
              Expr::parse("8-4-2").eval(0, 0) == 2.0;
  try {
    (void)Expr::parse("sin(x");
    prec = false;
  } catch (const cmc::ParseError& e) {
    prec = prec && e.offset() == 5;
  }
  oracle::ExprGenerator gen(2024);
  int roundtrip_fail = 0;
  double jet = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = Expr::parse(gen());
    const Expr back = Expr::parse(e.to_string());
    if (back.to_string() != e.to_string() || back.eval(0.3, -0.2) != e.eval(0.3, -0.2)) ++roundtrip_fail;
    const double t = 0.4 - 0.1 * (i % 9), x = -0.5 + 0.15 * (i % 7);
    const cmc::Jet2 j = e.eval_jet(t, x);
    const double h = 1e-5, scale = std::max(1.0, std::abs(j.value));
    auto f = [&](double a, double b) { return e.eval(t + a, x + b); };
    const double ft = (f(h, 0) - f(-h, 0)) / (2 * h), fx = (f(0, h) - f(0, -h)) / (2 * h);
    const double k = 1e-3, hs = std::max(scale, j.hess.cwiseAbs().maxCoeff());
    auto d2 = [&](double a, double b) {
      return (-f(2 * k * a, 2 * k * b) + 16 * f(k * a, k * b) - 30 * f(0, 0) + 16 * f(-k * a, -k * b) -
              f(-2 * k * a, -2 * k * b)) / (12 * k * k);
    };
    auto mixed = [&](double a) { return (f(a, a) - f(a, -a) - f(-a, a) + f(-a, -a)) / (4 * a * a); };
    jet = std::max({jet, std::abs(j.d(0) - ft) / scale, std::abs(j.d(1) - fx) / scale,
                    std::abs(j.d(0, 0) - d2(1, 0)) / hs, std::abs(j.d(1, 1) - d2(0, 1)) / hs,
                    std::abs(j.d(0, 1) - (4 * mixed(k / 2) - mixed(k)) / 3) / hs});
  }
  const bool ok = prec && roundtrip_fail == 0 && jet <= 1e-5;
  return {ok, fmt("precedence/errors %s, %d/1000 round-trip failures, max jet vs FD %.3g (<= 1e-5)",
                  prec ? "ok" : "WRONG", roundtrip_fail, jet)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tau-curve reproduction", tau_curve},
      {"degenerate maximal slice", degenerate_maximal_slice},
      {"strict-TCC time function", strict_tcc_time_function},
      {"TCC verification", tcc_verification},
      {"curvature oracles", curvature_oracles},
      {"operator consistency", operator_consistency},
      {"Harnack ratio", harnack},
      {"parser suite", parser_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
