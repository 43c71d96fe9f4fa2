#include "cmc/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>

#include "cmc/families.hpp"
#include "cmc/foliation.hpp"
#include "cmc/geometry.hpp"

namespace cmc {
namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

/// t with n t³/(ε² − t²) = τ, by bisection.
double invert_tau(double tau, double eps, int n) {
  double lo = -eps * (1.0 - 1e-15), hi = eps * (1.0 - 1e-15);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    if (counterexample_tau(m, eps, n) < tau) lo = m;
    else hi = m;
  }
  return 0.5 * (lo + hi);
}

SelftestResult guarded(const std::string& name, const std::function<SelftestResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<SelftestResult> run_selftest(double epsilon, int n, std::size_t tcc_samples, unsigned long long seed) {
  FamilyParams p;
  p.epsilon = epsilon;
  p.n = n;
  const SpacetimePtr st = make_spec(p);
  const HomogeneousSliceModel model(st);
  std::vector<SelftestResult> out;

  std::optional<Foliation> fol;
  out.push_back(guarded("tau-curve", [&] {
    fol = sweep(model, -2.0, 2.0, 81);
    double worst = 0.0;
    for (const Leaf& l : fol->leaves) worst = std::max(worst, std::abs(l.u(0) - invert_tau(l.tau, epsilon, n)));
    const bool ok = fol->gaps.empty() && !fol->leaves.empty() && worst <= 1e-8;
    return SelftestResult{"tau-curve", ok, fmt("max |u - t(tau)| = %.3g over %.0f leaves", worst,
                                                  static_cast<double>(fol->leaves.size()))};
  }));

  out.push_back(guarded("degenerate-maximal-slice", [&] {
    if (!fol || fol->degenerate.empty()) return SelftestResult{"degenerate-maximal-slice", false, "no degenerate slice"};
    const DegenerateRecord& d = fol->degenerate.front();
    const TimeFunctionReport rep = build_time_function(*fol, *st);
    const double g0 = rep.grad_at_time(d.u.size() ? d.u(0) : 0.0);
    const double away = rep.min_grad_where_abs_tau_above(0.01);
    const bool ok = d.lambda_min <= 1e-6 && g0 <= 1e-6 && away >= 1e-3 &&
                    rep.verdict == Verdict::kDegenerateAtMaximalSlice;
    return SelftestResult{"degenerate-maximal-slice", ok,
                          fmt("lambda_min = %.3g, |Dtau|(0) = %.3g", d.lambda_min, g0) +
                              fmt(", min |Dtau| on |tau|>0.01 = %.3g, verdict ", away) + to_string(rep.verdict)};
  }));

  out.push_back(guarded("timelike-convergence", [&] {
    const std::vector<TccSample> samples = random_tcc_samples(*st, tcc_samples, seed);
    const TccReport rep = tcc_sample(*st, samples);
    double core = -1.0;
    for (int i = 0; i <= 1000; ++i) core = std::max(core, core_inequality(epsilon * 0.999 * (2.0 * i / 1000 - 1.0), epsilon));
    const bool ok = rep.accepted > 0 && rep.min_value >= -1e-10 && (epsilon > 1.0 || core <= 0.0);
    return SelftestResult{"timelike-convergence", ok, fmt("min Ric(eta, eta) = %.3g, max core inequality = %.3g",
                                                           rep.min_value, core)};
  }));

  out.push_back(guarded("curvature-closed-form", [&] {
    double worst = 0.0;
    for (double t : {-0.6 * epsilon, -0.2 * epsilon, 0.0, 0.3 * epsilon, 0.7 * epsilon}) {
      const Eigen::VectorXd x = st->reference_point();
      const RicciData r = ricci(*st, t, x);
      const WarpValue w = counterexample_warp(t, epsilon);
      const double e2 = std::exp(2.0 * w.f);
      const double r00 = -n * (w.d2f + w.df * w.df);
      const double scale = std::max(1.0, r.ricci_bar.cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(r.ricci_bar(0, 0) - r00) / scale);
      const std::vector<JetN> unit = unit_sphere_metric(x);
      for (int i = 0; i < n; ++i) {
        const double s = unit[static_cast<std::size_t>(i * n + i)].value;
        const double rij = (n - 1) * s + s * (w.d2f + n * w.df * w.df) * e2;
        worst = std::max(worst, std::abs(r.ricci_bar(i + 1, i + 1) - rij) / scale);
      }
      worst = std::max(worst, conformal_ricci_check(r));
    }
    return SelftestResult{"curvature-closed-form", worst <= 1e-6, fmt("max relative deviation %.3g", worst)};
  }));
  return out;
}

}  // namespace cmc
