#include <doctest.h>

#include <cmath>
#include <random>

#include "cmc/families.hpp"
#include "cmc/foliation.hpp"
#include "cmc/solver.hpp"
#include "cmc/stability.hpp"
#include "oracles.hpp"

namespace {

cmc::SpacetimePtr counterexample(int n) {
  cmc::FamilyParams p;
  p.n = n;
  return cmc::make_spec(p);
}

cmc::SpacetimePtr strict_tcc() {
  cmc::FamilyParams p;
  p.family = "expression";
  p.psi = "0.05*sin(x)";
  p.sigma = "exp(-t^2)";
  p.interval = cmc::Interval{-0.5, 0.5};
  return cmc::make_spec(p);
}

}  // namespace

TEST_CASE("stability operator is self-adjoint for random smooth data") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto st = strict_tcc();
  const cmc::PeriodicGrid grid(96);
  for (int trial = 0; trial < 20; ++trial) {
    const double a1 = 0.08 * U(rng), a2 = 0.03 * U(rng), c0 = 0.2 * U(rng);
    Eigen::VectorXd u(96), phi(96), chi(96);
    const double p1 = U(rng), p2 = U(rng), p3 = U(rng), p4 = U(rng);
    for (int k = 0; k < 96; ++k) {
      const double x = grid.x(k);
      u(k) = c0 + a1 * std::sin(x + p1) + a2 * std::cos(3 * x + p2);
      phi(k) = std::sin(2 * x + p3) + U(rng);
      chi(k) = std::cos(x + p4) + U(rng);
    }
    const cmc::StabilityOperator L = cmc::assemble_stability_operator(cmc::graph_geometry(*st, grid, u), grid);
    const double lhs = (L.matrix * phi).cwiseProduct(L.weight).dot(chi);
    const double rhs = phi.cwiseProduct(L.weight).dot(L.matrix * chi);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
  }
}

TEST_CASE("the discrete Laplacian has only constants in its kernel") {
  const auto st = counterexample(1);
  const cmc::GridSliceModel model(st, 64);
  const double t = 0.3;
  const cmc::StabilityOperator L = model.stability(model.constant(t));
  Eigen::VectorXd checker(64);
  for (int k = 0; k < 64; ++k) checker(k) = k % 2 ? -1.0 : 1.0;
  const double rq = checker.dot(L.weight.cwiseProduct(L.matrix * checker)) / checker.dot(L.weight.cwiseProduct(checker));
  CHECK(rq > L.c(0) + 100.0);
  CHECK(L.lambda_min == doctest::Approx(L.c(0)).epsilon(1e-10));
}

TEST_CASE("Jacobian gradient check on random smooth directions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const cmc::GridSliceModel model(strict_tcc(), 64);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd u(64), w(64);
    const double a = 0.1 * U(rng), b = U(rng), c = U(rng);
    for (int k = 0; k < 64; ++k) {
      const double x = model.grid().x(k);
      u(k) = 0.05 + a * std::sin(x);
      w(k) = std::sin(2 * x + b) + 0.5 * std::cos(3 * x + c);
    }
    const Eigen::VectorXd Jw = model.jacobian(u) * w;
    const Eigen::VectorXd H0 = model.mean_curvature(u);
    const double e1 = ((model.mean_curvature(u + 1e-3 * w) - H0) / 1e-3 - Jw).cwiseAbs().maxCoeff();
    const double e2 = ((model.mean_curvature(u + 5e-4 * w) - H0) / 5e-4 - Jw).cwiseAbs().maxCoeff();
    CHECK(e2 < e1);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("counterexample velocity equals the closed form 1/c(t)") {
  const double eps = 0.8, t = 0.4;
  for (int n : {1, 2, 3}) {
    const cmc::HomogeneousSliceModel model(counterexample(n));
    const double tau = cmc::counterexample_tau(t, eps, n);
    const cmc::SliceGraph s = cmc::newton_solve(model, tau, model.constant(0.35));
    const double expected = std::pow(eps * eps - t * t, 2) / (n * (3 * t * t * eps * eps - t * t * t * t));
    CHECK(cmc::slice_velocity(model, s).udot(0) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("Harnack ratio between two homogeneous leaves") {
  const cmc::HomogeneousSliceModel model(counterexample(2));
  const double ta = 0.3, tb = 0.35;
  const double tau_a = cmc::counterexample_tau(ta, 0.8, 2), tau_b = cmc::counterexample_tau(tb, 0.8, 2);
  const cmc::SliceGraph a = cmc::newton_solve(model, tau_a, model.constant(ta));
  const cmc::SliceGraph b = cmc::newton_solve(model, tau_b, model.constant(tb));
  CHECK(cmc::harnack_check(a, b).ratio == doctest::Approx((tau_b - tau_a) / 0.05).epsilon(1e-9));
}

TEST_CASE("strict-TCC leaves: velocity against adjacent-leaf differences") {
  const auto st = strict_tcc();
  const cmc::GridSliceModel model(st, 128);
  const cmc::Foliation fol = cmc::sweep(model, -0.2, 0.2, 21);
  REQUIRE(fol.leaves.size() == 21);
  for (std::size_t i = 1; i + 1 < fol.leaves.size(); ++i) {
    const auto &a = fol.leaves[i - 1], &b = fol.leaves[i], &c = fol.leaves[i + 1];
    const Eigen::VectorXd fd = (c.u - a.u) / (c.tau - a.tau);
    CHECK(((fd - b.udot).array().abs() / b.udot.array()).maxCoeff() <= 1e-4);
  }
  // monotone foliation and no degeneracy on a strict-TCC spacetime
  for (std::size_t i = 1; i < fol.leaves.size(); ++i)
    CHECK((fol.leaves[i].u - fol.leaves[i - 1].u).minCoeff() >= 0.0);
  for (const cmc::Leaf& l : fol.leaves) CHECK(l.lambda_min > 0.0);
  const cmc::PhiSummary phi = cmc::phi_determinant(fol);
  CHECK(phi.diffeomorphism);
}

TEST_CASE("reconstructed tau of the counterexample matches the slice curve") {
  const auto st = counterexample(1);
  const cmc::GridSliceModel model(st, 32);
  // Hermite error scales like Δt⁴ and Δt ~ Δτ^{1/3} near the cubic point τ ∝ t³,
  // so pointwise 1e−6 agreement needs Δτ ≈ 6e−3
  const cmc::Foliation fol = cmc::sweep(model, -2.0, 2.0, 641);
  const cmc::TimeFunctionReport rep = cmc::build_time_function(fol, *st);
  double spread = 0.0, worst = 0.0;
  for (Eigen::Index i = 0; i < rep.tau.rows(); ++i) {
    const double t = rep.times[static_cast<std::size_t>(i)];
    spread = std::max(spread, rep.tau.row(i).maxCoeff() - rep.tau.row(i).minCoeff());
    worst = std::max(worst, (rep.tau.row(i).array() - cmc::counterexample_tau(t, 0.8, 1)).abs().maxCoeff());
    if (i > 0) CHECK((rep.tau.row(i) - rep.tau.row(i - 1)).minCoeff() >= 0.0);
  }
  MESSAGE("x-spread " << spread << ", deviation from tau(t) " << worst);
  CHECK(spread <= 1e-8);
  CHECK(worst <= 1e-6);
  CHECK(rep.verdict == cmc::Verdict::kDegenerateAtMaximalSlice);
}

TEST_CASE("verdicts are stable under doubling the sweep resolution") {
  const auto ce = counterexample(2);
  const cmc::HomogeneousSliceModel hm(ce);
  CHECK(cmc::build_time_function(cmc::sweep(hm, -2.0, 2.0, 41), *ce).verdict ==
        cmc::build_time_function(cmc::sweep(hm, -2.0, 2.0, 81), *ce).verdict);
  const auto st = strict_tcc();
  const cmc::GridSliceModel gm(st, 64);
  CHECK(cmc::build_time_function(cmc::sweep(gm, -0.3, 0.3, 11), *st).verdict ==
        cmc::build_time_function(cmc::sweep(gm, -0.3, 0.3, 21), *st).verdict);
}
