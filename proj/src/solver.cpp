#include "cmc/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SparseLU>

#include "cmc/errors.hpp"

namespace cmc {
namespace {

double sup_norm(const Eigen::VectorXd& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

std::optional<Eigen::VectorXd> sparse_solve(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& b) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(J);
  lu.factorize(J);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace

// --- models

GridSliceModel::GridSliceModel(SpacetimePtr st, Eigen::Index grid_size) : st_(std::move(st)), grid_(grid_size) {
  if (!st_) throw ArgumentError("null spacetime");
  if (st_->spatial_dim() != 1) throw ArgumentError("grid slices need n = 1");
}

Eigen::VectorXd GridSliceModel::mean_curvature(const Eigen::VectorXd& u) const {
  return cmc::mean_curvature(*st_, grid_, u);
}

Eigen::SparseMatrix<double> GridSliceModel::jacobian(const Eigen::VectorXd& u) const {
  return mean_curvature_jacobian(*st_, grid_, u);
}

StabilityOperator GridSliceModel::stability(const Eigen::VectorXd& u, double degeneracy_factor) const {
  return assemble_stability_operator(graph_geometry(*st_, grid_, u), grid_, degeneracy_factor);
}

HomogeneousSliceModel::HomogeneousSliceModel(SpacetimePtr st) : st_(std::move(st)) {
  if (!st_) throw ArgumentError("null spacetime");
  if (!st_->homogeneous_slices()) throw ArgumentError("spacetime does not have homogeneous coordinate slices");
}

Eigen::VectorXd HomogeneousSliceModel::mean_curvature(const Eigen::VectorXd& u) const {
  if (u.size() != 1) throw ArgumentError("homogeneous slices have one unknown");
  return Eigen::VectorXd::Constant(1, homogeneous_geometry(*st_, u(0)).H);
}

Eigen::SparseMatrix<double> HomogeneousSliceModel::jacobian(const Eigen::VectorXd& u) const {
  if (u.size() != 1) throw ArgumentError("homogeneous slices have one unknown");
  Eigen::SparseMatrix<double> J(1, 1);
  J.insert(0, 0) = homogeneous_geometry(*st_, u(0)).dH_dt;
  return J;
}

StabilityOperator HomogeneousSliceModel::stability(const Eigen::VectorXd& u, double degeneracy_factor) const {
  if (u.size() != 1) throw ArgumentError("homogeneous slices have one unknown");
  return assemble_stability_operator(homogeneous_geometry(*st_, u(0)), st_->spatial_dim(), degeneracy_factor);
}

std::unique_ptr<SliceModel> make_slice_model(SpacetimePtr st, Eigen::Index grid_size, ModelKind kind) {
  if (!st) throw ArgumentError("null spacetime");
  if (kind == ModelKind::kAuto) kind = st->spatial_dim() == 1 ? ModelKind::kGrid : ModelKind::kHomogeneous;
  if (kind == ModelKind::kGrid) return std::make_unique<GridSliceModel>(std::move(st), grid_size);
  return std::make_unique<HomogeneousSliceModel>(std::move(st));
}

// --- Newton

SliceGraph newton_solve(const SliceModel& model, double tau, const Eigen::VectorXd& u0, const NewtonOptions& options) {
  if (!std::isfinite(tau)) throw ArgumentError("target mean curvature must be finite");
  if (u0.size() != model.size()) throw ArgumentError("initial guess has wrong size");
  const double tol = options.tol > 0.0 ? options.tol : model.default_tolerance();

  SliceGraph out;
  out.tau = tau;
  NewtonReport& rep = out.report;
  Eigen::VectorXd u = u0;
  Eigen::VectorXd r = model.mean_curvature(u).array() - tau;
  double res = sup_norm(r);
  rep.residual_history.push_back(res);

  bool converged = false;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    if (res == 0.0) {
      converged = true;
      break;
    }
    if (res <= tol && last_step <= options.step_tol) {
      converged = true;
      break;
    }
    const std::optional<Eigen::VectorXd> delta = sparse_solve(model.jacobian(u), -r);
    if (!delta) {
      converged = res <= tol;
      break;
    }
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd u_next, r_next;
    double res_next = 0.0;
    for (int k = 0; k <= options.max_halvings; ++k, alpha *= 0.5) {
      u_next = u + alpha * *delta;
      try {
        r_next = model.mean_curvature(u_next).array() - tau;
      } catch (const SpacelikeViolation&) {
        continue;
      } catch (const DomainError&) {
        continue;
      }
      res_next = sup_norm(r_next);
      if (std::isfinite(res_next) && res_next <= (1.0 - 1e-4 * alpha) * res) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // no further decrease possible: either polished to round-off or stuck
      converged = res <= tol;
      break;
    }
    rep.min_damping = std::min(rep.min_damping, alpha);
    last_step = alpha * sup_norm(*delta);
    u = std::move(u_next);
    r = std::move(r_next);
    res = res_next;
    rep.residual_history.push_back(res);
    rep.iterations = it + 1;
  }
  if (!converged && res <= tol && last_step <= options.step_tol) converged = true;

  rep.final_residual = res;
  rep.converged = converged;
  out.u = u;
  out.residual = res;
  out.converged = converged;

  std::optional<StabilityOperator> stab;
  try {
    stab = model.stability(u, options.degeneracy_factor);
  } catch (const Error&) {
    if (converged) throw;
  }
  if (stab) {
    rep.lambda_min = stab->lambda_min;
    rep.degenerate = stab->degenerate;
  }
  if (!converged) {
    std::ostringstream os;
    os.precision(17);
    if (stab && stab->degenerate) {
      os << "degenerate slice near tau = " << tau << " (lambda_min = " << stab->lambda_min << ")";
      throw DegenerateSliceError(os.str(), stab->lambda_min);
    }
    os << "Newton iteration for tau = " << tau << " did not converge (residual " << res << " after "
       << rep.iterations << " iterations)";
    throw NonConvergenceError(os.str(), rep.residual_history);
  }
  return out;
}

SliceVelocity slice_velocity(const SliceModel& model, const SliceGraph& slice, double degeneracy_factor) {
  const StabilityOperator stab = model.stability(slice.u, degeneracy_factor);
  if (stab.degenerate) {
    std::ostringstream os;
    os.precision(17);
    os << "slice velocity undefined: degenerate slice at tau = " << slice.tau << " (lambda_min = " << stab.lambda_min
       << ")";
    throw DegenerateSliceError(os.str(), stab.lambda_min);
  }
  const std::optional<Eigen::VectorXd> udot = sparse_solve(model.jacobian(slice.u), Eigen::VectorXd::Ones(model.size()));
  if (!udot) throw DegenerateSliceError("slice velocity undefined: singular Jacobian", stab.lambda_min);
  SliceVelocity out;
  out.udot = *udot;
  out.min = out.udot.minCoeff();
  out.max = out.udot.maxCoeff();
  out.positive = out.min > kVelocityPositivity;
  return out;
}

HarnackResult harnack_check(const SliceGraph& a, const SliceGraph& b) {
  if (a.u.size() != b.u.size()) throw ArgumentError("slices live on different grids");
  HarnackResult out;
  out.inf_gap = (a.u - b.u).cwiseAbs().minCoeff();
  const double dtau = std::abs(a.tau - b.tau);
  if (dtau == 0.0) return out;
  if (out.inf_gap == 0.0) {
    out.violation = true;
    out.ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  out.ratio = dtau / out.inf_gap;
  return out;
}

}  // namespace cmc
