#include "cmc/graph.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/AutoDiff>

#include "cmc/errors.hpp"

namespace cmc {
namespace {

using Dual = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

// Jacobian bandwidth: H_k reads g₁₁ at k±2, which reads u at k±4.
constexpr Eigen::Index kBand = 4;

/// Ambient quantities at (u_m, x_m) as functions of u_m, linearized about the
/// sample point. For plain doubles u_m equals the sample's u and this is exact.
template <typename S>
struct LocalAmbient {
  S psi, sigma, g000, g001, g011;
};

template <typename S>
LocalAmbient<S> lift(const AmbientSample& a, const S& u) {
  const S du = u - a.u;
  LocalAmbient<S> out;
  out.psi = a.psi + a.psi_t * du;
  out.sigma = a.sigma + a.sigma_t * du;
  out.g000 = a.gamma0(0) + a.gamma0_t(0) * du;
  out.g001 = a.gamma0(1) + a.gamma0_t(1) * du;
  out.g011 = a.gamma0(2) + a.gamma0_t(2) * du;
  return out;
}

/// Mean curvature (and h₁₁) in row k for the past-directed normal. `u_at(m)`
/// returns the height at grid index m (any integer; wrapping is done here).
template <typename S, typename UAt>
S mean_curvature_row(Eigen::Index k, const UAt& u_at, const std::vector<AmbientSample>& amb,
                     const PeriodicGrid& grid, S* h_out = nullptr) {
  using std::exp;
  using std::sqrt;
  const double dx = grid.spacing();
  auto u = [&](Eigen::Index m) -> S { return u_at(grid.wrap(m)); };
  auto ux = [&](Eigen::Index m) -> S {
    return (-u(m + 2) + 8.0 * u(m + 1) - 8.0 * u(m - 1) + u(m - 2)) / (12.0 * dx);
  };
  auto g11 = [&](Eigen::Index m) -> S {
    const Eigen::Index w = grid.wrap(m);
    const LocalAmbient<S> a = lift(amb[static_cast<std::size_t>(w)], u(m));
    const S p = ux(m);
    return exp(2.0 * a.psi) * (a.sigma - p * p);
  };

  const LocalAmbient<S> a = lift(amb[static_cast<std::size_t>(grid.wrap(k))], u(k));
  const S p = ux(k);
  const S uxx = (-u(k + 2) + 16.0 * u(k + 1) - 30.0 * u(k) + 16.0 * u(k - 1) - u(k - 2)) / (12.0 * dx * dx);
  const S gk = g11(k);
  const S gx = (-g11(k + 2) + 8.0 * g11(k + 1) - 8.0 * g11(k - 1) + g11(k - 2)) / (12.0 * dx);

  // induced Christoffel through the shared kernel
  using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  Mat ginv(1, 1);
  ginv(0, 0) = S(1.0) / gk;
  std::vector<Mat> dg(1, Mat(1, 1));
  dg[0](0, 0) = gx;
  const S gamma = christoffels_from_inverse<S>(ginv, dg)[0](0, 0);

  const S u11 = uxx - gamma * p;
  const S v = sqrt(S(1.0) - p * p / a.sigma);
  const S h = exp(a.psi) * v * (-u11 - a.g000 * p * p - 2.0 * a.g001 * p - a.g011);
  if (h_out) *h_out = h;
  return h / gk;
}

bool psi_vanishes(const std::vector<AmbientSample>& amb) {
  for (const AmbientSample& a : amb)
    if (a.psi != 0.0 || a.psi_t != 0.0 || a.psi_x != 0.0) return false;
  return true;
}

Eigen::VectorXd sigma_of(const std::vector<AmbientSample>& amb) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(amb.size()));
  for (std::size_t k = 0; k < amb.size(); ++k) s(static_cast<Eigen::Index>(k)) = amb[k].sigma;
  return s;
}

void require_circle(const Spacetime& st) {
  if (st.spatial_dim() != 1) throw ArgumentError("graph geometry on a grid needs a 1+1 spacetime");
}

void require_size(const PeriodicGrid& grid, const Eigen::VectorXd& u) {
  if (u.size() != grid.size()) throw ArgumentError("graph values do not match the grid size");
}

struct Evaluated {
  std::vector<AmbientSample> amb;
  Eigen::VectorXd du, v;
};

Evaluated evaluate_graph(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u, bool ricci) {
  require_circle(st);
  require_size(grid, u);
  Evaluated e;
  e.amb = sample_ambient(st, grid, u, ricci);
  e.du = grid.d1(u);
  e.v = lorentz_factor(e.du, sigma_of(e.amb));
  return e;
}

Eigen::VectorXd alt_sff(const PeriodicGrid& grid, const Eigen::VectorXd& u, const Evaluated& e) {
  const Eigen::VectorXd uxx = grid.d2(u);
  Eigen::VectorXd h(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const AmbientSample& a = e.amb[static_cast<std::size_t>(k)];
    const double p = e.du(k);
    const double v = e.v(k);
    const double gt = (a.sigma_t * p + a.sigma_x) / (2.0 * a.sigma);
    h(k) = -uxx(k) / v + gt * p / v - v * a.gamma0(2);
  }
  return h;
}

InducedMetric induced_from(const Evaluated& e) {
  const Eigen::Index n = e.du.size();
  InducedMetric out;
  out.g.resize(n);
  out.g_inv.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const AmbientSample& a = e.amb[static_cast<std::size_t>(k)];
    const double p = e.du(k);
    const double e2 = std::exp(2.0 * a.psi);
    const double up = p / a.sigma;  // u¹ = σ¹¹u₁
    out.g(k) = e2 * (a.sigma - p * p);
    out.g_inv(k) = (1.0 / a.sigma + up * up / (e.v(k) * e.v(k))) / e2;
  }
  return out;
}

}  // namespace

// --- PeriodicGrid

PeriodicGrid::PeriodicGrid(Eigen::Index size) : n_(size), h_(2.0 * std::numbers::pi / static_cast<double>(size)) {
  if (size < 16) throw ArgumentError("grid size must be >= 16");
}

Eigen::VectorXd PeriodicGrid::points() const {
  Eigen::VectorXd x(n_);
  for (Eigen::Index k = 0; k < n_; ++k) x(k) = this->x(k);
  return x;
}

Eigen::VectorXd PeriodicGrid::d1(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out(n_);
  for (Eigen::Index k = 0; k < n_; ++k)
    out(k) = (-f(wrap(k + 2)) + 8.0 * f(wrap(k + 1)) - 8.0 * f(wrap(k - 1)) + f(wrap(k - 2))) / (12.0 * h_);
  return out;
}

Eigen::VectorXd PeriodicGrid::d2(const Eigen::VectorXd& f) const {
  Eigen::VectorXd out(n_);
  for (Eigen::Index k = 0; k < n_; ++k)
    out(k) = (-f(wrap(k + 2)) + 16.0 * f(wrap(k + 1)) - 30.0 * f(k) + 16.0 * f(wrap(k - 1)) - f(wrap(k - 2))) /
             (12.0 * h_ * h_);
  return out;
}

// --- ambient sampling

std::vector<AmbientSample> sample_ambient(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                                          bool with_ricci) {
  require_circle(st);
  require_size(grid, u);
  std::vector<AmbientSample> out(static_cast<std::size_t>(u.size()));
  Eigen::VectorXd x(1);
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    x(0) = grid.x(k);
    const MetricPointData m = eval_metric(st, u(k), x);
    const ConformalFields f = st.fields(u(k), x);
    const std::vector<Tensor3> dgam = christoffel_derivatives(m);
    AmbientSample& a = out[static_cast<std::size_t>(k)];
    a.u = u(k);
    a.psi = f.psi.value;
    a.psi_t = f.psi.grad(0);
    a.psi_x = f.psi.grad(1);
    a.sigma = f.sigma[0].value;
    a.sigma_t = f.sigma[0].grad(0);
    a.sigma_x = f.sigma[0].grad(1);
    a.gamma0 << m.gamma[0](0, 0), m.gamma[0](0, 1), m.gamma[0](1, 1);
    a.gamma0_t << dgam[0][0](0, 0), dgam[0][0](0, 1), dgam[0][0](1, 1);
    if (with_ricci) a.ricci = ricci_tensor(m);
  }
  return out;
}

Eigen::VectorXd lorentz_factor(const Eigen::VectorXd& du, const Eigen::VectorXd& sigma) {
  Eigen::VectorXd v(du.size());
  double worst = -1.0;
  Eigen::Index worst_k = 0;
  for (Eigen::Index k = 0; k < du.size(); ++k) {
    const double q = du(k) * du(k) / sigma(k);
    if (!(q < 1.0) && (q > worst || std::isnan(q))) {
      worst = std::isnan(q) ? std::numeric_limits<double>::infinity() : q;
      worst_k = k;
    }
    v(k) = std::sqrt(1.0 - q);
  }
  if (worst >= 0.0) throw SpacelikeViolation(static_cast<std::size_t>(worst_k), worst);
  return v;
}

InducedMetric induced_metric(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u) {
  return induced_from(evaluate_graph(st, grid, u, false));
}

namespace {

Normals normals_from(const Evaluated& e, Orientation orientation) {
  const Eigen::Index n = e.du.size();
  Normals out;
  out.up.resize(n, 2);
  out.down.resize(n, 2);
  const double sign = orientation == Orientation::kPast ? 1.0 : -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const AmbientSample& a = e.amb[static_cast<std::size_t>(k)];
    const double p = e.du(k);
    const double s = sign / (e.v(k) * std::exp(a.psi));
    out.up(k, 0) = -s;
    out.up(k, 1) = -s * p / a.sigma;
    const double e2 = std::exp(2.0 * a.psi);
    out.down(k, 0) = e2 * s;  // ḡ₀₀ν⁰
    out.down(k, 1) = -e2 * s * p;
  }
  return out;
}

SecondFundamentalForm sff_from(const PeriodicGrid& grid, const Eigen::VectorXd& u, const Evaluated& e,
                               Orientation orientation) {
  const Eigen::Index n = u.size();
  SecondFundamentalForm out;
  out.h.resize(n);
  out.H.resize(n);
  out.A2.resize(n);
  auto u_at = [&u](Eigen::Index m) { return u(m); };
  const double sign = orientation == Orientation::kPast ? 1.0 : -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double h = 0.0;
    const double H = mean_curvature_row<double>(k, u_at, e.amb, grid, &h);
    out.h(k) = sign * h;
    out.H(k) = sign * H;
    out.A2(k) = H * H;  // n = 1: h₁₁h¹¹ = (g¹¹h₁₁)²
  }
  if (psi_vanishes(e.amb)) {
    Eigen::VectorXd alt = sign * alt_sff(grid, u, e);
    out.discrepancy = (alt - out.h).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, out.h.cwiseAbs().maxCoeff());
    const double dx = grid.spacing();
    if (out.discrepancy > 10.0 * dx * dx * scale)
      throw ConsistencyError("second fundamental form: graph and coordinate evaluations disagree");
    out.h_alt = std::move(alt);
  }
  return out;
}

}  // namespace

Normals normals(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u, Orientation orientation) {
  return normals_from(evaluate_graph(st, grid, u, false), orientation);
}

SecondFundamentalForm second_fundamental_form(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                                              Orientation orientation) {
  return sff_from(grid, u, evaluate_graph(st, grid, u, false), orientation);
}

Eigen::VectorXd second_fundamental_form_alt(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u) {
  const Evaluated e = evaluate_graph(st, grid, u, false);
  if (!psi_vanishes(e.amb)) throw ArgumentError("the coordinate form of h needs psi = 0");
  return alt_sff(grid, u, e);
}

GraphGeometry graph_geometry(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                             Orientation orientation) {
  const Evaluated e = evaluate_graph(st, grid, u, true);
  GraphGeometry geo;
  geo.u = u;
  geo.du = e.du;
  geo.v = e.v;
  geo.orientation = orientation;
  const InducedMetric im = induced_from(e);
  geo.g = im.g;
  geo.g_inv = im.g_inv;
  geo.nu = normals_from(e, orientation);
  SecondFundamentalForm sff = sff_from(grid, u, e, orientation);
  geo.h = std::move(sff.h);
  geo.H = std::move(sff.H);
  geo.A2 = std::move(sff.A2);
  geo.lapse.resize(u.size());
  geo.ricci_nu.resize(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const AmbientSample& a = e.amb[static_cast<std::size_t>(k)];
    geo.lapse(k) = std::exp(a.psi) * e.v(k);
    const Eigen::Vector2d nu = geo.nu.up.row(k).transpose();
    geo.ricci_nu(k) = nu.dot(a.ricci * nu);
  }
  geo.ambient = e.amb;
  return geo;
}

Eigen::VectorXd mean_curvature(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u) {
  const Evaluated e = evaluate_graph(st, grid, u, false);
  Eigen::VectorXd H(u.size());
  auto u_at = [&u](Eigen::Index m) { return u(m); };
  for (Eigen::Index k = 0; k < u.size(); ++k) H(k) = mean_curvature_row<double>(k, u_at, e.amb, grid);
  return H;
}

Eigen::SparseMatrix<double> mean_curvature_jacobian(const Spacetime& st, const PeriodicGrid& grid,
                                                    const Eigen::VectorXd& u) {
  const Evaluated e = evaluate_graph(st, grid, u, false);
  const Eigen::Index n = u.size();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n * (2 * kBand + 1)));
  for (Eigen::Index j = 0; j < n; ++j) {
    // directional derivative along e_j, restricted to the rows it can reach
    auto u_at = [&u, j](Eigen::Index m) {
      Dual d(u(m), Eigen::Matrix<double, 1, 1>::Zero());
      if (m == j) d.derivatives()(0) = 1.0;
      return d;
    };
    for (Eigen::Index r = -kBand; r <= kBand; ++r) {
      const Eigen::Index k = grid.wrap(j + r);
      const Dual H = mean_curvature_row<Dual>(k, u_at, e.amb, grid);
      const double dH = H.derivatives()(0);
      if (dH != 0.0) entries.emplace_back(k, j, dH);
    }
  }
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(entries.begin(), entries.end());
  return J;
}

// --- coordinate slices

Eigen::MatrixXd coordinate_slice_sff(const Spacetime& st, double t, const Eigen::VectorXd& x) {
  st.require_time(t);
  const int n = st.spatial_dim();
  if (x.size() != n) throw ArgumentError("spatial point has wrong dimension");
  const ConformalFields f = st.fields(t, x);
  const double e = std::exp(f.psi.value);
  const double psi_t = f.psi.grad(0);
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const JetN& s = f.sigma_at(i, j, n);
      h(i, j) = -e * (0.5 * s.grad(0) + psi_t * s.value);
    }
  return h;
}

HomogeneousGeometry homogeneous_geometry(const Spacetime& st, double t) {
  if (!st.homogeneous_slices()) throw ArgumentError("spacetime does not have homogeneous coordinate slices");
  const int n = st.spatial_dim();
  const Eigen::VectorXd x = st.reference_point();
  const MetricPointData m = eval_metric(st, t, x);
  const std::vector<Tensor3> dgam = christoffel_derivatives(m);
  const ConformalFields f = st.fields(t, x);

  Eigen::MatrixXd sigma(n, n), sigma_t(n, n), gam(n, n), gam_t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      sigma(i, j) = f.sigma_at(i, j, n).value;
      sigma_t(i, j) = f.sigma_at(i, j, n).grad(0);
      gam(i, j) = m.gamma[0](i + 1, j + 1);
      gam_t(i, j) = dgam[0][0](i + 1, j + 1);
    }
  const double psi = f.psi.value;
  const double psi_t = f.psi.grad(0);
  const double e = std::exp(psi);
  const Eigen::MatrixXd sigma_inv = sigma.inverse();

  HomogeneousGeometry out;
  out.t = t;
  out.g = e * e * sigma;
  out.g_inv = sigma_inv / (e * e);
  out.h = -e * gam;
  const Eigen::MatrixXd shape = out.g_inv * out.h;
  out.H = shape.trace();
  out.A2 = (shape * shape).trace();
  // H = −e^{−ψ}σ^{ij}Γ̄⁰_ij
  const Eigen::MatrixXd dsigma_inv = -sigma_inv * sigma_t * sigma_inv;
  out.dH_dt = (psi_t * (sigma_inv.cwiseProduct(gam)).sum() - (dsigma_inv.cwiseProduct(gam)).sum() -
               (sigma_inv.cwiseProduct(gam_t)).sum()) /
              e;
  out.nu = Eigen::VectorXd::Zero(n + 1);
  out.nu(0) = -1.0 / e;
  out.ricci_nu = out.nu.dot(ricci_tensor(m) * out.nu);
  out.lapse = e;
  const std::vector<JetN> unit = unit_sphere_metric(x);
  out.radius_sq = out.g(0, 0) / unit[0].value;
  return out;
}

}  // namespace cmc
