#include "cmc/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cmc/errors.hpp"

namespace cmc {
namespace {

Tensor3 zero_tensor3(int d) { return Tensor3(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(d, d)); }

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& g) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw InvalidMetricError("metric is singular");
  return lu.inverse();
}

/// Assembles ḡ = e^{2ψ}(−dx⁰² + σ) and its partials from the conformal fields.
MetricPointData assemble(const ConformalFields& f, int n, double x0, const Eigen::VectorXd& x) {
  const int d = n + 1;
  Eigen::MatrixXd sigma(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sigma(i, j) = f.sigma_at(i, j, n).value;
  if (!sigma.allFinite() || Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success)
    throw InvalidMetricError("spatial metric sigma is not positive definite");

  const JetN e2 = exp(2.0 * f.psi);
  std::vector<JetN> jets(static_cast<std::size_t>(d * d), JetN::constant(0.0, d));
  jets[0] = -e2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jets[static_cast<std::size_t>((i + 1) * d + (j + 1))] = e2 * f.sigma_at(i, j, n);

  MetricPointData m;
  m.point = {x0, x};
  m.g.resize(d, d);
  m.dg = zero_tensor3(d);
  m.d2g.assign(static_cast<std::size_t>(d), zero_tensor3(d));
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const JetN& j = jets[static_cast<std::size_t>(a * d + b)];
      m.g(a, b) = j.value;
      for (int c = 0; c < d; ++c) {
        m.dg[c](a, b) = j.grad(c);
        for (int e = 0; e < d; ++e) m.d2g[c][e](a, b) = j.hess(c, e);
      }
    }
  }
  m.g_inv = checked_inverse(m.g);
  m.gamma = christoffels(m.g, m.dg);
  m.psi = f.psi;
  return m;
}

/// Γ_dbc = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
Tensor3 first_kind(const Tensor3& dg) {
  const int d = static_cast<int>(dg.size());
  Tensor3 out = zero_tensor3(d);
  for (int e = 0; e < d; ++e)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) out[e](b, c) = 0.5 * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
  return out;
}

Tensor3 raise_first(const Eigen::MatrixXd& g_inv, const Tensor3& low) {
  const int d = static_cast<int>(low.size());
  Tensor3 out = zero_tensor3(d);
  for (int a = 0; a < d; ++a)
    for (int e = 0; e < d; ++e) {
      if (g_inv(a, e) == 0.0) continue;
      out[a] += g_inv(a, e) * low[e];
    }
  return out;
}

}  // namespace

MetricPointData eval_metric(const Spacetime& st, double x0, const Eigen::VectorXd& x) {
  st.require_time(x0);
  const int n = st.spatial_dim();
  if (x.size() != n) throw ArgumentError("spatial point has wrong dimension");
  return assemble(st.fields(x0, x), n, x0, x);
}

Tensor3 christoffels(const Eigen::MatrixXd& g, const Tensor3& dg) {
  return christoffels_from_inverse<double>(checked_inverse(g), dg);
}

Tensor3 christoffels(const MetricPointData& m) { return christoffels_from_inverse<double>(m.g_inv, m.dg); }

std::vector<Tensor3> christoffel_derivatives(const MetricPointData& m) {
  const int d = m.dim();
  const Tensor3 low = first_kind(m.dg);
  std::vector<Tensor3> out;
  out.reserve(static_cast<std::size_t>(d));
  for (int e = 0; e < d; ++e) {
    const Eigen::MatrixXd dginv = -m.g_inv * m.dg[e] * m.g_inv;
    const Tensor3 dlow = first_kind(m.d2g[e]);
    Tensor3 de = raise_first(m.g_inv, dlow);
    const Tensor3 extra = raise_first(dginv, low);
    for (int a = 0; a < d; ++a) de[a] += extra[a];
    out.push_back(std::move(de));
  }
  return out;
}

Eigen::MatrixXd ricci_tensor(const MetricPointData& m) {
  const int d = m.dim();
  const std::vector<Tensor3> dgam = christoffel_derivatives(m);
  const Tensor3& G = m.gamma;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd trace(d);  // Γ^a_ae
  for (int e = 0; e < d; ++e) {
    trace(e) = 0.0;
    for (int a = 0; a < d; ++a) trace(e) += G[a](a, e);
  }
  for (int b = 0; b < d; ++b) {
    for (int c = 0; c < d; ++c) {
      double r = 0.0;
      for (int a = 0; a < d; ++a) {
        r += dgam[a][a](b, c) - dgam[c][a](a, b);
        for (int e = 0; e < d; ++e) r -= G[a](c, e) * G[e](a, b);
      }
      for (int e = 0; e < d; ++e) r += trace(e) * G[e](b, c);
      R(b, c) = r;
    }
  }
  return R;
}

RicciData ricci(const Spacetime& st, double x0, const Eigen::VectorXd& x) {
  st.require_time(x0);
  const int n = st.spatial_dim();
  const ConformalFields f = st.fields(x0, x);
  const MetricPointData full = assemble(f, n, x0, x);

  ConformalFields product = f;
  product.psi = JetN::constant(0.0, n + 1);
  const MetricPointData prod = assemble(product, n, x0, x);

  RicciData r;
  r.n = n;
  r.ricci_bar = ricci_tensor(full);
  r.ricci = ricci_tensor(prod);
  r.g = prod.g;
  r.dpsi = f.psi.grad;
  r.hess_psi = f.psi.hess;
  for (int c = 0; c <= n; ++c) r.hess_psi -= r.dpsi(c) * prod.gamma[c];
  r.laplace_psi = (prod.g_inv.cwiseProduct(r.hess_psi)).sum();
  r.grad_psi_sq = r.dpsi.dot(prod.g_inv * r.dpsi);
  return r;
}

double conformal_ricci_check(const RicciData& r) {
  const double k = r.n - 1;
  const Eigen::MatrixXd predicted = r.ricci - k * (r.hess_psi - r.dpsi * r.dpsi.transpose()) -
                                    r.g * (r.laplace_psi + k * r.grad_psi_sq);
  return (r.ricci_bar - predicted).cwiseAbs().maxCoeff();
}

bool is_timelike(const MetricPointData& m, const Eigen::VectorXd& eta) { return eta.dot(m.g * eta) < 0.0; }

TccReport tcc_sample(const Spacetime& st, std::span<const TccSample> samples, double strict_threshold) {
  TccReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (const TccSample& s : samples) {
    const MetricPointData m = eval_metric(st, s.point.x0, s.point.x);
    if (!is_timelike(m, s.eta)) {
      ++rep.rejected;
      continue;
    }
    ++rep.accepted;
    const double q = s.eta.dot(ricci_tensor(m) * s.eta);
    if (q < rep.min_value) {
      rep.min_value = q;
      rep.argmin = s;
    }
  }
  rep.strict = rep.accepted > 0 && rep.min_value > strict_threshold;
  return rep;
}

std::vector<TccSample> random_tcc_samples(const Spacetime& st, std::size_t count, std::uint64_t seed,
                                          double margin) {
  const int n = st.spatial_dim();
  const Interval I = st.interval();
  const double pad = margin * I.width();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(I.lo + pad, I.hi - pad);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<TccSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    TccSample s;
    s.point.x0 = time(rng);
    s.point.x.resize(n);
    if (n == 1) {
      s.point.x(0) = 2.0 * std::numbers::pi * unit(rng);
    } else {
      for (int i = 0; i < n; ++i) s.point.x(i) = 4.0 * unit(rng) - 2.0;
    }
    const ConformalFields f = st.fields(s.point.x0, s.point.x);
    Eigen::MatrixXd sigma(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sigma(i, j) = f.sigma_at(i, j, n).value;

    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = normal(rng);
    const double norm = z.norm();
    const double radius = std::pow(unit(rng), 1.0 / n);
    z *= norm > 0.0 ? radius / norm : 0.0;
    // σ = L Lᵀ, η_s = L⁻ᵀ z has σ(η_s, η_s) = |z|² < 1
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
    s.eta.resize(n + 1);
    s.eta(0) = 1.0;
    s.eta.tail(n) = L.transpose().triangularView<Eigen::Upper>().solve(z);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cmc
