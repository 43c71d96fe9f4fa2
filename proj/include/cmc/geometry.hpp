#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cmc/spacetime.hpp"

namespace cmc {

/// Rank-3 array indexed as T[a](b, c).
using Tensor3 = std::vector<Eigen::MatrixXd>;

struct SpacetimePoint {
  double x0 = 0.0;
  Eigen::VectorXd x;
};

/// Ambient metric ḡ_αβ = e^{2ψ}(−dx⁰² + σ_ij dx^i dx^j) at a point together
/// with its first and second partials and the Christoffel symbols.
struct MetricPointData {
  SpacetimePoint point;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Tensor3 dg;                // dg[c](a, b) = ∂_c ḡ_ab
  std::vector<Tensor3> d2g;  // d2g[c][d](a, b) = ∂_c ∂_d ḡ_ab
  Tensor3 gamma;             // gamma[a](b, c) = Γ̄^a_bc
  JetN psi;                  // conformal factor with its partials
  bool future_oriented = true;

  int dim() const { return static_cast<int>(g.rows()); }
};

MetricPointData eval_metric(const Spacetime& st, double x0, const Eigen::VectorXd& x);

/// Γ^a_bc = ½ g^{ad}(∂_b g_dc + ∂_c g_db − ∂_d g_bc), with the inverse
/// metric supplied. Generic in the scalar so that the same kernel serves the
/// ambient metric, induced metrics, and their linearizations.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> christoffels_from_inverse(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& g_inv,
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& dg) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto d = static_cast<Eigen::Index>(dg.size());
  std::vector<Mat> low(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (Eigen::Index e = 0; e < d; ++e)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index c = 0; c < d; ++c)
        low[e](b, c) = Scalar(0.5) * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
  std::vector<Mat> out(static_cast<std::size_t>(d), Mat::Zero(d, d));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index e = 0; e < d; ++e) out[a] += g_inv(a, e) * low[e];
  return out;
}

Tensor3 christoffels(const Eigen::MatrixXd& g, const Tensor3& dg);
Tensor3 christoffels(const MetricPointData& m);

/// dgamma[e][a](b, c) = ∂_e Γ̄^a_bc.
std::vector<Tensor3> christoffel_derivatives(const MetricPointData& m);

/// R_bd = ∂_a Γ^a_bd − ∂_d Γ^a_ab + Γ^a_ae Γ^e_bd − Γ^a_de Γ^e_ab.
Eigen::MatrixXd ricci_tensor(const MetricPointData& m);

/// Ricci of ḡ plus the ingredients of its conformal split ḡ = e^{2ψ} g with
/// the product metric g = −dx⁰² + σ_ij dx^i dx^j. Covariant derivatives and
/// norms of ψ are taken with respect to g (|Dψ|² may be negative).
struct RicciData {
  Eigen::MatrixXd ricci_bar;   // R̄_αβ
  Eigen::MatrixXd ricci;       // R_αβ of g
  Eigen::MatrixXd g;           // g_αβ
  Eigen::VectorXd dpsi;        // ψ_α
  Eigen::MatrixXd hess_psi;    // ψ_αβ (covariant in g)
  double laplace_psi = 0.0;    // Δψ
  double grad_psi_sq = 0.0;    // |Dψ|²
  int n = 0;
};

RicciData ricci(const Spacetime& st, double x0, const Eigen::VectorXd& x);

/// Max-norm of R̄ − [R − (n−1)(ψ_αβ − ψ_αψ_β) − g(Δψ + (n−1)|Dψ|²)].
double conformal_ricci_check(const RicciData& r);

struct TccSample {
  SpacetimePoint point;
  Eigen::VectorXd eta;  // contravariant components η^α
};

struct TccReport {
  double min_value = 0.0;
  std::optional<TccSample> argmin;
  std::size_t accepted = 0;
  std::size_t rejected = 0;  // samples that were not timelike
  bool strict = false;       // min_value > strict threshold
};

inline constexpr double kTccStrictThreshold = 1e-8;

/// Minimum of R̄_αβ η^α η^β over the timelike samples.
TccReport tcc_sample(const Spacetime& st, std::span<const TccSample> samples,
                     double strict_threshold = kTccStrictThreshold);

/// Seeded samples: times uniform in the interval shrunk by `margin` (relative),
/// spatial points uniform in the chart, η = (1, η^i) with σ_ij η^i η^j < 1
/// (uniform in the σ-unit ball).
std::vector<TccSample> random_tcc_samples(const Spacetime& st, std::size_t count, std::uint64_t seed,
                                          double margin = 1e-3);

/// True when ḡ(η, η) < 0 at the point.
bool is_timelike(const MetricPointData& m, const Eigen::VectorXd& eta);

}  // namespace cmc
