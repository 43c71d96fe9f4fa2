#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cmc/geometry.hpp"
#include "cmc/spacetime.hpp"

namespace cmc {

/// Uniform periodic grid x_k = k·2π/N on the circle.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(Eigen::Index size);

  Eigen::Index size() const { return n_; }
  double spacing() const { return h_; }
  double x(Eigen::Index k) const { return static_cast<double>(k) * h_; }
  Eigen::VectorXd points() const;
  Eigen::Index wrap(Eigen::Index k) const { return ((k % n_) + n_) % n_; }

  /// Fourth-order central differences.
  Eigen::VectorXd d1(const Eigen::VectorXd& f) const;
  Eigen::VectorXd d2(const Eigen::VectorXd& f) const;

 private:
  Eigen::Index n_;
  double h_;
};

enum class Orientation { kPast, kFuture };

/// Ambient data at the graph point (u_k, x_k) of an n = 1 spacetime.
struct AmbientSample {
  double u = 0.0;  // x⁰ at which the sample was taken
  double psi = 0.0, psi_t = 0.0, psi_x = 0.0;
  double sigma = 0.0, sigma_t = 0.0, sigma_x = 0.0;
  Eigen::Vector3d gamma0;    // Γ̄⁰₀₀, Γ̄⁰₀₁, Γ̄⁰₁₁
  Eigen::Vector3d gamma0_t;  // their x⁰-derivatives
  Eigen::Matrix2d ricci = Eigen::Matrix2d::Zero();
};

std::vector<AmbientSample> sample_ambient(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                                          bool with_ricci = false);

/// v = sqrt(1 − σ^{ij}u_iu_j) pointwise; n = 1 so σ^{11} = 1/σ.
Eigen::VectorXd lorentz_factor(const Eigen::VectorXd& du, const Eigen::VectorXd& sigma);

struct InducedMetric {
  Eigen::VectorXd g;      // g₁₁ = e^{2ψ}(σ − u_x²)
  Eigen::VectorXd g_inv;  // g¹¹ = e^{−2ψ}(σ⁻¹ + σ⁻²u_x²/v²)
};

InducedMetric induced_metric(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u);

/// Unit normal, rows indexed by grid point; columns are the α = 0, 1 components.
struct Normals {
  Eigen::MatrixX2d up;    // ν^α
  Eigen::MatrixX2d down;  // ν_α
};

Normals normals(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                Orientation orientation = Orientation::kPast);

struct SecondFundamentalForm {
  Eigen::VectorXd h;    // h₁₁
  Eigen::VectorXd H;    // g¹¹h₁₁
  Eigen::VectorXd A2;   // h₁₁h¹¹
  std::optional<Eigen::VectorXd> h_alt;  // independent evaluation (ψ ≡ 0 only)
  double discrepancy = 0.0;              // max |h − h_alt|
};

/// h_ij from the graph form e^{−ψ}v⁻¹h_ij = −u_ij − Γ̄⁰₀₀u_iu_j − Γ̄⁰₀ⱼu_i − Γ̄⁰₀ᵢu_j − Γ̄⁰_ij
/// with u_ij covariant in the induced metric. When ψ ≡ 0 the value is checked
/// against h = −u_xx/v + Γ̃u_x/v − vΓ̄⁰₁₁ (Γ̃ built from σ(u(x), x)); a
/// disagreement beyond 10·Δx²·max(1, |h|) raises ConsistencyError.
SecondFundamentalForm second_fundamental_form(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                                              Orientation orientation = Orientation::kPast);

/// Only the ψ ≡ 0 path; throws ArgumentError when ψ does not vanish.
Eigen::VectorXd second_fundamental_form_alt(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u);

/// Everything at once, for a spacelike graph over an n = 1 spacetime.
struct GraphGeometry {
  Eigen::VectorXd u, du;
  Eigen::VectorXd v;
  Eigen::VectorXd g, g_inv;
  Normals nu;
  Eigen::VectorXd h, H, A2;
  Eigen::VectorXd lapse;     // e^{ψ}v
  Eigen::VectorXd ricci_nu;  // R̄_αβν^αν^β
  std::vector<AmbientSample> ambient;
  Orientation orientation = Orientation::kPast;
};

GraphGeometry graph_geometry(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u,
                             Orientation orientation = Orientation::kPast);

/// Discrete H(u) (past normal). Throws SpacelikeViolation or DomainError.
Eigen::VectorXd mean_curvature(const Spacetime& st, const PeriodicGrid& grid, const Eigen::VectorXd& u);

/// Exact linearization of the discrete H(u), assembled column by column.
Eigen::SparseMatrix<double> mean_curvature_jacobian(const Spacetime& st, const PeriodicGrid& grid,
                                                    const Eigen::VectorXd& u);

/// Second fundamental form of the coordinate slice {x⁰ = t} at x:
/// h̄_ij = −e^{ψ}(½σ̇_ij + ψ̇σ_ij).
Eigen::MatrixXd coordinate_slice_sff(const Spacetime& st, double t, const Eigen::VectorXd& x);

/// Geometry of the slice {x⁰ = t} of a spacetime whose coordinate slices are
/// homogeneous, evaluated at the reference point (any n).
struct HomogeneousGeometry {
  double t = 0.0;
  Eigen::MatrixXd g, g_inv, h;
  double H = 0.0;
  double A2 = 0.0;
  double dH_dt = 0.0;
  Eigen::VectorXd nu;   // ν^α, past directed
  double ricci_nu = 0.0;
  double lapse = 1.0;   // e^{ψ}
  double radius_sq = 1.0;  // g_ij = radius_sq·σ_Sⁿ at the reference point
};

HomogeneousGeometry homogeneous_geometry(const Spacetime& st, double t);

}  // namespace cmc
