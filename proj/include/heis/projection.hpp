#pragma once

// Projected p-areas of hypersurfaces along p-normal directions of a Pansu
// sphere, together with the closed forms used to check them.
//
// For a unit contact vector Ñ(p) the projected p-area of Σ is
//
//   A(Σ | Ñ(p)^⊥) = ∫_Σ |⟨L_{q*}L_{p⁻¹*} Ñ(p), N(q)⟩| dΣ_q.
//
// Left translations preserve frame coefficients, so the integrand only needs
// the coefficient vector `dir` of Ñ(p) in the frame (e_{x_j}, e_{y_j}).

#include <span>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/quadrature.hpp"
#include "heis/surfaces.hpp"

namespace heis {

struct PansuDirection {
  HPoint p;
  ContactVector normal;
  std::vector<double> dir;  // unit frame coefficients of Ñ(p)

  /// Equator point of P^n_λ whose p-normal has coefficients dir.
  static PansuDirection from_dir(std::span<const double> dir, double lambda);
  /// Nonsingular point (xy, ±f(xy)) of P^n_λ.
  static PansuDirection from_point(const PansuSphere& sphere, std::span<const double> xy, Side side);
};

/// u(0) = (sin α cos β, sin α sin β, cos α) in the frame (e_x, e_y, ∂_z) of H₁.
struct AmbientDirection {
  double alpha;
  double beta;

  AmbientVector at_origin() const;
};

/// `count` directions uniform on S^{2n−1}; draw i depends only on (seed, i).
std::vector<std::vector<double>> random_directions(Dim n, std::size_t count, std::uint64_t seed);

IntegralResult projected_parea(const Surface& s, std::span<const double> dir, const QuadratureSpec& spec);
IntegralResult projected_parea(const Surface& s, const PansuDirection& d, const QuadratureSpec& spec);

/// n = 1 only. The vertical part of L_{q*}u(0) drops out of the Levi pairing.
IntegralResult projected_parea_ambient(const Surface& s, const AmbientDirection& u, const QuadratureSpec& spec);

/// The literal integrand at q: translate Ñ(p) to the origin, then to q, and
/// pair with N(q). Zero at singular points.
double transported_integrand(const PansuDirection& d, const SurfacePoint& q, Dim dim);

struct ProfileCheck {
  bool bounded = true;     // |h_r| ≤ r/√(R²−r²) on the grid
  bool continuous = true;  // finite h_r with small grid increments
  std::string detail;

  bool satisfied() const { return bounded || continuous; }
};

/// Sufficient conditions for direction-independent projections, sampled on
/// 1000 grid points of [0, R) for each selected side.
ProfileCheck check_profile_conditions(const RotationalSurface& s);

/// n = 1: 4·Σ_± ∫₀^R r√((h±_r)² + r²) dr. Optionally reports the profile check.
IntegralResult rotational_projection_closed_form(const RotationalSurface& s, const QuadratureSpec& spec,
                                                 ProfileCheck* check = nullptr);

struct ProjectionDecomposition {
  double A;
  double B;
  double amplitude;  // √(A² + B²)
  double phase;      // cos(phase) = A / amplitude
};

/// Levi pairing of the transported Pansu normals at radii r (point q) and rbar
/// (point p) of P¹_λ, θ apart, equals (s̄/r̄)(A cos θ − B sin θ) with
/// s̄ = √(1 − λ²r̄²). Requires 0 < r, rbar < 1/λ.
ProjectionDecomposition decompose_AB(double r, double rbar, double lambda);

/// ∫_{S^{n−1}} |u·v| dS_v for a unit u ∈ R^n, n ≥ 2.
IntegralResult euclid_sphere_projection(int n, std::span<const double> u, const QuadratureSpec& spec);

}  // namespace heis
