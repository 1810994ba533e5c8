#pragma once

// Hypersurfaces of H_n over a disk of radius R in R^{2n}: graphs z = ±f(x, y),
// rotationally symmetric surfaces z = h±(r), and the Pansu spheres.
//
// The p-area element of a graph z = f is
//
//   dΣ = D dx₁dy₁⋯dx_ndy_n,   D² = Σ_j (f_{x_j} − y_j)² + (f_{y_j} + x_j)²,
//
// and the p-normal is N = −(1/D) Σ_j [(f_{x_j} − y_j) e_{x_j} + (f_{y_j} + x_j) e_{y_j}].
// Points with D ≤ kSingularTol are singular: N is undefined there and every
// integrand involving N is taken to be 0.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "heis/core.hpp"
#include "heis/dual.hpp"
#include "heis/quadrature.hpp"

namespace heis {

inline constexpr double kSingularTol = 1e-10;

class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Side { upper, lower };
enum class SideSelection { both, upper, lower };

std::vector<Side> sides_of(SideSelection selection);
inline double sign_of(Side s) { return s == Side::upper ? 1.0 : -1.0; }

// ---------------------------------------------------------------------------
// Radial profiles

/// r ↦ (h(r), h'(r)) on [0, R].
class Profile {
 public:
  using Fn = std::function<DualNumber(double)>;

  Profile(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  /// Upper half of P^n_λ: (λr√(1−λ²r²) + arccos λr) / (2λ²).
  static Profile pansu(double lambda);
  /// √(R² − r²).
  static Profile sphere(double R);
  /// c·(R² − r²).
  static Profile paraboloid(double c, double R);
  static Profile flat();
  /// Expression in r, R, lambda, pi; derivative by dual numbers.
  static Profile expression(const std::string& src, double R, double lambda);
  /// Built-in name ("pansu", "sphere", "paraboloid:<c>", "flat") or expression.
  static Profile parse(const std::string& text, double R, double lambda);

  /// r ↦ −h(r).
  Profile mirrored() const;

  DualNumber eval(double r) const { return fn_(r); }
  double value(double r) const { return fn_(r).value; }
  double derivative(double r) const { return fn_(r).deriv; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

// ---------------------------------------------------------------------------
// Surfaces

struct RotationalSurface {
  Dim dim;
  double R;
  Profile h_plus;   // ≥ 0
  Profile h_minus;  // ≤ 0
  SideSelection sides = SideSelection::both;

  /// Checks R > 0 and the sign conditions on a 1000-point grid (1e−12 slack).
  void validate() const;

  static RotationalSurface make(Dim dim, double R, Profile h_plus, Profile h_minus,
                                SideSelection sides = SideSelection::both);
  /// h± = ±√(R² − r²).
  static RotationalSurface sphere_pair(Dim dim, double R);
  /// h± = ±c(R² − r²).
  static RotationalSurface paraboloid_pair(Dim dim, double c, double R);
  static RotationalSurface flat_pair(Dim dim, double R);
  /// P^n_λ written as a rotational surface.
  static RotationalSurface pansu(Dim dim, double lambda);
};

struct HeightSample {
  double value = 0.0;
  std::vector<double> gradient;  // interleaved (f_{x₁}, f_{y₁}, …)
};

struct GraphSurface {
  using HeightFn = std::function<void(std::span<const double> xy, HeightSample& out)>;

  Dim dim;
  double R;
  HeightFn f;
  SideSelection sides = SideSelection::upper;
  std::string label = "graph";

  /// Expression in x1..xn, y1..yn, R, lambda, pi.
  static GraphSurface from_expression(Dim dim, double R, const std::string& src, double lambda = 1.0,
                                      SideSelection sides = SideSelection::upper);
  /// Pansu height with the closed-form gradient.
  static GraphSurface pansu(Dim dim, double lambda, SideSelection sides = SideSelection::both);
};

struct PansuSphere {
  Dim dim;
  double lambda;

  PansuSphere(Dim d, double l);
  double radius() const { return 1.0 / lambda; }
};

using Surface = std::variant<GraphSurface, RotationalSurface, PansuSphere>;

Dim dim_of(const Surface& s);
double radius_of(const Surface& s);
std::vector<Side> sides_of(const Surface& s);
/// Whether D and the height depend on the radius only.
bool is_rotational(const Surface& s);
std::string describe(const Surface& s);

// ---------------------------------------------------------------------------
// Pointwise geometry

/// Pansu height f(r); requires 0 ≤ λr ≤ 1.
double pansu_height(double lambda, double r);
/// Closed-form gradient (f_{x₁}, f_{y₁}, …); requires λr < 1.
std::vector<double> pansu_gradient(double lambda, std::span<const double> xy);
/// d/dr of pansu_height: −λr²/√(1−λ²r²).
double pansu_height_derivative(double lambda, double r);

/// D at the point (xy, ±f(xy)).
double p_area_element_graph(const GraphSurface& s, std::span<const double> xy, Side side = Side::upper);
/// Throws SingularPoint when D ≤ kSingularTol.
ContactVector p_normal_graph(const GraphSurface& s, std::span<const double> xy, Side side = Side::upper);

/// √(h_r² + r²) on the chosen side.
double p_area_element_rotational(const RotationalSurface& s, double r, Side side);
/// p-normal at r·direction, direction a unit vector of R^{2n}.
ContactVector p_normal_rotational(const RotationalSurface& s, double r, std::span<const double> direction,
                                  Side side);
/// n = 1 convenience: direction (cos θ, sin θ).
ContactVector p_normal_rotational(const RotationalSurface& s, double r, double theta, Side side);

/// S_{2n−1}·√π·Γ(n+½)/(λ^{2n+1}Γ(n+1)).
double pansu_area_closed_form(Dim n, double lambda);

// ---------------------------------------------------------------------------
// Sampling for the integration engine

/// A point of the surface in the parametrization (side, r, unit direction v).
struct SurfacePoint {
  Side side = Side::upper;
  double r = 0.0;
  std::span<const double> direction;
  double z = 0.0;
  double density = 0.0;       // D, w.r.t. Lebesgue measure dx dy
  double area_density = 0.0;  // D·r^{2n−1}, w.r.t. dr dS_v
  bool nonsingular = false;
  std::vector<double> normal_xi;  // valid iff nonsingular

  HPoint coords(Dim dim) const;
  std::optional<ContactVector> normal(Dim dim) const;
};

/// Reusable evaluator; not thread-safe, create one per worker.
class SurfaceSampler {
 public:
  SurfaceSampler(const Surface& surface, Side side);
  SurfaceSampler(Surface&&, Side) = delete;  // keeps a pointer to the surface

  /// Caches per-radius data (profile value and derivative). `complement`,
  /// when non-negative, is √(R² − r²) and sharpens the Pansu sphere near its equator.
  void set_radius(double r, double complement = -1.0);
  const SurfacePoint& at(std::span<const double> direction);

 private:
  const Surface* surface_;
  Dim dim_;
  Side side_;
  double h_ = 0.0;
  double h_r_ = 0.0;
  std::vector<double> xy_;
  HeightSample height_;
  SurfacePoint point_;
};

/// p-area of the surface, summing all selected sides.
IntegralResult p_area(const Surface& s, const QuadratureSpec& spec, double excise_radius = 0.0);

}  // namespace heis
