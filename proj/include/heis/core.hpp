#pragma once

// The flat pseudohermitian model H_n = (R^{2n+1}, Θ₀, J₀).
//
// Coordinates are interleaved as (x₁, y₁, …, x_n, y_n, z) so that every frame
// pair (e_{x_j}, e_{y_j}) occupies adjacent slots. Contact vectors are stored as
// coefficients on the left-invariant frame
//
//   e_{x_j} = ∂/∂x_j + y_j ∂/∂z,   e_{y_j} = ∂/∂y_j − x_j ∂/∂z,
//
// which is orthonormal for the Levi metric. Because the frame is left-invariant,
// the pushforward of a left translation leaves frame coefficients unchanged and
// only moves the base point.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Heisenberg index n >= 1; the ambient dimension is 2n+1.
class Dim {
 public:
  explicit Dim(int n);

  int n() const { return n_; }
  int contact() const { return 2 * n_; }
  int ambient() const { return 2 * n_ + 1; }

  friend bool operator==(Dim, Dim) = default;

 private:
  int n_;
};

class HPoint {
 public:
  HPoint(Dim dim, std::vector<double> coords);
  static HPoint origin(Dim dim);
  /// (xy, z) with xy interleaved (x₁, y₁, …).
  static HPoint from_parts(Dim dim, std::span<const double> xy, double z);

  Dim dim() const { return dim_; }
  std::span<const double> coords() const { return coords_; }
  std::span<const double> horizontal() const {
    return std::span<const double>(coords_).first(coords_.size() - 1);
  }
  double x(int j) const { return coords_[2 * j]; }
  double y(int j) const { return coords_[2 * j + 1]; }
  double z() const { return coords_.back(); }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  Dim dim_;
  std::vector<double> coords_;
};

/// Contact vector: frame coefficients (a₁, b₁, …, a_n, b_n) at a base point.
struct ContactVector {
  HPoint base;
  std::vector<double> xi;

  ContactVector(HPoint base, std::vector<double> xi);
};

/// Tangent vector split as contact part plus t·T with T = ∂/∂z.
struct AmbientVector {
  HPoint base;
  std::vector<double> xi;
  double t = 0.0;

  AmbientVector(HPoint base, std::vector<double> xi, double t);
  ContactVector contact_part() const { return ContactVector(base, xi); }
};

HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint group_inv(const HPoint& p);

ContactVector pushforward(const HPoint& p, const ContactVector& v);
AmbientVector pushforward(const HPoint& p, const AmbientVector& v);

/// Levi inner product; bases must agree to 1e-12 per coordinate.
double levi_inner(const ContactVector& u, const ContactVector& v);
double levi_norm(const ContactVector& v);
ContactVector apply_J(const ContactVector& v);

/// Θ₀ applied to a coordinate tangent vector w at p.
double theta_eval(const HPoint& p, std::span<const double> w);

std::vector<double> frame_to_coords(const ContactVector& v);
std::vector<double> frame_to_coords(const AmbientVector& v);
/// Inverse of frame_to_coords: splits w into frame coefficients and t = Θ₀(w).
AmbientVector coords_to_frame(const HPoint& p, std::span<const double> w);

/// Gamma function, Lanczos approximation (g = 7, 9 terms).
double gamma_fn(double x);
/// Volume of the unit ball in R^k.
double ball_volume(int k);
/// Surface area of the unit sphere S^k ⊂ R^{k+1}.
double sphere_area(int k);

struct Constants {
  Dim n;
  double lambda;
  double c_n;    // √π Γ(n+½) / (λ^{2n+1} Γ(n+1))
  double omega;  // ω_{2n−1}, unit-ball volume in R^{2n−1}
  double s;      // S_{2n−1}, area of the unit sphere in R^{2n}

  double pansu_area() const { return s * c_n; }
  double pansu_projection() const { return 2.0 * c_n * omega; }
};

Constants constants(Dim n, double lambda);

/// Equator point p = dir/λ of the Pansu sphere together with its p-normal,
/// whose frame coefficients equal dir.
struct PansuEquatorPoint {
  HPoint point;
  ContactVector normal;
};
PansuEquatorPoint direction_to_pansu_point(std::span<const double> dir,
                                           double lambda);

}  // namespace heis
