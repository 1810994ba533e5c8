#include "heis/projection.hpp"

#include <cmath>
#include <sstream>

#include "heis/integrate.hpp"

namespace heis {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void require_unit(std::span<const double> v, const char* what) {
  if (std::abs(std::sqrt(dot(v, v)) - 1.0) > 1e-10) {
    throw std::invalid_argument(std::string(what) + ": direction is not a unit vector");
  }
}

}  // namespace

PansuDirection PansuDirection::from_dir(std::span<const double> dir, double lambda) {
  PansuEquatorPoint e = direction_to_pansu_point(dir, lambda);
  std::vector<double> coeffs = e.normal.xi;
  return PansuDirection{std::move(e.point), std::move(e.normal), std::move(coeffs)};
}

PansuDirection PansuDirection::from_point(const PansuSphere& sphere, std::span<const double> xy, Side side) {
  const GraphSurface g = GraphSurface::pansu(sphere.dim, sphere.lambda);
  ContactVector n = p_normal_graph(g, xy, side);
  HPoint p = n.base;
  std::vector<double> coeffs = n.xi;
  return PansuDirection{std::move(p), std::move(n), std::move(coeffs)};
}

AmbientVector AmbientDirection::at_origin() const {
  const double s = std::sin(alpha);
  return AmbientVector(HPoint::origin(Dim(1)), {s * std::cos(beta), s * std::sin(beta)}, std::cos(alpha));
}

std::vector<std::vector<double>> random_directions(Dim n, std::size_t count, std::uint64_t seed) {
  const McStream stream(seed);
  std::vector<std::vector<double>> out(count, std::vector<double>(n.contact()));
  for (std::size_t i = 0; i < count; ++i) stream.unit_vector(i, 0, out[i]);
  return out;
}

IntegralResult projected_parea(const Surface& s, std::span<const double> dir, const QuadratureSpec& spec) {
  if (dir.size() != static_cast<std::size_t>(dim_of(s).contact())) {
    throw DimensionError("projected_parea: direction dimension does not match the surface");
  }
  require_unit(dir, "projected_parea");
  std::vector<double> d(dir.begin(), dir.end());
  SurfaceIntegrand integrand{
      [d](const SurfacePoint& q) { return q.nonsingular ? dot(d, q.normal_xi) : 0.0; }, true, false};
  return surface_integral(s, integrand, spec);
}

IntegralResult projected_parea(const Surface& s, const PansuDirection& d, const QuadratureSpec& spec) {
  return projected_parea(s, d.dir, spec);
}

IntegralResult projected_parea_ambient(const Surface& s, const AmbientDirection& u, const QuadratureSpec& spec) {
  if (dim_of(s).n() != 1) throw DimensionError("projected_parea_ambient: implemented for n = 1 only");
  // Frame coefficients are the same at every q; keep the contact part only.
  const std::vector<double> xi = u.at_origin().xi;
  SurfaceIntegrand integrand{
      [xi](const SurfacePoint& q) { return q.nonsingular ? dot(xi, q.normal_xi) : 0.0; }, true, false};
  return surface_integral(s, integrand, spec);
}

double transported_integrand(const PansuDirection& d, const SurfacePoint& q, Dim dim) {
  const std::optional<ContactVector> nq = q.normal(dim);
  if (!nq) return 0.0;
  const ContactVector at_origin = pushforward(group_inv(d.p), d.normal);
  const ContactVector at_q = pushforward(nq->base, at_origin);
  return std::abs(levi_inner(at_q, *nq));
}

ProfileCheck check_profile_conditions(const RotationalSurface& s) {
  constexpr int kGrid = 1000;
  ProfileCheck out;
  std::ostringstream detail;
  for (Side side : sides_of(s.sides)) {
    const Profile& h = side == Side::upper ? s.h_plus : s.h_minus;
    double prev = 0.0;
    double max_abs = 0.0;
    double max_step = 0.0;
    bool finite = true;
    bool bounded = true;
    for (int i = 0; i < kGrid; ++i) {
      const double r = s.R * i / kGrid;
      double hr = 0.0;
      try {
        hr = h.derivative(r);
      } catch (const std::exception&) {
        finite = false;
        bounded = false;
        break;
      }
      if (!std::isfinite(hr)) {
        finite = false;
        bounded = false;
        break;
      }
      if (std::abs(hr) > r / std::sqrt(s.R * s.R - r * r) * (1.0 + 1e-9)) bounded = false;
      if (i > 0) max_step = std::max(max_step, std::abs(hr - prev));
      max_abs = std::max(max_abs, std::abs(hr));
      prev = hr;
    }
    const bool continuous = finite && max_step <= 0.1 * (1.0 + max_abs);
    if (!bounded) detail << h.name() << ": |h_r| exceeds r/sqrt(R^2-r^2); ";
    if (!continuous) detail << h.name() << ": h_r is not finite with small increments; ";
    out.bounded = out.bounded && bounded;
    out.continuous = out.continuous && continuous;
  }
  out.detail = detail.str();
  return out;
}

IntegralResult rotational_projection_closed_form(const RotationalSurface& s, const QuadratureSpec& spec,
                                                 ProfileCheck* check) {
  if (s.dim.n() != 1) throw DimensionError("rotational_projection_closed_form: n = 1 only");
  if (check) *check = check_profile_conditions(s);
  IntegralResult out;
  out.method = "radial closed form";
  for (Side side : sides_of(s.sides)) {
    const Profile& h = side == Side::upper ? s.h_plus : s.h_minus;
    const IntegralResult part =
        radial_integral([&](double r) { return r * std::hypot(h.derivative(r), r); }, s.R, spec);
    out.value += 4.0 * part.value;
    out.error_estimate += 4.0 * part.error_estimate;
    out.evaluations += part.evaluations;
    out.converged = out.converged && part.converged;
  }
  return out;
}

ProjectionDecomposition decompose_AB(double r, double rbar, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("decompose_AB: lambda must be positive");
  const double R = 1.0 / lambda;
  if (!(r > 0.0 && r < R && rbar > 0.0 && rbar < R)) {
    throw std::domain_error("decompose_AB: radii must lie in (0, 1/lambda)");
  }
  const double l2 = lambda * lambda;
  const double sp = std::sqrt(1.0 - l2 * r * r);
  const double sq = std::sqrt(1.0 - l2 * rbar * rbar);
  ProjectionDecomposition d{};
  d.A = l2 * rbar * rbar * r / sq + rbar * sp;
  d.B = lambda * r * rbar - lambda * sp * rbar * rbar / sq;
  d.amplitude = std::hypot(d.A, d.B);
  d.phase = std::atan2(d.B, d.A);
  return d;
}

IntegralResult euclid_sphere_projection(int n, std::span<const double> u, const QuadratureSpec& spec) {
  if (n < 2) throw DimensionError("euclid_sphere_projection: n must be at least 2");
  if (u.size() != static_cast<std::size_t>(n)) throw DimensionError("euclid_sphere_projection: u has wrong size");
  require_unit(u, "euclid_sphere_projection");
  std::vector<double> uu(u.begin(), u.end());
  if (n == 2) {
    return circle_integral([&](double t) { return uu[0] * std::cos(t) + uu[1] * std::sin(t); },
                           spec.angular_nodes, true);
  }
  QuadratureSpec product = spec;
  product.sphere_rule = SphereRule::product_angles;
  SphereOptions opts;
  opts.pole = uu;
  opts.split_equator = true;
  opts.absolute = true;
  return sphere_integral([&](std::span<const double> v) { return dot(uu, v); }, n - 1, product, opts);
}

}  // namespace heis
