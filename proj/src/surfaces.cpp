#include "heis/surfaces.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heis/expr.hpp"
#include "heis/integrate.hpp"

namespace heis {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double horizontal_radius(std::span<const double> xy) {
  double s = 0.0;
  for (double c : xy) s += c * c;
  return std::sqrt(s);
}

void require_xy(Dim dim, std::span<const double> xy, double R) {
  if (xy.size() != static_cast<std::size_t>(dim.contact())) {
    throw DimensionError("surface point: expected " + std::to_string(dim.contact()) + " horizontal coordinates");
  }
  if (horizontal_radius(xy) > R * (1.0 + 1e-12)) {
    throw std::invalid_argument("surface point lies outside the domain disk");
  }
}

// D and N from the signed gradient g of the side's height function.
double density_and_normal(std::span<const double> xy, std::span<const double> g, std::span<double> normal) {
  const std::size_t n = xy.size() / 2;
  double d2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = g[2 * j] - xy[2 * j + 1];
    const double q = g[2 * j + 1] + xy[2 * j];
    normal[2 * j] = p;
    normal[2 * j + 1] = q;
    d2 += p * p + q * q;
  }
  const double d = std::sqrt(d2);
  if (d > kSingularTol) {
    for (double& c : normal) c = -c / d;
  }
  return d;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Side> sides_of(SideSelection selection) {
  switch (selection) {
    case SideSelection::upper: return {Side::upper};
    case SideSelection::lower: return {Side::lower};
    case SideSelection::both: return {Side::upper, Side::lower};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Profiles

Profile Profile::pansu(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("pansu profile: lambda must be positive");
  return Profile("pansu", [lambda](double r) {
    // The slope is unbounded on the equator.
    const double slope = lambda * r < 1.0 ? pansu_height_derivative(lambda, r)
                                          : -std::numeric_limits<double>::infinity();
    return DualNumber(pansu_height(lambda, r), slope);
  });
}

Profile Profile::sphere(double R) {
  return Profile("sphere", [R](double r) {
    const double s = std::sqrt(std::max(0.0, R * R - r * r));
    return DualNumber(s, -r / s);
  });
}

Profile Profile::paraboloid(double c, double R) {
  return Profile("paraboloid:" + format_number(c),
                 [c, R](double r) { return DualNumber(c * (R * R - r * r), -2.0 * c * r); });
}

Profile Profile::flat() {
  return Profile("flat", [](double) { return DualNumber(0.0, 0.0); });
}

Profile Profile::expression(const std::string& src, double R, double lambda) {
  auto e = std::make_shared<const expr::Expression>(expr::Expression::compile(src, {"r", "R", "lambda", "pi"}));
  return Profile(src, [e, R, lambda](double r) {
    const double values[4] = {r, R, lambda, std::numbers::pi};
    return e->eval_dual(0, values);
  });
}

Profile Profile::parse(const std::string& text, double R, double lambda) {
  if (text == "pansu") return pansu(lambda);
  if (text == "sphere") return sphere(R);
  if (text == "flat") return flat();
  if (text.rfind("paraboloid:", 0) == 0) {
    const std::string arg = text.substr(11);
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw std::invalid_argument("paraboloid profile: bad coefficient '" + arg + "'");
    return paraboloid(c, R);
  }
  return expression(text, R, lambda);
}

Profile Profile::mirrored() const {
  Fn inner = fn_;
  return Profile("-(" + name_ + ")", [inner](double r) { return -inner(r); });
}

// ---------------------------------------------------------------------------
// Surfaces

void RotationalSurface::validate() const {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("rotational surface: R must be positive");
  constexpr int kGrid = 1000;
  for (int i = 0; i <= kGrid; ++i) {
    const double r = R * i / kGrid;
    const double hp = h_plus.value(r);
    const double hm = h_minus.value(r);
    if (!(hp >= -1e-12)) {
      throw std::invalid_argument("rotational surface: h_plus is negative at r = " + format_number(r));
    }
    if (!(hm <= 1e-12)) {
      throw std::invalid_argument("rotational surface: h_minus is positive at r = " + format_number(r));
    }
  }
}

RotationalSurface RotationalSurface::make(Dim dim, double R, Profile h_plus, Profile h_minus, SideSelection sides) {
  RotationalSurface s{dim, R, std::move(h_plus), std::move(h_minus), sides};
  s.validate();
  return s;
}

RotationalSurface RotationalSurface::sphere_pair(Dim dim, double R) {
  return make(dim, R, Profile::sphere(R), Profile::sphere(R).mirrored());
}

RotationalSurface RotationalSurface::paraboloid_pair(Dim dim, double c, double R) {
  return make(dim, R, Profile::paraboloid(c, R), Profile::paraboloid(c, R).mirrored());
}

RotationalSurface RotationalSurface::flat_pair(Dim dim, double R) {
  return make(dim, R, Profile::flat(), Profile::flat());
}

RotationalSurface RotationalSurface::pansu(Dim dim, double lambda) {
  return make(dim, 1.0 / lambda, Profile::pansu(lambda), Profile::pansu(lambda).mirrored());
}

GraphSurface GraphSurface::from_expression(Dim dim, double R, const std::string& src, double lambda,
                                           SideSelection sides) {
  if (!(R > 0.0)) throw std::invalid_argument("graph surface: R must be positive");
  std::vector<std::string> vars;
  for (int j = 1; j <= dim.n(); ++j) {
    vars.push_back("x" + std::to_string(j));
    vars.push_back("y" + std::to_string(j));
  }
  vars.insert(vars.end(), {"R", "lambda", "pi"});
  auto e = std::make_shared<const expr::Expression>(expr::Expression::compile(src, vars));
  const std::size_t m = static_cast<std::size_t>(dim.contact());
  HeightFn fn = [e, m, R, lambda](std::span<const double> xy, HeightSample& out) {
    std::vector<double> values(xy.begin(), xy.end());
    values.insert(values.end(), {R, lambda, std::numbers::pi});
    out.gradient.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const DualNumber d = e->eval_dual(i, values);
      out.value = d.value;
      out.gradient[i] = d.deriv;
    }
  };
  return GraphSurface{dim, R, std::move(fn), sides, src};
}

GraphSurface GraphSurface::pansu(Dim dim, double lambda, SideSelection sides) {
  if (!(lambda > 0.0)) throw std::invalid_argument("pansu graph: lambda must be positive");
  HeightFn fn = [lambda](std::span<const double> xy, HeightSample& out) {
    out.value = pansu_height(lambda, horizontal_radius(xy));
    out.gradient = pansu_gradient(lambda, xy);
  };
  return GraphSurface{dim, 1.0 / lambda, std::move(fn), sides, "pansu-graph"};
}

PansuSphere::PansuSphere(Dim d, double l) : dim(d), lambda(l) {
  if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("Pansu sphere: lambda must be positive");
}

Dim dim_of(const Surface& s) {
  return std::visit([](const auto& x) { return x.dim; }, s);
}

double radius_of(const Surface& s) {
  return std::visit(Overloaded{[](const GraphSurface& g) { return g.R; },
                               [](const RotationalSurface& r) { return r.R; },
                               [](const PansuSphere& p) { return p.radius(); }},
                    s);
}

std::vector<Side> sides_of(const Surface& s) {
  return std::visit(Overloaded{[](const GraphSurface& g) { return sides_of(g.sides); },
                               [](const RotationalSurface& r) { return sides_of(r.sides); },
                               [](const PansuSphere&) { return sides_of(SideSelection::both); }},
                    s);
}

bool is_rotational(const Surface& s) { return !std::holds_alternative<GraphSurface>(s); }

std::string describe(const Surface& s) {
  std::ostringstream os;
  std::visit(Overloaded{[&](const GraphSurface& g) {
                          os << "graph n=" << g.dim.n() << " R=" << g.R << " f=" << g.label;
                        },
                        [&](const RotationalSurface& r) {
                          os << "rotational n=" << r.dim.n() << " R=" << r.R << " h+=" << r.h_plus.name()
                             << " h-=" << r.h_minus.name();
                        },
                        [&](const PansuSphere& p) { os << "pansu n=" << p.dim.n() << " lambda=" << p.lambda; }},
             s);
  return os.str();
}

// ---------------------------------------------------------------------------
// Pointwise geometry

double pansu_height(double lambda, double r) {
  const double lr = lambda * r;
  if (lr < 0.0 || lr > 1.0 + 1e-12) throw std::domain_error("pansu_height: requires 0 <= lambda*r <= 1");
  const double t = std::min(lr, 1.0);
  return (t * std::sqrt(1.0 - t * t) + std::acos(t)) / (2.0 * lambda * lambda);
}

double pansu_height_derivative(double lambda, double r) {
  const double lr = lambda * r;
  if (lr < 0.0 || lr >= 1.0) throw std::domain_error("pansu_height_derivative: requires 0 <= lambda*r < 1");
  return -lambda * r * r / std::sqrt(1.0 - lr * lr);
}

std::vector<double> pansu_gradient(double lambda, std::span<const double> xy) {
  const double r = horizontal_radius(xy);
  const double lr = lambda * r;
  if (lr >= 1.0) throw std::domain_error("pansu_gradient: requires lambda*r < 1");
  const double factor = -lambda * r / std::sqrt(1.0 - lr * lr);
  std::vector<double> g(xy.begin(), xy.end());
  for (double& c : g) c *= factor;
  return g;
}

double p_area_element_graph(const GraphSurface& s, std::span<const double> xy, Side side) {
  require_xy(s.dim, xy, s.R);
  HeightSample h;
  s.f(xy, h);
  std::vector<double> g = h.gradient;
  for (double& c : g) c *= sign_of(side);
  std::vector<double> normal(xy.size());
  return density_and_normal(xy, g, normal);
}

ContactVector p_normal_graph(const GraphSurface& s, std::span<const double> xy, Side side) {
  require_xy(s.dim, xy, s.R);
  HeightSample h;
  s.f(xy, h);
  std::vector<double> g = h.gradient;
  for (double& c : g) c *= sign_of(side);
  std::vector<double> normal(xy.size());
  const double d = density_and_normal(xy, g, normal);
  if (d <= kSingularTol) throw SingularPoint("p_normal_graph: singular point (D = " + format_number(d) + ")");
  return ContactVector(HPoint::from_parts(s.dim, xy, sign_of(side) * h.value), std::move(normal));
}

double p_area_element_rotational(const RotationalSurface& s, double r, Side side) {
  if (r < 0.0 || r > s.R * (1.0 + 1e-12)) throw std::invalid_argument("p_area_element_rotational: r outside [0, R]");
  const double hr = (side == Side::upper ? s.h_plus : s.h_minus).derivative(r);
  return std::hypot(hr, r);
}

ContactVector p_normal_rotational(const RotationalSurface& s, double r, std::span<const double> direction,
                                  Side side) {
  if (direction.size() != static_cast<std::size_t>(s.dim.contact())) {
    throw DimensionError("p_normal_rotational: direction has wrong dimension");
  }
  const Surface surface(s);
  SurfaceSampler sampler(surface, side);
  sampler.set_radius(r);
  const SurfacePoint& pt = sampler.at(direction);
  if (!pt.nonsingular) throw SingularPoint("p_normal_rotational: singular point at r = " + format_number(r));
  return *pt.normal(s.dim);
}

ContactVector p_normal_rotational(const RotationalSurface& s, double r, double theta, Side side) {
  if (s.dim.n() != 1) throw DimensionError("p_normal_rotational(theta) is for n = 1");
  const double v[2] = {std::cos(theta), std::sin(theta)};
  return p_normal_rotational(s, r, std::span<const double>(v, 2), side);
}

double pansu_area_closed_form(Dim n, double lambda) { return constants(n, lambda).pansu_area(); }

// ---------------------------------------------------------------------------
// Sampling

HPoint SurfacePoint::coords(Dim dim) const {
  std::vector<double> c(direction.begin(), direction.end());
  for (double& x : c) x *= r;
  c.push_back(z);
  return HPoint(dim, std::move(c));
}

std::optional<ContactVector> SurfacePoint::normal(Dim dim) const {
  if (!nonsingular) return std::nullopt;
  return ContactVector(coords(dim), normal_xi);
}

SurfaceSampler::SurfaceSampler(const Surface& surface, Side side)
    : surface_(&surface), dim_(dim_of(surface)), side_(side) {
  xy_.resize(dim_.contact());
  height_.gradient.resize(dim_.contact());
  point_.side = side;
  point_.normal_xi.resize(dim_.contact());
}

void SurfaceSampler::set_radius(double r, double complement) {
  point_.r = r;
  const double sgn = sign_of(side_);
  std::visit(Overloaded{[&](const GraphSurface&) {},
                        [&](const RotationalSurface& s) {
                          const DualNumber h = (side_ == Side::upper ? s.h_plus : s.h_minus).eval(r);
                          h_ = h.value;
                          h_r_ = h.deriv;
                        },
                        [&](const PansuSphere& p) {
                          if (complement >= 0.0) {
                            // √(1 − λ²r²) = λ√(R² − r²) with R = 1/λ.
                            const double lr = p.lambda * r;
                            const double s = p.lambda * complement;
                            h_ = sgn * (lr * s + std::atan2(s, lr)) / (2.0 * p.lambda * p.lambda);
                            h_r_ = -sgn * p.lambda * r * r / s;
                          } else {
                            h_ = sgn * pansu_height(p.lambda, r);
                            h_r_ = sgn * pansu_height_derivative(p.lambda, r);
                          }
                        }},
             *surface_);
}

const SurfacePoint& SurfaceSampler::at(std::span<const double> direction) {
  const double r = point_.r;
  point_.direction = direction;
  for (std::size_t i = 0; i < xy_.size(); ++i) xy_[i] = r * direction[i];
  double d = 0.0;
  if (const auto* g = std::get_if<GraphSurface>(surface_)) {
    g->f(xy_, height_);
    const double sgn = sign_of(side_);
    for (double& c : height_.gradient) c *= sgn;
    point_.z = sgn * height_.value;
    d = density_and_normal(xy_, height_.gradient, point_.normal_xi);
  } else {
    // f_{x_j} = h_r x_j / r; the cross terms in D² cancel, leaving h_r² + r².
    point_.z = h_;
    d = std::hypot(h_r_, r);
    const std::size_t n = xy_.size() / 2;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = direction[2 * j];
      const double b = direction[2 * j + 1];
      point_.normal_xi[2 * j] = h_r_ * a - r * b;
      point_.normal_xi[2 * j + 1] = h_r_ * b + r * a;
    }
    if (d > kSingularTol) {
      for (double& c : point_.normal_xi) c = -c / d;
    }
  }
  point_.density = d;
  point_.area_density = d * std::pow(r, dim_.contact() - 1);
  point_.nonsingular = d > kSingularTol;
  return point_;
}

IntegralResult p_area(const Surface& s, const QuadratureSpec& spec, double excise_radius) {
  SurfaceIntegrand one{[](const SurfacePoint&) { return 1.0; }, false, true};
  IntegralResult out = surface_integral(s, one, spec, excise_radius);
  return out;
}

}  // namespace heis
