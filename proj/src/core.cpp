#include "heis/core.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace heis {

namespace {

constexpr double kBaseTol = 1e-12;

void require_same_dim(Dim a, Dim b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (n=" +
                         std::to_string(a.n()) + " vs n=" +
                         std::to_string(b.n()) + ")");
  }
}

void require_xi_size(Dim dim, std::size_t size) {
  if (size != static_cast<std::size_t>(dim.contact())) {
    throw DimensionError("contact coefficients: expected " +
                         std::to_string(dim.contact()) + " entries, got " +
                         std::to_string(size));
  }
}

}  // namespace

Dim::Dim(int n) : n_(n) {
  if (n < 1) throw DimensionError("Heisenberg index must be >= 1");
}

HPoint::HPoint(Dim dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (coords_.size() != static_cast<std::size_t>(dim.ambient())) {
    throw DimensionError("HPoint: expected " + std::to_string(dim.ambient()) +
                         " coordinates, got " + std::to_string(coords_.size()));
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw std::invalid_argument("HPoint: non-finite coordinate");
  }
}

HPoint HPoint::origin(Dim dim) {
  return HPoint(dim, std::vector<double>(dim.ambient(), 0.0));
}

HPoint HPoint::from_parts(Dim dim, std::span<const double> xy, double z) {
  std::vector<double> c(xy.begin(), xy.end());
  c.push_back(z);
  return HPoint(dim, std::move(c));
}

ContactVector::ContactVector(HPoint b, std::vector<double> x)
    : base(std::move(b)), xi(std::move(x)) {
  require_xi_size(base.dim(), xi.size());
}

AmbientVector::AmbientVector(HPoint b, std::vector<double> x, double t_)
    : base(std::move(b)), xi(std::move(x)), t(t_) {
  require_xi_size(base.dim(), xi.size());
}

HPoint group_mul(const HPoint& p, const HPoint& q) {
  require_same_dim(p.dim(), q.dim(), "group_mul");
  const int n = p.dim().n();
  std::vector<double> out(p.dim().ambient());
  double z = p.z() + q.z();
  for (int j = 0; j < n; ++j) {
    out[2 * j] = p.x(j) + q.x(j);
    out[2 * j + 1] = p.y(j) + q.y(j);
    z += p.y(j) * q.x(j) - p.x(j) * q.y(j);
  }
  out.back() = z;
  return HPoint(p.dim(), std::move(out));
}

HPoint group_inv(const HPoint& p) {
  std::vector<double> out(p.coords().begin(), p.coords().end());
  for (double& c : out) c = -c;
  return HPoint(p.dim(), std::move(out));
}

ContactVector pushforward(const HPoint& p, const ContactVector& v) {
  require_same_dim(p.dim(), v.base.dim(), "pushforward");
  return ContactVector(group_mul(p, v.base), v.xi);
}

AmbientVector pushforward(const HPoint& p, const AmbientVector& v) {
  require_same_dim(p.dim(), v.base.dim(), "pushforward");
  return AmbientVector(group_mul(p, v.base), v.xi, v.t);
}

double levi_inner(const ContactVector& u, const ContactVector& v) {
  require_same_dim(u.base.dim(), v.base.dim(), "levi_inner");
  const auto a = u.base.coords();
  const auto b = v.base.coords();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kBaseTol) {
      throw std::invalid_argument("levi_inner: vectors live at different base points");
    }
  }
  double s = 0.0;
  for (std::size_t i = 0; i < u.xi.size(); ++i) s += u.xi[i] * v.xi[i];
  return s;
}

double levi_norm(const ContactVector& v) {
  double s = 0.0;
  for (double c : v.xi) s += c * c;
  return std::sqrt(s);
}

ContactVector apply_J(const ContactVector& v) {
  std::vector<double> out(v.xi.size());
  for (std::size_t j = 0; j + 1 < v.xi.size(); j += 2) {
    out[j] = -v.xi[j + 1];
    out[j + 1] = v.xi[j];
  }
  return ContactVector(v.base, std::move(out));
}

double theta_eval(const HPoint& p, std::span<const double> w) {
  if (w.size() != static_cast<std::size_t>(p.dim().ambient())) {
    throw DimensionError("theta_eval: tangent vector has wrong length");
  }
  double s = w.back();
  for (int j = 0; j < p.dim().n(); ++j) {
    s += p.x(j) * w[2 * j + 1] - p.y(j) * w[2 * j];
  }
  return s;
}

std::vector<double> frame_to_coords(const ContactVector& v) {
  const HPoint& p = v.base;
  std::vector<double> w(p.dim().ambient(), 0.0);
  double wz = 0.0;
  for (int j = 0; j < p.dim().n(); ++j) {
    const double a = v.xi[2 * j];
    const double b = v.xi[2 * j + 1];
    w[2 * j] = a;
    w[2 * j + 1] = b;
    wz += a * p.y(j) - b * p.x(j);
  }
  w.back() = wz;
  return w;
}

std::vector<double> frame_to_coords(const AmbientVector& v) {
  auto w = frame_to_coords(v.contact_part());
  w.back() += v.t;
  return w;
}

AmbientVector coords_to_frame(const HPoint& p, std::span<const double> w) {
  const double t = theta_eval(p, w);
  std::vector<double> xi(w.begin(), w.end() - 1);
  return AmbientVector(p, std::move(xi), t);
}

double gamma_fn(double x) {
  static constexpr double kG = 7.0;
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  x -= 1.0;
  double a = kCoef[0];
  const double t = x + kG + 0.5;
  for (std::size_t i = 1; i < kCoef.size(); ++i) a += kCoef[i] / (x + static_cast<double>(i));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double ball_volume(int k) {
  if (k < 0) throw std::invalid_argument("ball_volume: negative dimension");
  return std::pow(std::numbers::pi, 0.5 * k) / gamma_fn(0.5 * k + 1.0);
}

double sphere_area(int k) {
  if (k < 0) throw std::invalid_argument("sphere_area: negative dimension");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / gamma_fn(0.5 * (k + 1));
}

Constants constants(Dim n, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("constants: lambda must be positive");
  }
  const int m = n.n();
  const double c_n = std::sqrt(std::numbers::pi) * gamma_fn(m + 0.5) /
                     (std::pow(lambda, 2 * m + 1) * gamma_fn(m + 1.0));
  return Constants{n, lambda, c_n, ball_volume(2 * m - 1), sphere_area(2 * m - 1)};
}

PansuEquatorPoint direction_to_pansu_point(std::span<const double> dir, double lambda) {
  if (dir.empty() || dir.size() % 2 != 0) {
    throw DimensionError("direction_to_pansu_point: direction must have even length");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("direction_to_pansu_point: lambda must be positive");
  double norm2 = 0.0;
  for (double d : dir) norm2 += d * d;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10) {
    throw std::invalid_argument("direction_to_pansu_point: direction is not a unit vector");
  }
  const Dim dim(static_cast<int>(dir.size() / 2));
  std::vector<double> xy(dir.begin(), dir.end());
  for (double& c : xy) c /= lambda;
  HPoint p = HPoint::from_parts(dim, xy, 0.0);
  // On the equator √(1−λ²r²) vanishes and the p-normal reduces to λ·(x, y) = dir.
  return {p, ContactVector(p, std::vector<double>(dir.begin(), dir.end()))};
}

}  // namespace heis
