#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heis/core.hpp"
#include "heis/quadrature.hpp"

using namespace heis;
using std::numbers::pi;

TEST_CASE("Gauss-Legendre is exact to degree 2N-1") {
  for (int order : {1, 2, 5, 16, 64}) {
    const auto rule = gauss_legendre(order);
    REQUIRE(rule->nodes.size() == static_cast<std::size_t>(order));
    for (int deg = 0; deg <= 2 * order - 1; deg += 1) {
      double s = 0.0;
      for (int i = 0; i < order; ++i) s += rule->weights[i] * std::pow(rule->nodes[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(s - exact) <= 1e-14);
    }
  }
  CHECK(gauss_legendre(32) == gauss_legendre(32));
  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("radial integrals with the sine substitution") {
  QuadratureSpec q;
  const auto a = radial_integral([](double r) { return r * r / std::sqrt(1 - r * r); }, 1.0, q);
  CHECK(a.value == doctest::Approx(pi / 4).epsilon(1e-11));
  const auto b = radial_integral([](double r) { return r * r; }, 1.0, q);
  CHECK(b.value == doctest::Approx(1.0 / 3).epsilon(1e-13));
  const auto c = radial_integral([](double r) { return std::pow(r, 4) / std::sqrt(1 - r * r); }, 1.0, q);
  CHECK(c.value == doctest::Approx(3 * pi / 16).epsilon(1e-11));
  CHECK(a.error_estimate >= 0.0);
  CHECK_THROWS_AS(radial_integral([](double) { return std::nan(""); }, 1.0, q), IntegrationError);
}

TEST_CASE("node doubling converges on the Pansu radial integrand") {
  // After r = sin u the integrand r⁴/√(1−r²) dr becomes sin⁴u du; use a
  // profile with an r^{5/2} term so convergence is algebraic rather than exact.
  auto g = [](double r) { return std::pow(r, 4.5) / std::sqrt(1 - r * r); };
  const double exact = std::sqrt(pi) * std::tgamma(2.75) / (2 * std::tgamma(3.25));
  QuadratureSpec q;
  double prev = 0.0;
  for (int nodes : {4, 8, 16, 32}) {
    q.radial_nodes = nodes;
    const double err = std::abs(radial_integral(g, 1.0, q).value - exact);
    if (nodes > 4 && prev > 1e-12) CHECK(err <= prev / 4);
    prev = err;
  }
}

TEST_CASE("spec validation") {
  QuadratureSpec q;
  q.radial_nodes = 1;
  CHECK_THROWS(q.validate());
  q = QuadratureSpec{};
  q.rel_tol = 0.0;
  CHECK_THROWS(q.validate());
}

TEST_CASE("absolute cosine on the circle") {
  CHECK(angular_abs_cos_integral(1.0, 0.3) == 4.0);
  CHECK(angular_abs_cos_integral(0.0, 0.3) == 0.0);
  CHECK(angular_abs_cos_integral(0.5 / std::sqrt(0.75), 1.0) == doctest::Approx(4 * 0.5 / std::sqrt(0.75)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2 * pi);
  for (int i = 0; i < 100; ++i) {
    const double c = u(rng);
    const auto r = circle_integral([c](double t) { return std::cos(t - c); }, 512, true);
    CHECK(std::abs(r.value - 4.0) <= 1e-14 * 4);
  }
}

TEST_CASE("sphere integrals") {
  QuadratureSpec q;
  auto one = [](std::span<const double>) { return 1.0; };
  CHECK(sphere_integral(one, 1, q).value == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(sphere_integral(one, 2, q).value == doctest::Approx(4 * pi).epsilon(1e-13));
  CHECK(sphere_integral(one, 3, q).value == doctest::Approx(2 * pi * pi).epsilon(1e-13));
  CHECK(sphere_integral([](std::span<const double> v) { return v[2] * v[2]; }, 3, q).value ==
        doctest::Approx(pi * pi / 2).epsilon(1e-12));

  // ∫_{S³} |u·v| dS = 2ω₃ = 8π/3.
  const std::vector<double> u = {0.5, -0.5, 0.5, 0.5};
  SphereOptions opts;
  opts.pole = u;
  opts.split_equator = true;
  opts.absolute = true;
  auto dot = [&](std::span<const double> v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3]; };
  const double kr = 2 * ball_volume(3);
  CHECK(kr == doctest::Approx(8 * pi / 3));
  CHECK(sphere_integral(dot, 3, q, opts).value == doctest::Approx(kr).epsilon(1e-12));

  // Brute-force Monte Carlo oracle for the same integral.
  QuadratureSpec mc = q;
  mc.sphere_rule = SphereRule::monte_carlo;
  SphereOptions abs_only;
  abs_only.absolute = true;
  const auto est = sphere_integral(dot, 3, mc, abs_only);
  CHECK(est.is_monte_carlo());
  CHECK(std::abs(est.value - kr) <= 4 * est.std_error);
}

TEST_CASE("Householder frame") {
  const std::vector<double> pole = {0.0, 0.6, 0.8};
  const auto h = frame_with_first_axis(pole);
  for (int i = 0; i < 3; ++i) CHECK(h[i * 3] == doctest::Approx(pole[i]));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += h[k * 3 + i] * h[k * 3 + j];
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("counter-based stream") {
  const McStream a(42), b(42), c(43);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(a.bits(i, 0) == b.bits(i, 0));
    CHECK(a.bits(i, 0) != c.bits(i, 0));
    const double x = a.uniform(i, 1);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  CHECK(mc_stream(7, 1000) == mc_stream(7, 1000));
  CHECK(mc_stream(0, 0).empty());
  CHECK_THROWS_AS(mc_estimate(mc_stream(0, 0)), IntegrationError);

  // Two seeds estimate ∫₀¹ x² dx within five combined standard errors.
  auto estimate = [](std::uint64_t seed) {
    auto xs = mc_stream(seed, 100000);
    for (double& x : xs) x = x * x;
    return mc_estimate(xs);
  };
  const McEstimate e1 = estimate(1), e2 = estimate(2);
  CHECK(std::abs(e1.mean - e2.mean) <= 5 * std::hypot(e1.std_error, e2.std_error));
  CHECK(std::abs(e1.mean - 1.0 / 3) <= 5 * e1.std_error);
}

TEST_CASE("unit vectors are uniform on the sphere") {
  const McStream s(3);
  std::vector<double> v(4);
  double mean0 = 0.0, second0 = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    s.unit_vector(i, 0, v);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    CHECK(std::abs(norm - 1.0) <= 1e-14);
    mean0 += v[0];
    second0 += v[0] * v[0];
  }
  CHECK(std::abs(mean0 / count) < 0.02);
  CHECK(std::abs(second0 / count - 0.25) < 0.01);
}

TEST_CASE("pairwise summation and parallel_for") {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / (i + 1);
  double naive = 0.0;
  for (double x : xs) naive += x;
  CHECK(pairwise_sum(xs) == doctest::Approx(naive).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);

  for (int threads : {1, 2, 5}) {
    std::vector<double> out(257, 0.0);
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = std::sqrt(double(i)); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == std::sqrt(double(i)));
  }
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("boom"); }),
                  std::runtime_error);
}
