#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "heis/integrate.hpp"
#include "heis/projection.hpp"

using namespace heis;
using std::numbers::pi;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

SurfaceIntegrand projection_integrand(std::vector<double> dir) {
  return {[dir](const SurfacePoint& q) {
            if (!q.nonsingular) return 0.0;
            double s = 0.0;
            for (std::size_t i = 0; i < dir.size(); ++i) s += dir[i] * q.normal_xi[i];
            return s;
          },
          true, false};
}

}  // namespace

TEST_CASE("surface integral examples") {
  QuadratureSpec q;
  const SurfaceIntegrand one{[](const SurfacePoint&) { return 1.0; }, false, false};
  CHECK(surface_integral(PansuSphere(Dim(1), 1.0), one, q).value == doctest::Approx(pi * pi).epsilon(1e-10));
  CHECK(surface_integral(RotationalSurface::flat_pair(Dim(1), 1.0), one, q).value ==
        doctest::Approx(4 * pi / 3).epsilon(1e-12));
  const auto r = surface_integral(PansuSphere(Dim(1), 1.0), projection_integrand({0.6, 0.8}), q);
  CHECK(r.value == doctest::Approx(2 * pi).epsilon(1e-10));
  CHECK(r.converged);
}

TEST_CASE("the deterministic product rule on S^3 handles smooth integrands") {
  QuadratureSpec q;
  q.sphere_rule = SphereRule::product_angles;
  const SurfaceIntegrand one{[](const SurfacePoint&) { return 1.0; }, false, false};
  CHECK(surface_integral(PansuSphere(Dim(2), 1.0), one, q).value ==
        doctest::Approx(0.75 * pi * pi * pi).epsilon(1e-9));
}

TEST_CASE("Monte Carlo p-area is consistent with the closed form") {
  QuadratureSpec q;
  q.sphere_rule = SphereRule::monte_carlo;
  const SurfaceIntegrand one{[](const SurfacePoint&) { return 1.0; }, true, false};
  // Graph form so the radial shortcut does not apply.
  const auto r = surface_integral(GraphSurface::pansu(Dim(2), 1.0), one, q);
  CHECK(r.is_monte_carlo());
  CHECK(std::abs(r.value - 0.75 * pi * pi * pi) <= 3 * r.std_error);
  CHECK(r.evaluations == q.mc_samples);
}

TEST_CASE("results are bitwise identical for any thread count") {
  QuadratureSpec base;
  base.mc_samples = 200000;
  const Surface s1 = PansuSphere(Dim(1), 1.0);
  const Surface s2 = PansuSphere(Dim(2), 1.0);
  const Surface g = GraphSurface::from_expression(Dim(1), 1.0, "1 - x1^2 - y1^2", 1.0, SideSelection::both);
  auto run = [&](const Surface& s, std::vector<double> dir, int threads) {
    QuadratureSpec q = base;
    q.threads = threads;
    return surface_integral(s, projection_integrand(std::move(dir)), q);
  };
  for (int threads : {2, 3, 8}) {
    const auto a1 = run(s1, {0.6, 0.8}, 1), b1 = run(s1, {0.6, 0.8}, threads);
    CHECK(same_bits(a1.value, b1.value));
    CHECK(same_bits(a1.error_estimate, b1.error_estimate));
    const auto a2 = run(s2, {0.5, 0.5, 0.5, 0.5}, 1), b2 = run(s2, {0.5, 0.5, 0.5, 0.5}, threads);
    CHECK(same_bits(a2.value, b2.value));
    CHECK(same_bits(a2.std_error, b2.std_error));
    const auto a3 = run(g, {1.0, 0.0}, 1), b3 = run(g, {1.0, 0.0}, threads);
    CHECK(same_bits(a3.value, b3.value));
  }
  // And across repeated runs.
  CHECK(same_bits(run(s2, {1, 0, 0, 0}, 0).value, run(s2, {1, 0, 0, 0}, 0).value));
}

TEST_CASE("seeds change Monte Carlo estimates only within their error") {
  QuadratureSpec q;
  q.mc_samples = 200000;
  const Surface s = PansuSphere(Dim(2), 1.0);
  q.seed = 1;
  const auto a = surface_integral(s, projection_integrand({1, 0, 0, 0}), q);
  q.seed = 2;
  const auto b = surface_integral(s, projection_integrand({1, 0, 0, 0}), q);
  CHECK(a.value != b.value);
  CHECK(std::abs(a.value - b.value) <= 5 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("non-finite integrands are reported") {
  QuadratureSpec q;
  const SurfaceIntegrand bad{[](const SurfacePoint&) { return std::nan(""); }, false, false};
  CHECK_THROWS_AS(surface_integral(RotationalSurface::flat_pair(Dim(1), 1.0), bad, q), IntegrationError);
}
