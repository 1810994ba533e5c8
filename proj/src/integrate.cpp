#include "heis/integrate.hpp"

#include <cmath>
#include <numbers>

namespace heis {

namespace {

bool use_monte_carlo(const QuadratureSpec& spec, const SurfaceIntegrand& integrand, int n) {
  switch (spec.sphere_rule) {
    case SphereRule::monte_carlo: return n >= 2;
    case SphereRule::product_angles: return false;
    case SphereRule::automatic: return n >= 2 && integrand.absolute;
  }
  return false;
}

struct Pass {
  double value = 0.0;
  std::int64_t evaluations = 0;
};

Pass deterministic_pass(const Surface& surface, const SurfaceIntegrand& integrand, const QuadratureSpec& spec,
                        int radial_order, int angular_nodes, double excise_radius) {
  const Dim dim = dim_of(surface);
  const int n = dim.n();
  const int k = 2 * n - 1;
  const double R = radius_of(surface);
  const std::vector<Side> sides = sides_of(surface);
  const bool radial_path = integrand.radial && is_rotational(surface);
  const double sphere = sphere_area(k);
  const RadialNodes nodes = radial_nodes(R, radial_order, spec.singular_endpoint, excise_radius);

  const std::size_t per_side = nodes.r.size();
  const std::size_t tasks = per_side * sides.size();
  std::vector<double> partial(tasks);
  std::vector<std::int64_t> evals(tasks);

  QuadratureSpec inner = spec;
  inner.angular_nodes = angular_nodes;
  inner.sphere_rule = SphereRule::product_angles;
  inner.estimate_error = false;

  parallel_for(tasks, spec.threads, [&](std::size_t t) {
    const Side side = sides[t / per_side];
    const std::size_t i = t % per_side;
    SurfaceSampler sampler(surface, side);
    sampler.set_radius(nodes.r[i], nodes.c[i]);
    auto weighted = [&](std::span<const double> v) {
      const SurfacePoint& pt = sampler.at(v);
      return integrand.f(pt) * pt.area_density;
    };
    double angular = 0.0;
    if (radial_path) {
      std::vector<double> e1(dim.contact(), 0.0);
      e1[0] = 1.0;
      const double w = weighted(e1);
      angular = sphere * (integrand.absolute ? std::abs(w) : w);
      evals[t] = 1;
    } else if (n == 1) {
      const IntegralResult c = circle_integral(
          [&](double theta) {
            const double v[2] = {std::cos(theta), std::sin(theta)};
            return weighted(std::span<const double>(v, 2));
          },
          angular_nodes, integrand.absolute);
      angular = c.value;
      evals[t] = c.evaluations;
    } else {
      SphereOptions opts;
      opts.absolute = integrand.absolute;
      const IntegralResult c = sphere_integral(weighted, k, inner, opts);
      angular = c.value;
      evals[t] = c.evaluations;
    }
    if (!std::isfinite(angular)) {
      throw IntegrationError("surface_integral: non-finite integrand at r = " + std::to_string(nodes.r[i]));
    }
    partial[t] = nodes.w[i] * angular;
  });

  Pass out;
  out.value = pairwise_sum(partial);
  for (auto e : evals) out.evaluations += e;
  return out;
}

IntegralResult monte_carlo(const Surface& surface, const SurfaceIntegrand& integrand, const QuadratureSpec& spec,
                           double excise_radius) {
  const Dim dim = dim_of(surface);
  const int k = dim.contact() - 1;
  const double R = radius_of(surface);
  const std::vector<Side> sides = sides_of(surface);
  const auto count = static_cast<std::size_t>(spec.mc_samples / static_cast<std::int64_t>(sides.size()));
  if (count == 0) throw IntegrationError("surface_integral: Monte Carlo needs at least one sample per side");
  const double sphere = sphere_area(k);
  const McStream stream(spec.seed);

  const double u0 = spec.singular_endpoint ? std::asin(excise_radius / R) : excise_radius;
  const double u1 = spec.singular_endpoint ? std::numbers::pi / 2 : R;

  IntegralResult out;
  out.method = "surface-monte-carlo";
  double variance = 0.0;
  std::vector<double> samples(count);
  for (std::size_t si = 0; si < sides.size(); ++si) {
    const Side side = sides[si];
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (count + kBlock - 1) / kBlock;
    parallel_for(blocks, spec.threads, [&](std::size_t b) {
      SurfaceSampler sampler(surface, side);
      std::vector<double> v(dim.contact());
      const std::size_t end = std::min(count, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) {
        const std::uint64_t index = si * count + i;
        const double u = u0 + (u1 - u0) * stream.uniform(index, 0);
        double r = u;
        double c = std::sqrt((R - u) * (R + u));
        double jac = u1 - u0;
        if (spec.singular_endpoint) {
          r = R * std::sin(u);
          c = R * std::cos(u);
          jac *= c;
        }
        stream.unit_vector(index, 1, v);
        sampler.set_radius(r, c);
        const SurfacePoint& pt = sampler.at(v);
        const double f = integrand.f(pt);
        const double val = jac * sphere * (integrand.absolute ? std::abs(f) : f) * pt.area_density;
        if (!std::isfinite(val)) throw IntegrationError("surface_integral: non-finite Monte Carlo sample");
        samples[i] = val;
      }
    });
    const McEstimate est = mc_estimate(samples);
    out.value += est.mean;
    variance += est.std_error * est.std_error;
    out.evaluations += static_cast<std::int64_t>(count);
  }
  out.std_error = std::sqrt(variance);
  out.error_estimate = 3.0 * out.std_error;
  const double scale = std::abs(out.value) > 0.0 ? std::abs(out.value) : 1.0;
  out.converged = out.error_estimate <= spec.rel_tol * scale;
  return out;
}

}  // namespace

IntegralResult surface_integral(const Surface& surface, const SurfaceIntegrand& integrand,
                                const QuadratureSpec& spec, double excise_radius) {
  spec.validate();
  const int n = dim_of(surface).n();
  const bool radial_path = integrand.radial && is_rotational(surface);
  if (!radial_path && use_monte_carlo(spec, integrand, n)) {
    return monte_carlo(surface, integrand, spec, excise_radius);
  }

  IntegralResult out;
  const Pass fine = deterministic_pass(surface, integrand, spec, spec.radial_nodes, spec.angular_nodes, excise_radius);
  out.value = fine.value;
  out.evaluations = fine.evaluations;
  out.method = radial_path ? "radial" : (n == 1 ? "radial x circle" : "radial x sphere-product");
  if (spec.estimate_error) {
    const Pass coarse = deterministic_pass(surface, integrand, spec, std::max(2, spec.radial_nodes / 2),
                                           std::max(4, spec.angular_nodes / 2), excise_radius);
    out.error_estimate = std::abs(fine.value - coarse.value);
    out.evaluations += coarse.evaluations;
    const double scale = std::abs(out.value) > 0.0 ? std::abs(out.value) : 1.0;
    out.converged = out.error_estimate <= spec.rel_tol * scale;
  }
  return out;
}

}  // namespace heis
