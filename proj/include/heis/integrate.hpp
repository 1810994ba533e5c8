#pragma once

// Integration of functions over a hypersurface against its p-area measure.
//
// Each side is parametrized by (r, v) ∈ [0, R] × S^{2n−1} with dΣ = D r^{2n−1} dr dS_v.
// The radial direction uses Gauss–Legendre (after r = R sin u when
// singular_endpoint is set); the sphere factor is a circle rule with kink splitting for n = 1 and
// a product or Monte Carlo rule for n ≥ 2.

#include <functional>

#include "heis/quadrature.hpp"
#include "heis/surfaces.hpp"

namespace heis {

struct SurfaceIntegrand {
  std::function<double(const SurfacePoint&)> f;
  /// Integrate |f| for a signed f (kinks handled by the angular rule).
  bool absolute = false;
  /// f depends on (side, r) only; on rotational surfaces the sphere factor
  /// then collapses to S_{2n−1}.
  bool radial = false;
};

IntegralResult surface_integral(const Surface& surface, const SurfaceIntegrand& integrand,
                                const QuadratureSpec& spec, double excise_radius = 0.0);

}  // namespace heis
