#pragma once

// Integration engines for the integrand classes that appear on Heisenberg
// hypersurfaces: inverse-square-root endpoint singularities in the radius,
// absolute-value kinks in the angle, and disk × sphere product domains.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SphereRule {
  automatic,       // product rule for smooth integrands, Monte Carlo for |·| kinks on S^{k≥2}
  product_angles,
  monte_carlo,
};

struct QuadratureSpec {
  int radial_nodes = 256;
  int angular_nodes = 512;
  SphereRule sphere_rule = SphereRule::automatic;
  std::int64_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
  double rel_tol = 1e-8;
  bool singular_endpoint = true;
  /// Recompute at half resolution to attach an error estimate.
  bool estimate_error = true;
  /// Worker cap; 0 reads HEIS_THREADS, falling back to hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  std::int64_t evaluations = 0;
  std::string method;
  /// Standard error for Monte Carlo results, 0 otherwise.
  double std_error = 0.0;
  /// False when error_estimate exceeds rel_tol·|value|.
  bool converged = true;

  bool is_monte_carlo() const { return std_error > 0.0; }
};

std::string describe(const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Gauss–Legendre rules

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Shared immutable rule with `order` nodes (cached, thread-safe).
std::shared_ptr<const GaussLegendreRule> gauss_legendre(int order);

/// Σ w_i g(x_i) over [a, b] with the cached rule.
double gauss_legendre_integrate(const std::function<double(double)>& g, double a, double b, int order);

// ---------------------------------------------------------------------------
// Summation and parallel evaluation

/// Pairwise summation in fixed index order.
double pairwise_sum(std::span<const double> values);

int resolve_threads(int requested);

/// Calls fn(i) for i in [0, count). Results must be written to disjoint slots;
/// nested calls run serially on the calling worker.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Counter-based random stream

/// Draw k of sample i depends only on (seed, i, k), never on scheduling.
class McStream {
 public:
  explicit McStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t index, std::uint32_t lane) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t index, std::uint32_t lane) const;
  /// Standard normal via Box–Muller on lanes (lane, lane+1).
  double normal(std::uint64_t index, std::uint32_t lane) const;
  /// Uniform point on S^{dim−1} ⊂ R^dim, written to out (size dim). Uses
  /// lanes [lane, lane + 2·dim).
  void unit_vector(std::uint64_t index, std::uint32_t lane, std::span<double> out) const;

 private:
  std::uint64_t seed_;
};

/// First `count` uniforms of lane 0.
std::vector<double> mc_stream(std::uint64_t seed, std::size_t count);

struct McEstimate {
  double mean;
  double std_error;
  std::size_t count;
};

/// Sample mean and its standard error; throws IntegrationError when empty.
McEstimate mc_estimate(std::span<const double> samples);

// ---------------------------------------------------------------------------
// One-dimensional and spherical rules

/// ∫₀^R g(r) dr. With spec.singular_endpoint the substitution r = R·sin u
/// removes 1/√(R²−r²)-type singularities at r = R. Optional r_min excises [0, r_min).
IntegralResult radial_integral(const std::function<double(double)>& g, double R, const QuadratureSpec& spec,
                               double r_min = 0.0);

/// Node positions and weights realizing radial_integral with `order` nodes.
struct RadialNodes {
  std::vector<double> r;
  std::vector<double> w;
  std::vector<double> c;  // √(R² − r²), accurate near r = R
};
RadialNodes radial_nodes(double R, int order, bool singular_endpoint, double r_min = 0.0);

/// ∫₀^{2π} amplitude·|cos(θ − phase)| dθ = 4·|amplitude|.
double angular_abs_cos_integral(double amplitude, double phase);

/// ∫₀^{2π} g(θ) dθ. Smooth periodic integrands use the trapezoid rule; with
/// `absolute` the integral of |g| is taken piecewise between the detected sign
/// changes of g, each piece with Gauss–Legendre.
IntegralResult circle_integral(const std::function<double(double)>& g, int nodes, bool absolute);

struct SphereOptions {
  /// Polar axis of the angular coordinates (unit vector in R^{k+1}); empty = e₁.
  std::vector<double> pole;
  /// Split the polar angle at π/2; exact treatment of kinks on pole^⊥.
  bool split_equator = false;
  /// Integrate |h| for a signed h; enables kink handling and selects Monte
  /// Carlo on S^{k≥2} under SphereRule::automatic.
  bool absolute = false;
};

/// ∫_{S^k} h(v) dS_v for the unit sphere S^k ⊂ R^{k+1}.
IntegralResult sphere_integral(const std::function<double(std::span<const double>)>& h, int k,
                               const QuadratureSpec& spec, const SphereOptions& options = {});

/// Householder-type orthogonal matrix (row-major, dim×dim) whose first column is `pole`.
std::vector<double> frame_with_first_axis(std::span<const double> pole);

}  // namespace heis
