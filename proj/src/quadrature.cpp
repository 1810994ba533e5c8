#include "heis/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "heis/core.hpp"

namespace heis {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

thread_local bool tl_in_parallel = false;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

GaussLegendreRule build_gauss_legendre(int order) {
  GaussLegendreRule rule;
  if (order == 1) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // one more derivative evaluation at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

bool is_converged(double value, double error, double rel_tol) {
  const double scale = std::abs(value) > 0.0 ? std::abs(value) : 1.0;
  return error <= rel_tol * scale;
}

// Root of g in (a, b) where g(a), g(b) have opposite signs.
double bisect(const std::function<double(double)>& g, double a, double b, double ga, std::int64_t& evals) {
  for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    ++evals;
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double piecewise_abs(const std::function<double(double)>& g, std::span<const double> breaks, int order,
                     std::int64_t& evals) {
  const auto rule = gauss_legendre(order);
  std::vector<double> pieces;
  pieces.reserve(breaks.size());
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = i + 1 < breaks.size() ? breaks[i + 1] : breaks[0] + kTwoPi;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int k = 0; k < order; ++k) s += rule->weights[k] * std::abs(g(mid + half * rule->nodes[k]));
    evals += order;
    pieces.push_back(half * s);
  }
  return pairwise_sum(pieces);
}

void spherical_point(std::span<const double> angles, double theta, std::span<double> out) {
  // angles φ₁..φ_{k−1} ∈ [0, π], θ ∈ [0, 2π); out has k+1 entries.
  double s = 1.0;
  const std::size_t k1 = angles.size();
  for (std::size_t j = 0; j < k1; ++j) {
    out[j] = s * std::cos(angles[j]);
    s *= std::sin(angles[j]);
  }
  out[k1] = s * std::cos(theta);
  out[k1 + 1] = s * std::sin(theta);
}

IntegralResult sphere_product(const std::function<double(std::span<const double>)>& h, int k, int m,
                              const QuadratureSpec& spec, const SphereOptions& options) {
  const int dim = k + 1;
  const auto rule = gauss_legendre(m);
  const int polar_pieces = options.split_equator ? 2 : 1;
  const int theta_nodes = 2 * m;

  // 1-D tables for each polar angle: nodes and Jacobian-weighted weights.
  struct Axis {
    std::vector<double> angle;
    std::vector<double> weight;
  };
  std::vector<Axis> axes(k - 1);
  for (int j = 0; j < k - 1; ++j) {
    const int power = k - 1 - j;
    const int pieces = j == 0 ? polar_pieces : 1;
    for (int piece = 0; piece < pieces; ++piece) {
      const double a = pieces == 1 ? 0.0 : piece * std::numbers::pi / 2;
      const double b = pieces == 1 ? std::numbers::pi : a + std::numbers::pi / 2;
      const double half = 0.5 * (b - a);
      for (int i = 0; i < m; ++i) {
        const double phi = 0.5 * (a + b) + half * rule->nodes[i];
        axes[j].angle.push_back(phi);
        axes[j].weight.push_back(half * rule->weights[i] * std::pow(std::sin(phi), power));
      }
    }
  }
  std::vector<double> frame;
  if (!options.pole.empty()) frame = frame_with_first_axis(options.pole);

  // Flatten the polar grid; the innermost θ loop runs inside each task.
  std::size_t polar_count = 1;
  for (const auto& ax : axes) polar_count *= ax.angle.size();
  std::vector<double> partial(polar_count);

  parallel_for(polar_count, spec.threads, [&](std::size_t flat) {
    std::vector<double> angles(k - 1);
    double w = 1.0;
    std::size_t rem = flat;
    for (int j = k - 2; j >= 0; --j) {
      const std::size_t len = axes[j].angle.size();
      const std::size_t idx = rem % len;
      rem /= len;
      angles[j] = axes[j].angle[idx];
      w *= axes[j].weight[idx];
    }
    std::vector<double> v_std(dim);
    std::vector<double> v(dim);
    std::vector<double> terms(theta_nodes);
    for (int t = 0; t < theta_nodes; ++t) {
      const double theta = kTwoPi * t / theta_nodes;
      spherical_point(angles, theta, v_std);
      if (frame.empty()) {
        v = v_std;
      } else {
        for (int r = 0; r < dim; ++r) {
          double s = 0.0;
          for (int c = 0; c < dim; ++c) s += frame[r * dim + c] * v_std[c];
          v[r] = s;
        }
      }
      const double hv = h(v);
      if (!std::isfinite(hv)) throw IntegrationError("sphere_integral: non-finite integrand");
      terms[t] = options.absolute ? std::abs(hv) : hv;
    }
    partial[flat] = w * (kTwoPi / theta_nodes) * pairwise_sum(terms);
  });

  IntegralResult out;
  out.value = pairwise_sum(partial);
  out.evaluations = static_cast<std::int64_t>(polar_count) * theta_nodes;
  out.method = "sphere-product";
  return out;
}

IntegralResult sphere_monte_carlo(const std::function<double(std::span<const double>)>& h, int k,
                                  const QuadratureSpec& spec, bool absolute) {
  const auto count = static_cast<std::size_t>(spec.mc_samples);
  if (count == 0) throw IntegrationError("sphere_integral: Monte Carlo needs at least one sample");
  const McStream stream(spec.seed);
  const double area = sphere_area(k);
  std::vector<double> samples(count);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, spec.threads, [&](std::size_t b) {
    std::vector<double> v(k + 1);
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      stream.unit_vector(i, 0, v);
      const double hv = h(v);
      if (!std::isfinite(hv)) throw IntegrationError("sphere_integral: non-finite integrand");
      samples[i] = area * (absolute ? std::abs(hv) : hv);
    }
  });
  const McEstimate est = mc_estimate(samples);
  IntegralResult out;
  out.value = est.mean;
  out.std_error = est.std_error;
  out.error_estimate = 3.0 * est.std_error;
  out.evaluations = static_cast<std::int64_t>(count);
  out.method = "sphere-monte-carlo";
  out.converged = is_converged(out.value, out.error_estimate, spec.rel_tol);
  return out;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (radial_nodes < 2) throw std::invalid_argument("radial_nodes must be >= 2");
  if (angular_nodes < 2) throw std::invalid_argument("angular_nodes must be >= 2");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (mc_samples < 0) throw std::invalid_argument("mc_samples must be non-negative");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

std::string describe(const QuadratureSpec& spec) {
  std::ostringstream os;
  const char* rule = spec.sphere_rule == SphereRule::automatic        ? "automatic"
                     : spec.sphere_rule == SphereRule::product_angles ? "product_angles"
                                                                      : "monte_carlo";
  os << "radial_nodes=" << spec.radial_nodes << " angular_nodes=" << spec.angular_nodes
     << " sphere_rule=" << rule << " mc_samples=" << spec.mc_samples << " seed=" << spec.seed
     << " rel_tol=" << spec.rel_tol << " singular_endpoint=" << (spec.singular_endpoint ? "true" : "false");
  return os.str();
}

std::shared_ptr<const GaussLegendreRule> gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_shared<const GaussLegendreRule>(build_gauss_legendre(order));
  return slot;
}

double gauss_legendre_integrate(const std::function<double(double)>& g, double a, double b, int order) {
  const auto rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  std::vector<double> terms(order);
  for (int i = 0; i < order; ++i) terms[i] = rule->weights[i] * g(mid + half * rule->nodes[i]);
  return half * pairwise_sum(terms);
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t mid = values.size() / 2;
  return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HEIS_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const int workers = static_cast<int>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1 || tl_in_parallel) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      tl_in_parallel = true;
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
      tl_in_parallel = false;
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t McStream::bits(std::uint64_t index, std::uint32_t lane) const {
  const std::uint64_t key = splitmix64(seed_);
  return splitmix64(key ^ splitmix64(index * 0xD1B54A32D192ED03ULL + lane * 0x8CB92BA72F3D8DD7ULL));
}

double McStream::uniform(std::uint64_t index, std::uint32_t lane) const {
  return (static_cast<double>(bits(index, lane) >> 11) + 0.5) * 0x1.0p-53;
}

double McStream::normal(std::uint64_t index, std::uint32_t lane) const {
  const double u1 = uniform(index, lane);
  const double u2 = uniform(index, lane + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

void McStream::unit_vector(std::uint64_t index, std::uint32_t lane, std::span<double> out) const {
  for (;;) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = normal(index, lane + 2 * static_cast<std::uint32_t>(i));
      norm2 += out[i] * out[i];
    }
    if (norm2 > 1e-300) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& c : out) c *= inv;
      return;
    }
    lane += 2 * static_cast<std::uint32_t>(out.size());
  }
}

std::vector<double> mc_stream(std::uint64_t seed, std::size_t count) {
  const McStream stream(seed);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = stream.uniform(i, 0);
  return out;
}

McEstimate mc_estimate(std::span<const double> samples) {
  if (samples.empty()) throw IntegrationError("Monte Carlo estimate over an empty sample");
  const double n = static_cast<double>(samples.size());
  const double mean = pairwise_sum(samples) / n;
  if (samples.size() == 1) return {mean, std::numeric_limits<double>::infinity(), 1};
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - mean) * (samples[i] - mean);
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n), samples.size()};
}

RadialNodes radial_nodes(double R, int order, bool singular_endpoint, double r_min) {
  if (!(R > 0.0)) throw std::invalid_argument("radial_nodes: radius must be positive");
  if (r_min < 0.0 || r_min >= R) throw std::invalid_argument("radial_nodes: r_min must lie in [0, R)");
  const auto rule = gauss_legendre(order);
  RadialNodes out;
  out.r.resize(order);
  out.w.resize(order);
  out.c.resize(order);
  if (singular_endpoint) {
    const double u0 = std::asin(r_min / R);
    const double half = 0.5 * (std::numbers::pi / 2 - u0);
    const double mid = 0.5 * (std::numbers::pi / 2 + u0);
    for (int i = 0; i < order; ++i) {
      const double u = mid + half * rule->nodes[i];
      out.r[i] = R * std::sin(u);
      out.c[i] = R * std::cos(u);
      out.w[i] = half * rule->weights[i] * out.c[i];
    }
  } else {
    const double half = 0.5 * (R - r_min);
    const double mid = 0.5 * (R + r_min);
    for (int i = 0; i < order; ++i) {
      out.r[i] = mid + half * rule->nodes[i];
      out.c[i] = std::sqrt((R - out.r[i]) * (R + out.r[i]));
      out.w[i] = half * rule->weights[i];
    }
  }
  return out;
}

IntegralResult radial_integral(const std::function<double(double)>& g, double R, const QuadratureSpec& spec,
                               double r_min) {
  spec.validate();
  auto run = [&](int order, std::int64_t& evals) {
    const RadialNodes nodes = radial_nodes(R, order, spec.singular_endpoint, r_min);
    std::vector<double> terms(order);
    for (int i = 0; i < order; ++i) {
      const double gi = g(nodes.r[i]);
      if (!std::isfinite(gi)) {
        throw IntegrationError("radial_integral: non-finite integrand at r = " + std::to_string(nodes.r[i]));
      }
      terms[i] = nodes.w[i] * gi;
    }
    evals += order;
    return pairwise_sum(terms);
  };
  IntegralResult out;
  out.method = spec.singular_endpoint ? "gauss-legendre/sine-substitution" : "gauss-legendre";
  out.value = run(spec.radial_nodes, out.evaluations);
  if (spec.estimate_error) {
    const double coarse = run(std::max(1, spec.radial_nodes / 2), out.evaluations);
    out.error_estimate = std::abs(out.value - coarse);
    out.converged = is_converged(out.value, out.error_estimate, spec.rel_tol);
  }
  return out;
}

double angular_abs_cos_integral(double amplitude, double /*phase*/) {
  // |cos| has period π and integrates to 2 over each period.
  return 4.0 * std::abs(amplitude);
}

IntegralResult circle_integral(const std::function<double(double)>& g, int nodes, bool absolute) {
  if (nodes < 2) throw std::invalid_argument("circle_integral: need at least two nodes");
  IntegralResult out;
  std::vector<double> samples(nodes);
  for (int k = 0; k < nodes; ++k) {
    samples[k] = g(kTwoPi * k / nodes);
    if (!std::isfinite(samples[k])) throw IntegrationError("circle_integral: non-finite integrand");
  }
  out.evaluations = nodes;

  auto trapezoid = [&](int stride) {
    std::vector<double> terms;
    terms.reserve(nodes / stride + 1);
    for (int k = 0; k < nodes; k += stride) terms.push_back(absolute ? std::abs(samples[k]) : samples[k]);
    return kTwoPi / static_cast<double>(terms.size()) * pairwise_sum(terms);
  };

  if (absolute) {
    if (std::all_of(samples.begin(), samples.end(), [](double s) { return s == 0.0; })) {
      out.method = "circle-kink-split";
      return out;
    }
    std::vector<double> roots;
    for (int k = 0; k < nodes; ++k) {
      const double a = samples[k];
      const double b = samples[(k + 1) % nodes];
      const double ta = kTwoPi * k / nodes;
      if (a == 0.0) {
        roots.push_back(ta);
      } else if (b != 0.0 && (a < 0.0) != (b < 0.0)) {
        roots.push_back(bisect(g, ta, ta + kTwoPi / nodes, a, out.evaluations));
      }
    }
    if (!roots.empty()) {
      std::sort(roots.begin(), roots.end());
      const int order = std::clamp(nodes / 8, 16, 128);
      out.value = piecewise_abs(g, roots, order, out.evaluations);
      const double coarse = piecewise_abs(g, roots, order / 2, out.evaluations);
      out.error_estimate = std::abs(out.value - coarse);
      out.method = "circle-kink-split";
      return out;
    }
  }
  out.value = trapezoid(1);
  out.error_estimate = nodes % 2 == 0 ? std::abs(out.value - trapezoid(2)) : 0.0;
  out.method = "circle-trapezoid";
  return out;
}

IntegralResult sphere_integral(const std::function<double(std::span<const double>)>& h, int k,
                               const QuadratureSpec& spec, const SphereOptions& options) {
  spec.validate();
  if (k < 1) throw std::invalid_argument("sphere_integral: sphere dimension must be >= 1");
  if (!options.pole.empty() && options.pole.size() != static_cast<std::size_t>(k + 1)) {
    throw DimensionError("sphere_integral: pole has wrong dimension");
  }
  if (k == 1) {
    std::vector<double> frame;
    if (!options.pole.empty()) frame = frame_with_first_axis(options.pole);
    auto g = [&](double theta) {
      double v[2] = {std::cos(theta), std::sin(theta)};
      if (!frame.empty()) {
        const double a = frame[0] * v[0] + frame[1] * v[1];
        const double b = frame[2] * v[0] + frame[3] * v[1];
        v[0] = a;
        v[1] = b;
      }
      return h(std::span<const double>(v, 2));
    };
    IntegralResult out = circle_integral(g, spec.angular_nodes, options.absolute);
    out.converged = is_converged(out.value, out.error_estimate, spec.rel_tol);
    return out;
  }

  SphereRule rule = spec.sphere_rule;
  if (rule == SphereRule::automatic) {
    rule = options.absolute && !options.split_equator ? SphereRule::monte_carlo : SphereRule::product_angles;
  }
  if (rule == SphereRule::monte_carlo) return sphere_monte_carlo(h, k, spec, options.absolute);

  // Keep the product grid near a few million points.
  const int budget = static_cast<int>(std::floor(std::pow(2.0e6, 1.0 / k)));
  const int m = std::max(4, std::min(spec.angular_nodes / 16, budget));
  IntegralResult out = sphere_product(h, k, m, spec, options);
  if (spec.estimate_error) {
    const IntegralResult coarse = sphere_product(h, k, std::max(2, m / 2), spec, options);
    out.error_estimate = std::abs(out.value - coarse.value);
    out.evaluations += coarse.evaluations;
  }
  out.converged = is_converged(out.value, out.error_estimate, spec.rel_tol);
  return out;
}

std::vector<double> frame_with_first_axis(std::span<const double> pole) {
  const std::size_t dim = pole.size();
  double norm2 = 0.0;
  for (double p : pole) norm2 += p * p;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10) throw std::invalid_argument("frame_with_first_axis: pole must be a unit vector");
  std::vector<double> m(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = 1.0;
  // H = I − 2wwᵀ/(wᵀw) with w = e₁ − pole maps e₁ to pole.
  std::vector<double> w(pole.begin(), pole.end());
  for (double& c : w) c = -c;
  w[0] += 1.0;
  double ww = 0.0;
  for (double c : w) ww += c * c;
  if (ww < 1e-24) return m;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) m[r * dim + c] -= 2.0 * w[r] * w[c] / ww;
  }
  return m;
}

}  // namespace heis
