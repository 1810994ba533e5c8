#include "heis/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "heis/integrate.hpp"
#include "heis/projection.hpp"

namespace heis {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string index_tag(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i);
  return buf;
}

double tol_or(const VerifyConfig& cfg, double fallback) { return cfg.tol.value_or(fallback); }

std::string label_of(const VerifyConfig& cfg, const char* fallback) {
  if (!cfg.surface) return fallback;
  return cfg.surface_label.empty() ? "custom" : cfg.surface_label;
}

/// Mean of the projected p-area over directions on S^{2n−1}, with its
/// standard error when the directions (or the inner integrals) are sampled.
struct DirectionMean {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t evaluations = 0;
};

DirectionMean direction_mean(const Surface& sigma, const VerifyConfig& cfg, const QuadratureSpec& inner) {
  const Dim n = dim_of(sigma);
  DirectionMean out;
  if (n.n() == 1) {
    constexpr int kAngles = 32;
    const IntegralResult c = circle_integral(
        [&](double t) {
          const double d[2] = {std::cos(t), std::sin(t)};
          const IntegralResult r = projected_parea(sigma, std::span<const double>(d, 2), inner);
          out.evaluations += r.evaluations;
          return r.value;
        },
        kAngles, false);
    out.mean = c.value / (2.0 * std::numbers::pi);
    return out;
  }
  const auto dirs = random_directions(n, static_cast<std::size_t>(cfg.samples), cfg.seed);
  std::vector<double> values;
  double inner_var = 0.0;
  for (const auto& d : dirs) {
    const IntegralResult r = projected_parea(sigma, d, inner);
    values.push_back(r.value);
    inner_var += r.std_error * r.std_error;
    out.evaluations += r.evaluations;
  }
  const McEstimate est = mc_estimate(values);
  const double k = static_cast<double>(values.size());
  out.mean = est.mean;
  out.std_error = std::sqrt(est.std_error * est.std_error + inner_var / (k * k));
  return out;
}

QuadratureSpec without_error_pass(QuadratureSpec q) {
  q.estimate_error = false;
  return q;
}

}  // namespace

std::string to_string(Which w) {
  switch (w) {
    case Which::pansu_projection: return "pansu_projection";
    case Which::cauchy: return "cauchy";
    case Which::anydirection: return "anydirection";
    case Which::rotational_constancy: return "rotational_constancy";
    case Which::lemma_kr: return "lemma_kr";
    case Which::expected_value: return "expected_value";
    case Which::pansu_area: return "pansu_area";
  }
  return "?";
}

std::optional<Which> parse_which(const std::string& name) {
  for (Which w : {Which::pansu_projection, Which::cauchy, Which::anydirection, Which::rotational_constancy,
                  Which::lemma_kr, Which::expected_value, Which::pansu_area}) {
    if (to_string(w) == name) return w;
  }
  return std::nullopt;
}

ReportRow make_row(std::string case_id, double computed, double expected, double tol, std::int64_t evaluations,
                   double seconds, double std_error) {
  ReportRow row;
  row.case_id = std::move(case_id);
  row.computed = computed;
  row.expected = expected;
  row.tol = tol;
  row.evaluations = evaluations;
  row.seconds = seconds;
  row.std_error = std_error;
  const double diff = std::abs(computed - expected);
  row.rel_err = expected == 0.0 ? diff : diff / std::abs(expected);
  row.pass = row.rel_err >= 0.0 && row.rel_err <= tol;
  if (std_error > 0.0) row.pass = row.pass && diff <= 4.0 * std_error;
  return row;
}

bool Report::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void Report::append(Report other) {
  for (auto& r : other.rows) rows.push_back(std::move(r));
  for (auto& n : other.notes) notes.push_back(std::move(n));
}

void Report::sort() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.case_id < b.case_id; });
}

// ---------------------------------------------------------------------------

Report verify_pansu_area(const VerifyConfig& cfg) {
  Report rep;
  const auto start = Clock::now();
  const IntegralResult r = p_area(PansuSphere(cfg.n, cfg.lambda), cfg.quadrature);
  rep.rows.push_back(make_row("pansu_area/n" + std::to_string(cfg.n.n()) + "/lambda" + num(cfg.lambda), r.value,
                              pansu_area_closed_form(cfg.n, cfg.lambda), tol_or(cfg, 1e-8), r.evaluations,
                              seconds_since(start)));
  return rep;
}

Report verify_pansu_projection(const VerifyConfig& cfg) {
  Report rep;
  const Surface sphere = PansuSphere(cfg.n, cfg.lambda);
  const double expected = constants(cfg.n, cfg.lambda).pansu_projection();
  const std::string base = "pansu_projection/n" + std::to_string(cfg.n.n()) + "/lambda" + num(cfg.lambda) + "/";
  const auto dirs = random_directions(cfg.n, static_cast<std::size_t>(cfg.samples), cfg.seed);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto start = Clock::now();
    const PansuDirection d = PansuDirection::from_dir(dirs[i], cfg.lambda);
    const IntegralResult r = projected_parea(sphere, d, cfg.quadrature);
    const double tol = r.is_monte_carlo() ? cfg.mc_tol : tol_or(cfg, 1e-6);
    rep.rows.push_back(make_row(base + index_tag("d", i), r.value, expected, tol, r.evaluations,
                                seconds_since(start), r.std_error));
  }
  return rep;
}

IntegralResult pansu_weighted_projection(const Surface& sigma, double lambda, int outer_radial, int outer_angular,
                                         const QuadratureSpec& inner) {
  QuadratureSpec outer = inner;
  outer.radial_nodes = outer_radial;
  outer.angular_nodes = outer_angular;
  outer.sphere_rule = SphereRule::product_angles;
  outer.estimate_error = false;
  const QuadratureSpec inner_spec = without_error_pass(inner);
  SurfaceIntegrand f{[&](const SurfacePoint& p) {
                       if (!p.nonsingular) return 0.0;
                       return projected_parea(sigma, p.normal_xi, inner_spec).value;
                     },
                     false, false};
  return surface_integral(PansuSphere(dim_of(sigma), lambda), f, outer);
}

Report verify_cauchy(const VerifyConfig& cfg) {
  Report rep;
  const Surface sigma = cfg.surface.value_or(RotationalSurface::paraboloid_pair(cfg.n, 1.0, 1.0));
  const Dim n = dim_of(sigma);
  const Constants k = constants(n, cfg.lambda);
  const double tol = tol_or(cfg, 1e-3);
  const std::string base = "cauchy/" + label_of(cfg, "paraboloid_pair") + "/";
  const QuadratureSpec inner = without_error_pass(cfg.quadrature);

  auto start = Clock::now();
  const IntegralResult lhs = p_area(sigma, cfg.quadrature);
  const IntegralResult area_p = p_area(PansuSphere(n, cfg.lambda), cfg.quadrature);
  const DirectionMean mean = direction_mean(sigma, cfg, inner);
  const double factored = area_p.value * mean.mean;  // ∫_P A(Σ|Ñ(p)^⊥) dΣ_p
  const double rhs1 = factored / (2.0 * k.c_n * k.omega);
  const double rhs2 = k.s / (2.0 * k.omega) * (factored / area_p.value);
  const double rhs_se = mean.std_error * area_p.value / (2.0 * k.c_n * k.omega);
  const double seconds = seconds_since(start);
  const bool mc = mean.std_error > 0.0;
  rep.rows.push_back(make_row(base + "rhs1_factored", rhs1, lhs.value, mc ? cfg.mc_tol : tol,
                              lhs.evaluations + area_p.evaluations + mean.evaluations, seconds, rhs_se));
  rep.rows.push_back(make_row(base + "rhs2", rhs2, lhs.value, mc ? cfg.mc_tol : tol, mean.evaluations, seconds,
                              rhs_se * k.s * k.c_n / area_p.value));
  rep.rows.push_back(make_row(base + "rhs1_over_rhs2", rhs1 / rhs2, 1.0, 1e-12, 0, seconds));

  if (n.n() == 1) {
    start = Clock::now();
    QuadratureSpec literal_inner = inner;
    literal_inner.radial_nodes = std::min(inner.radial_nodes, 64);
    literal_inner.angular_nodes = std::min(inner.angular_nodes, 128);
    const IntegralResult outer = pansu_weighted_projection(sigma, cfg.lambda, 16, 32, literal_inner);
    rep.rows.push_back(make_row(base + "rhs1_literal", outer.value / (2.0 * k.c_n * k.omega), lhs.value, tol,
                                outer.evaluations, seconds_since(start)));
  }
  return rep;
}

Report verify_anydirection(const VerifyConfig& cfg) {
  Report rep;
  const Surface sigma = cfg.surface.value_or(RotationalSurface::pansu(Dim(1), cfg.lambda));
  if (dim_of(sigma).n() != 1) throw DimensionError("verify_anydirection: n = 1 only");
  const std::string base = "anydirection/" + label_of(cfg, "pansu_rotational") + "/";
  const double tol = tol_or(cfg, 1e-6);
  constexpr double pi = std::numbers::pi;
  const std::pair<const char*, double> alphas[] = {{"0", 0.0}, {"pi_6", pi / 6}, {"pi_4", pi / 4},
                                                   {"pi_3", pi / 3}, {"pi_2", pi / 2}};
  const std::pair<const char*, double> betas[] = {{"0", 0.0}, {"pi_3", pi / 3}};

  auto start = Clock::now();
  const IntegralResult c = projected_parea_ambient(sigma, {pi / 2, 0.0}, cfg.quadrature);
  const double c_seconds = seconds_since(start);
  for (const auto& [an, a] : alphas) {
    for (const auto& [bn, b] : betas) {
      const std::string id = base + "alpha_" + an + "/beta_" + bn;
      start = Clock::now();
      const IntegralResult r = projected_parea_ambient(sigma, {a, b}, cfg.quadrature);
      if (a == 0.0) {
        rep.rows.push_back(make_row(id, r.value, 0.0, 1e-10, r.evaluations, seconds_since(start)));
      } else {
        rep.rows.push_back(make_row(id + "/ratio", r.value / std::abs(std::sin(a)), c.value, tol, r.evaluations,
                                    seconds_since(start)));
      }
    }
  }
  if (const auto* rot = std::get_if<RotationalSurface>(&sigma)) {
    start = Clock::now();
    ProfileCheck check;
    const IntegralResult closed = rotational_projection_closed_form(*rot, cfg.quadrature, &check);
    if (!check.satisfied()) rep.notes.push_back("profile conditions not met: " + check.detail);
    rep.rows.push_back(make_row(base + "alpha_pi_2/closed_form", c.value, closed.value, tol_or(cfg, 1e-8),
                                c.evaluations + closed.evaluations, c_seconds + seconds_since(start)));
  }
  return rep;
}

Report verify_rotational_constancy(const VerifyConfig& cfg) {
  Report rep;
  const Surface sigma = cfg.surface.value_or(RotationalSurface::flat_pair(cfg.n, 1.0));
  if (!is_rotational(sigma)) throw std::invalid_argument("verify_rotational_constancy: surface is not rotational");
  const Dim n = dim_of(sigma);
  const std::string base = "rotational_constancy/" + label_of(cfg, "flat_pair") + "/";
  const double tol = tol_or(cfg, 1e-6);

  std::optional<double> closed;
  if (const auto* p = std::get_if<PansuSphere>(&sigma)) {
    closed = constants(n, p->lambda).pansu_projection();
  } else if (n.n() == 1) {
    ProfileCheck check;
    closed = rotational_projection_closed_form(std::get<RotationalSurface>(sigma), cfg.quadrature, &check).value;
    if (!check.satisfied()) rep.notes.push_back("profile conditions not met: " + check.detail);
  }

  const auto dirs = random_directions(n, static_cast<std::size_t>(cfg.samples), cfg.seed);
  std::vector<IntegralResult> results;
  std::vector<double> secs;
  for (const auto& d : dirs) {
    const auto start = Clock::now();
    results.push_back(projected_parea(sigma, d, cfg.quadrature));
    secs.push_back(seconds_since(start));
  }
  std::vector<double> values;
  for (const auto& r : results) values.push_back(r.value);
  const double mean = pairwise_sum(values) / static_cast<double>(values.size());
  const double expected = closed.value_or(mean);
  double lo = values.front();
  double hi = values.front();
  std::int64_t evals = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const IntegralResult& r = results[i];
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
    evals += r.evaluations;
    const double row_tol = r.is_monte_carlo() ? cfg.mc_tol : tol;
    rep.rows.push_back(make_row(base + index_tag("d", i), r.value, expected, row_tol, r.evaluations, secs[i],
                                r.std_error));
  }
  const bool mc = results.front().is_monte_carlo();
  rep.rows.push_back(make_row(base + "spread", (hi - lo) / std::abs(mean), 0.0, mc ? cfg.mc_tol : tol, evals,
                              pairwise_sum(secs)));
  return rep;
}

Report verify_lemma_kr(const VerifyConfig& cfg) {
  Report rep;
  const int dim = cfg.n.n();
  if (dim < 2) throw DimensionError("verify_lemma_kr: n must be at least 2");
  const double expected = 2.0 * ball_volume(dim - 1);
  const McStream stream(cfg.seed);
  std::vector<double> u(dim);
  for (int i = 0; i < cfg.samples; ++i) {
    stream.unit_vector(static_cast<std::uint64_t>(i), 0, u);
    const auto start = Clock::now();
    const IntegralResult r = euclid_sphere_projection(dim, u, cfg.quadrature);
    rep.rows.push_back(make_row("lemma_kr/n" + std::to_string(dim) + "/" + index_tag("u", i), r.value, expected,
                                tol_or(cfg, 1e-6), r.evaluations, seconds_since(start)));
  }
  return rep;
}

Report expected_projection(const VerifyConfig& cfg) {
  Report rep;
  const Surface sigma = cfg.surface.value_or(RotationalSurface::paraboloid_pair(cfg.n, 1.0, 1.0));
  const Dim n = dim_of(sigma);
  const Constants k = constants(n, cfg.lambda);
  const std::string base = "expected_value/" + label_of(cfg, "paraboloid_pair") + "/";
  const auto start = Clock::now();
  const IntegralResult area = p_area(sigma, cfg.quadrature);
  double exp_value = 0.0;
  double se = 0.0;
  std::int64_t evals = area.evaluations;
  if (n.n() == 1) {
    QuadratureSpec inner = without_error_pass(cfg.quadrature);
    inner.radial_nodes = std::min(inner.radial_nodes, 64);
    inner.angular_nodes = std::min(inner.angular_nodes, 128);
    const IntegralResult weighted = pansu_weighted_projection(sigma, cfg.lambda, 16, 32, inner);
    const IntegralResult area_p = p_area(PansuSphere(n, cfg.lambda), cfg.quadrature);
    exp_value = weighted.value / area_p.value;
    evals += weighted.evaluations + area_p.evaluations;
  } else {
    const DirectionMean mean = direction_mean(sigma, cfg, without_error_pass(cfg.quadrature));
    exp_value = mean.mean;
    se = mean.std_error;
    evals += mean.evaluations;
  }
  const double consistent = 2.0 * k.omega * area.value;
  rep.rows.push_back(make_row(base + "exp_times_area_of_sphere", exp_value * k.s, consistent,
                              se > 0.0 ? cfg.mc_tol : tol_or(cfg, 1e-3), evals, seconds_since(start), se * k.s));
  rep.notes.push_back("expected value " + full(exp_value) + " for " + base + "; A(Sigma)*omega*S = " +
                      full(area.value * k.omega * k.s) + " is reported only, the checked identity is Exp*S = 2*omega*A(Sigma)");
  return rep;
}

Report run_verify(const VerifyConfig& cfg) {
  Report rep;
  switch (cfg.which) {
    case Which::pansu_projection: rep = verify_pansu_projection(cfg); break;
    case Which::cauchy: rep = verify_cauchy(cfg); break;
    case Which::anydirection: rep = verify_anydirection(cfg); break;
    case Which::rotational_constancy: rep = verify_rotational_constancy(cfg); break;
    case Which::lemma_kr: rep = verify_lemma_kr(cfg); break;
    case Which::expected_value: rep = expected_projection(cfg); break;
    case Which::pansu_area: rep = verify_pansu_area(cfg); break;
  }
  rep.sort();
  return rep;
}

Report report_all(const QuadratureSpec& spec, std::uint64_t seed) {
  Report rep;
  auto cfg_for = [&](Which w, int n, double lambda) {
    VerifyConfig c;
    c.which = w;
    c.n = Dim(n);
    c.lambda = lambda;
    c.seed = seed;
    c.quadrature = spec;
    return c;
  };
  auto with_surface = [](VerifyConfig c, Surface s, std::string label) {
    c.surface = std::move(s);
    c.surface_label = std::move(label);
    return c;
  };

  for (int n : {1, 2, 3}) {
    for (double lambda : {0.5, 1.0, 2.0}) rep.append(run_verify(cfg_for(Which::pansu_area, n, lambda)));
  }
  rep.append(run_verify(cfg_for(Which::pansu_projection, 1, 1.0)));
  rep.append(run_verify(cfg_for(Which::pansu_projection, 2, 1.0)));

  const VerifyConfig cauchy = cfg_for(Which::cauchy, 1, 1.0);
  rep.append(run_verify(with_surface(cauchy, PansuSphere(Dim(1), 2.0), "pansu_lambda2")));
  rep.append(run_verify(with_surface(cauchy, RotationalSurface::sphere_pair(Dim(1), 1.0), "sphere_pair")));
  rep.append(run_verify(with_surface(cauchy, RotationalSurface::paraboloid_pair(Dim(1), 1.0, 1.0), "paraboloid_pair")));

  const VerifyConfig any = cfg_for(Which::anydirection, 1, 1.0);
  rep.append(run_verify(with_surface(any, RotationalSurface::pansu(Dim(1), 1.0), "pansu_rotational")));
  rep.append(run_verify(with_surface(any, RotationalSurface::sphere_pair(Dim(1), 1.0), "sphere_pair")));

  const VerifyConfig rot = cfg_for(Which::rotational_constancy, 1, 1.0);
  rep.append(run_verify(with_surface(rot, RotationalSurface::sphere_pair(Dim(1), 1.0), "sphere_pair")));
  rep.append(run_verify(with_surface(rot, RotationalSurface::paraboloid_pair(Dim(1), 1.0, 1.0), "paraboloid_pair")));
  rep.append(run_verify(with_surface(rot, RotationalSurface::flat_pair(Dim(1), 1.0), "flat_pair")));

  for (int n : {2, 3, 4}) {
    VerifyConfig c = cfg_for(Which::lemma_kr, n, 1.0);
    c.samples = 5;
    rep.append(run_verify(c));
  }
  rep.append(run_verify(cfg_for(Which::expected_value, 1, 1.0)));
  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------

std::optional<Format> parse_format(const std::string& name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  if (name == "pretty") return Format::pretty;
  return std::nullopt;
}

void write_report(std::ostream& os, const Report& report, const QuadratureSpec& spec, Format format, bool timings) {
  auto secs = [&](const ReportRow& r) { return timings ? r.seconds : 0.0; };
  switch (format) {
    case Format::csv: {
      os << "# quadrature: " << describe(spec) << '\n';
      for (const auto& n : report.notes) os << "# note: " << n << '\n';
      for (const auto& r : report.rows) {
        if (r.std_error > 0.0) os << "# std_error " << r.case_id << ' ' << full(r.std_error) << '\n';
      }
      os << "case_id,computed,expected,rel_err,tol,pass,evaluations,seconds\n";
      for (const auto& r : report.rows) {
        os << r.case_id << ',' << full(r.computed) << ',' << full(r.expected) << ',' << full(r.rel_err) << ','
           << full(r.tol) << ',' << (r.pass ? "true" : "false") << ',' << r.evaluations << ',' << full(secs(r))
           << '\n';
      }
      break;
    }
    case Format::json: {
      nlohmann::ordered_json j;
      j["quadrature"] = describe(spec);
      j["notes"] = report.notes;
      j["rows"] = nlohmann::ordered_json::array();
      for (const auto& r : report.rows) {
        j["rows"].push_back({{"case_id", r.case_id},
                             {"computed", r.computed},
                             {"expected", r.expected},
                             {"rel_err", r.rel_err},
                             {"tol", r.tol},
                             {"pass", r.pass},
                             {"evaluations", r.evaluations},
                             {"seconds", secs(r)},
                             {"std_error", r.std_error}});
      }
      j["all_pass"] = report.all_pass();
      os << j.dump(2) << '\n';
      break;
    }
    case Format::pretty: {
      os << "quadrature: " << describe(spec) << '\n';
      for (const auto& n : report.notes) os << "note: " << n << '\n';
      std::size_t width = 7;
      for (const auto& r : report.rows) width = std::max(width, r.case_id.size());
      char line[512];
      std::snprintf(line, sizeof line, "%-*s  %22s  %22s  %10s  %8s  %s\n", static_cast<int>(width), "case_id",
                    "computed", "expected", "rel_err", "tol", "pass");
      os << line;
      for (const auto& r : report.rows) {
        std::snprintf(line, sizeof line, "%-*s  %22.15g  %22.15g  %10.3e  %8.1e  %s\n", static_cast<int>(width),
                      r.case_id.c_str(), r.computed, r.expected, r.rel_err, r.tol, r.pass ? "PASS" : "FAIL");
        os << line;
      }
      os << (report.all_pass() ? "all rows pass" : "some rows FAIL") << '\n';
      break;
    }
  }
}

}  // namespace heis
