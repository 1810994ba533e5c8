#include "heis/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "heis/projection.hpp"
#include "heis/verify.hpp"

namespace heis::cli {

namespace {

using nlohmann::json;

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Surface descriptions

double number_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw SchemaError(std::string("$.") + key, "expected a number");
  return v.get<double>();
}

std::optional<std::string> string_field(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_string()) throw SchemaError(std::string("$.") + key, "expected a string");
  return v.get<std::string>();
}

Profile profile_field(const std::string& key, const std::string& text, double R, double lambda) {
  try {
    return Profile::parse(text, R, lambda);
  } catch (const expr::ExprError& e) {
    throw SchemaError("$." + key, e);
  } catch (const std::invalid_argument& e) {
    throw SchemaError("$." + key, e.what());
  }
}

SideSelection side_field(const json& j, SideSelection fallback) {
  const auto s = string_field(j, "side");
  if (!s) return fallback;
  if (*s == "both") return SideSelection::both;
  if (*s == "upper") return SideSelection::upper;
  if (*s == "lower") return SideSelection::lower;
  throw SchemaError("$.side", "expected \"both\", \"upper\" or \"lower\"");
}

// ---------------------------------------------------------------------------
// Command options

struct Options {
  QuadratureSpec q;
  std::string format = "csv";
  std::string output;
  bool timings = false;
  std::string surface_path;
  std::uint64_t seed = 0;
  int n = 1;
  double lambda = 1.0;
  std::string dir;
  std::optional<double> alpha;
  std::optional<double> beta;
  int random_dirs = 0;
  std::string which;
  int samples = 20;
  std::optional<double> tol;
  double excise = 0.0;
  std::string sphere_rule = "automatic";
};

void add_quadrature(CLI::App* cmd, Options& o) {
  cmd->add_option("--radial-nodes", o.q.radial_nodes, "Gauss-Legendre nodes in the radius")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--angular-nodes", o.q.angular_nodes, "Angular nodes")
      ->capture_default_str()
      ->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--mc-samples", o.q.mc_samples, "Monte Carlo samples")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed for Monte Carlo and random directions")->capture_default_str();
  cmd->add_option("--rel-tol", o.q.rel_tol, "Relative tolerance for convergence flags")->capture_default_str();
  cmd->add_option("--sphere-rule", o.sphere_rule, "automatic, product_angles or monte_carlo")
      ->capture_default_str()
      ->check(CLI::IsMember({"automatic", "product_angles", "monte_carlo"}));
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "csv, json or pretty")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json", "pretty"}));
  cmd->add_option("--output", o.output, "Write to this file instead of stdout");
  cmd->add_flag("--timings", o.timings, "Record wall-clock seconds (output is then not reproducible)");
}

void finish_options(Options& o) {
  o.q.seed = o.seed;
  o.q.sphere_rule = o.sphere_rule == "product_angles" ? SphereRule::product_angles
                    : o.sphere_rule == "monte_carlo"  ? SphereRule::monte_carlo
                                                      : SphereRule::automatic;
  o.q.validate();
}

std::vector<double> parse_dir(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError("--dir", "bad component '" + item + "'");
    v.push_back(x);
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (v.empty() || norm == 0.0) throw CLI::ValidationError("--dir", "direction must be non-zero");
  for (double& x : v) x /= norm;
  return v;
}

void write_header(std::ostream& os, const Options& o, Format f, const std::string& extra = {}) {
  if (f == Format::json) return;
  const char* lead = f == Format::csv ? "# " : "";
  os << lead << "quadrature: " << describe(o.q) << '\n';
  if (!extra.empty()) os << lead << extra << '\n';
}

int cmd_constants(const Options& o, std::ostream& os) {
  const Dim dim(o.n);
  const Constants k = constants(dim, o.lambda);
  const std::pair<const char*, double> rows[] = {
      {"n", static_cast<double>(o.n)},  {"lambda", o.lambda},           {"c_n", k.c_n},
      {"omega_2n-1", k.omega},          {"S_2n-1", k.s},                {"pansu_area", k.pansu_area()},
      {"pansu_projection", k.pansu_projection()}};
  const Format f = *parse_format(o.format);
  if (f == Format::json) {
    nlohmann::ordered_json j;
    for (const auto& [name, v] : rows) j[name] = v;
    os << j.dump(2) << '\n';
    return 0;
  }
  write_header(os, o, f);
  if (f == Format::csv) os << "quantity,value\n";
  for (const auto& [name, v] : rows) os << name << (f == Format::csv ? "," : " = ") << full(v) << '\n';
  return 0;
}

int cmd_parea(const Options& o, std::ostream& os) {
  const LoadedSurface s = load_surface(o.surface_path);
  const IntegralResult r = p_area(s.surface, o.q, o.excise);
  const Format f = *parse_format(o.format);
  if (f == Format::json) {
    nlohmann::ordered_json j;
    j["quadrature"] = describe(o.q);
    j["surface"] = describe(s.surface);
    j["value"] = r.value;
    j["error_estimate"] = r.error_estimate;
    j["std_error"] = r.std_error;
    j["evaluations"] = r.evaluations;
    j["method"] = r.method;
    j["converged"] = r.converged;
    os << j.dump(2) << '\n';
    return 0;
  }
  write_header(os, o, f, "surface: " + describe(s.surface));
  if (f == Format::csv) {
    os << "value,error_estimate,std_error,evaluations,method,converged\n";
    os << full(r.value) << ',' << full(r.error_estimate) << ',' << full(r.std_error) << ',' << r.evaluations << ','
       << r.method << ',' << (r.converged ? "true" : "false") << '\n';
  } else {
    os << "p-area = " << full(r.value) << " (error estimate " << r.error_estimate << ", " << r.method << ")\n";
  }
  return 0;
}

int cmd_project(const Options& o, std::ostream& os) {
  const LoadedSurface s = load_surface(o.surface_path);
  const Dim dim = dim_of(s.surface);
  const int modes = (!o.dir.empty()) + (o.alpha.has_value() || o.beta.has_value()) + (o.random_dirs > 0);
  if (modes != 1) {
    throw CLI::ValidationError("project", "give exactly one of --dir, --alpha/--beta, --random-dirs");
  }
  struct Row {
    std::string id;
    std::string direction;
    IntegralResult r;
  };
  std::vector<Row> rows;
  auto dir_text = [](std::span<const double> d) {
    std::string t;
    for (std::size_t i = 0; i < d.size(); ++i) t += (i ? ";" : "") + full(d[i]);
    return t;
  };
  if (!o.dir.empty()) {
    const auto d = parse_dir(o.dir);
    if (d.size() != static_cast<std::size_t>(dim.contact())) {
      throw CLI::ValidationError("--dir", "expected " + std::to_string(dim.contact()) + " components");
    }
    rows.push_back({"dir", dir_text(d), projected_parea(s.surface, d, o.q)});
  } else if (o.random_dirs > 0) {
    const auto dirs = random_directions(dim, static_cast<std::size_t>(o.random_dirs), o.seed);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      rows.push_back({"d" + std::to_string(i), dir_text(dirs[i]), projected_parea(s.surface, dirs[i], o.q)});
    }
  } else {
    if (!o.alpha || !o.beta) throw CLI::ValidationError("project", "--alpha and --beta go together");
    const AmbientDirection u{*o.alpha, *o.beta};
    rows.push_back({"ambient", "alpha=" + full(u.alpha) + ";beta=" + full(u.beta),
                    projected_parea_ambient(s.surface, u, o.q)});
  }

  const Format f = *parse_format(o.format);
  if (f == Format::json) {
    nlohmann::ordered_json j;
    j["quadrature"] = describe(o.q);
    j["surface"] = describe(s.surface);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      j["rows"].push_back({{"case", row.id},
                           {"direction", row.direction},
                           {"value", row.r.value},
                           {"error_estimate", row.r.error_estimate},
                           {"std_error", row.r.std_error},
                           {"evaluations", row.r.evaluations},
                           {"method", row.r.method}});
    }
    os << j.dump(2) << '\n';
    return 0;
  }
  write_header(os, o, f, "surface: " + describe(s.surface));
  if (f == Format::csv) os << "case,direction,value,error_estimate,std_error,evaluations,method\n";
  for (const auto& row : rows) {
    if (f == Format::csv) {
      os << row.id << ',' << row.direction << ',' << full(row.r.value) << ',' << full(row.r.error_estimate) << ','
         << full(row.r.std_error) << ',' << row.r.evaluations << ',' << row.r.method << '\n';
    } else {
      os << row.id << " [" << row.direction << "] " << full(row.r.value) << '\n';
    }
  }
  return 0;
}

int cmd_verify(const Options& o, std::ostream& os) {
  VerifyConfig cfg;
  cfg.which = *parse_which(o.which);
  cfg.n = Dim(o.n);
  cfg.lambda = o.lambda;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  cfg.quadrature = o.q;
  cfg.tol = o.tol;
  if (!o.surface_path.empty()) {
    LoadedSurface s = load_surface(o.surface_path);
    cfg.surface = std::move(s.surface);
    cfg.surface_label = s.label;
  }
  const Report rep = run_verify(cfg);
  write_report(os, rep, o.q, *parse_format(o.format), o.timings);
  return rep.all_pass() ? 0 : 1;
}

int cmd_report_all(const Options& o, std::ostream& os) {
  const Report rep = report_all(o.q, o.seed);
  write_report(os, rep, o.q, *parse_format(o.format), o.timings);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

SchemaError::SchemaError(std::string field, const std::string& message)
    : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

SchemaError::SchemaError(std::string field, const expr::ExprError& e)
    : std::runtime_error(field + ": " + e.what()),
      field_(std::move(field)),
      expr_kind_(e.kind()),
      expr_offset_(e.position()) {}

LoadedSurface parse_surface(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  static const char* const kKeys[] = {"kind", "n", "lambda", "R", "h_plus", "h_minus", "f", "side"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw SchemaError("$." + key, "unknown field");
    }
  }
  const auto kind = string_field(j, "kind");
  if (!kind) throw SchemaError("$.kind", "required field missing");

  int n = 1;
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<int>() < 1) throw SchemaError("$.n", "expected an integer >= 1");
    n = j["n"].get<int>();
  }
  const Dim dim(n);
  const double lambda = number_field(j, "lambda", 1.0);
  if (!(lambda > 0.0)) throw SchemaError("$.lambda", "must be positive");
  const double R = number_field(j, "R", 1.0);
  if (!(R > 0.0)) throw SchemaError("$.R", "must be positive");

  if (*kind == "pansu") {
    return {PansuSphere(dim, lambda), "pansu"};
  }
  if (*kind == "rotational") {
    const auto hp = string_field(j, "h_plus");
    if (!hp) throw SchemaError("$.h_plus", "required field missing");
    Profile plus = profile_field("h_plus", *hp, R, lambda);
    const auto hm = string_field(j, "h_minus");
    // A built-in name for h_minus means the mirror image of that profile.
    Profile minus = !hm                                           ? plus.mirrored()
                    : (*hm == "pansu" || *hm == "sphere" || hm->rfind("paraboloid:", 0) == 0)
                        ? profile_field("h_minus", *hm, R, lambda).mirrored()
                        : profile_field("h_minus", *hm, R, lambda);
    try {
      return {RotationalSurface::make(dim, R, std::move(plus), std::move(minus), side_field(j, SideSelection::both)),
              "rotational"};
    } catch (const expr::ExprError& e) {
      throw SchemaError("$", e);
    } catch (const std::invalid_argument& e) {
      throw SchemaError("$", e.what());
    }
  }
  if (*kind == "graph") {
    const auto f = string_field(j, "f");
    if (!f) throw SchemaError("$.f", "required field missing");
    try {
      return {GraphSurface::from_expression(dim, R, *f, lambda, side_field(j, SideSelection::upper)), "graph"};
    } catch (const expr::ExprError& e) {
      throw SchemaError("$.f", e);
    }
  }
  throw SchemaError("$.kind", "expected \"pansu\", \"rotational\" or \"graph\"");
}

LoadedSurface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("$", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_surface(ss.str());
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projected p-areas of hypersurfaces in the Heisenberg group", "heis"};
  app.require_subcommand(1);
  Options o;

  auto* constants_cmd = app.add_subcommand("constants", "Print C_n, omega, S and the Pansu sphere constants");
  constants_cmd->add_option("--n", o.n, "Heisenberg dimension n")->capture_default_str()->check(CLI::PositiveNumber);
  constants_cmd->add_option("--lambda", o.lambda, "Pansu parameter")->capture_default_str()->check(CLI::PositiveNumber);
  add_output(constants_cmd, o);

  auto* parea_cmd = app.add_subcommand("parea", "p-area of a surface");
  parea_cmd->add_option("--surface", o.surface_path, "Surface description (JSON)")->required();
  parea_cmd->add_option("--excise", o.excise, "Leave out the ball of this parameter radius");
  add_quadrature(parea_cmd, o);
  add_output(parea_cmd, o);

  auto* project_cmd = app.add_subcommand("project", "Projected p-areas along contact directions");
  project_cmd->add_option("--surface", o.surface_path, "Surface description (JSON)")->required();
  project_cmd->add_option("--dir", o.dir, "Frame coefficients x1,y1,...,xn,yn");
  project_cmd->add_option("--alpha", o.alpha, "Polar angle of the ambient direction (radians, n = 1)");
  project_cmd->add_option("--beta", o.beta, "Azimuth of the ambient direction (radians, n = 1)");
  project_cmd->add_option("--random-dirs", o.random_dirs, "Number of uniformly random directions")
      ->check(CLI::PositiveNumber);
  add_quadrature(project_cmd, o);
  add_output(project_cmd, o);

  auto* verify_cmd = app.add_subcommand("verify", "Run one verification check");
  verify_cmd->add_option("--which", o.which, "Check to run")
      ->required()
      ->check(CLI::IsMember({"pansu_projection", "cauchy", "anydirection", "rotational_constancy", "lemma_kr",
                             "expected_value", "pansu_area"}));
  verify_cmd->add_option("--n", o.n, "Dimension (Euclidean dimension for lemma_kr)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--lambda", o.lambda, "Pansu parameter")->capture_default_str()->check(CLI::PositiveNumber);
  verify_cmd->add_option("--surface", o.surface_path, "Surface description (JSON)");
  verify_cmd->add_option("--samples", o.samples, "Number of random directions")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--tol", o.tol, "Override the check's tolerance")->check(CLI::PositiveNumber);
  add_quadrature(verify_cmd, o);
  add_output(verify_cmd, o);

  auto* all_cmd = app.add_subcommand("report-all", "Run every check of the acceptance suite");
  add_quadrature(all_cmd, o);
  add_output(all_cmd, o);

  std::ostringstream buffer;
  try {
    app.parse(argc, argv);
    finish_options(o);
    int code = 0;
    if (constants_cmd->parsed()) code = cmd_constants(o, buffer);
    if (parea_cmd->parsed()) code = cmd_parea(o, buffer);
    if (project_cmd->parsed()) code = cmd_project(o, buffer);
    if (verify_cmd->parsed()) code = cmd_verify(o, buffer);
    if (all_cmd->parsed()) code = cmd_report_all(o, buffer);
    if (o.output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(o.output, std::ios::binary);
      if (!file) {
        err << "error: cannot write " << o.output << '\n';
        return 1;
      }
      file << buffer.str();
    }
    return code;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const expr::ExprError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace heis::cli
