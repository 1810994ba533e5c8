#pragma once

// Verification harness: each check produces report rows comparing a computed
// quantity with its expected value.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "heis/core.hpp"
#include "heis/quadrature.hpp"
#include "heis/surfaces.hpp"

namespace heis {

enum class Which { pansu_projection, cauchy, anydirection, rotational_constancy, lemma_kr, expected_value, pansu_area };

std::string to_string(Which w);
std::optional<Which> parse_which(const std::string& name);

struct ReportRow {
  std::string case_id;
  double computed = 0.0;
  double expected = 0.0;
  double rel_err = 0.0;  // absolute error when expected == 0
  double tol = 0.0;
  bool pass = false;
  std::int64_t evaluations = 0;
  double seconds = 0.0;
  double std_error = 0.0;  // Monte Carlo rows only
};

/// pass ⇔ rel_err ≤ tol, and |computed − expected| ≤ 4·std_error when std_error > 0.
ReportRow make_row(std::string case_id, double computed, double expected, double tol, std::int64_t evaluations,
                   double seconds, double std_error = 0.0);

struct Report {
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;

  bool all_pass() const;
  void append(Report other);
  /// Orders rows by case_id.
  void sort();
};

struct VerifyConfig {
  Which which = Which::pansu_projection;
  Dim n{1};
  double lambda = 1.0;
  /// Surface under test; each check has a default when empty.
  std::optional<Surface> surface;
  std::string surface_label;
  int samples = 20;
  std::uint64_t seed = 0;
  QuadratureSpec quadrature;
  /// Deterministic tolerance; each check has a default when empty.
  std::optional<double> tol;
  double mc_tol = 1e-2;
};

Report verify_pansu_area(const VerifyConfig& cfg);
Report verify_pansu_projection(const VerifyConfig& cfg);
Report verify_cauchy(const VerifyConfig& cfg);
Report verify_anydirection(const VerifyConfig& cfg);
Report verify_rotational_constancy(const VerifyConfig& cfg);
Report verify_lemma_kr(const VerifyConfig& cfg);
Report expected_projection(const VerifyConfig& cfg);

Report run_verify(const VerifyConfig& cfg);

/// Every check at the configurations of the acceptance suite.
Report report_all(const QuadratureSpec& spec, std::uint64_t seed);

/// ∫ over P^n_λ of A(Σ | Ñ(p)^⊥) dΣ_p, integrating over the sphere itself.
IntegralResult pansu_weighted_projection(const Surface& sigma, double lambda, int outer_radial, int outer_angular,
                                         const QuadratureSpec& inner);

enum class Format { csv, json, pretty };
std::optional<Format> parse_format(const std::string& name);

/// Header comments carry the quadrature settings and notes. Seconds are
/// written as 0 unless `timings` is set, so equal inputs give equal bytes.
void write_report(std::ostream& os, const Report& report, const QuadratureSpec& spec, Format format, bool timings);

}  // namespace heis
