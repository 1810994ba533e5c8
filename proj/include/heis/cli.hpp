#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "heis/expr.hpp"
#include "heis/surfaces.hpp"

namespace heis::cli {

/// Invalid surface description. `field` is a JSON path such as "$.h_plus".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, const std::string& message);
  /// Wraps an expression error found in a string field.
  SchemaError(std::string field, const expr::ExprError& e);

  const std::string& field() const { return field_; }
  std::optional<expr::ErrorKind> expr_kind() const { return expr_kind_; }
  std::optional<std::size_t> expr_offset() const { return expr_offset_; }

 private:
  std::string field_;
  std::optional<expr::ErrorKind> expr_kind_;
  std::optional<std::size_t> expr_offset_;
};

struct LoadedSurface {
  Surface surface;
  std::string label;
};

/// {"kind": "pansu"|"rotational"|"graph", "n", "lambda", "R", "h_plus",
///  "h_minus", "f", "side"}. Unknown keys are rejected.
LoadedSurface parse_surface(const std::string& json_text);
LoadedSurface load_surface(const std::string& path);

/// Exit codes: 0 success, 1 verification failure or runtime error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heis::cli
