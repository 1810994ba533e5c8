#pragma once

// Arithmetic expressions for radial profiles h(r) and graph heights f(x, y).
//
// Grammar, lowest to highest precedence:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | identifier | identifier '(' args ')' | '(' expr ')'
//
// so "-r^2" is −(r²) and "2^3^2" is 2^9. Functions: sqrt sin cos acos abs exp
// ln (one argument) and pow (two arguments).

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "heis/dual.hpp"

namespace heis::expr {

enum class ErrorKind {
  illegal_character,
  malformed_number,
  unexpected_token,
  unbalanced_paren,
  unknown_function,
  arity_mismatch,
  unbound_variable,
  domain_error,
};

std::string_view to_string(ErrorKind kind);

class ExprError : public std::runtime_error {
 public:
  ExprError(ErrorKind kind, std::size_t position, const std::string& detail);

  ErrorKind kind() const { return kind_; }
  /// Byte offset into the source text.
  std::size_t position() const { return position_; }

 private:
  ErrorKind kind_;
  std::size_t position_;
};

enum class TokenKind { number, identifier, op, lparen, rparen, comma };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t position;
};

std::vector<Token> tokenize(std::string_view src);

enum class Func { sqrt, sin, cos, acos, abs, exp, ln, pow };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { constant, variable, negate, binary, call };

  Kind kind;
  std::size_t position = 0;
  double value = 0.0;          // constant
  std::string name;            // variable
  char op = 0;                 // binary: + - * / ^
  Func func = Func::sqrt;      // call
  std::vector<Ast> children;
};

Ast parse(std::span<const Token> tokens, std::size_t source_length);
Ast parse(std::string_view src);

/// Fully parenthesized rendering; parse(to_string(a)) is structurally equal to a.
std::string to_string(const Ast& ast);
bool structurally_equal(const Ast& a, const Ast& b);
/// Variables referenced by the expression, with the offset of first use.
std::map<std::string, std::size_t> free_variables(const Ast& ast);

using Bindings = std::map<std::string, double, std::less<>>;

double eval(const Ast& ast, const Bindings& bindings);
DualNumber eval_dual(const Ast& ast, std::string_view var, const Bindings& bindings);

/// An expression compiled against a fixed variable list. Evaluation takes
/// values positionally, which keeps per-point evaluation allocation-light.
class Expression {
 public:
  /// Throws ExprError(unbound_variable) for names outside `variables`.
  static Expression compile(std::string_view src, std::vector<std::string> variables);

  double eval(std::span<const double> values) const;
  /// Derivative with respect to variables()[var].
  DualNumber eval_dual(std::size_t var, std::span<const double> values) const;

  const std::string& source() const { return source_; }
  const Ast& ast() const { return ast_; }
  const std::vector<std::string>& variables() const { return variables_; }

 private:
  struct Instr {
    enum class Op { push_const, push_var, negate, add, sub, mul, div, pow, call } op;
    double value = 0.0;
    std::size_t slot = 0;
    Func func = Func::sqrt;
    std::size_t position = 0;
  };

  template <typename T>
  T run(std::span<const double> values, std::size_t dual_slot) const;

  std::string source_;
  Ast ast_;
  std::vector<std::string> variables_;
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
};

}  // namespace heis::expr
