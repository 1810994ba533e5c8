#include "heis/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

namespace heis::expr {

namespace {

constexpr double kSlack = 1e-12;

struct FuncInfo {
  std::string_view name;
  Func func;
  int arity;
};

constexpr FuncInfo kFunctions[] = {
    {"sqrt", Func::sqrt, 1}, {"sin", Func::sin, 1}, {"cos", Func::cos, 1},
    {"acos", Func::acos, 1}, {"abs", Func::abs, 1}, {"exp", Func::exp, 1},
    {"ln", Func::ln, 1},     {"pow", Func::pow, 2},
};

const FuncInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::string_view func_name(Func func) {
  for (const auto& f : kFunctions) {
    if (f.func == func) return f.name;
  }
  return "?";
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

inline double value_of(double x) { return x; }
inline double value_of(const DualNumber& x) { return x.value; }

[[noreturn]] void domain_fail(std::size_t pos, const std::string& what) {
  throw ExprError(ErrorKind::domain_error, pos, what);
}

template <typename T>
T checked(T v, std::size_t pos, const char* what) {
  if (!std::isfinite(value_of(v))) domain_fail(pos, std::string(what) + " produced a non-finite value");
  return v;
}

template <typename T>
T apply_binary(char op, T a, T b, std::size_t pos) {
  using std::pow;
  switch (op) {
    case '+': return checked(a + b, pos, "addition");
    case '-': return checked(a - b, pos, "subtraction");
    case '*': return checked(a * b, pos, "multiplication");
    case '/':
      if (value_of(b) == 0.0) domain_fail(pos, "division by zero");
      return checked(a / b, pos, "division");
    case '^': {
      const double base = value_of(a);
      const double ex = value_of(b);
      if (base < 0.0 && ex != std::floor(ex)) domain_fail(pos, "negative base with non-integer exponent");
      if (base == 0.0 && ex < 0.0) domain_fail(pos, "zero raised to a negative power");
      return checked(pow(a, b), pos, "power");
    }
    default: domain_fail(pos, std::string("unknown operator ") + op);
  }
}

template <typename T>
T apply_call(Func func, std::span<const T> args, std::size_t pos) {
  using std::abs;
  using std::acos;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  const T& a = args[0];
  const double x = value_of(a);
  switch (func) {
    case Func::sqrt: {
      if (x < -kSlack) domain_fail(pos, "sqrt of a negative number");
      if (x < 0.0) {
        T c = a;
        if constexpr (std::is_same_v<T, double>) c = 0.0; else c.value = 0.0;
        return sqrt(c);
      }
      return sqrt(a);
    }
    case Func::sin: return checked(sin(a), pos, "sin");
    case Func::cos: return checked(cos(a), pos, "cos");
    case Func::acos: {
      if (std::abs(x) > 1.0 + kSlack) domain_fail(pos, "acos argument outside [-1, 1]");
      if (std::abs(x) > 1.0) {
        T c = a;
        const double clamped = x > 0.0 ? 1.0 : -1.0;
        if constexpr (std::is_same_v<T, double>) c = clamped; else c.value = clamped;
        return acos(c);
      }
      return acos(a);
    }
    case Func::abs: return abs(a);
    case Func::exp: return checked(exp(a), pos, "exp");
    case Func::ln:
      if (x <= 0.0) domain_fail(pos, "ln of a non-positive number");
      return checked(log(a), pos, "ln");
    case Func::pow: return apply_binary<T>('^', args[0], args[1], pos);
  }
  domain_fail(pos, "unknown function");
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::size_t source_length)
      : tokens_(tokens), end_(source_length) {}

  Ast parse_all() {
    Ast e = parse_expr();
    if (pos_ < tokens_.size()) {
      const Token& t = tokens_[pos_];
      if (t.kind == TokenKind::rparen) {
        throw ExprError(ErrorKind::unbalanced_paren, t.position, "unmatched ')'");
      }
      throw ExprError(ErrorKind::unexpected_token, t.position, "unexpected '" + t.text + "'");
    }
    return e;
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
  bool peek_op(char c) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::op && t->text[0] == c;
  }
  std::size_t here() const { return peek() ? peek()->position : end_; }

  static Ast make(Node node) { return std::make_shared<const Node>(std::move(node)); }

  Ast parse_expr() {
    Ast lhs = parse_term();
    while (peek_op('+') || peek_op('-')) {
      const Token& t = tokens_[pos_++];
      Ast rhs = parse_term();
      lhs = make(Node{Node::Kind::binary, t.position, 0.0, {}, t.text[0], Func::sqrt, {lhs, rhs}});
    }
    return lhs;
  }

  Ast parse_term() {
    Ast lhs = parse_unary();
    while (peek_op('*') || peek_op('/')) {
      const Token& t = tokens_[pos_++];
      Ast rhs = parse_unary();
      lhs = make(Node{Node::Kind::binary, t.position, 0.0, {}, t.text[0], Func::sqrt, {lhs, rhs}});
    }
    return lhs;
  }

  Ast parse_unary() {
    if (peek_op('-')) {
      const Token& t = tokens_[pos_++];
      Ast child = parse_unary();
      return make(Node{Node::Kind::negate, t.position, 0.0, {}, 0, Func::sqrt, {child}});
    }
    return parse_power();
  }

  Ast parse_power() {
    Ast base = parse_primary();
    if (peek_op('^')) {
      const Token& t = tokens_[pos_++];
      Ast ex = parse_unary();
      return make(Node{Node::Kind::binary, t.position, 0.0, {}, '^', Func::sqrt, {base, ex}});
    }
    return base;
  }

  Ast parse_primary() {
    const Token* t = peek();
    if (!t) throw ExprError(ErrorKind::unexpected_token, end_, "unexpected end of input");
    switch (t->kind) {
      case TokenKind::number: {
        ++pos_;
        double v = 0.0;
        std::from_chars(t->text.data(), t->text.data() + t->text.size(), v);
        return make(Node{Node::Kind::constant, t->position, v, {}, 0, Func::sqrt, {}});
      }
      case TokenKind::identifier: {
        ++pos_;
        const Token* next = peek();
        if (next && next->kind == TokenKind::lparen) return parse_call(*t);
        return make(Node{Node::Kind::variable, t->position, 0.0, t->text, 0, Func::sqrt, {}});
      }
      case TokenKind::lparen: {
        ++pos_;
        Ast inner = parse_expr();
        const Token* close = peek();
        if (!close || close->kind != TokenKind::rparen) {
          throw ExprError(ErrorKind::unbalanced_paren, t->position, "'(' is never closed");
        }
        ++pos_;
        return inner;
      }
      case TokenKind::rparen:
        throw ExprError(ErrorKind::unbalanced_paren, t->position, "unexpected ')'");
      default:
        throw ExprError(ErrorKind::unexpected_token, t->position, "unexpected '" + t->text + "'");
    }
  }

  Ast parse_call(const Token& name) {
    const FuncInfo* info = find_function(name.text);
    if (!info) {
      throw ExprError(ErrorKind::unknown_function, name.position, "unknown function '" + name.text + "'");
    }
    const Token& open = tokens_[pos_++];
    std::vector<Ast> args;
    if (const Token* t = peek(); t && t->kind == TokenKind::rparen) {
      ++pos_;
    } else {
      for (;;) {
        args.push_back(parse_expr());
        const Token* t = peek();
        if (!t) throw ExprError(ErrorKind::unbalanced_paren, open.position, "'(' is never closed");
        if (t->kind == TokenKind::comma) {
          ++pos_;
          continue;
        }
        if (t->kind == TokenKind::rparen) {
          ++pos_;
          break;
        }
        throw ExprError(ErrorKind::unexpected_token, t->position, "unexpected '" + t->text + "' in argument list");
      }
    }
    if (static_cast<int>(args.size()) != info->arity) {
      throw ExprError(ErrorKind::arity_mismatch, name.position,
                      name.text + " expects " + std::to_string(info->arity) + " argument(s), got " +
                          std::to_string(args.size()));
    }
    return make(Node{Node::Kind::call, name.position, 0.0, {}, 0, info->func, std::move(args)});
  }

  std::span<const Token> tokens_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

template <typename T, typename Lookup>
T evaluate(const Node& node, const Lookup& lookup) {
  switch (node.kind) {
    case Node::Kind::constant: return T(node.value);
    case Node::Kind::variable: return lookup(node);
    case Node::Kind::negate: return -evaluate<T>(*node.children[0], lookup);
    case Node::Kind::binary:
      return apply_binary<T>(node.op, evaluate<T>(*node.children[0], lookup),
                             evaluate<T>(*node.children[1], lookup), node.position);
    case Node::Kind::call: {
      T args[2];
      for (std::size_t i = 0; i < node.children.size(); ++i) args[i] = evaluate<T>(*node.children[i], lookup);
      return apply_call<T>(node.func, std::span<const T>(args, node.children.size()), node.position);
    }
  }
  return T(0.0);
}

void render(const Node& node, std::string& out) {
  switch (node.kind) {
    case Node::Kind::constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", node.value);
      out += buf;
      break;
    }
    case Node::Kind::variable: out += node.name; break;
    case Node::Kind::negate:
      out += "(-";
      render(*node.children[0], out);
      out += ')';
      break;
    case Node::Kind::binary:
      out += '(';
      render(*node.children[0], out);
      out += ' ';
      out += node.op;
      out += ' ';
      render(*node.children[1], out);
      out += ')';
      break;
    case Node::Kind::call:
      out += func_name(node.func);
      out += '(';
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += ", ";
        render(*node.children[i], out);
      }
      out += ')';
      break;
  }
}

void collect_variables(const Node& node, std::map<std::string, std::size_t>& out) {
  if (node.kind == Node::Kind::variable) {
    auto [it, inserted] = out.emplace(node.name, node.position);
    if (!inserted && node.position < it->second) it->second = node.position;
  }
  for (const auto& c : node.children) collect_variables(*c, out);
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::illegal_character: return "IllegalCharacter";
    case ErrorKind::malformed_number: return "MalformedNumber";
    case ErrorKind::unexpected_token: return "UnexpectedToken";
    case ErrorKind::unbalanced_paren: return "UnbalancedParen";
    case ErrorKind::unknown_function: return "UnknownFunction";
    case ErrorKind::arity_mismatch: return "ArityMismatch";
    case ErrorKind::unbound_variable: return "UnboundVariable";
    case ErrorKind::domain_error: return "DomainError";
  }
  return "ExprError";
}

ExprError::ExprError(ErrorKind kind, std::size_t position, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(position) + ": " +
                         detail),
      kind_(kind),
      position_(position) {}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_digit(c) || c == '.') {
      const std::size_t start = i;
      std::size_t first_dot = std::string_view::npos;
      int dots = 0;
      bool digits = false;
      while (i < src.size() && (is_digit(src[i]) || src[i] == '.')) {
        if (src[i] == '.') {
          if (dots++ == 0) first_dot = i;
        } else {
          digits = true;
        }
        ++i;
      }
      if (dots > 1) throw ExprError(ErrorKind::malformed_number, first_dot, "more than one decimal point");
      if (!digits) throw ExprError(ErrorKind::malformed_number, start, "number without digits");
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        const std::size_t epos = i++;
        if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
        if (i >= src.size() || !is_digit(src[i])) {
          throw ExprError(ErrorKind::malformed_number, epos, "exponent without digits");
        }
        while (i < src.size() && is_digit(src[i])) ++i;
      }
      if (i < src.size() && is_ident_start(src[i])) {
        throw ExprError(ErrorKind::malformed_number, i, "letter directly after a number");
      }
      std::string text(src.substr(start, i - start));
      double v = 0.0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc() || !std::isfinite(v)) {
        throw ExprError(ErrorKind::malformed_number, start, "number out of range");
      }
      out.push_back({TokenKind::number, std::move(text), start});
      continue;
    }
    if (is_ident_start(c)) {
      const std::size_t start = i;
      while (i < src.size() && is_ident_char(src[i])) ++i;
      out.push_back({TokenKind::identifier, std::string(src.substr(start, i - start)), start});
      continue;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '^':
        out.push_back({TokenKind::op, std::string(1, c), i});
        break;
      case '(': out.push_back({TokenKind::lparen, "(", i}); break;
      case ')': out.push_back({TokenKind::rparen, ")", i}); break;
      case ',': out.push_back({TokenKind::comma, ",", i}); break;
      default:
        throw ExprError(ErrorKind::illegal_character, i, std::string("illegal character '") + c + "'");
    }
    ++i;
  }
  return out;
}

Ast parse(std::span<const Token> tokens, std::size_t source_length) {
  return Parser(tokens, source_length).parse_all();
}

Ast parse(std::string_view src) {
  const auto tokens = tokenize(src);
  return parse(tokens, src.size());
}

std::string to_string(const Ast& ast) {
  std::string out;
  render(*ast, out);
  return out;
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (a->kind != b->kind || a->children.size() != b->children.size()) return false;
  switch (a->kind) {
    case Node::Kind::constant:
      if (a->value != b->value) return false;
      break;
    case Node::Kind::variable:
      if (a->name != b->name) return false;
      break;
    case Node::Kind::binary:
      if (a->op != b->op) return false;
      break;
    case Node::Kind::call:
      if (a->func != b->func) return false;
      break;
    case Node::Kind::negate: break;
  }
  for (std::size_t i = 0; i < a->children.size(); ++i) {
    if (!structurally_equal(a->children[i], b->children[i])) return false;
  }
  return true;
}

std::map<std::string, std::size_t> free_variables(const Ast& ast) {
  std::map<std::string, std::size_t> out;
  collect_variables(*ast, out);
  return out;
}

double eval(const Ast& ast, const Bindings& bindings) {
  return evaluate<double>(*ast, [&](const Node& n) {
    auto it = bindings.find(n.name);
    if (it == bindings.end()) {
      throw ExprError(ErrorKind::unbound_variable, n.position, "unbound variable '" + n.name + "'");
    }
    return it->second;
  });
}

DualNumber eval_dual(const Ast& ast, std::string_view var, const Bindings& bindings) {
  return evaluate<DualNumber>(*ast, [&](const Node& n) {
    auto it = bindings.find(n.name);
    if (it == bindings.end()) {
      throw ExprError(ErrorKind::unbound_variable, n.position, "unbound variable '" + n.name + "'");
    }
    return DualNumber(it->second, n.name == var ? 1.0 : 0.0);
  });
}

Expression Expression::compile(std::string_view src, std::vector<std::string> variables) {
  Expression e;
  e.source_ = std::string(src);
  e.ast_ = parse(src);
  e.variables_ = std::move(variables);

  std::size_t depth = 0;
  std::function<void(const Node&)> emit = [&](const Node& n) {
    switch (n.kind) {
      case Node::Kind::constant:
        e.program_.push_back({Instr::Op::push_const, n.value, 0, Func::sqrt, n.position});
        ++depth;
        break;
      case Node::Kind::variable: {
        std::size_t slot = e.variables_.size();
        for (std::size_t i = 0; i < e.variables_.size(); ++i) {
          if (e.variables_[i] == n.name) slot = i;
        }
        if (slot == e.variables_.size()) {
          throw ExprError(ErrorKind::unbound_variable, n.position, "unbound variable '" + n.name + "'");
        }
        e.program_.push_back({Instr::Op::push_var, 0.0, slot, Func::sqrt, n.position});
        ++depth;
        break;
      }
      case Node::Kind::negate:
        emit(*n.children[0]);
        e.program_.push_back({Instr::Op::negate, 0.0, 0, Func::sqrt, n.position});
        break;
      case Node::Kind::binary: {
        emit(*n.children[0]);
        emit(*n.children[1]);
        Instr::Op op = Instr::Op::add;
        switch (n.op) {
          case '+': op = Instr::Op::add; break;
          case '-': op = Instr::Op::sub; break;
          case '*': op = Instr::Op::mul; break;
          case '/': op = Instr::Op::div; break;
          case '^': op = Instr::Op::pow; break;
        }
        e.program_.push_back({op, 0.0, 0, Func::sqrt, n.position});
        --depth;
        break;
      }
      case Node::Kind::call:
        for (const auto& c : n.children) emit(*c);
        e.program_.push_back({Instr::Op::call, 0.0, n.children.size(), n.func, n.position});
        depth -= n.children.size() - 1;
        break;
    }
    e.max_depth_ = std::max(e.max_depth_, depth);
  };
  emit(*e.ast_);
  return e;
}

template <typename T>
T Expression::run(std::span<const double> values, std::size_t dual_slot) const {
  if (values.size() != variables_.size()) {
    throw std::invalid_argument("Expression: expected " + std::to_string(variables_.size()) + " values");
  }
  constexpr std::size_t kInline = 32;
  T inline_stack[kInline]{};
  std::vector<T> heap;
  T* stack = inline_stack;
  if (max_depth_ > kInline) {
    heap.resize(max_depth_);
    stack = heap.data();
  }
  std::size_t top = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Instr::Op::push_const: stack[top++] = T(in.value); break;
      case Instr::Op::push_var:
        if constexpr (std::is_same_v<T, double>) {
          stack[top++] = values[in.slot];
        } else {
          stack[top++] = DualNumber(values[in.slot], in.slot == dual_slot ? 1.0 : 0.0);
        }
        break;
      case Instr::Op::negate: stack[top - 1] = -stack[top - 1]; break;
      case Instr::Op::add:
      case Instr::Op::sub:
      case Instr::Op::mul:
      case Instr::Op::div:
      case Instr::Op::pow: {
        static constexpr char kOps[] = {'+', '-', '*', '/', '^'};
        const char op = kOps[static_cast<int>(in.op) - static_cast<int>(Instr::Op::add)];
        const T rhs = stack[--top];
        stack[top - 1] = apply_binary<T>(op, stack[top - 1], rhs, in.position);
        break;
      }
      case Instr::Op::call: {
        top -= in.slot;
        stack[top] = apply_call<T>(in.func, std::span<const T>(stack + top, in.slot), in.position);
        ++top;
        break;
      }
    }
  }
  return stack[0];
}

double Expression::eval(std::span<const double> values) const {
  return run<double>(values, static_cast<std::size_t>(-1));
}

DualNumber Expression::eval_dual(std::size_t var, std::span<const double> values) const {
  return run<DualNumber>(values, var);
}

}  // namespace heis::expr
