#pragma once
/// @brief Arithmetic field expressions over the coordinates x, y.
///
/// Grammar (lowest to highest precedence):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | 'x' | 'y' | 'pi' | func '(' args ')' | '(' expr ')'
/// with func in exp, log, abs, sqrt, sin, cos (one argument) and min, max (two).

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pxrobin/error.hpp"
#include "pxrobin/geometry.hpp"

namespace pxrobin {

namespace expr_detail {

enum class Var : unsigned char { X, Y };
enum class BinOp : unsigned char { Add, Sub, Mul, Div, Pow };
enum class Func : unsigned char { Exp, Log, Abs, Sqrt, Sin, Cos, Min, Max };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  double value;
  bool is_pi = false;
};
struct Variable {
  Var var;
};
struct Negate {
  NodePtr arg;
};
struct Binary {
  BinOp op;
  NodePtr lhs, rhs;
};
struct Call {
  Func fn;
  std::vector<NodePtr> args;
};

struct Node {
  std::variant<Constant, Variable, Negate, Binary, Call> v;
};

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Abs: return "abs";
    case Func::Sqrt: return "sqrt";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Min: return "min";
    case Func::Max: return "max";
  }
  return "?";
}

inline double eval(const Node& n, double x, double y) {
  struct Visitor {
    double x, y;
    double operator()(const Constant& c) const { return c.value; }
    double operator()(const Variable& v) const { return v.var == Var::X ? x : y; }
    double operator()(const Negate& n) const { return -eval(*n.arg, x, y); }
    double operator()(const Binary& b) const {
      const double l = eval(*b.lhs, x, y);
      const double r = eval(*b.rhs, x, y);
      switch (b.op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div:
          if (r == 0.0) throw DomainError("division by zero", x, y);
          return l / r;
        case BinOp::Pow: {
          const double v = std::pow(l, r);
          if (!std::isfinite(v)) throw DomainError("invalid power", x, y);
          return v;
        }
      }
      return 0.0;
    }
    double operator()(const Call& c) const {
      const double a = eval(*c.args[0], x, y);
      switch (c.fn) {
        case Func::Exp: {
          const double v = std::exp(a);
          if (!std::isfinite(v)) throw DomainError("exp overflow", x, y);
          return v;
        }
        case Func::Log:
          if (!(a > 0.0)) throw DomainError("log of non-positive argument", x, y);
          return std::log(a);
        case Func::Abs: return std::abs(a);
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative argument", x, y);
          return std::sqrt(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Min: return std::min(a, eval(*c.args[1], x, y));
        case Func::Max: return std::max(a, eval(*c.args[1], x, y));
      }
      return 0.0;
    }
  };
  return std::visit(Visitor{x, y}, n.v);
}

inline void print(const Node& n, std::string& out) {
  struct Visitor {
    std::string& out;
    void operator()(const Constant& c) const {
      if (c.is_pi) {
        out += "pi";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", c.value);
      out += buf;
    }
    void operator()(const Variable& v) const { out += (v.var == Var::X ? "x" : "y"); }
    void operator()(const Negate& n) const {
      out += "(-";
      print(*n.arg, out);
      out += ')';
    }
    void operator()(const Binary& b) const {
      static constexpr char ops[] = {'+', '-', '*', '/', '^'};
      out += '(';
      print(*b.lhs, out);
      out += ' ';
      out += ops[static_cast<int>(b.op)];
      out += ' ';
      print(*b.rhs, out);
      out += ')';
    }
    void operator()(const Call& c) const {
      out += func_name(c.fn);
      out += '(';
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ", ";
        print(*c.args[i], out);
      }
      out += ')';
    }
  };
  std::visit(Visitor{out}, n.v);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_ + 1); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  static NodePtr make(auto&& alt) { return std::make_shared<const Node>(Node{std::forward<decltype(alt)>(alt)}); }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Binary{BinOp::Add, lhs, term()});
      else if (accept('-')) lhs = make(Binary{BinOp::Sub, lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Binary{BinOp::Mul, lhs, unary()});
      else if (accept('/')) lhs = make(Binary{BinOp::Div, lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Negate{unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Binary{BinOp::Pow, base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string tok(s_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      pos_ = start;
      fail("malformed number '" + tok + "'");
    }
    return make(Constant{v});
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    if (name == "x") return make(Variable{Var::X});
    if (name == "y") return make(Variable{Var::Y});
    if (name == "pi") return make(Constant{std::numbers::pi, true});

    struct Entry {
      const char* name;
      Func fn;
      std::size_t arity;
    };
    static constexpr Entry table[] = {{"exp", Func::Exp, 1},  {"log", Func::Log, 1}, {"abs", Func::Abs, 1},
                                      {"sqrt", Func::Sqrt, 1}, {"sin", Func::Sin, 1}, {"cos", Func::Cos, 1},
                                      {"min", Func::Min, 2},  {"max", Func::Max, 2}};
    for (const Entry& e : table) {
      if (name != e.name) continue;
      expect('(');
      std::vector<NodePtr> args;
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (args.size() != e.arity) {
        pos_ = start;
        fail(name + " expects " + std::to_string(e.arity) + " argument(s), got " + std::to_string(args.size()));
      }
      return make(Call{e.fn, std::move(args)});
    }
    throw UnknownIdentifier(name);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace expr_detail

/// Immutable, cheaply copyable expression tree for a scalar field on R^2.
class FieldExpr {
 public:
  FieldExpr() = default;

  static FieldExpr parse(std::string_view text) {
    FieldExpr f;
    f.root_ = expr_detail::Parser(text).parse();
    f.source_ = std::string(text);
    return f;
  }

  static FieldExpr constant(double c) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return parse(buf);
  }

  /// Throws DomainError instead of returning a non-finite value.
  double operator()(double x, double y) const {
    if (!root_) throw InvalidArgument("evaluating an empty field expression");
    const double v = expr_detail::eval(*root_, x, y);
    if (!std::isfinite(v)) throw DomainError("non-finite value", x, y);
    return v;
  }
  double operator()(const Point2& p) const { return (*this)(p.x, p.y); }

  /// Fully parenthesized form that re-parses to an equivalent tree.
  std::string to_string() const {
    std::string out;
    if (root_) expr_detail::print(*root_, out);
    return out;
  }

  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return !root_; }

 private:
  expr_detail::NodePtr root_;
  std::string source_;
};

inline FieldExpr parse_field(std::string_view text) { return FieldExpr::parse(text); }

inline double eval_field(const FieldExpr& f, const Point2& p) { return f(p); }

}  // namespace pxrobin
