#include "sproc/expr.hpp"

#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <utility>

#include "sproc/error.hpp"

namespace sproc {

namespace {

struct FuncInfo {
  std::string_view name;
  Expression::Func func;
  int arity;
};

constexpr std::array<FuncInfo, 8> kFunctions{{
    {"sin", Expression::Func::Sin, 1},
    {"cos", Expression::Func::Cos, 1},
    {"exp", Expression::Func::Exp, 1},
    {"log", Expression::Func::Log, 1},
    {"sqrt", Expression::Func::Sqrt, 1},
    {"abs", Expression::Func::Abs, 1},
    {"min", Expression::Func::Min, 2},
    {"max", Expression::Func::Max, 2},
}};

const FuncInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

std::string_view function_name(Expression::Func func) {
  for (const auto& f : kFunctions)
    if (f.func == func) return f.name;
  return "?";
}

std::string format_constant(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

class ExpressionParser {
 public:
  ExpressionParser(std::string_view src, std::size_t dimension) : src_(src), dimension_(dimension) {}

  Expression run() {
    if (dimension_ == 0) throw InvalidArgument("expression dimension must be positive");
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "empty expression");
    const std::int32_t root = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return Expression(std::make_shared<const std::vector<Expression::Node>>(std::move(nodes_)), root,
                      dimension_);
  }

 private:
  using Kind = Expression::Kind;

  std::int32_t add(Expression::Node node) {
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t binary(Kind kind, std::int32_t lhs, std::int32_t rhs) {
    return add({.kind = kind, .lhs = lhs, .rhs = rhs});
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw SyntaxError(pos_, std::string("expected '") + c + "' at end of input");
      throw SyntaxError(pos_, std::string("expected '") + c + "', found '" + src_[pos_] + "'");
    }
  }

  std::int32_t parse_expr() {
    std::int32_t lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Kind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_term() {
    std::int32_t lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  std::int32_t parse_unary() {
    if (accept('-')) return add({.kind = Kind::Negate, .lhs = parse_unary()});
    return parse_power();
  }

  std::int32_t parse_power() {
    const std::int32_t base = parse_primary();
    if (accept('^')) return binary(Kind::Pow, base, parse_unary());
    return base;
  }

  std::int32_t parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const std::int32_t inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
  }

  std::int32_t parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError(start, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError(pos_, "malformed exponent");
    }
    if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      throw SyntaxError(pos_, "implicit multiplication is not supported");
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
      throw SyntaxError(start, "number out of range: " + std::string(first, last));
    return add({.kind = Kind::Constant, .value = value});
  }

  std::int32_t parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (const FuncInfo* f = find_function(name)) {
      if (!accept('(')) throw SyntaxError(pos_, "expected '(' after '" + std::string(name) + "'");
      const std::int32_t first = parse_expr();
      std::int32_t second = -1;
      if (f->arity == 2) {
        expect(',');
        second = parse_expr();
      }
      expect(')');
      return add({.kind = Kind::Call, .func = f->func, .lhs = first, .rhs = second});
    }

    if (name.size() >= 2 && name[0] == 'x') {
      bool all_digits = true;
      for (char d : name.substr(1)) all_digits = all_digits && std::isdigit(static_cast<unsigned char>(d));
      if (all_digits) {
        std::size_t index = 0;
        auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (ec != std::errc() || index < 1 || index > dimension_)
          throw IndexOutOfRange(ec == std::errc() ? index : 0, dimension_);
        return add({.kind = Kind::Variable, .index = index - 1});
      }
    }
    throw UnknownIdentifier(std::string(name));
  }

  std::string_view src_;
  std::size_t dimension_;
  std::size_t pos_ = 0;
  std::vector<Expression::Node> nodes_;
};

Expression Expression::parse(std::string_view source, std::size_t dimension) {
  return ExpressionParser(source, dimension).run();
}

double Expression::evaluate(std::span<const double> x) const {
  if (x.size() != dimension_)
    throw DimensionMismatch("expression over " + std::to_string(dimension_) + " variables evaluated at a point of size " +
                            std::to_string(x.size()));
  return eval_node(root_, x);
}

double Expression::eval_node(std::int32_t id, std::span<const double> x) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(id)];
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable:
      return x[n.index];
    case Kind::Negate:
      return -eval_node(n.lhs, x);
    case Kind::Add:
      return eval_node(n.lhs, x) + eval_node(n.rhs, x);
    case Kind::Sub:
      return eval_node(n.lhs, x) - eval_node(n.rhs, x);
    case Kind::Mul:
      return eval_node(n.lhs, x) * eval_node(n.rhs, x);
    case Kind::Div: {
      const double num = eval_node(n.lhs, x);
      const double den = eval_node(n.rhs, x);
      if (den == 0.0) throw DomainError("division by zero", render(id));
      return num / den;
    }
    case Kind::Pow: {
      const double base = eval_node(n.lhs, x);
      const double exponent = eval_node(n.rhs, x);
      const double v = std::pow(base, exponent);
      if (std::isnan(v) && !std::isnan(base) && !std::isnan(exponent))
        throw DomainError("non-integer power of a negative number", render(id));
      return v;
    }
    case Kind::Call: {
      const double a = eval_node(n.lhs, x);
      switch (n.func) {
        case Func::Sin:
          return std::sin(a);
        case Func::Cos:
          return std::cos(a);
        case Func::Exp:
          return std::exp(a);
        case Func::Log:
          if (!(a > 0.0)) throw DomainError("log of a non-positive number", render(id));
          return std::log(a);
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative number", render(id));
          return std::sqrt(a);
        case Func::Abs:
          return std::abs(a);
        case Func::Min:
          return std::min(a, eval_node(n.rhs, x));
        case Func::Max:
          return std::max(a, eval_node(n.rhs, x));
      }
    }
  }
  return 0.0;  // unreachable
}

std::string Expression::render(std::int32_t id) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(id)];
  auto wrap = [&](std::string_view op) { return "(" + render(n.lhs) + " " + std::string(op) + " " + render(n.rhs) + ")"; };
  switch (n.kind) {
    case Kind::Constant:
      return format_constant(n.value);
    case Kind::Variable:
      return "x" + std::to_string(n.index + 1);
    case Kind::Negate:
      return "(-" + render(n.lhs) + ")";
    case Kind::Add:
      return wrap("+");
    case Kind::Sub:
      return wrap("-");
    case Kind::Mul:
      return wrap("*");
    case Kind::Div:
      return wrap("/");
    case Kind::Pow:
      return wrap("^");
    case Kind::Call: {
      std::string out(function_name(n.func));
      out += "(" + render(n.lhs);
      if (n.rhs >= 0) out += ", " + render(n.rhs);
      return out + ")";
    }
  }
  return {};
}

Vector gradient_fd(const Expression& e, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  Vector probe(x.begin(), x.end());
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double up = e.evaluate(probe);
    probe[i] = xi - h;
    const double down = e.evaluate(probe);
    probe[i] = xi;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace sproc
