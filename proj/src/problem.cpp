#include "sproc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sproc/error.hpp"
#include "sproc/expr.hpp"

namespace sproc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(std::string_view source, const std::string& field, const std::string& message) {
  throw ParseError(std::string(source) + ": field '" + field + "': " + message);
}

void check_keys(const json& obj, std::string_view source, const std::string& field,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(source, field, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(source, field.empty() ? key : field + "." + key, "unknown key");
  }
}

const json& require(const json& obj, std::string_view source, const std::string& field, const char* key) {
  if (!obj.contains(key)) fail(source, field.empty() ? key : field + "." + key, "missing");
  return obj.at(key);
}

double number(const json& v, std::string_view source, const std::string& field) {
  if (!v.is_number()) fail(source, field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(source, field, "expected a finite number");
  return x;
}

std::size_t count(const json& v, std::string_view source, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(source, field, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

Vector numbers(const json& v, std::string_view source, const std::string& field) {
  if (!v.is_array()) fail(source, field, "expected a list of numbers");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], source, field + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix matrix(const json& v, std::size_t n, std::string_view source, const std::string& field) {
  if (!v.is_array()) fail(source, field, "expected a row-major list");
  Vector flat;
  if (!v.empty() && v[0].is_array()) {
    if (v.size() != n)
      throw DimensionMismatch(std::string(source) + ": field '" + field + "': expected " + std::to_string(n) +
                              " rows, got " + std::to_string(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vector row = numbers(v[i], source, field + "[" + std::to_string(i) + "]");
      if (row.size() != n)
        throw DimensionMismatch(std::string(source) + ": field '" + field + "[" + std::to_string(i) +
                                "]': expected " + std::to_string(n) + " entries, got " + std::to_string(row.size()));
      flat.insert(flat.end(), row.begin(), row.end());
    }
  } else {
    flat = numbers(v, source, field);
    if (flat.size() != n * n)
      throw DimensionMismatch(std::string(source) + ": field '" + field + "': expected " + std::to_string(n * n) +
                              " entries (row-major " + std::to_string(n) + "x" + std::to_string(n) + "), got " +
                              std::to_string(flat.size()));
  }
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = flat[i * n + j];
  return m;
}

void expect_length(const Vector& v, std::size_t n, std::string_view source, const std::string& field) {
  if (v.size() != n)
    throw DimensionMismatch(std::string(source) + ": field '" + field + "': expected " + std::to_string(n) +
                            " entries, got " + std::to_string(v.size()));
}

ProblemEntry entry(const json& v, std::size_t n, std::string_view source, const std::string& field) {
  check_keys(v, source, field, {"quadratic", "expr", "linear"});
  if (v.size() != 1) fail(source, field, "expected exactly one of quadratic, expr, linear");
  ProblemEntry e;
  if (v.contains("quadratic")) {
    const std::string f = field + ".quadratic";
    const json& q = v.at("quadratic");
    check_keys(q, source, f, {"Q", "c", "d"});
    e.kind = ProblemEntry::Kind::Quadratic;
    e.Q = matrix(require(q, source, f, "Q"), n, source, f + ".Q");
    e.c = q.contains("c") ? numbers(q.at("c"), source, f + ".c") : Vector(n, 0.0);
    expect_length(e.c, n, source, f + ".c");
    e.d = q.contains("d") ? number(q.at("d"), source, f + ".d") : 0.0;
    try {
      (void)QuadraticFunction(e.Q, e.c, e.d);
    } catch (const InvalidArgument& err) {
      fail(source, f + ".Q", err.what());
    }
  } else if (v.contains("linear")) {
    const std::string f = field + ".linear";
    const json& l = v.at("linear");
    check_keys(l, source, f, {"a", "b"});
    e.kind = ProblemEntry::Kind::Linear;
    e.a = numbers(require(l, source, f, "a"), source, f + ".a");
    expect_length(e.a, n, source, f + ".a");
    e.b = l.contains("b") ? number(l.at("b"), source, f + ".b") : 0.0;
  } else {
    const json& x = v.at("expr");
    if (!x.is_string()) fail(source, field + ".expr", "expected a string");
    e.kind = ProblemEntry::Kind::Expr;
    e.expr = x.get<std::string>();
    try {
      (void)Expression::parse(e.expr, n);
    } catch (const Error& err) {
      fail(source, field + ".expr", err.what());
    }
  }
  return e;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

Function ProblemEntry::function(std::size_t n) const {
  switch (kind) {
    case Kind::Quadratic:
      return QuadraticFunction(Q, c, d);
    case Kind::Linear:
      return QuadraticFunction::affine(a, b);
    case Kind::Expr:
      return Expression::parse(expr, n);
  }
  throw InvalidArgument("unknown entry kind");
}

FunctionSystem ProblemFile::system() const {
  std::vector<Function> constraints;
  for (std::size_t i = 1; i < functions.size(); ++i) constraints.push_back(functions[i].function(n));
  return {functions.front().function(n), std::move(constraints)};
}

bool ProblemFile::all_linear() const {
  return std::all_of(functions.begin(), functions.end(), [](const ProblemEntry& e) {
    return e.kind == ProblemEntry::Kind::Linear || (e.kind == ProblemEntry::Kind::Quadratic && e.Q.max_abs() == 0.0);
  });
}

LinearSystemData ProblemFile::linear_data() const {
  if (!all_linear()) throw InvalidArgument("farkas needs every function to be linear");
  return sproc::linear_data(system());
}

ProblemFile parse_problem(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(source) + ": line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) +
                     ": invalid JSON");
  }
  check_keys(doc, source, "", {"name", "description", "n", "p", "functions", "config", "expected_verdict"});
  ProblemFile pf;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(source, "name", "expected a string");
    pf.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) fail(source, "description", "expected a string");
    pf.description = doc["description"].get<std::string>();
  }
  pf.n = count(require(doc, source, "", "n"), source, "n");
  if (pf.n == 0) fail(source, "n", "expected n >= 1");
  pf.p = count(require(doc, source, "", "p"), source, "p");
  const json& fs = require(doc, source, "", "functions");
  if (!fs.is_array()) fail(source, "functions", "expected a list");
  if (fs.size() != pf.p + 1)
    throw DimensionMismatch(std::string(source) + ": field 'functions': expected p + 1 = " + std::to_string(pf.p + 1) +
                            " entries, got " + std::to_string(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i)
    pf.functions.push_back(entry(fs[i], pf.n, source, "functions[" + std::to_string(i) + "]"));
  if (doc.contains("config")) {
    const json& c = doc["config"];
    check_keys(c, source, "config", {"R", "N", "seed", "tol"});
    if (c.contains("R")) {
      pf.config.R = number(c["R"], source, "config.R");
      if (!(*pf.config.R > 0.0)) fail(source, "config.R", "expected R > 0");
    }
    if (c.contains("N")) {
      pf.config.N = count(c["N"], source, "config.N");
      if (*pf.config.N == 0) fail(source, "config.N", "expected N >= 1");
    }
    if (c.contains("seed")) {
      if (!c["seed"].is_number_unsigned()) fail(source, "config.seed", "expected a nonnegative integer");
      pf.config.seed = c["seed"].get<std::uint64_t>();
    }
    if (c.contains("tol")) {
      pf.config.tol = number(c["tol"], source, "config.tol");
      if (!(*pf.config.tol > 0.0)) fail(source, "config.tol", "expected tol > 0");
    }
  }
  if (doc.contains("expected_verdict")) {
    const json& v = doc["expected_verdict"];
    static const std::set<std::string> allowed = {"ValidWithCertificate", "InvalidWithCounterexample", "Undetermined"};
    if (!v.is_string() || !allowed.count(v.get<std::string>()))
      fail(source, "expected_verdict", "expected ValidWithCertificate, InvalidWithCounterexample or Undetermined");
    pf.expected_verdict = v.get<std::string>();
  }
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

}  // namespace sproc
