#include "sproc/system.hpp"

#include <sstream>

#include "sproc/error.hpp"

namespace sproc {

std::size_t Function::dim() const noexcept {
  if (const auto* q = quadratic()) return q->dim();
  return expression()->dimension();
}

double Function::operator()(std::span<const double> x) const {
  if (const auto* q = quadratic()) return (*q)(x);
  return expression()->evaluate(x);
}

Vector Function::gradient(std::span<const double> x) const {
  if (const auto* q = quadratic()) return q->gradient(x);
  return gradient_fd(*expression(), x);
}

std::string Function::describe() const {
  if (const auto* e = expression()) return "expr " + e->to_string();
  const auto& q = *quadratic();
  std::ostringstream os;
  os.precision(12);
  os << (q.is_affine() ? "affine" : "quadratic") << " n=" << q.dim();
  return os.str();
}

FunctionSystem::FunctionSystem(Function objective, std::vector<Function> constraints) : n_(objective.dim()) {
  functions_.reserve(constraints.size() + 1);
  functions_.push_back(std::move(objective));
  for (auto& f : constraints) functions_.push_back(std::move(f));
  kind_ = Kind::AllQuadratic;
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    if (functions_[i].dim() != n_)
      throw DimensionMismatch("function " + std::to_string(i) + " has dimension " + std::to_string(functions_[i].dim()) +
                              ", expected " + std::to_string(n_));
    if (!functions_[i].is_quadratic()) kind_ = Kind::Mixed;
  }
}

bool FunctionSystem::all_affine() const noexcept {
  for (const auto& f : functions_)
    if (!f.is_quadratic() || !f.quadratic()->is_affine()) return false;
  return true;
}

Vector FunctionSystem::values(std::span<const double> x) const {
  Vector v(functions_.size());
  for (std::size_t i = 0; i < functions_.size(); ++i) v[i] = functions_[i](x);
  return v;
}

Vector FunctionSystem::image(std::span<const double> x) const {
  Vector z = values(x);
  for (std::size_t i = 1; i < z.size(); ++i) z[i] = -z[i];
  return z;
}

Matrix FunctionSystem::image_jacobian(std::span<const double> x) const {
  Matrix j(functions_.size(), n_);
  for (std::size_t i = 0; i < functions_.size(); ++i) {
    Vector g = functions_[i].gradient(x);
    const double sign = i == 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n_; ++k) j(i, k) = sign * g[k];
  }
  return j;
}

std::vector<QuadraticFunction> FunctionSystem::quadratics() const {
  if (!all_quadratic()) throw InvalidArgument("system contains non-quadratic functions");
  std::vector<QuadraticFunction> out;
  out.reserve(functions_.size());
  for (const auto& f : functions_) out.push_back(*f.quadratic());
  return out;
}

std::string_view to_string(FunctionSystem::Kind kind) {
  return kind == FunctionSystem::Kind::AllQuadratic ? "AllQuadratic" : "Mixed";
}

}  // namespace sproc
