#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sproc/certificate.hpp"
#include "sproc/farkas.hpp"
#include "sproc/geometry.hpp"
#include "sproc/implication.hpp"
#include "sproc/problem.hpp"

namespace sproc {

/// Ordered "key: value" report. Dotted keys nest in the JSON rendering.
class Report {
 public:
  using Value = std::variant<std::string, double, std::int64_t, bool, Vector>;

  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  void add(std::string key, std::string_view value) { add(std::move(key), std::string(value)); }
  void add(std::string key, double value) { entries_.emplace_back(std::move(key), value); }
  void add(std::string key, std::size_t value) { entries_.emplace_back(std::move(key), static_cast<std::int64_t>(value)); }
  void add(std::string key, int value) { entries_.emplace_back(std::move(key), static_cast<std::int64_t>(value)); }
  /// 64-bit seeds are kept exact as decimal text.
  void add_seed(std::string key, std::uint64_t value) { entries_.emplace_back(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { entries_.emplace_back(std::move(key), value); }
  void add(std::string key, std::span<const double> value) {
    entries_.emplace_back(std::move(key), Vector(value.begin(), value.end()));
  }
  void add(std::string key, const Vector& value) { entries_.emplace_back(std::move(key), value); }

  /// Appends every entry of other with keys prefixed by "prefix." (unchanged when prefix is empty).
  void merge(const std::string& prefix, const Report& other);

  std::string text() const;
  std::string json() const;

  const std::vector<std::pair<std::string, Value>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

/// Shortest round-trip representation ("inf", "-inf", "nan" for non-finite values).
std::string format_number(double v);
std::string format_vector(std::span<const double> v);

Report problem_report(const ProblemFile& problem);
Report slater_report(const SlaterResult& r);
Report counterexample_report(const FunctionSystem& system, const CounterexampleResult& r);
Report certificate_report(const Certificate& c);
Report certificate_search_report(const CertificateSearch& s);
Report separation_report(const SeparationSearch& s);
Report geometry_report(const GeometryEvidence& g);
Report falsification_report(const FalsificationResult& f);
Report config_report(const ClassifyConfig& c);
Report instance_report(const FunctionSystem& system, const InstanceReport& r);
Report farkas_report(const LinearSystemData& d, const FarkasResult& r);
Report scan_report(const ScanReport& s);

}  // namespace sproc
