#include "sproc/report.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"

namespace sproc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_vector(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out + "]";
}

void Report::merge(const std::string& prefix, const Report& other) {
  for (const auto& [k, v] : other.entries_) entries_.emplace_back(prefix.empty() ? k : prefix + "." + k, v);
}

std::string Report::text() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += ": ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) out += v;
          else if constexpr (std::is_same_v<T, double>) out += format_number(v);
          else if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
          else if constexpr (std::is_same_v<T, bool>) out += v ? "true" : "false";
          else out += format_vector(v);
        },
        value);
    out += "\n";
  }
  return out;
}

namespace {

nlohmann::ordered_json to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string Report::json() const {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  for (const auto& [key, value] : entries_) {
    nlohmann::ordered_json* node = &root;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (dot == std::string::npos) {
        std::visit(
            [&](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) (*node)[part] = to_json(v);
              else if constexpr (std::is_same_v<T, Vector>) {
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                for (double x : v) arr.push_back(to_json(x));
                (*node)[part] = std::move(arr);
              } else (*node)[part] = v;
            },
            value);
        break;
      }
      nlohmann::ordered_json& child = (*node)[part];
      if (!child.is_object()) child = nlohmann::ordered_json::object();
      node = &child;
      start = dot + 1;
    }
  }
  return root.dump(2) + "\n";
}

Report problem_report(const ProblemFile& problem) {
  Report r;
  if (!problem.name.empty()) r.add("name", problem.name);
  if (!problem.description.empty()) r.add("description", problem.description);
  r.add("n", problem.n);
  r.add("p", problem.p);
  const FunctionSystem system = problem.system();
  r.add("kind", to_string(system.kind()));
  r.add("all_affine", system.all_affine());
  for (std::size_t i = 0; i <= problem.p; ++i) r.add("f" + std::to_string(i), system.function(i).describe());
  if (problem.config.R) r.add("config.R", *problem.config.R);
  if (problem.config.N) r.add("config.N", *problem.config.N);
  if (problem.config.seed) r.add_seed("config.seed", *problem.config.seed);
  if (problem.config.tol) r.add("config.tol", *problem.config.tol);
  if (problem.expected_verdict) r.add("expected_verdict", *problem.expected_verdict);
  return r;
}

Report slater_report(const SlaterResult& s) {
  Report r;
  r.add("status", s.found ? "SlaterPoint" : "NotFound");
  r.add("x0", s.x0);
  r.add("min_constraint_value", s.min_constraint_value);
  return r;
}

Report counterexample_report(const FunctionSystem& system, const CounterexampleResult& c) {
  Report r;
  r.add("status", c.found ? "Counterexample" : "NoneFound");
  if (c.found) {
    r.add("x", c.x);
    r.add("values", c.values);
    r.add("image", system.image(c.x));
    r.add("in_K", cone_k_member(system.image(c.x), kCounterexampleTol));
  } else if (c.closest_miss) {
    r.add("closest_miss", *c.closest_miss);
    r.add("closest_f0", c.closest_f0);
  }
  if (c.skipped) r.add("skipped", c.skipped);
  return r;
}

Report certificate_report(const Certificate& c) {
  Report r;
  r.add("alpha", c.alpha);
  r.add("lambda_min", c.lambda_min);
  r.add("verified", to_string(c.verified));
  return r;
}

Report certificate_search_report(const CertificateSearch& s) {
  Report r;
  r.add("status", s.found ? "Found" : "NotFound");
  r.merge("best", certificate_report(s.certificate));
  r.add("iterations", s.iterations);
  if (s.boundary) r.add("boundary", true);
  return r;
}

Report separation_report(const SeparationSearch& s) {
  Report r;
  r.add("status", to_string(s.status));
  r.add("rounds", s.rounds);
  r.add("cloud_size", s.cloud_size);
  r.add("separator.alpha", s.separator.alpha);
  r.add("separator.delta", s.separator.delta);
  if (s.status == SeparationStatus::NoSeparator) {
    r.add("witness", s.witness.witness);
  } else if (s.status != SeparationStatus::SlaterBlocked) {
    r.merge("certificate", certificate_report(s.certificate));
  }
  return r;
}

Report falsification_report(const FalsificationResult& f) {
  Report r;
  r.add("status", f.violation ? "CandidateViolation" : "NoViolationFound");
  r.add("trials", f.trials);
  r.add("queries", f.queries);
  r.add("max_margin", f.max_margin);
  if (f.violation) {
    r.add("z1", f.violation->z1);
    r.add("z2", f.violation->z2);
    r.add("t", f.violation->t);
    r.add("m", f.violation->m);
    r.add("margin", f.violation->margin);
    r.add("found_at_trial", f.violation->search_budget);
  }
  return r;
}

Report geometry_report(const GeometryEvidence& g) {
  Report r;
  r.add("scope", "sampled cloud; statements hold for the sample, not for F");
  r.add("cloud.N", g.cloud_size);
  r.add("cloud.R", g.radius);
  r.add_seed("cloud.seed", g.seed);
  if (g.skipped) r.add("cloud.skipped", g.skipped);
  r.add("F_cap_K.status", g.k_points ? "sampled-intersects" : "sampled-disjoint");
  r.add("F_cap_K.points", g.k_points);
  if (g.k_witness) r.add("F_cap_K.witness_x", *g.k_witness);
  r.add("hull_cap_K.status", g.hull.intersects ? "sampled-intersects" : "sampled-disjoint");
  r.add("hull_cap_K.optimum", g.hull.feasible ? g.hull.optimum : std::numeric_limits<double>::infinity());
  if (g.hull.intersects) r.add("hull_cap_K.witness", g.hull.witness);
  r.add("separator.status", g.separator.separator ? "Separator" : "NoneExists");
  r.add("separator.alpha", g.separator.best.alpha);
  r.add("separator.delta", g.separator.best.delta);
  if (g.identity) r.merge("image_convexity", falsification_report(*g.identity));
  if (g.epi) r.merge("epi_convexity", falsification_report(*g.epi));
  if (g.conical) r.merge("conical_convexity", falsification_report(*g.conical));
  return r;
}

Report config_report(const ClassifyConfig& c) {
  Report r;
  r.add("R", c.radius);
  r.add("N", c.samples);
  r.add_seed("seed", c.seed);
  r.add("tol", c.tol);
  r.add("lp_tol", c.lp_tol);
  r.add("counterexample_tol", kCounterexampleTol);
  r.add("slater_tol", kSlaterTol);
  r.add("sampled_violation", kSampledViolation);
  r.add("penalty", c.penalty);
  r.add("refine_iters", c.refine_iters);
  r.add("alpha_max", c.alpha_max);
  r.add("supergradient_iters", c.supergradient_iters);
  r.add("separation_rounds", c.separation_rounds);
  r.add("geometry_samples", c.geometry_samples);
  r.add("falsify_trials", c.falsify_trials);
  r.add("conical_trials", c.conical_trials);
  r.add("eta", kViolationThreshold);
  r.add_seed("seeds.slater", stage_seed(c.seed, Stage::Slater));
  r.add_seed("seeds.counterexample", stage_seed(c.seed, Stage::Counterexample));
  r.add_seed("seeds.separation", stage_seed(c.seed, Stage::Separation));
  r.add_seed("seeds.verification", stage_seed(c.seed, Stage::Verification));
  r.add_seed("seeds.geometry", stage_seed(c.seed, Stage::Geometry));
  return r;
}

Report instance_report(const FunctionSystem& system, const InstanceReport& ir) {
  Report r;
  r.add("verdict", to_string(ir.verdict));
  r.add("n", system.dim());
  r.add("p", system.num_constraints());
  r.add("kind", to_string(system.kind()));
  r.merge("slater", slater_report(ir.slater));
  r.merge("counterexample", counterexample_report(system, ir.counterexample));
  if (ir.certificate_searched) {
    if (!ir.certificate_method.empty()) r.add("certificate.method", ir.certificate_method);
    if (ir.quadratic_search) r.merge("certificate.search", certificate_search_report(*ir.quadratic_search));
    if (ir.separation) r.merge("certificate.separation", separation_report(*ir.separation));
    if (ir.certificate) r.merge("certificate.result", certificate_report(*ir.certificate));
    else r.add("certificate.result", "none");
  }
  if (ir.geometry) r.merge("geometry", geometry_report(*ir.geometry));
  r.merge("config", config_report(ir.config));
  for (std::size_t i = 0; i < ir.diagnostics.size(); ++i) {
    const auto& d = ir.diagnostics[i];
    r.add("diagnostics." + std::to_string(i), d.stage + (d.numerical ? " (numerical): " : ": ") + d.message);
  }
  return r;
}

Report farkas_report(const LinearSystemData& d, const FarkasResult& f) {
  Report r;
  r.add("mode", to_string(d.mode));
  r.add("n", d.dim());
  r.add("p", d.num_constraints());
  r.add("result", to_string(f.kind));
  if (f.kind == FarkasResult::Kind::Multipliers) {
    r.add("alpha", f.alpha);
    Vector recon(d.dim(), 0.0);
    double bsum = 0.0;
    for (std::size_t i = 0; i < d.num_constraints(); ++i) {
      for (std::size_t k = 0; k < d.dim(); ++k) recon[k] += f.alpha[i] * d.rows[i][k];
      bsum += f.alpha[i] * d.b[i];
    }
    double res = 0.0;
    for (std::size_t k = 0; k < d.dim(); ++k) res = std::max(res, std::abs(recon[k] - d.a0[k]));
    r.add("residual", res);
    if (d.mode == LinearSystemData::Mode::Affine) r.add("b_gap", d.b0 - bsum);
  } else if (f.kind == FarkasResult::Kind::Alternative) {
    r.add("x", f.x);
    r.add("slack", f.slack);
  }
  r.add("constraints_inconsistent", f.constraints_inconsistent);
  if (f.constraints_inconsistent && !f.ray.empty()) r.add("inconsistency_ray", f.ray);
  return r;
}

Report scan_report(const ScanReport& s) {
  Report r;
  r.add("count", s.count);
  r.add("dim", s.dim);
  r.add_seed("seed", s.seed);
  r.add("samples", s.options.samples);
  r.add("trials", s.options.trials);
  r.add("R", s.options.radius);
  r.add("eta", s.options.eta);
  r.add("candidates", s.candidates());
  r.add("note", "candidates are numerical evidence of non-convexity, not proofs");
  for (const auto& e : s.entries) {
    Report er;
    er.add_seed("seed", e.seed);
    er.add("status", e.result.violation ? "Candidate" : "NoViolation");
    er.add("queries", e.result.queries);
    er.add("max_margin", e.result.max_margin);
    if (e.result.violation) {
      for (std::size_t k = 0; k < e.triple.size(); ++k) {
        const auto& q = e.triple[k];
        const std::string key = "q" + std::to_string(k + 1);
        er.add(key + ".Q", q.Q().data());
        er.add(key + ".c", q.c());
        er.add(key + ".d", q.d());
      }
      er.merge("violation", falsification_report(e.result));
    }
    r.merge("entry." + std::to_string(e.index), er);
  }
  return r;
}

}  // namespace sproc
