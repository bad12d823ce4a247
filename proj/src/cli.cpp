#include "sproc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sproc/certificate.hpp"
#include "sproc/error.hpp"
#include "sproc/farkas.hpp"
#include "sproc/geometry.hpp"
#include "sproc/implication.hpp"
#include "sproc/problem.hpp"
#include "sproc/report.hpp"

namespace sproc {

namespace {

struct Options {
  std::string file;
  bool json = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> box;
  std::optional<double> tol;
  std::string method = "auto";
  std::string export_path;
  int trials = 200;
  std::string alpha;
  std::size_t count = 1;
  std::size_t dim = 2;
};

ClassifyConfig config_for(const ProblemFile& pf, const Options& o) {
  ClassifyConfig c;
  if (pf.config.R) c.radius = *pf.config.R;
  if (pf.config.N) c.samples = *pf.config.N;
  if (pf.config.seed) c.seed = *pf.config.seed;
  if (pf.config.tol) c.tol = *pf.config.tol;
  if (o.box) c.radius = *o.box;
  if (o.samples) c.samples = *o.samples;
  if (o.seed) c.seed = *o.seed;
  if (o.tol) c.tol = *o.tol;
  return c;
}

void emit(std::ostream& out, const Report& r, bool json) { out << (json ? r.json() : r.text()); }

Vector parse_alpha(const std::string& text) {
  Vector alpha;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw InvalidArgument("empty entry in --alpha");
    const auto last = item.find_last_not_of(" \t");
    const std::string tok = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InvalidArgument("cannot read '" + tok + "' in --alpha");
    alpha.push_back(v);
  }
  return alpha;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  Report r;
  r.add("file", o.file);
  r.add("status", "ok");
  r.merge("problem", problem_report(pf));
  emit(out, r, o.json);
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  const ClassifyConfig cfg = config_for(pf, o);
  const FunctionSystem system = pf.system();
  const InstanceReport ir = classify_instance(system, cfg);
  Report r;
  r.add("command", "sproc classify " + o.file + " --seed " + std::to_string(cfg.seed) + " --samples " +
                       std::to_string(cfg.samples) + " --box " + format_number(cfg.radius) + " --tol " +
                       format_number(cfg.tol) + (o.json ? " --json" : ""));
  if (!pf.name.empty()) r.add("instance", pf.name);
  r.merge("", instance_report(system, ir));
  if (pf.expected_verdict) {
    r.add("expected_verdict", *pf.expected_verdict);
    r.add("matches_expected", *pf.expected_verdict == to_string(ir.verdict));
  }
  emit(out, r, o.json);
  if (ir.verdict != Verdict::Undetermined) return kExitOk;
  return ir.numerical_failure() ? kExitNumerical : kExitUndetermined;
}

int cmd_certificate(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  const ClassifyConfig cfg = config_for(pf, o);
  const FunctionSystem system = pf.system();
  const std::size_t p = system.num_constraints();
  Report r;
  r.add("file", o.file);
  std::string method = o.method;
  if (method == "auto") {
    if (!system.all_quadratic()) method = "separation";
    else if (p == 1) method = "p1";
    else if (p == 0) method = "separation";
    else method = "supergradient";
  }
  if ((method == "p1" || method == "supergradient") && !system.all_quadratic())
    throw InvalidArgument("--method " + method + " needs an all-quadratic system");
  r.add("method", method);
  bool found = false;
  bool exact = false;
  if (method == "p1") {
    const CertificateSearch s = find_certificate_p1(system, cfg.alpha_max, cfg.tol);
    r.merge("search", certificate_search_report(s));
    found = exact = s.found;
    if (s.found) r.add("serialized", serialize_certificate(s.certificate));
  } else if (method == "supergradient") {
    if (p == 0) throw InvalidArgument("--method supergradient needs p >= 1");
    const CertificateSearch s = find_certificate_general(system, cfg.supergradient_iters, cfg.seed, cfg.tol);
    r.merge("search", certificate_search_report(s));
    found = exact = s.found;
    if (s.found) r.add("serialized", serialize_certificate(s.certificate));
  } else {
    const ImageCloud cloud = sample_image(system, cfg.radius, cfg.samples, stage_seed(cfg.seed, Stage::Separation));
    SeparationOptions so;
    so.lp_tol = cfg.lp_tol;
    so.psd_tol = cfg.tol;
    so.rounds = cfg.separation_rounds;
    so.radius = cfg.radius;
    so.verify_samples = cfg.samples;
    so.seed = stage_seed(cfg.seed, Stage::Verification);
    const SeparationSearch s = find_certificate_via_separation(system, cloud, so);
    r.merge("separation", separation_report(s));
    found = s.status == SeparationStatus::Found;
    exact = found && s.certificate.verified == Verification::ExactPSD;
    if (found) r.add("serialized", serialize_certificate(s.certificate));
  }
  r.add("config.R", cfg.radius);
  r.add("config.N", cfg.samples);
  r.add_seed("config.seed", cfg.seed);
  r.add("config.tol", cfg.tol);
  emit(out, r, o.json);
  (void)found;
  return exact ? kExitOk : kExitUndetermined;
}

int cmd_counterexample(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  const ClassifyConfig cfg = config_for(pf, o);
  const FunctionSystem system = pf.system();
  CounterexampleOptions co;
  co.radius = cfg.radius;
  co.samples = cfg.samples;
  co.seed = stage_seed(cfg.seed, Stage::Counterexample);
  co.refine_iters = cfg.refine_iters;
  co.penalty = cfg.penalty;
  const CounterexampleResult c = find_counterexample(system, co);
  Report r;
  r.add("file", o.file);
  r.merge("counterexample", counterexample_report(system, c));
  r.add("config.R", cfg.radius);
  r.add("config.N", cfg.samples);
  r.add_seed("config.seed", cfg.seed);
  emit(out, r, o.json);
  return c.found ? kExitOk : kExitUndetermined;
}

int cmd_geometry(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  const ClassifyConfig cfg = config_for(pf, o);
  const FunctionSystem system = pf.system();
  EvidenceOptions eo;
  eo.radius = cfg.radius;
  eo.samples = cfg.samples;
  eo.seed = cfg.seed;
  eo.lp_tol = cfg.lp_tol;
  eo.trials = o.trials;
  eo.conical_trials = std::min(o.trials, cfg.conical_trials);
  ImageCloud cloud;
  const GeometryEvidence g = collect_geometry_evidence(system, eo, &cloud);
  Report r;
  r.add("file", o.file);
  r.merge("geometry", geometry_report(g));
  if (g.identity) {
    r.add("summary.image",
          g.identity->violation ? "sampled image set F is non-convex: witness chord found"
                                : "no non-convexity witness for the image set F within budget");
  }
  if (g.epi) {
    r.add("summary.epi_image",
          g.epi->violation ? "epi-image F + R_+^{p+1}: candidate violation found"
                           : "epi-image F + R_+^{p+1}: no violation found");
  }
  if (g.conical) {
    r.add("summary.conical",
          g.conical->violation ? "conical hull R_+ F: candidate violation found" : "conical hull R_+ F: no violation found");
  }
  if (!o.export_path.empty()) {
    std::ofstream f(o.export_path);
    if (!f) throw ParseError(o.export_path + ": cannot write file");
    export_cloud(cloud, f);
    r.add("export", o.export_path);
  }
  emit(out, r, o.json);
  return kExitOk;
}

int cmd_farkas(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  const LinearSystemData d = pf.linear_data();
  const FarkasResult f = farkas_solve(d);
  Report r;
  r.add("file", o.file);
  r.merge("farkas", farkas_report(d, f));
  r.add("statement_C", f.kind == FarkasResult::Kind::Multipliers ? "holds" : "fails");
  r.add("statement_I", f.kind == FarkasResult::Kind::Alternative ? "fails" : "holds");
  emit(out, r, o.json);
  return kExitOk;
}

int cmd_scan(const Options& o, std::ostream& out) {
  ScanOptions so;
  so.trials = o.trials;
  if (o.samples) so.samples = *o.samples;
  if (o.box) so.radius = *o.box;
  const ScanReport s = conjecture_scan(o.count, o.dim, o.seed.value_or(1), so);
  emit(out, scan_report(s), o.json);
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const ProblemFile pf = load_problem(o.file);
  const ClassifyConfig cfg = config_for(pf, o);
  const FunctionSystem system = pf.system();
  const Vector alpha = parse_alpha(o.alpha);
  Report r;
  r.add("file", o.file);
  r.add("alpha", alpha);
  int code = kExitOk;
  if (system.all_quadratic()) {
    const QuadraticVerification v = verify_certificate_quadratic(system, alpha, cfg.tol);
    r.add("mode", "exact");
    r.add("result", v.valid ? "Valid" : "Invalid");
    r.add("lambda_min", v.lambda_min);
    r.add("threshold", v.threshold);
    if (!v.valid) {
      if (v.violating_x) {
        r.add("violating_x", *v.violating_x);
        Vector vals = system.values(*v.violating_x);
        double g = vals[0];
        for (std::size_t i = 0; i < alpha.size(); ++i) g -= alpha[i] * vals[i + 1];
        r.add("combined_value", g);
      } else {
        r.add("violating_direction", v.direction);
      }
    }
    Certificate c{alpha, v.lambda_min, v.valid ? Verification::ExactPSD : Verification::Failed};
    r.add("serialized", serialize_certificate(c));
  } else {
    const SampledVerification v =
        verify_certificate_sampled(system, alpha, cfg.radius, cfg.samples, stage_seed(cfg.seed, Stage::Verification));
    r.add("mode", "sampled");
    r.add("result", v.violated ? "Violated" : "NoViolation");
    r.add("value", v.value);
    r.add("x", v.x);
    r.add("config.R", cfg.radius);
    r.add("config.N", cfg.samples);
    r.add_seed("config.seed", cfg.seed);
    code = v.violated ? kExitOk : kExitUndetermined;
  }
  emit(out, r, o.json);
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification toolkit for the S-procedure", "sproc"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool sampling) {
    sub->add_option("file", o.file, "Problem file (JSON)")->required();
    sub->add_flag("--json", o.json, "Machine-readable output");
    if (sampling) {
      sub->add_option("--seed", o.seed, "Base random seed");
      sub->add_option("--samples", o.samples, "Sample count N")->check(CLI::PositiveNumber);
      sub->add_option("--box", o.box, "Box radius R")->check(CLI::PositiveNumber);
      sub->add_option("--tol", o.tol, "Relative PSD tolerance")->check(CLI::PositiveNumber);
    }
  };

  std::function<int()> action;
  auto validate = app.add_subcommand("validate", "Parse and report an instance");
  add_common(validate, false);
  validate->callback([&] { action = [&] { return cmd_validate(o, out); }; });

  auto classify = app.add_subcommand("classify", "Full classification report");
  add_common(classify, true);
  classify->callback([&] { action = [&] { return cmd_classify(o, out); }; });

  auto certificate = app.add_subcommand("certificate", "Certificate search only");
  add_common(certificate, true);
  certificate->add_option("--method", o.method, "p1, supergradient or separation")
      ->check(CLI::IsMember({"auto", "p1", "supergradient", "separation"}));
  certificate->callback([&] { action = [&] { return cmd_certificate(o, out); }; });

  auto counterexample = app.add_subcommand("counterexample", "Counterexample search only");
  add_common(counterexample, true);
  counterexample->callback([&] { action = [&] { return cmd_counterexample(o, out); }; });

  auto geometry = app.add_subcommand("geometry", "Image cloud, F cap K, hull, separator and convexity falsifiers");
  add_common(geometry, true);
  geometry->add_option("--export", o.export_path, "Write the cloud to this file");
  geometry->add_option("--trials", o.trials, "Falsification trials")->check(CLI::PositiveNumber);
  geometry->callback([&] { action = [&] { return cmd_geometry(o, out); }; });

  auto farkas = app.add_subcommand("farkas", "Linear alternatives");
  add_common(farkas, false);
  farkas->callback([&] { action = [&] { return cmd_farkas(o, out); }; });

  auto scan = app.add_subcommand("conjecture-scan", "Epi-convexity scan of random quadratic triples");
  scan->add_option("--count", o.count, "Number of triples")->required()->check(CLI::PositiveNumber);
  scan->add_option("--dim", o.dim, "Dimension n (>= 2)")->required();
  scan->add_option("--seed", o.seed, "Seed")->required();
  scan->add_option("--trials", o.trials, "Falsification trials per triple")->check(CLI::PositiveNumber);
  scan->add_option("--samples", o.samples, "Cloud size per triple")->check(CLI::PositiveNumber);
  scan->add_option("--box", o.box, "Box radius R")->check(CLI::PositiveNumber);
  scan->add_flag("--json", o.json, "Machine-readable output");
  scan->callback([&] { action = [&] { return cmd_scan(o, out); }; });

  auto verify = app.add_subcommand("verify", "Verify a user-supplied certificate");
  add_common(verify, true);
  verify->add_option("--alpha", o.alpha, "Comma-separated multipliers a1,...,ap")->required();
  verify->callback([&] { action = [&] { return cmd_verify(o, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (!action) return kExitUsage;
  try {
    return action();
  } catch (const NotConverged& e) {
    err << "sproc: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalBreakdown& e) {
    err << "sproc: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "sproc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "sproc: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace sproc
