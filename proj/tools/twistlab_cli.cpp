// Command-line front end: norm and dual-norm evaluations, factorizations,
// centralizers, quasi-norms, sign-average functionals, constant searches,
// invariant suites, and registered experiments.  Every successful invocation
// prints one JSON document on stdout and appends a run record (JSON-lines,
// flock-guarded) to <results-dir>/runs.jsonl.
//
// Exit codes: 0 success, 1 computation error (message on stderr), 2 usage
// error.  A JSON config file may supply defaults for any long flag name;
// explicit flags win.  TWISTLAB_RESULTS_DIR overrides --results-dir.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twistlab/twistlab.hpp"

namespace {

using namespace twistlab;

// Flag misuse distinct from solver/domain failures: exits 2, not 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json parse_json_text(const std::string& text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("invalid JSON for ") + what + ": " +
                     e.what());
  }
}

// Vector arguments accept the canonical {"coords": {...}} form, "{}" for the
// zero vector, or the flat-block shorthand 1_{[a,b]} / 1_{[a,b)}.
FiniteVector parse_vector_arg(const std::string& raw, const char* what) {
  std::string s = raw;
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.rfind("1_{[", 0) == 0) {
    const std::size_t comma = s.find(',');
    const std::size_t close = s.find_first_of("])", comma == std::string::npos
                                                         ? 0
                                                         : comma + 1);
    if (comma == std::string::npos || close == std::string::npos ||
        s.substr(close + 1) != "}") {
      throw UsageError(std::string("malformed flat-block shorthand for ") +
                       what + ": " + raw);
    }
    int lo = 0, hi = 0;
    try {
      lo = std::stoi(s.substr(4, comma - 4));
      hi = std::stoi(s.substr(comma + 1, close - comma - 1));
    } catch (const std::exception&) {
      throw UsageError(std::string("malformed flat-block bounds for ") + what +
                       ": " + raw);
    }
    if (s[close] == ')') --hi;
    if (lo < 1 || hi < lo) {
      throw UsageError(std::string("empty flat block for ") + what + ": " +
                       raw);
    }
    FiniteVector v;
    for (int k = lo; k <= hi; ++k) v.set(k, 1.0);
    return v;
  }
  const nlohmann::json j = parse_json_text(s, what);
  if (j.is_object() && j.empty()) return FiniteVector{};
  try {
    return vector_from_json(j);
  } catch (const Error& e) {
    throw UsageError(std::string("bad vector for ") + what + ": " + e.what());
  }
}

FiniteVector vector_from_json_element(const nlohmann::json& j,
                                      const char* what) {
  if (j.is_string()) return parse_vector_arg(j.get<std::string>(), what);
  if (j.is_object() && j.empty()) return FiniteVector{};
  try {
    return vector_from_json(j);
  } catch (const Error& e) {
    throw UsageError(std::string("bad vector for ") + what + ": " + e.what());
  }
}

TwistedVector twisted_from_json_element(const nlohmann::json& j,
                                        const char* what) {
  if (!j.is_object() || (!j.contains("x") && !j.contains("y"))) {
    throw UsageError(std::string(what) +
                     ": twisted vectors need an object with x and/or y slots");
  }
  TwistedVector v;
  if (j.contains("x")) v.x = vector_from_json_element(j["x"], what);
  if (j.contains("y")) v.y = vector_from_json_element(j["y"], what);
  return v;
}

nlohmann::json twisted_to_json(const TwistedVector& v) {
  return nlohmann::json{{"x", to_json(v.x)}, {"y", to_json(v.y)}};
}

SpaceSpec twisted_spec_from_tag(const std::string& tag) {
  if (tag == "z2") return SpaceSpec::kalton_peck_space(PhiSpec::linear(1.0));
  if (tag == "z2:capped") return SpaceSpec::kalton_peck_space(PhiSpec::capped());
  if (tag.rfind("z2:linear:", 0) == 0) {
    try {
      return SpaceSpec::kalton_peck_space(
          PhiSpec::linear(std::stod(tag.substr(10))));
    } catch (const std::exception&) {
      throw UsageError("bad slope in space tag: " + tag);
    }
  }
  if (tag == "zt2") return SpaceSpec::derived_t2(1);
  if (tag.rfind("zt2:tail=", 0) == 0) {
    try {
      return SpaceSpec::derived_t2(std::stoi(tag.substr(9)));
    } catch (const InvalidRangeError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("bad tail in space tag: " + tag);
    }
  }
  throw UsageError("unknown twisted-space tag: " + tag);
}

// Either a sequence-space model or a twisted-space model, chosen by tag.
struct SpaceHandle {
  bool twisted = false;
  SequenceSpaceModel seq;
  TwistedSpaceModel tw;
  std::string tag;
};

SpaceHandle parse_space(const std::string& tag) {
  SpaceHandle h;
  h.tag = tag;
  if (tag == "l1") {
    h.seq = SequenceSpaceModel::l1();
  } else if (tag == "l2") {
    h.seq = SequenceSpaceModel::l2();
  } else if (tag == "linf") {
    h.seq = SequenceSpaceModel::linf();
  } else if (tag == "T") {
    h.seq = SequenceSpaceModel::tsirelson();
  } else if (tag == "T2") {
    h.seq = SequenceSpaceModel::tsirelson2();
  } else {
    h.twisted = true;
    try {
      h.tw = TwistedSpaceModel::make(twisted_spec_from_tag(tag));
    } catch (const UsageError&) {
      throw UsageError("unknown space tag: " + tag +
                       " (expected l1|l2|linf|T|T2|z2:...|zt2:tail=<n>)");
    }
    h.tag = h.tw.tag;
  }
  return h;
}

Couple parse_couple(const std::string& tag) {
  if (tag == "l1linf") return Couple::l1_linf();
  if (tag == "t2") return Couple::t2_pair();
  throw UsageError("unknown couple: " + tag + " (expected l1linf or t2)");
}

PhiSpec parse_phi(const std::string& tag) {
  if (tag == "capped") return PhiSpec::capped();
  if (tag.rfind("linear:", 0) == 0) {
    try {
      return PhiSpec::linear(std::stod(tag.substr(7)));
    } catch (const std::exception&) {
      throw UsageError("bad slope in phi tag: " + tag);
    }
  }
  throw UsageError("unknown phi tag: " + tag + " (expected linear:<c> or capped)");
}

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file: " + path);
  try {
    nlohmann::json j;
    f >> j;
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("invalid config JSON: " + std::string(e.what()));
  }
}

// Config supplies a default only where the flag was not given explicitly.
template <typename T>
void config_default(const CLI::App& cmd, const nlohmann::json& config,
                    const std::string& flag, T& var) {
  const CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
  if (opt == nullptr) opt = cmd.get_option_no_throw(flag);  // positionals
  if (opt != nullptr && opt->count() > 0) return;
  if (!config.contains(flag)) return;
  try {
    var = config.at(flag).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config value for '" + flag + "' has the wrong type: " +
                     e.what());
  }
}

struct Emitter {
  std::string results_dir;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  int emit(const std::string& command, nlohmann::json params,
           std::uint64_t seed, nlohmann::json outputs, int exit_code = 0) {
    outputs["status"] = exit_code == 0 ? "ok" : "fail";
    std::cout << outputs.dump() << "\n";
    RunRecord rec;
    rec.command = command;
    rec.params = std::move(params);
    rec.seed = seed;
    rec.outputs = std::move(outputs);
    rec.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    append_run_record(results_dir, rec);
    return exit_code;
  }
};

nlohmann::json factorization_to_json(const Factorization& f) {
  return nlohmann::json{{"a", to_json(f.a)},
                        {"b", to_json(f.b)},
                        {"eps_achieved", f.eps_achieved},
                        {"rho_achieved", f.rho_achieved},
                        {"balanced", f.balanced},
                        {"converged", f.converged},
                        {"iterations", f.iterations}};
}

nlohmann::json rademacher_to_json(const RademacherResult& r) {
  return nlohmann::json{{"mean", r.mean},
                        {"quadratic_mean", r.quadratic_mean},
                        {"stddev", r.stddev},
                        {"stderr_of_mean", r.stderr_of_mean},
                        {"samples", r.samples},
                        {"exact", r.exact}};
}

int run(int argc, char** argv) {
  CLI::App app{"finite-scale computations for Tsirelson-type norms, "
               "interpolation centralizers, and twisted Hilbert spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string results_dir = ".";
  std::string config_path;
  app.add_option("--results-dir", results_dir,
                 "directory receiving runs.jsonl and experiment artifacts")
      ->capture_default_str();
  app.add_option("--config", config_path,
                 "JSON file supplying flag defaults (explicit flags win)");

  // norm
  auto* cmd_norm = app.add_subcommand("norm", "evaluate a sequence-space norm");
  std::string norm_space = "T";
  std::string norm_vec;
  cmd_norm->add_option("--space", norm_space, "l1|l2|linf|T|T2")
      ->capture_default_str();
  cmd_norm->add_option("--vec", norm_vec, "vector JSON or 1_{[a,b)} shorthand")
      ->required();

  // dual
  auto* cmd_dual =
      app.add_subcommand("dual", "certified dual-norm evaluation");
  std::string dual_space = "T2";
  std::string dual_vec;
  double dual_tol = 1e-6;
  int dual_maxiter = 500;
  cmd_dual->add_option("--space", dual_space, "T2 (the supported dual)")
      ->capture_default_str();
  cmd_dual->add_option("--vec", dual_vec, "vector JSON")->required();
  cmd_dual->add_option("--tol", dual_tol, "target duality gap")
      ->capture_default_str();
  cmd_dual->add_option("--max-iterations", dual_maxiter, "oracle call budget")
      ->capture_default_str();

  // factorize
  auto* cmd_fact = app.add_subcommand(
      "factorize", "split y^2 = a.b across an interpolation couple");
  std::string fact_couple = "l1linf";
  std::string fact_vec;
  double fact_eps = -1.0;
  int fact_maxiter = -1;
  cmd_fact->add_option("--couple", fact_couple, "l1linf|t2")
      ->capture_default_str();
  cmd_fact->add_option("--vec", fact_vec, "vector JSON")->required();
  cmd_fact->add_option("--eps-target", fact_eps,
                       "override the couple's default eps budget");
  cmd_fact->add_option("--max-iterations", fact_maxiter,
                       "override the couple's default iteration budget");

  // omega
  auto* cmd_omega = app.add_subcommand(
      "omega", "centralizer map from a couple, or a closed-form profile");
  std::string omega_couple, omega_phi, omega_vec;
  cmd_omega->add_option("--couple", omega_couple, "l1linf|t2");
  cmd_omega->add_option("--phi", omega_phi, "linear:<c>|capped");
  cmd_omega->add_option("--vec", omega_vec, "vector JSON")->required();

  // quasinorm
  auto* cmd_quasi =
      app.add_subcommand("quasinorm", "twisted-space quasi-norm of (x, y)");
  std::string quasi_space = "z2:linear:1";
  std::string quasi_x = "{}";
  std::string quasi_y = "{}";
  cmd_quasi->add_option("--space", quasi_space,
                        "z2:linear:<c>|z2:capped|zt2:tail=<n>")
      ->capture_default_str();
  cmd_quasi->add_option("--x", quasi_x, "first slot (JSON or shorthand)")
      ->capture_default_str();
  cmd_quasi->add_option("--y", quasi_y, "second slot (JSON or shorthand)")
      ->capture_default_str();

  // rademacher
  auto* cmd_rad = app.add_subcommand(
      "rademacher", "sign-average of a tuple (exact or seeded sampling)");
  std::string rad_space = "z2:linear:1";
  std::string rad_mode = "exact";
  std::string rad_vectors;
  int rad_flat = 0;
  long rad_samples = 4096;
  std::uint64_t rad_seed = 0;
  cmd_rad->add_option("--space", rad_space, "sequence or twisted space tag")
      ->capture_default_str();
  cmd_rad->add_option("--mode", rad_mode, "exact|mc")->capture_default_str();
  cmd_rad->add_option("--vectors", rad_vectors, "JSON array of vectors");
  cmd_rad->add_option("--flat", rad_flat,
                      "use the n-vector flat tuple instead of --vectors");
  cmd_rad->add_option("--samples", rad_samples, "sample count for mc mode")
      ->capture_default_str();
  cmd_rad->add_option("--seed", rad_seed, "RNG seed for mc mode")
      ->capture_default_str();

  // type-constant
  auto* cmd_type = app.add_subcommand(
      "type-constant", "search lower bound for a type-2/cotype-2 constant");
  std::string type_kind = "type2";
  std::string type_space = "l2";
  int type_n = 2;
  int type_restarts = 8;
  std::uint64_t type_seed = 0;
  cmd_type->add_option("--kind", type_kind, "type2|cotype2")
      ->capture_default_str();
  cmd_type->add_option("--space", type_space, "sequence or twisted space tag")
      ->capture_default_str();
  cmd_type->add_option("--n", type_n, "tuple size (exact averages, <= 20)")
      ->capture_default_str();
  cmd_type->add_option("--restarts", type_restarts, "random restarts")
      ->capture_default_str();
  cmd_type->add_option("--seed", type_seed, "search seed")
      ->capture_default_str();

  // distance
  auto* cmd_dist = app.add_subcommand(
      "distance", "sign-average lower bound for the Euclidean distance");
  std::string dist_space = "z2:linear:1";
  std::string dist_vectors;
  int dist_flat = 0;
  cmd_dist->add_option("--space", dist_space, "sequence or twisted space tag")
      ->capture_default_str();
  cmd_dist->add_option("--vectors", dist_vectors, "JSON array of vectors");
  cmd_dist->add_option("--flat", dist_flat,
                       "use the n-vector flat tuple instead of --vectors");

  // verify
  auto* cmd_verify =
      app.add_subcommand("verify", "run invariant suites; nonzero on failure");
  std::string verify_suite_name = "all";
  cmd_verify
      ->add_option("suite", verify_suite_name,
                   "all|sequence-core|tsirelson|dual-norm|interpolation|"
                   "twisted|constants|lemma-yo|prop22")
      ->capture_default_str();

  // experiment
  auto* cmd_exp =
      app.add_subcommand("experiment", "run a registered sweep; CSV + summary");
  std::string exp_name;
  std::vector<int> exp_grid;
  std::uint64_t exp_seed = 0;
  std::string exp_csv, exp_summary;
  cmd_exp->add_option("--name", exp_name,
                      "kp-growth|zt2-flat-centralizer|log-hierarchy|"
                      "lemma-yo-sweep")
      ->required();
  cmd_exp->add_option("--grid", exp_grid, "comma-separated n grid")
      ->delimiter(',');
  cmd_exp->add_option("--seed", exp_seed, "sweep seed")->capture_default_str();
  cmd_exp->add_option("--csv", exp_csv,
                      "CSV output path (default <results-dir>/<name>.csv)");
  cmd_exp->add_option("--summary", exp_summary,
                      "summary JSON path (default <results-dir>/<name>-summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const nlohmann::json config = load_config(config_path);
  config_default(app, config, "results-dir", results_dir);
  if (const char* env = std::getenv("TWISTLAB_RESULTS_DIR")) {
    if (*env) results_dir = env;  // env wins over flag and config
  }

  Emitter out;
  out.results_dir = results_dir;

  if (app.got_subcommand(cmd_norm)) {
    config_default(*cmd_norm, config, "space", norm_space);
    const SpaceHandle space = parse_space(norm_space);
    if (space.twisted) {
      throw UsageError("norm expects a sequence space; use quasinorm for " +
                       space.tag);
    }
    const FiniteVector v = parse_vector_arg(norm_vec, "--vec");
    const double value = v.empty() ? 0.0 : space.seq.norm(v);
    nlohmann::json params{{"space", space.tag}, {"vec", to_json(v)}};
    nlohmann::json outputs{{"command", "norm"},
                           {"space", space.tag},
                           {"value", value},
                           {"support_size", v.support_size()}};
    return out.emit("norm", params, 0, outputs);
  }

  if (app.got_subcommand(cmd_dual)) {
    config_default(*cmd_dual, config, "space", dual_space);
    config_default(*cmd_dual, config, "tol", dual_tol);
    config_default(*cmd_dual, config, "max-iterations", dual_maxiter);
    if (dual_space != "T2") {
      throw UsageError("dual supports --space T2 only");
    }
    const FiniteVector y = parse_vector_arg(dual_vec, "--vec");
    DualNormOptions opts;
    opts.tol = dual_tol;
    opts.max_iterations = dual_maxiter;
    const DualCertificate cert = t2_dual_norm(y, opts);
    nlohmann::json params{{"space", dual_space},
                          {"vec", to_json(y)},
                          {"tol", dual_tol},
                          {"max_iterations", dual_maxiter}};
    nlohmann::json outputs{{"command", "dual"},
                           {"space", dual_space},
                           {"value", cert.value},
                           {"lower", cert.lower},
                           {"gap", cert.gap},
                           {"iterations", cert.iterations},
                           {"converged", cert.converged},
                           {"quality", cert.quality},
                           {"method", cert.method}};
    return out.emit("dual", params, 0, outputs);
  }

  if (app.got_subcommand(cmd_fact)) {
    config_default(*cmd_fact, config, "couple", fact_couple);
    config_default(*cmd_fact, config, "eps-target", fact_eps);
    config_default(*cmd_fact, config, "max-iterations", fact_maxiter);
    const Couple couple = parse_couple(fact_couple);
    const FiniteVector y = parse_vector_arg(fact_vec, "--vec");
    FactorizeOptions opts = couple.factorize_defaults;
    if (fact_eps > 0.0) opts.eps_target = fact_eps;
    if (fact_maxiter > 0) opts.max_iterations = fact_maxiter;
    const Factorization f = lozanovskii_factorize(couple, y, opts);
    nlohmann::json params{{"couple", couple.tag},
                          {"vec", to_json(y)},
                          {"eps_target", opts.eps_target},
                          {"max_iterations", opts.max_iterations}};
    nlohmann::json outputs = factorization_to_json(f);
    outputs["command"] = "factorize";
    outputs["couple"] = couple.tag;
    return out.emit("factorize", params, 0, outputs);
  }

  if (app.got_subcommand(cmd_omega)) {
    config_default(*cmd_omega, config, "couple", omega_couple);
    config_default(*cmd_omega, config, "phi", omega_phi);
    if (omega_couple.empty() == omega_phi.empty()) {
      throw UsageError("omega needs exactly one of --couple or --phi");
    }
    const FiniteVector y = parse_vector_arg(omega_vec, "--vec");
    if (!omega_phi.empty()) {
      const PhiSpec phi = parse_phi(omega_phi);
      const FiniteVector om = kalton_peck_omega(y, phi);
      nlohmann::json params{{"phi", phi.tag()}, {"vec", to_json(y)}};
      nlohmann::json outputs{{"command", "omega"},
                             {"phi", phi.tag()},
                             {"omega", to_json(om)}};
      return out.emit("omega", params, 0, outputs);
    }
    const Couple couple = parse_couple(omega_couple);
    const CentralizerResult r = centralizer_detail(couple, y);
    nlohmann::json params{{"couple", couple.tag}, {"vec", to_json(y)}};
    nlohmann::json outputs{{"command", "omega"},
                           {"couple", couple.tag},
                           {"omega", to_json(r.omega)},
                           {"eps_achieved", r.factorization.eps_achieved},
                           {"rho_achieved", r.factorization.rho_achieved},
                           {"converged", r.factorization.converged},
                           {"iterations", r.factorization.iterations}};
    return out.emit("omega", params, 0, outputs);
  }

  if (app.got_subcommand(cmd_quasi)) {
    config_default(*cmd_quasi, config, "space", quasi_space);
    const SpaceSpec spec = twisted_spec_from_tag(quasi_space);
    TwistedSpace space(spec);
    TwistedVector v{parse_vector_arg(quasi_x, "--x"),
                    parse_vector_arg(quasi_y, "--y")};
    const double value = space.quasi_norm(v);
    nlohmann::json params{{"space", space.tag()},
                          {"x", to_json(v.x)},
                          {"y", to_json(v.y)}};
    nlohmann::json outputs{{"command", "quasinorm"},
                           {"space", space.tag()},
                           {"value", value},
                           {"rho_bound", space.rho_bound()}};
    return out.emit("quasinorm", params, 0, outputs);
  }

  if (app.got_subcommand(cmd_rad)) {
    config_default(*cmd_rad, config, "space", rad_space);
    config_default(*cmd_rad, config, "mode", rad_mode);
    config_default(*cmd_rad, config, "samples", rad_samples);
    config_default(*cmd_rad, config, "seed", rad_seed);
    config_default(*cmd_rad, config, "flat", rad_flat);
    if (rad_mode != "exact" && rad_mode != "mc") {
      throw UsageError("rademacher --mode must be exact or mc");
    }
    if ((rad_flat > 0) == !rad_vectors.empty()) {
      throw UsageError("rademacher needs exactly one of --vectors or --flat");
    }
    const SpaceHandle space = parse_space(rad_space);
    const bool exact = rad_mode == "exact";
    nlohmann::json params{{"space", space.tag},
                          {"mode", rad_mode},
                          {"samples", exact ? 0 : rad_samples},
                          {"seed", rad_seed}};
    RademacherResult res;
    nlohmann::json vecs_json = nlohmann::json::array();
    if (space.twisted) {
      std::vector<TwistedVector> tuple;
      if (rad_flat > 0) {
        const int base = space.tw.first_coord;
        for (int j = base; j < base + rad_flat; ++j) {
          tuple.push_back(TwistedVector::second_slot(j));
        }
      } else {
        for (const auto& e : parse_json_text(rad_vectors, "--vectors")) {
          tuple.push_back(twisted_from_json_element(e, "--vectors"));
        }
      }
      for (const auto& v : tuple) vecs_json.push_back(twisted_to_json(v));
      res = exact ? rademacher_average(*space.tw.space, tuple)
                  : rademacher_average(*space.tw.space, tuple,
                                       AverageMode::montecarlo, rad_samples,
                                       rad_seed);
    } else {
      std::vector<FiniteVector> tuple;
      if (rad_flat > 0) {
        const int base = space.seq.first_coord;
        for (int j = base; j < base + rad_flat; ++j) {
          FiniteVector e;
          e.set(j, 1.0);
          tuple.push_back(e);
        }
      } else {
        for (const auto& e : parse_json_text(rad_vectors, "--vectors")) {
          tuple.push_back(vector_from_json_element(e, "--vectors"));
        }
      }
      for (const auto& v : tuple) vecs_json.push_back(to_json(v));
      auto norm = [&](const FiniteVector& v) { return space.seq.norm(v); };
      res = exact ? detail::rademacher_stats_exact(norm, tuple)
                  : detail::rademacher_stats_montecarlo(norm, tuple,
                                                        rad_samples, rad_seed);
    }
    params["vectors"] = vecs_json;
    nlohmann::json outputs = rademacher_to_json(res);
    outputs["command"] = "rademacher";
    outputs["space"] = space.tag;
    outputs["n"] = vecs_json.size();
    return out.emit("rademacher", params, rad_seed, outputs);
  }

  if (app.got_subcommand(cmd_type)) {
    config_default(*cmd_type, config, "kind", type_kind);
    config_default(*cmd_type, config, "space", type_space);
    config_default(*cmd_type, config, "n", type_n);
    config_default(*cmd_type, config, "restarts", type_restarts);
    config_default(*cmd_type, config, "seed", type_seed);
    if (type_kind != "type2" && type_kind != "cotype2") {
      throw UsageError("type-constant --kind must be type2 or cotype2");
    }
    const SpaceHandle space = parse_space(type_space);
    SearchOptions opts;
    opts.restarts = type_restarts;
    opts.seed = type_seed;
    nlohmann::json params{{"kind", type_kind},
                          {"space", space.tag},
                          {"n", type_n},
                          {"restarts", type_restarts},
                          {"seed", type_seed}};
    nlohmann::json outputs{{"command", "type-constant"},
                           {"kind", type_kind},
                           {"space", space.tag},
                           {"n", type_n},
                           {"restarts", type_restarts},
                           {"seed", type_seed}};
    nlohmann::json witnesses = nlohmann::json::array();
    if (space.twisted) {
      const auto est = type_kind == "type2"
                           ? type2_lower(space.tw, type_n, opts)
                           : cotype2_lower(space.tw, type_n, opts);
      for (const auto& w : est.witnesses) witnesses.push_back(twisted_to_json(w));
      outputs["value"] = est.value;
      outputs["method"] = est.method;
    } else {
      const auto est = type_kind == "type2"
                           ? type2_lower(space.seq, type_n, opts)
                           : cotype2_lower(space.seq, type_n, opts);
      for (const auto& w : est.witnesses) witnesses.push_back(to_json(w));
      outputs["value"] = est.value;
      outputs["method"] = est.method;
    }
    outputs["witnesses"] = witnesses;
    return out.emit("type-constant", params, type_seed, outputs);
  }

  if (app.got_subcommand(cmd_dist)) {
    config_default(*cmd_dist, config, "space", dist_space);
    config_default(*cmd_dist, config, "flat", dist_flat);
    if ((dist_flat > 0) == !dist_vectors.empty()) {
      throw UsageError("distance needs exactly one of --vectors or --flat");
    }
    const SpaceHandle space = parse_space(dist_space);
    double value = 0.0;
    std::size_t n = 0;
    nlohmann::json vecs_json = nlohmann::json::array();
    if (space.twisted) {
      std::vector<TwistedVector> tuple;
      if (dist_flat > 0) {
        const int base = space.tw.first_coord;
        for (int j = base; j < base + dist_flat; ++j) {
          tuple.push_back(TwistedVector::second_slot(j));
        }
      } else {
        for (const auto& e : parse_json_text(dist_vectors, "--vectors")) {
          tuple.push_back(twisted_from_json_element(e, "--vectors"));
        }
      }
      for (const auto& v : tuple) vecs_json.push_back(twisted_to_json(v));
      value = distance_lower(space.tw, tuple);
      n = tuple.size();
    } else {
      std::vector<FiniteVector> tuple;
      if (dist_flat > 0) {
        const int base = space.seq.first_coord;
        for (int j = base; j < base + dist_flat; ++j) {
          FiniteVector e;
          e.set(j, 1.0);
          tuple.push_back(e);
        }
      } else {
        for (const auto& e : parse_json_text(dist_vectors, "--vectors")) {
          tuple.push_back(vector_from_json_element(e, "--vectors"));
        }
      }
      for (const auto& v : tuple) vecs_json.push_back(to_json(v));
      value = distance_lower(space.seq, tuple);
      n = tuple.size();
    }
    nlohmann::json params{{"space", space.tag}, {"vectors", vecs_json}};
    nlohmann::json outputs{{"command", "distance"},
                           {"space", space.tag},
                           {"value", value},
                           {"n", n}};
    return out.emit("distance", params, 0, outputs);
  }

  if (app.got_subcommand(cmd_verify)) {
    config_default(*cmd_verify, config, "suite", verify_suite_name);
    nlohmann::json report;
    if (verify_suite_name == "all") {
      report = to_json(verify_all());
    } else {
      try {
        report = to_json(
            std::vector<SuiteResult>{verify_suite(verify_suite_name)});
      } catch (const InvalidRangeError& e) {
        throw UsageError(e.what());
      }
    }
    const bool passed = report.at("passed").get<bool>();
    nlohmann::json params{{"suite", verify_suite_name}};
    nlohmann::json outputs{{"command", "verify"},
                           {"suite", verify_suite_name},
                           {"passed", passed},
                           {"suites", report.at("suites")}};
    const int code = passed ? 0 : 1;
    if (!passed) {
      std::cerr << "verification failed: suite '" << verify_suite_name
                << "' has failing checks\n";
    }
    return out.emit("verify", params, 0, outputs, code);
  }

  if (app.got_subcommand(cmd_exp)) {
    config_default(*cmd_exp, config, "grid", exp_grid);
    config_default(*cmd_exp, config, "seed", exp_seed);
    config_default(*cmd_exp, config, "csv", exp_csv);
    config_default(*cmd_exp, config, "summary", exp_summary);
    SweepSpec spec;
    spec.name = exp_name;
    spec.grid = exp_grid;
    spec.seed = exp_seed;
    ExperimentResult result;
    try {
      result = run_experiment(spec);
    } catch (const UnknownExperimentError& e) {
      throw UsageError(e.what());
    }
    const std::string csv_path =
        exp_csv.empty() ? results_dir + "/" + exp_name + ".csv" : exp_csv;
    const std::string summary_path =
        exp_summary.empty() ? results_dir + "/" + exp_name + "-summary.json"
                            : exp_summary;
    write_csv(result, csv_path);
    {
      std::ofstream f(summary_path, std::ios::binary);
      if (!f) throw Error("cannot open summary path: " + summary_path);
      f << result.summary.dump(2) << "\n";
    }
    nlohmann::json params{{"name", exp_name},
                          {"grid", spec.grid},
                          {"seed", exp_seed}};
    nlohmann::json outputs{{"command", "experiment"},
                           {"experiment", exp_name},
                           {"csv_path", csv_path},
                           {"summary_path", summary_path},
                           {"rows", result.rows.size()},
                           {"summary", result.summary}};
    return out.emit("experiment", params, exp_seed, outputs);
  }

  throw UsageError("no subcommand dispatched");  // unreachable
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
