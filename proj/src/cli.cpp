#include "phikit/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "phikit/verification.hpp"

namespace phikit::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("invalid '" + key + "' in " + where + ": " + e.what());
  }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.at(key).is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

Matrix get_matrix(const json& j, const std::string& key, const std::string& where) {
  auto m = get<Matrix>(j, key, where);
  if (m.empty()) throw ConfigError("'" + key + "' in " + where + " must be non-empty");
  for (const auto& row : m)
    if (row.size() != m.size()) throw ConfigError("'" + key + "' in " + where + " must be square");
  return m;
}

Mat to_mat(const Matrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Mat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m[i][j];
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SystemConfig parse_system(const json& j) {
  const std::string where = "system";
  check_keys(j, {"name", "J_diag", "J", "A", "x0"}, where);
  if (!j.contains("name")) throw ConfigError("system.name is required");
  SystemConfig c;
  c.name = get<std::string>(j, "name", where);
  if (j.contains("J_diag")) c.J_diag = get<std::vector<double>>(j, "J_diag", where);
  if (j.contains("J")) c.J = get_matrix(j, "J", where);
  if (j.contains("A")) c.A = get_matrix(j, "A", where);
  if (j.contains("x0")) c.x0 = get<std::vector<double>>(j, "x0", where);
  return c;
}

json system_json(const SystemConfig& c) {
  json j;
  j["name"] = c.name;
  if (c.J_diag) j["J_diag"] = *c.J_diag;
  if (c.J) j["J"] = *c.J;
  if (c.A) j["A"] = *c.A;
  if (c.x0) j["x0"] = *c.x0;
  return j;
}

const std::set<std::string> kOutputs{"trajectory", "energy", "casimir", "diagnostics"};

}  // namespace

RunConfig parse_config(const json& j, Command cmd) {
  std::set<std::string> allowed{"system", "fp_tol", "fp_max_iter", "newton_fallback", "seed"};
  switch (cmd) {
    case Command::simulate:
      allowed.insert({"method", "dt", "steps", "outputs"});
      break;
    case Command::compare:
      allowed.insert({"methods", "dt", "steps", "reference_tol"});
      break;
    case Command::convergence:
      allowed.insert({"method", "T", "h_list", "reference_tol"});
      break;
  }
  const std::string where = "config";
  check_keys(j, allowed, where);
  auto require = [&](const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config key '") + key + "' is required");
  };
  RunConfig c;
  require("system");
  c.system = parse_system(j.at("system"));
  if (j.contains("fp_tol")) c.fp_tol = get_number(j, "fp_tol", where);
  if (j.contains("fp_max_iter")) c.fp_max_iter = get<int>(j, "fp_max_iter", where);
  if (j.contains("newton_fallback")) c.newton_fallback = get<bool>(j, "newton_fallback", where);
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", where);
  if (!(c.fp_tol > 0.0)) throw ConfigError("fp_tol must be > 0");
  if (c.fp_max_iter < 1) throw ConfigError("fp_max_iter must be >= 1");

  if (cmd == Command::compare) {
    require("methods");
    c.methods = get<std::vector<std::string>>(j, "methods", where);
    if (c.methods.size() < 2) throw ConfigError("compare needs at least two methods");
  } else {
    require("method");
    c.methods = {get<std::string>(j, "method", where)};
  }
  for (const auto& m : c.methods) (void)parse_method(m);

  if (cmd == Command::convergence) {
    require("T");
    require("h_list");
    c.T = get_number(j, "T", where);
    c.h_list = get<std::vector<double>>(j, "h_list", where);
    if (c.h_list.empty()) throw ConfigError("h_list must not be empty");
    if (!(c.T > 0.0) || !std::isfinite(c.T)) throw ConfigError("T must be > 0");
  } else {
    require("dt");
    require("steps");
    c.dt = get_number(j, "dt", where);
    c.steps = get<long>(j, "steps", where);
    if (!(c.dt >= 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be finite and >= 0");
    if (c.steps < 0) throw ConfigError("steps must be >= 0");
  }
  if (j.contains("reference_tol")) {
    c.reference_tol = get_number(j, "reference_tol", where);
    if (!(c.reference_tol > 0.0)) throw ConfigError("reference_tol must be > 0");
  }
  if (cmd == Command::simulate && j.contains("outputs")) {
    c.outputs = get<std::vector<std::string>>(j, "outputs", where);
    for (const auto& o : c.outputs)
      if (!kOutputs.count(o)) throw ConfigError("unknown output '" + o + "'");
  }
  return c;
}

RunConfig load_config(const std::string& path, Command cmd) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j, cmd);
}

json to_json(const RunConfig& c, Command cmd) {
  json j;
  j["system"] = system_json(c.system);
  j["fp_tol"] = c.fp_tol;
  j["fp_max_iter"] = c.fp_max_iter;
  j["newton_fallback"] = c.newton_fallback;
  j["seed"] = c.seed;
  if (cmd == Command::compare) {
    j["methods"] = c.methods;
  } else {
    j["method"] = c.methods.at(0);
  }
  if (cmd == Command::convergence) {
    j["T"] = c.T;
    j["h_list"] = c.h_list;
  } else {
    j["dt"] = c.dt;
    j["steps"] = c.steps;
  }
  if (cmd != Command::simulate) j["reference_tol"] = c.reference_tol;
  if (cmd == Command::simulate) j["outputs"] = c.outputs;
  return j;
}

SystemSpec build_system(const SystemConfig& c) {
  auto forbid = [&](bool present, const char* key) {
    if (present) throw ConfigError(std::string("system '") + c.name + "' does not take '" + key + "'");
  };
  SystemSpec spec;
  if (c.name == "lv3") {
    forbid(c.J_diag.has_value(), "J_diag");
    forbid(c.J.has_value(), "J");
    if (c.A || c.x0) {
      const Mat A = c.A ? to_mat(*c.A) : lotka_volterra_matrix();
      const Vec x0 = c.x0 ? to_vec(*c.x0) : lotka_volterra3().default_x0;
      spec = lotka_volterra(A, x0);
      if (!c.A) spec.system.blow_up_hint = 0.23;
    } else {
      spec = lotka_volterra3();
    }
  } else if (c.name == "rigid-body") {
    forbid(c.A.has_value(), "A");
    if (c.J_diag && c.J) throw ConfigError("give either J_diag or J, not both");
    Mat J = default_inertia();
    if (c.J_diag) {
      if (c.J_diag->size() != 3) throw ConfigError("J_diag must have 3 entries");
      J = to_vec(*c.J_diag).asDiagonal();
    }
    if (c.J) J = to_mat(*c.J);
    spec = rigid_body(J, c.x0 ? to_vec(*c.x0) : Vec(Vec::Ones(3)));
  } else if (c.name == "harmonic" || c.name == "quad-example") {
    forbid(c.A.has_value(), "A");
    forbid(c.J_diag.has_value(), "J_diag");
    forbid(c.J.has_value(), "J");
    spec = system_by_name(c.name);
    if (c.x0) {
      const Vec x0 = to_vec(*c.x0);
      if (x0.size() != spec.system.dim()) throw ConfigError("x0 has the wrong dimension");
      if (!x0.allFinite()) throw ConfigError("x0 must be finite");
      spec.default_x0 = x0;
    }
  } else {
    spec = system_by_name(c.name);  // throws with the list of known names
  }
  return spec;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------

namespace {

struct Logger {
  Verbosity v;
  void info(const std::string& s) const {
    if (v != Verbosity::quiet) std::cerr << s << '\n';
  }
  void debug(const std::string& s) const {
    if (v == Verbosity::verbose) std::cerr << s << '\n';
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  return out;
}

int exit_for(Termination t) {
  switch (t) {
    case Termination::completed:
      return kExitOk;
    case Termination::blow_up:
      return kExitBlowUp;
    case Termination::step_too_large:
      return kExitSolver;
  }
  return kExitSolver;
}

std::string termination_row(const std::string& who, const TrajectoryRecord& rec) {
  std::string msg = rec.message;
  for (char& ch : msg)
    if (ch == ',' || ch == '\n') ch = ';';
  std::string row = "# termination,";
  if (!who.empty()) row += who + ",";
  return row + to_string(rec.termination) + ",t=" + format_double(rec.termination_time) + "," +
         msg + "\n";
}

template <class F>
int guarded(const Logger& log, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log.info(std::string("config error: ") + e.what());
    return kExitConfig;
  } catch (const StepTooLargeError& e) {
    log.info(std::string("solver failure: ") + e.what());
    return kExitSolver;
  } catch (const BlowUpError& e) {
    log.info(std::string("blow-up: ") + e.what());
    return kExitBlowUp;
  }
}

}  // namespace

int cmd_simulate(const std::string& config_path, const std::string& out_path, Verbosity v) {
  const Logger log{v};
  return guarded(log, [&] {
    const RunConfig cfg = load_config(config_path, Command::simulate);
    const SystemSpec spec = build_system(cfg.system);
    const MethodSpec method = parse_method(cfg.methods[0]);
    log.debug("system " + spec.name + ", method " + method.label() + ", dt " +
              format_double(cfg.dt) + ", steps " + std::to_string(cfg.steps));
    const TrajectoryRecord rec =
        run_method(spec, method, spec.default_x0, cfg.dt, cfg.steps, cfg.solver());

    auto has = [&](const char* o) {
      return std::find(cfg.outputs.begin(), cfg.outputs.end(), o) != cfg.outputs.end();
    };
    const int n = spec.system.dim();
    const std::size_t m = spec.system.casimirs.size();
    std::ofstream out = open_out(out_path);
    std::string line = "step,t";
    if (has("trajectory"))
      for (int i = 1; i <= n; ++i) line += ",x" + std::to_string(i);
    if (has("energy")) line += ",H";
    if (has("casimir"))
      for (std::size_t i = 1; i <= m; ++i) line += ",C" + std::to_string(i);
    if (has("diagnostics")) line += ",solver_iters";
    out << line << '\n';
    for (std::size_t k = 0; k < rec.size(); ++k) {
      line = std::to_string(k) + "," + format_double(rec.times[k]);
      if (has("trajectory"))
        for (int i = 0; i < n; ++i) line += "," + format_double(rec.states[k][i]);
      const auto& d = rec.per_step[k];
      if (has("energy")) line += "," + format_double(d.hamiltonian);
      if (has("casimir"))
        for (double c : d.casimirs) line += "," + format_double(c);
      if (has("diagnostics")) line += "," + std::to_string(d.solver_iters);
      out << line << '\n';
    }
    if (!rec.completed()) out << termination_row("", rec);
    log.info(spec.name + " " + method.label() + ": " + to_string(rec.termination) + " after " +
             std::to_string(rec.size() - 1) + " steps, t=" + format_double(rec.times.back()));
    return exit_for(rec.termination);
  });
}

int cmd_compare(const std::string& config_path, const std::string& out_path, Verbosity v) {
  const Logger log{v};
  return guarded(log, [&] {
    const RunConfig cfg = load_config(config_path, Command::compare);
    const SystemSpec spec = build_system(cfg.system);
    const Vec& x0 = spec.default_x0;
    const double T = cfg.dt * static_cast<double>(cfg.steps);

    std::vector<std::string> labels;
    std::vector<TrajectoryRecord> runs;
    for (const auto& name : cfg.methods) {
      const MethodSpec method = parse_method(name);
      std::string label = method.label();
      int dup = 1;
      while (std::find(labels.begin(), labels.end(), label) != labels.end())
        label = method.label() + "_" + std::to_string(++dup);
      labels.push_back(label);
      runs.push_back(run_method(spec, method, x0, cfg.dt, cfg.steps, cfg.solver()));
    }
    ReferenceOptions ro;
    ro.tol = cfg.reference_tol;
    const ReferenceSolution ref =
        cfg.steps > 0 && cfg.dt > 0.0
            ? reference_solution(spec.system, x0, T, static_cast<int>(cfg.steps), ro)
            : ReferenceSolution{{0.0}, {x0}, true, 0, 0.0, false, 0.0};
    log.debug("reference: " + std::to_string(ref.steps) + " RK4 steps, agreement " +
              format_double(ref.agreement) + (ref.blew_up ? ", blew up" : ""));

    const std::size_t m = spec.system.casimirs.size();
    std::ofstream out = open_out(out_path);
    std::string line = "step,t";
    for (const auto& l : labels) {
      line += "," + l + "_err," + l + "_dH";
      for (std::size_t i = 1; i <= m; ++i) line += "," + l + "_dC" + std::to_string(i);
    }
    out << line << '\n';
    for (long k = 0; k <= cfg.steps; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      line = std::to_string(k) + "," + format_double(cfg.dt * static_cast<double>(k));
      for (const auto& rec : runs) {
        if (ku >= rec.size()) {
          line += ",,";
          for (std::size_t i = 0; i < m; ++i) line += ",";
          continue;
        }
        line += ",";
        if (ku < ref.states.size())
          line += format_double((rec.states[ku] - ref.states[ku]).lpNorm<Eigen::Infinity>());
        const auto& d = rec.per_step[ku];
        line += "," + format_double(std::abs(d.hamiltonian - rec.per_step[0].hamiltonian));
        for (std::size_t i = 0; i < m; ++i)
          line += "," + format_double(std::abs(d.casimirs[i] - rec.per_step[0].casimirs[i]));
      }
      out << line << '\n';
    }
    for (std::size_t r = 0; r < runs.size(); ++r)
      if (!runs[r].completed()) out << termination_row(labels[r], runs[r]);
    if (ref.blew_up) {
      out << "# reference,blow_up,t=" << format_double(ref.last_finite_time) << "\n";
    }
    log.info("compared " + std::to_string(runs.size()) + " methods on " + spec.name);
    return kExitOk;
  });
}

int cmd_convergence(const std::string& config_path, const std::string& out_path, Verbosity v) {
  const Logger log{v};
  return guarded(log, [&] {
    const RunConfig cfg = load_config(config_path, Command::convergence);
    const SystemSpec spec = build_system(cfg.system);
    const MethodSpec method = parse_method(cfg.methods[0]);
    ReferenceOptions ro;
    ro.tol = cfg.reference_tol;
    const int threads = threads_from_env();
    log.debug("sweeping " + std::to_string(cfg.h_list.size()) + " step sizes on " +
              std::to_string(threads) + " threads");
    const ConvergenceReport rep = convergence_report(spec, method, spec.default_x0, cfg.T,
                                                     cfg.h_list, threads, cfg.solver(), ro);
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json j;
    j["config"] = to_json(cfg, Command::convergence);
    j["system"] = spec.name;
    j["method"] = method.label();
    j["T"] = cfg.T;
    j["h_values"] = rep.h_values;
    json errs = json::array();
    for (double e : rep.errors) errs.push_back(num(e));
    j["errors"] = errs;
    j["status"] = rep.status;
    j["slope"] = num(rep.fitted_slope);
    j["ci"] = num(rep.slope_ci);
    std::ofstream out = open_out(out_path);
    out << j.dump(2) << '\n';
    log.info(spec.name + " " + method.label() + ": fitted slope " + format_double(rep.fitted_slope));
    return kExitOk;
  });
}

int cmd_verify(const std::string& system, const std::string& out_path, std::uint64_t seed,
               Verbosity v) {
  const Logger log{v};
  return guarded(log, [&] {
    const SystemSpec spec = system_by_name(system);
    VerifyOptions opts;
    opts.seed = seed;
    const VerifyReport rep = verify_system(spec, opts);
    json checks = json::array();
    for (const auto& c : rep.checks) {
      json e;
      e["name"] = c.name;
      e["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
      e["threshold"] = c.threshold;
      e["pass"] = c.pass;
      if (!c.detail.empty()) e["detail"] = c.detail;
      checks.push_back(e);
      log.debug(c.name + " = " + format_double(c.value) + (c.pass ? " ok" : " FAIL"));
    }
    json j;
    j["system"] = rep.system;
    j["seed"] = rep.seed;
    j["checks"] = checks;
    j["all_pass"] = rep.all_pass();
    if (!rep.orientation.empty()) j["orientation"] = rep.orientation;
    std::ofstream out = open_out(out_path);
    out << j.dump(2) << '\n';
    log.info(system + ": " + (rep.all_pass() ? "all checks pass" : "some checks FAIL"));
    return rep.all_pass() ? kExitOk : kExitCheckFailed;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Poisson Hamiltonian integrators: simulate, compare, convergence, verify"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false, verbose = false;
  app.add_flag("-q,--quiet", quiet, "Only report errors");
  app.add_flag("-v,--verbose", verbose, "Extra progress output on stderr");

  std::string config, out, system;
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "Integrate one method and write a trajectory CSV");
  auto* cmp = app.add_subcommand("compare", "Run several methods against the reference");
  auto* conv = app.add_subcommand("convergence", "Step-size sweep and log-log order fit");
  for (auto* sc : {sim, cmp, conv}) {
    sc->add_option("--config", config, "JSON run config")->required();
    sc->add_option("--out", out, "Output file")->required();
  }
  auto* ver = app.add_subcommand("verify", "Residual suite for a catalog system");
  ver->add_option("--system", system, "lv3, rigid-body, harmonic or quad-example")->required();
  ver->add_option("--out", out, "JSON report")->required();
  ver->add_option("--seed", seed, "Sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (quiet && verbose) {
    std::cerr << "--quiet and --verbose are exclusive\n";
    return kExitConfig;
  }
  const Verbosity v = quiet ? Verbosity::quiet : verbose ? Verbosity::verbose : Verbosity::normal;
  if (sim->parsed()) return cmd_simulate(config, out, v);
  if (cmp->parsed()) return cmd_compare(config, out, v);
  if (conv->parsed()) return cmd_convergence(config, out, v);
  return cmd_verify(system, out, seed, v);
}

}  // namespace phikit::cli
