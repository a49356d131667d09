#include "phikit/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace phikit {

std::string MethodSpec::label() const {
  switch (kind) {
    case MethodKind::phi:
      return "phi" + std::to_string(order);
    case MethodKind::rk2:
      return "rk2";
    case MethodKind::rk4:
      return "rk4";
    case MethodKind::midpoint:
      return "midpoint";
    case MethodKind::leaf_demo:
      return "leaf-demo" + std::to_string(order);
  }
  return "?";
}

MethodSpec parse_method(const std::string& label) {
  auto order_suffix = [&](std::size_t prefix) {
    const std::string rest = label.substr(prefix);
    if (rest.size() != 1 || rest[0] < '1' || rest[0] > '9') {
      throw ConfigError("method '" + label + "' needs a single-digit order suffix");
    }
    return rest[0] - '0';
  };
  if (label == "rk2") return {MethodKind::rk2, 2};
  if (label == "rk4") return {MethodKind::rk4, 4};
  if (label == "midpoint") return {MethodKind::midpoint, 2};
  if (label.rfind("phi", 0) == 0) {
    const int k = order_suffix(3);
    if (k > kMaxSeriesOrder) throw ConfigError("phi order must be in [1, 3]");
    return {MethodKind::phi, k};
  }
  if (label.rfind("leaf-demo", 0) == 0) return {MethodKind::leaf_demo, order_suffix(9)};
  throw ConfigError("unknown method '" + label +
                    "' (expected phi1..phi3, rk2, rk4, midpoint, leaf-demo<k>)");
}

StepFn make_step(const SystemSpec& spec, const MethodSpec& method, double h,
                 const SolverOptions& solver) {
  if (!std::isfinite(h) || h < 0.0) throw ConfigError("time step must be finite and >= 0");
  const PoissonSystem& sys = spec.system;
  switch (method.kind) {
    case MethodKind::phi: {
      if (!spec.bireal) throw ConfigError("system '" + spec.name + "' has no bi-realisation");
      StepperConfig cfg{h, method.order, solver.tol, solver.max_iter, solver.newton_fallback};
      auto st = std::make_shared<const PhiStepper>(sys, *spec.bireal, cfg);
      return [st](const Vec& x) { return phi_step(*st, x); };
    }
    case MethodKind::rk2:
      return [sys, h](const Vec& x) { return StepResult{rk2_step(sys, x, h), 0, 0.0}; };
    case MethodKind::rk4:
      return [sys, h](const Vec& x) { return StepResult{rk4_step(sys, x, h), 0, 0.0}; };
    case MethodKind::midpoint:
      return [sys, h, solver](const Vec& x) { return midpoint_step(sys, x, h, solver); };
    case MethodKind::leaf_demo: {
      if (sys.dim() != 3) throw ConfigError("leaf-demo acts on 3-dimensional systems only");
      const int k = method.order;
      return [h, k](const Vec& x) { return StepResult{leaf_breaking_map(x, h, k), 0, 0.0}; };
    }
  }
  throw ConfigError("unhandled method");
}

TrajectoryRecord run_method(const SystemSpec& spec, const MethodSpec& method, const Vec& x0,
                            double h, long n_steps, const SolverOptions& solver) {
  if (x0.size() != spec.system.dim()) throw ConfigError("initial state has the wrong dimension");
  return integrate_steps(spec.system, make_step(spec, method, h, solver), x0, n_steps, h);
}

std::vector<double> energy_deviation(const TrajectoryRecord& rec) {
  std::vector<double> out;
  out.reserve(rec.per_step.size());
  for (const auto& d : rec.per_step) out.push_back(d.hamiltonian - rec.per_step.front().hamiltonian);
  return out;
}

std::vector<double> energy_series(const TrajectoryRecord& rec) {
  std::vector<double> out = energy_deviation(rec);
  for (auto& v : out) v = std::abs(v);
  return out;
}

std::vector<double> casimir_series(const TrajectoryRecord& rec, std::size_t i) {
  std::vector<double> out;
  if (rec.per_step.empty()) return out;
  if (i >= rec.per_step.front().casimirs.size()) throw ConfigError("no such Casimir index");
  const double c0 = rec.per_step.front().casimirs[i];
  for (const auto& d : rec.per_step) out.push_back(std::abs(d.casimirs[i] - c0));
  return out;
}

DriftFit drift_slope(const std::vector<double>& s) {
  DriftFit f;
  const std::size_t n = s.size();
  if (n == 0) return f;
  for (double v : s) f.amplitude = std::max(f.amplitude, std::abs(v - s.front()));
  if (n < 2) return f;
  const double xm = 0.5 * static_cast<double>(n - 1);
  double ym = 0.0;
  for (double v : s) ym += v;
  ym /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xm;
    sxy += dx * (s[i] - ym);
    sxx += dx * dx;
  }
  f.slope = sxy / sxx;
  return f;
}

LogLogFit fit_loglog(const std::vector<double>& h, const std::vector<double>& err) {
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (std::isfinite(err[i]) && err[i] > 0.0) {
      X.push_back(std::log(h[i]));
      Y.push_back(std::log(err[i]));
    }
  }
  LogLogFit fit;
  const std::size_t n = X.size();
  if (n < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.stderr_ = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += X[i];
    ym += Y[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (X[i] - xm) * (X[i] - xm);
    sxy += (X[i] - xm) * (Y[i] - ym);
  }
  fit.slope = sxy / sxx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = Y[i] - (ym + fit.slope * (X[i] - xm));
      ssr += r * r;
    }
    fit.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

ConvergenceReport convergence_report(const SystemSpec& spec, const MethodSpec& method,
                                     const Vec& x0, double T, std::vector<double> h_list,
                                     int threads, const SolverOptions& solver,
                                     const ReferenceOptions& ref) {
  if (h_list.empty()) throw ConfigError("convergence sweep needs at least one step size");
  if (!(T > 0.0)) throw ConfigError("convergence horizon must be > 0");
  std::vector<long> steps;
  std::sort(h_list.begin(), h_list.end(), std::greater<>());
  for (double h : h_list) {
    if (!(h > 0.0)) throw ConfigError("step sizes must be > 0");
    const double n = std::round(T / h);
    if (n < 1.0 || std::abs(n * h - T) > 1e-9 * T) {
      throw ConfigError("step size " + std::to_string(h) + " does not divide the horizon");
    }
    steps.push_back(static_cast<long>(n));
  }
  // Validate method/system pairing before spawning workers.
  (void)make_step(spec, method, h_list.front(), solver);

  const ReferenceSolution oracle = reference_solution(spec.system, x0, T, 1, ref);
  if (oracle.blew_up || oracle.states.size() < 2) {
    throw ConfigError("reference solution blows up before the horizon");
  }
  const Vec x_ref = oracle.states.back();

  ConvergenceReport rep;
  rep.h_values = h_list;
  rep.errors.assign(h_list.size(), std::numeric_limits<double>::infinity());
  rep.status.assign(h_list.size(), "");

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < h_list.size(); i = next++) {
      try {
        const TrajectoryRecord rec = run_method(spec, method, x0, h_list[i], steps[i], solver);
        rep.status[i] = to_string(rec.termination);
        if (rec.completed()) {
          rep.errors[i] = (rec.states.back() - x_ref).lpNorm<Eigen::Infinity>();
        }
      } catch (const std::exception& e) {
        rep.status[i] = std::string("error: ") + e.what();
      }
    }
  };
  const int n_workers = std::clamp(threads, 1, static_cast<int>(h_list.size()));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
  }
  const LogLogFit fit = fit_loglog(rep.h_values, rep.errors);
  rep.fitted_slope = fit.slope;
  rep.slope_ci = fit.stderr_;
  return rep;
}

int threads_from_env() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* v = std::getenv("PHI_KIT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n >= 1) return static_cast<int>(std::min<long>(n, 256));
  }
  return static_cast<int>(hw);
}

}  // namespace phikit
