// Trajectory diagnostics, method selection and convergence-order estimation.
#pragma once

#include <string>
#include <vector>

#include "phikit/baselines.hpp"
#include "phikit/hj_phi.hpp"
#include "phikit/systems.hpp"
#include "phikit/trajectory.hpp"

namespace phikit {

enum class MethodKind { phi, rk2, rk4, midpoint, leaf_demo };

struct MethodSpec {
  MethodKind kind = MethodKind::phi;
  int order = 1;  // phi and leaf_demo only

  std::string label() const;  // "phi1", "rk2", "leaf-demo2", ...
  bool operator==(const MethodSpec&) const = default;
};

MethodSpec parse_method(const std::string& label);

// One-step map of `method` with step h on `spec`.  PHI needs a bi-realisation
// and leaf_demo a 3-dimensional state.
StepFn make_step(const SystemSpec& spec, const MethodSpec& method, double h,
                 const SolverOptions& solver = {});

TrajectoryRecord run_method(const SystemSpec& spec, const MethodSpec& method, const Vec& x0,
                            double h, long n_steps, const SolverOptions& solver = {});

// |Q(x_n) - Q(x_0)| for the Hamiltonian / the i-th Casimir.
std::vector<double> energy_series(const TrajectoryRecord& rec);
std::vector<double> casimir_series(const TrajectoryRecord& rec, std::size_t i = 0);
// Signed deviations H(x_n) - H(x_0).
std::vector<double> energy_deviation(const TrajectoryRecord& rec);

struct DriftFit {
  double slope = 0.0;      // least-squares slope per step
  double amplitude = 0.0;  // max |series_n - series_0|
};

DriftFit drift_slope(const std::vector<double>& series);

struct ConvergenceReport {
  std::vector<double> h_values;  // descending
  std::vector<double> errors;    // sup-norm error at T (inf when the run failed)
  std::vector<std::string> status;
  double fitted_slope = 0.0;  // NaN when fewer than two finite errors
  double slope_ci = 0.0;      // least-squares standard error of the slope
};

struct LogLogFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};

LogLogFit fit_loglog(const std::vector<double>& h, const std::vector<double>& err);

// Sweeps h_list (run concurrently on up to `threads` workers) and fits
// log(error) against log(h).  Each h must divide T.
ConvergenceReport convergence_report(const SystemSpec& spec, const MethodSpec& method,
                                     const Vec& x0, double T, std::vector<double> h_list,
                                     int threads = 1, const SolverOptions& solver = {},
                                     const ReferenceOptions& ref = {});

// Worker count from PHI_KIT_THREADS (default: hardware concurrency).
int threads_from_env();

}  // namespace phikit
