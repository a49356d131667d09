// Hamilton-Jacobi generating series and the Poisson Hamiltonian integrator.
//
// The coefficients follow the derivative recursion
//
//   S_1 = H,   S_{i+1}(m) = d^i/dt^i |_{t=0} H(source(m, grad S_t^{(i)}(m))),
//   S_t^{(i)} = sum_{j<=i} t^j / j! S_j,
//
// evaluated with truncated Taylor jets in t and dual numbers for gradients in
// m.  The generating function of a step of size h is sum_i h^i / i! S_i; its
// gradient is the fiber coordinate of the Lagrangian bisection.
//
// A step from x_n solves source(y, P(y, h)) = x_n for y and returns
// target(y, P(y, h)), where source/target are the oriented roles of the
// bi-realisation.
#pragma once

#include <memory>

#include "phikit/birealisation.hpp"
#include "phikit/geometry.hpp"
#include "phikit/solver.hpp"
#include "phikit/trajectory.hpp"

namespace phikit {

inline constexpr int kMaxSeriesOrder = 3;

class GeneratingSeries {
 public:
  GeneratingSeries(PoissonSystem sys, BiRealisation bireal, int order);

  int order() const { return order_; }
  const PoissonSystem& system() const { return data_->sys; }
  const BiRealisation& realisation() const { return data_->bireal; }

  // S_i(m) and grad S_i(m), 1 <= i <= order.
  double value(int i, const Vec& m) const;
  Vec gradient(int i, const Vec& m) const;

  // S_i as a stand-alone scalar field.
  ScalarField coefficient(int i) const;

 private:
  struct Data {
    PoissonSystem sys;
    BiRealisation bireal;
  };
  void check_index(int i) const;

  std::shared_ptr<const Data> data_;
  int order_ = 1;
};

GeneratingSeries compute_series(const PoissonSystem& sys, const BiRealisation& b, int order);

// sum_{i=1}^{k} h^i / i! grad S_i(y).
Vec eval_generating_gradient(const GeneratingSeries& s, const Vec& y, double h);

// Independent route to S_2 and S_3 through canonical brackets on the doubled
// space restricted to the zero section (partials of the source through its
// closed-form fiber Jacobian when available, finite differences otherwise):
//
//   S_2 = 2! * 0^*( 1/2 {tau^*S_1, src^*H} )
//   S_3 = 3! * 0^*( 1/3 {tau^*T_2, src^*H} + 1/6 {tau^*S_1, {tau^*S_1, src^*H}} ),
//
// with T_2 = S_2 / 2 and {x_i, p_j} = delta_ij.
double closed_form_S2(const PoissonSystem& sys, const BiRealisation& b, const Vec& x);
double closed_form_S3(const PoissonSystem& sys, const BiRealisation& b, const Vec& x);

struct StepperConfig {
  double dt = 1e-3;
  int order = 1;
  double fp_tol = 1e-14;
  int fp_max_iter = 100;
  bool newton_fallback = true;

  void validate() const;
  SolverOptions solver() const { return {fp_tol, fp_max_iter, newton_fallback}; }
};

class PhiStepper {
 public:
  // `bireal` should already be oriented (see auto_orient).
  PhiStepper(const PoissonSystem& sys, const BiRealisation& bireal, StepperConfig config);

  const BiRealisation& realisation() const { return series_.realisation(); }
  const GeneratingSeries& series() const { return series_; }
  const StepperConfig& config() const { return config_; }
  const PoissonSystem& system() const { return series_.system(); }

 private:
  GeneratingSeries series_;
  StepperConfig config_;
};

// y with source(y, P(y, h)) = x_n.
SolveResult solve_intermediate(const PhiStepper& st, const Vec& x_n);

StepResult phi_step(const PhiStepper& st, const Vec& x_n);

DiscreteMap as_discrete_map(const PhiStepper& st);

TrajectoryRecord integrate(const PhiStepper& st, const Vec& x0, long n_steps);

}  // namespace phikit
