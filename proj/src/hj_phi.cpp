#include "phikit/hj_phi.hpp"

#include <cmath>
#include <string>

namespace phikit {

namespace {

constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

struct SeriesContext {
  const ScalarField& H;
  const FiberMap& source;
};

template <int I, class T>
std::vector<T> series_gradient(const SeriesContext& ctx, std::span<const T> m);

// S_I(m) = (I-1)! [t^{I-1}] H(source(m, sum_{j<I} t^j / j! grad S_j(m))).
template <int I, class T>
T series_value(const SeriesContext& ctx, std::span<const T> m) {
  if constexpr (I == 1) {
    return ctx.H.value<T>(m);
  } else {
    const std::size_t n = m.size();
    std::vector<Jet<T>> mj, pj(n);
    mj.reserve(n);
    for (std::size_t c = 0; c < n; ++c) mj.emplace_back(m[c]);
    [&]<int... J>(std::integer_sequence<int, J...>) {
      (
          [&] {
            const std::vector<T> g = series_gradient<J + 1, T>(ctx, m);
            for (std::size_t c = 0; c < n; ++c) pj[c].c[J + 1] = g[c] / factorial(J + 1);
          }(),
          ...);
    }(std::make_integer_sequence<int, I - 1>{});
    const std::vector<Jet<T>> a = ctx.source.eval<Jet<T>>(mj, pj);
    const Jet<T> h = ctx.H.value<Jet<T>>(a);
    return factorial(I - 1) * h.c[I - 1];
  }
}

// Gradient by one directional dual pass per coordinate.
template <int I, class T>
std::vector<T> series_gradient(const SeriesContext& ctx, std::span<const T> m) {
  if constexpr (I == 1) {
    return ctx.H.gradient<T>(m);
  } else {
    const std::size_t n = m.size();
    std::vector<Dual<T>> md;
    md.reserve(n);
    for (std::size_t c = 0; c < n; ++c) md.emplace_back(m[c], T(0.0));
    std::vector<T> out(n);
    for (std::size_t d = 0; d < n; ++d) {
      md[d].d = T(1.0);
      out[d] = series_value<I, Dual<T>>(ctx, md).d;
      md[d].d = T(0.0);
    }
    return out;
  }
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

GeneratingSeries::GeneratingSeries(PoissonSystem sys, BiRealisation bireal, int order)
    : data_(std::make_shared<const Data>(Data{std::move(sys), std::move(bireal)})), order_(order) {
  if (order < 1 || order > kMaxSeriesOrder) {
    throw ConfigError("generating series order must be in [1, " + std::to_string(kMaxSeriesOrder) +
                      "], got " + std::to_string(order));
  }
  if (data_->bireal.dim != data_->sys.dim()) {
    throw ConfigError("generating series: realisation dimension " +
                      std::to_string(data_->bireal.dim) + " does not match system dimension " +
                      std::to_string(data_->sys.dim()));
  }
  if (!data_->sys.hamiltonian.supports_ad()) {
    throw ConfigError("generating series: Hamiltonian must be generic over AD scalars");
  }
}

void GeneratingSeries::check_index(int i) const {
  if (i < 1 || i > order_) {
    throw ConfigError("series coefficient index " + std::to_string(i) + " outside [1, " +
                      std::to_string(order_) + "]");
  }
}

double GeneratingSeries::value(int i, const Vec& m) const {
  check_index(i);
  if (m.size() != system().dim()) throw ConfigError("series value: dimension mismatch");
  const SeriesContext ctx{data_->sys.hamiltonian, data_->bireal.source()};
  const auto x = as_span(m);
  double v = 0.0;
  switch (i) {
    case 1: v = series_value<1, double>(ctx, x); break;
    case 2: v = series_value<2, double>(ctx, x); break;
    default: v = series_value<3, double>(ctx, x); break;
  }
  if (!std::isfinite(v)) throw BlowUpError("series value is not finite");
  return v;
}

Vec GeneratingSeries::gradient(int i, const Vec& m) const {
  check_index(i);
  if (m.size() != system().dim()) throw ConfigError("series gradient: dimension mismatch");
  const SeriesContext ctx{data_->sys.hamiltonian, data_->bireal.source()};
  const auto x = as_span(m);
  std::vector<double> g;
  switch (i) {
    case 1: g = series_gradient<1, double>(ctx, x); break;
    case 2: g = series_gradient<2, double>(ctx, x); break;
    default: g = series_gradient<3, double>(ctx, x); break;
  }
  Vec out = to_vec(g);
  if (!all_finite(out)) throw BlowUpError("series gradient is not finite");
  return out;
}

ScalarField GeneratingSeries::coefficient(int i) const {
  check_index(i);
  GeneratingSeries self = *this;
  return ScalarField::numeric(
      system().dim(), [self, i](std::span<const double> x) { return self.value(i, to_vec(x)); },
      [self, i](std::span<const double> x) {
        const Vec g = self.gradient(i, to_vec(x));
        return std::vector<double>(g.data(), g.data() + g.size());
      });
}

GeneratingSeries compute_series(const PoissonSystem& sys, const BiRealisation& b, int order) {
  GeneratingSeries s(sys, b, order);
  const int n = sys.dim();
  std::vector<Vec> probes{Vec::Zero(n), Vec::Ones(n)};
  for (int i = 0; i < n; ++i) probes.push_back(Vec::Unit(n, i));
  if (!(check_unit(b, probes) <= 1e-12)) {
    throw ConfigError("realisation " + b.name + " does not satisfy the unit condition");
  }
  return s;
}

Vec eval_generating_gradient(const GeneratingSeries& s, const Vec& y, double h) {
  Vec p = Vec::Zero(y.size());
  if (h == 0.0) return p;
  double hp = 1.0;
  for (int i = 1; i <= s.order(); ++i) {
    hp *= h;
    p += (hp / factorial(i)) * s.gradient(i, y);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Bracket route.  With F = tau^*f (independent of p) and G(x, p) a function on
// the doubled space, {F, G}(x, p) = grad f(x) . d_p G(x, p).  For G = src^*H,
// d_p G = J_p(x, p)^T grad H(src(x, p)) with J_p the source fiber Jacobian.

namespace {

Mat source_fiber_jacobian(const BiRealisation& b, const Vec& x, const Vec& p) {
  if (const auto& jac = b.source_fiber_jacobian()) return (*jac)(x, p);
  return fd_jacobian([&](const Vec& pp) { return b.source()(x, pp); }, p, default_fd_step(p));
}

// d_p (src^*H)(x, p).
Vec fiber_gradient(const PoissonSystem& sys, const BiRealisation& b, const Vec& x, const Vec& p) {
  return source_fiber_jacobian(b, x, p).transpose() * sys.hamiltonian.grad(b.source()(x, p));
}

// T_2 = 1/2 {tau^*H, src^*H} on the zero section.
double half_bracket(const PoissonSystem& sys, const BiRealisation& b, const Vec& x) {
  const Vec zero = Vec::Zero(x.size());
  return 0.5 * sys.hamiltonian.grad(x).dot(fiber_gradient(sys, b, x, zero));
}

}  // namespace

double closed_form_S2(const PoissonSystem& sys, const BiRealisation& b, const Vec& x) {
  return factorial(2) * half_bracket(sys, b, x);
}

double closed_form_S3(const PoissonSystem& sys, const BiRealisation& b, const Vec& x) {
  const int n = static_cast<int>(x.size());
  const Vec zero = Vec::Zero(n);
  const Vec gH = sys.hamiltonian.grad(x);
  const Vec g0 = fiber_gradient(sys, b, x, zero);

  // grad T_2 by central differences.
  const double hx = 1e-5 * (1.0 + x.norm());
  Vec gT2(n);
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += hx;
    xm[i] -= hx;
    gT2[i] = (half_bracket(sys, b, xp) - half_bracket(sys, b, xm)) / (2.0 * hx);
  }
  // {tau^*H, {tau^*H, src^*H}} = grad H^T (d_p d_p src^*H) grad H, the fiber
  // Hessian applied along grad H by a central difference of d_p src^*H.
  const double hp = 1e-5 / (1.0 + gH.norm());
  const Vec dir = gH;
  const Vec gp = fiber_gradient(sys, b, x, hp * dir);
  const Vec gm = fiber_gradient(sys, b, x, -hp * dir);
  const double nested = gH.dot(gp - gm) / (2.0 * hp);

  const double T3 = gT2.dot(g0) / 3.0 + nested / 6.0;
  return factorial(3) * T3;
}

// ---------------------------------------------------------------------------

void StepperConfig::validate() const {
  if (!std::isfinite(dt) || dt < 0.0) throw ConfigError("dt must be finite and >= 0");
  if (order < 1 || order > kMaxSeriesOrder) {
    throw ConfigError("order must be in [1, " + std::to_string(kMaxSeriesOrder) + "]");
  }
  if (!(fp_tol > 0.0)) throw ConfigError("fp_tol must be > 0");
  if (fp_max_iter < 1) throw ConfigError("fp_max_iter must be >= 1");
}

PhiStepper::PhiStepper(const PoissonSystem& sys, const BiRealisation& bireal,
                       StepperConfig config)
    : series_(compute_series(sys, bireal, config.order)), config_(config) {
  config_.validate();
}

namespace {

Vec fiber_at(const PhiStepper& st, const Vec& y) {
  Vec p = eval_generating_gradient(st.series(), y, st.config().dt);
  st.realisation().require_fiber(y, p);
  return p;
}

}  // namespace

SolveResult solve_intermediate(const PhiStepper& st, const Vec& x_n) {
  if (x_n.size() != st.system().dim()) throw ConfigError("phi step: dimension mismatch");
  if (st.config().dt == 0.0) return SolveResult{x_n, 1, 0.0, false};
  const BiRealisation& b = st.realisation();
  auto G = [&](const Vec& y) { return b.source()(y, fiber_at(st, y)); };
  return solve_inverse(G, x_n, st.config().solver());
}

StepResult phi_step(const PhiStepper& st, const Vec& x_n) {
  const SolveResult r = solve_intermediate(st, x_n);
  StepResult out;
  out.iterations = r.iterations;
  out.residual = r.residual;
  if (st.config().dt == 0.0) {
    out.x = x_n;
    return out;
  }
  out.x = st.realisation().target()(r.y, fiber_at(st, r.y));
  if (!all_finite(out.x) || is_blown_up(out.x)) {
    throw BlowUpError("phi step left the finite range");
  }
  return out;
}

DiscreteMap as_discrete_map(const PhiStepper& st) {
  return DiscreteMap{st.system().dim(), [st](const Vec& x) { return phi_step(st, x).x; }};
}

TrajectoryRecord integrate(const PhiStepper& st, const Vec& x0, long n_steps) {
  if (x0.size() != st.system().dim()) throw ConfigError("integrate: dimension mismatch");
  if (n_steps < 0) throw ConfigError("integrate: n_steps must be >= 0");
  return integrate_steps(
      st.system(), [&st](const Vec& x) { return phi_step(st, x); }, x0, n_steps,
      st.config().dt);
}

}  // namespace phikit
