#include "phikit/birealisation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "phikit/solver.hpp"

namespace phikit {

std::string to_string(Orientation o) {
  return o == Orientation::solve_alpha_push_beta ? "solve_alpha_push_beta"
                                                 : "solve_beta_push_alpha";
}

void BiRealisation::require_fiber(const Vec& x, const Vec& p) const {
  if (!fiber_valid(x, p)) {
    throw StepTooLargeError(name + ": fiber coordinate outside validity region (" + fiber_bound +
                            ")");
  }
}

BiRealisation BiRealisation::with_orientation(Orientation o) const {
  BiRealisation b = *this;
  b.orientation = o;
  b.probe.reset();
  return b;
}

Mat hat(const Vec& v) {
  Mat m(3, 3);
  m << 0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0;
  return m;
}

Vec vee(const Mat& m) {
  Vec v(3);
  v << m(2, 1), m(0, 2), m(1, 0);
  return v;
}

// ---------------------------------------------------------------------------

BiRealisation canonical_symplectic(int n_pairs) {
  if (n_pairs < 1) throw ConfigError("canonical_symplectic: n_pairs must be >= 1");
  const int n = n_pairs;
  auto make = [n](double sign) {
    return [n, sign](auto x, auto p) {
      using T = typename decltype(x)::value_type;
      std::vector<T> out(x.begin(), x.end());
      for (int i = 0; i < n; ++i) {
        out[i] = out[i] - (0.5 * sign) * p[n + i];
        out[n + i] = out[n + i] + (0.5 * sign) * p[i];
      }
      return out;
    };
  };
  auto jacobian = [n](double sign) {
    return FiberJacobian([n, sign](const Vec&, const Vec&) {
      Mat m = Mat::Zero(2 * n, 2 * n);
      for (int i = 0; i < n; ++i) {
        m(i, n + i) = -0.5 * sign;
        m(n + i, i) = 0.5 * sign;
      }
      return m;
    });
  };
  BiRealisation b;
  b.name = "canonical";
  b.dim = 2 * n;
  b.alpha = FiberMap::generic(make(1.0));
  b.beta = FiberMap::generic(make(-1.0));
  b.alpha_fiber_jacobian = jacobian(1.0);
  b.beta_fiber_jacobian = jacobian(-1.0);
  b.fiber_bound = "unbounded";
  return b;
}

BiRealisation quadratic(const Mat& A) {
  if (A.rows() != A.cols() || A.rows() < 1) throw ConfigError("quadratic: A must be square");
  if ((A + A.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw ConfigError("quadratic: A must be antisymmetric");
  }
  const int n = static_cast<int>(A.rows());
  auto make = [A, n](double sign) {
    return [A, n, sign](auto x, auto p) {
      using T = typename decltype(x)::value_type;
      std::vector<T> out(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) {
        T s(0.0);
        for (int i = 0; i < n; ++i) {
          if (A(i, j) != 0.0) s += A(i, j) * (x[i] * p[i]);
        }
        using std::exp;
        out[j] = exp((0.5 * sign) * s) * x[j];
      }
      return out;
    };
  };
  auto jacobian = [A, n](double sign) {
    return FiberJacobian([A, n, sign](const Vec& x, const Vec& p) {
      Mat m(n, n);
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += A(i, j) * x[i] * p[i];
        const double mapped = std::exp(0.5 * sign * s) * x[j];
        for (int i = 0; i < n; ++i) m(j, i) = 0.5 * sign * A(i, j) * x[i] * mapped;
      }
      return m;
    });
  };
  BiRealisation b;
  b.name = "quadratic";
  b.dim = n;
  b.alpha = FiberMap::generic(make(-1.0));
  b.beta = FiberMap::generic(make(1.0));
  b.alpha_fiber_jacobian = jacobian(-1.0);
  b.beta_fiber_jacobian = jacobian(1.0);
  const double a_norm = A.norm();
  b.fiber_valid = [a_norm](const Vec& x, const Vec& p) {
    return p.norm() * x.norm() * a_norm < 50.0;
  };
  b.fiber_bound = "|p| |x| |A| < 50";
  return b;
}

namespace {

template <class T>
using M3 = std::array<T, 9>;

template <class T>
M3<T> hat3(const T& a, const T& b, const T& c) {
  const T z(0.0);
  return {z, -c, b, c, z, -a, -b, a, z};
}

template <class T>
M3<T> mul3(const M3<T>& l, const M3<T>& r) {
  M3<T> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s = l[3 * i] * r[j];
      s += l[3 * i + 1] * r[3 + j];
      s += l[3 * i + 2] * r[6 + j];
      out[3 * i + j] = s;
    }
  return out;
}

// (1 + s A/4) X (1 - s A/4) with A = 2 hat(p), returned in vector form.
template <class T>
std::vector<T> cayley_conjugate(std::span<const T> x, std::span<const T> p, double sign) {
  const M3<T> X = hat3(x[0], x[1], x[2]);
  const double c = sign * 2.0 / 4.0;
  M3<T> left = hat3<T>(c * p[0], c * p[1], c * p[2]);
  M3<T> right = hat3<T>(-(c * p[0]), -(c * p[1]), -(c * p[2]));
  for (int i = 0; i < 3; ++i) {
    left[4 * i] = left[4 * i] + 1.0;
    right[4 * i] = right[4 * i] + 1.0;
  }
  const M3<T> m = mul3(mul3(left, X), right);
  return {m[7], m[2], m[3]};
}

}  // namespace

BiRealisation so3_cayley() {
  auto make = [](double sign) {
    return [sign](auto x, auto p) { return cayley_conjugate(x, p, sign); };
  };
  // Vector form: x + s (a x x)/4 + (a.x) a / 16 with a = 2p.
  auto jacobian = [](double sign) {
    return FiberJacobian([sign](const Vec& x, const Vec& p) {
      const Vec a = 2.0 * p;
      Mat da = -sign * hat(x) / 4.0 + (a * x.transpose() + a.dot(x) * Mat::Identity(3, 3)) / 16.0;
      return Mat(2.0 * da);
    });
  };
  BiRealisation b;
  b.name = "so3_cayley";
  b.dim = 3;
  b.alpha = FiberMap::generic(make(1.0));
  b.beta = FiberMap::generic(make(-1.0));
  b.alpha_fiber_jacobian = jacobian(1.0);
  b.beta_fiber_jacobian = jacobian(-1.0);
  b.fiber_valid = [](const Vec&, const Vec& p) { return 2.0 * p.norm() < 4.0; };
  b.fiber_bound = "|A| = 2|p| < 4";
  return b;
}

// ---------------------------------------------------------------------------

double check_unit(const BiRealisation& b, const std::vector<Vec>& xs) {
  double worst = 0.0;
  for (const Vec& x : xs) {
    const Vec zero = Vec::Zero(x.size());
    worst = std::max(worst, (b.alpha(x, zero) - x).norm() + (b.beta(x, zero) - x).norm());
  }
  return worst;
}

Mat canonical_bracket_matrix(const FiberMap& f, const FiberMap& g, const Vec& x, const Vec& p,
                             double fd_step) {
  auto partials = [&](const FiberMap& m, Mat& dx, Mat& dp) {
    dx = fd_jacobian([&](const Vec& xx) { return m(xx, p); }, x, fd_step);
    dp = fd_jacobian([&](const Vec& pp) { return m(x, pp); }, p, fd_step);
  };
  Mat fx, fp, gx, gp;
  partials(f, fx, fp);
  partials(g, gx, gp);
  return fx * gp.transpose() - fp * gx.transpose();
}

double check_source_poisson(const BiRealisation& b, const PoissonSystem& sys,
                            const std::vector<FiberSample>& samples, double fd_step) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const Mat br = canonical_bracket_matrix(b.source(), b.source(), s.x, s.p, fd_step);
    const Mat pi = sys.tensor(b.source()(s.x, s.p));
    worst = std::max(worst, (br - pi).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_target_antipoisson(const BiRealisation& b, const PoissonSystem& sys,
                                const std::vector<FiberSample>& samples, double fd_step) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const Mat br = canonical_bracket_matrix(b.target(), b.target(), s.x, s.p, fd_step);
    const Mat pi = sys.tensor(b.target()(s.x, s.p));
    worst = std::max(worst, (br + pi).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_fiber_orthogonality(const BiRealisation& b, const std::vector<FiberSample>& samples,
                                 double fd_step) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const Mat br = canonical_bracket_matrix(b.source(), b.target(), s.x, s.p, fd_step);
    worst = std::max(worst, br.cwiseAbs().maxCoeff());
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

double probe_defect(const BiRealisation& b, const PoissonSystem& sys, const Vec& x0, double h,
                    const Vec& expected) {
  try {
    auto fiber = [&](const Vec& y) { return Vec(h * sys.hamiltonian.grad(y)); };
    auto solve_side = [&](const Vec& y) {
      const Vec p = fiber(y);
      b.require_fiber(y, p);
      return b.source()(y, p);
    };
    const SolveResult r = solve_inverse(solve_side, x0, SolverOptions{});
    const Vec x1 = b.target()(r.y, fiber(r.y));
    return (x1 - expected).norm();
  } catch (const StepTooLargeError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const BlowUpError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

BiRealisation auto_orient(const BiRealisation& b, const PoissonSystem& sys, const Vec& x0,
                          double h_probe) {
  if (!(h_probe > 0.0) || !std::isfinite(h_probe)) {
    throw ConfigError("auto_orient: probe step must be positive and finite");
  }
  if (b.dim != sys.dim() || x0.size() != sys.dim()) {
    throw ConfigError("auto_orient: dimension mismatch between realisation and system");
  }
  const Vec velocity = hamiltonian_vector_field(sys, x0);
  const double speed = velocity.norm();
  if (speed == 0.0) throw ConfigError("auto_orient: probe point is an equilibrium");
  const Vec expected = x0 + h_probe * velocity;

  OrientationProbe probe;
  probe.h_probe = h_probe;
  probe.defect_solve_alpha = probe_defect(b.with_orientation(Orientation::solve_alpha_push_beta),
                                          sys, x0, h_probe, expected);
  probe.defect_solve_beta = probe_defect(b.with_orientation(Orientation::solve_beta_push_alpha),
                                         sys, x0, h_probe, expected);

  // First-order consistency: the defect is O(h^2) while the step is h |F|.
  const double cutoff = 0.5 * h_probe * speed;
  const double best = std::min(probe.defect_solve_alpha, probe.defect_solve_beta);
  if (!(best <= cutoff)) {
    throw ConfigError("auto_orient: neither orientation of " + b.name +
                      " is first-order consistent with the Hamiltonian vector field");
  }
  probe.chosen = probe.defect_solve_alpha <= probe.defect_solve_beta
                     ? Orientation::solve_alpha_push_beta
                     : Orientation::solve_beta_push_alpha;
  BiRealisation out = b.with_orientation(probe.chosen);
  out.probe = probe;
  return out;
}

}  // namespace phikit
