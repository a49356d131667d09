#include "phikit/systems.hpp"

#include <boost/rational.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

namespace phikit {

namespace {

using Rat = boost::rational<long long>;

Rat to_rational(double a) {
  // Matrix entries are small dyadic numbers in practice; anything needing a
  // finer denominator is rejected rather than silently rounded.
  long long den = 1;
  for (int k = 0; k <= 20; ++k, den *= 2) {
    const double scaled = a * static_cast<double>(den);
    if (scaled == std::round(scaled) && std::abs(scaled) < 1e15) {
      return Rat(static_cast<long long>(scaled), den);
    }
  }
  throw ConfigError("matrix entry " + std::to_string(a) + " is not a short dyadic rational");
}

}  // namespace

std::vector<std::vector<long long>> integer_kernel_basis(const Mat& A) {
  const int rows = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::vector<std::vector<Rat>> m(rows, std::vector<Rat>(n));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = to_rational(A(i, j));

  // Reduced row echelon form.
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < n && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c].numerator() != 0) { piv = i; break; }
    if (piv < 0) continue;
    std::swap(m[r], m[piv]);
    const Rat lead = m[r][c];
    for (auto& e : m[r]) e /= lead;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c].numerator() == 0) continue;
      const Rat f = m[i][c];
      for (int j = 0; j < n; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }

  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<long long>> basis;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rat> v(n, Rat(0));
    v[f] = 1;
    for (std::size_t k = 0; k < pivot_col.size(); ++k) v[pivot_col[k]] = -m[k][f];
    long long lcm = 1;
    for (const Rat& e : v) lcm = std::lcm(lcm, e.denominator());
    std::vector<long long> u(n);
    long long g = 0;
    for (int j = 0; j < n; ++j) {
      u[j] = boost::rational_cast<long long>(v[j] * lcm);
      g = std::gcd(g, u[j]);
    }
    long long sign = 1;
    for (long long e : u)
      if (e != 0) { sign = e > 0 ? 1 : -1; break; }
    for (auto& e : u) e = sign * e / g;
    basis.push_back(std::move(u));
  }
  return basis;
}

std::vector<MonomialCasimir> casimir_from_kernel(const Mat& A) {
  if (A.rows() != A.cols()) throw ConfigError("casimir_from_kernel: A must be square");
  if ((A + A.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw ConfigError("casimir_from_kernel: A must be antisymmetric");
  }
  const int n = static_cast<int>(A.rows());
  std::vector<MonomialCasimir> out;
  for (auto& u : integer_kernel_basis(A)) {
    MonomialCasimir c;
    c.exponents = u;
    auto monomial = [u](std::span<const double> x, int skip) {
      double f = 1.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const long long e = static_cast<int>(i) == skip ? u[i] - 1 : u[i];
        f *= std::pow(x[i], static_cast<double>(e));
      }
      return f;
    };
    c.field = ScalarField::numeric(
        n, [monomial](std::span<const double> x) { return monomial(x, -1); },
        [monomial, u](std::span<const double> x) {
          std::vector<double> g(x.size(), 0.0);
          for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] != 0) g[i] = static_cast<double>(u[i]) * monomial(x, static_cast<int>(i));
          }
          return g;
        });
    c.domain_guard = [u](const Vec& x) {
      for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] < 0 && x[static_cast<Eigen::Index>(i)] == 0.0) return false;
      return true;
    };
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------

Mat lotka_volterra_matrix() {
  Mat A(3, 3);
  A << 0, 1, 1, -1, 0, 1, -1, -1, 0;
  return A;
}

namespace {

ScalarField linear_sum(int n) {
  return ScalarField::generic(
      n,
      [](auto x) {
        using T = typename decltype(x)::value_type;
        T s(0.0);
        for (const auto& xi : x) s += xi;
        return s;
      },
      [](auto x) {
        using T = typename decltype(x)::value_type;
        return std::vector<T>(x.size(), T(1.0));
      });
}

void require_x0(const Vec& x0, int n, const std::string& who) {
  if (x0.size() != n) {
    throw ConfigError(who + ": initial state must have dimension " + std::to_string(n));
  }
  if (!x0.allFinite()) throw ConfigError(who + ": initial state must be finite");
}

}  // namespace

SystemSpec lotka_volterra(const Mat& A, const Vec& x0) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || n < 2) throw ConfigError("lotka_volterra: A must be square, n >= 2");
  require_x0(x0, n, "lotka_volterra");
  SystemSpec spec;
  spec.name = "lv3";
  PoissonSystem& sys = spec.system;
  sys.name = "lotka-volterra";
  sys.tensor = PoissonTensorField{n, [A, n](const Vec& x) {
                                    Mat pi(n, n);
                                    for (int i = 0; i < n; ++i)
                                      for (int j = 0; j < n; ++j) pi(i, j) = A(i, j) * x[i] * x[j];
                                    return pi;
                                  }};
  sys.hamiltonian = linear_sum(n);
  auto casimirs = casimir_from_kernel(A);
  std::vector<std::function<bool(const Vec&)>> guards;
  for (auto& c : casimirs) {
    sys.casimirs.push_back(c.field);
    spec.leaf_invariants.push_back(c.field);
    guards.push_back(c.domain_guard);
  }
  sys.domain_guard = [guards](const Vec& x) {
    for (const auto& g : guards)
      if (!g(x)) return false;
    return true;
  };
  spec.default_x0 = x0;
  spec.bireal = auto_orient(quadratic(A), sys, x0);
  spec.notes = "pi_ij = a_ij x_i x_j, H = sum x_i; Casimirs prod x_i^{u_i}, u in Ker A";
  return spec;
}

SystemSpec lotka_volterra3() {
  Vec x0(3);
  x0 << -3.0, 5.0, 1e-3;
  SystemSpec spec = lotka_volterra(lotka_volterra_matrix(), x0);
  spec.system.blow_up_hint = 0.23;
  return spec;
}

Mat default_inertia() {
  Mat J = Mat::Zero(3, 3);
  J.diagonal() << 1.0, std::numbers::pi, 100.0;
  return J;
}

SystemSpec rigid_body(const Mat& J, const Vec& x0) {
  if (J.rows() != 3 || J.cols() != 3) throw ConfigError("rigid_body: J must be 3x3");
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + J.cwiseAbs().maxCoeff())) {
    throw ConfigError("rigid_body: J must be symmetric");
  }
  if (Eigen::LLT<Mat>(J).info() != Eigen::Success) {
    throw ConfigError("rigid_body: J must be positive definite");
  }
  require_x0(x0, 3, "rigid_body");
  const Mat Js = 0.5 * (J + J.transpose());
  const double tr = Js.trace();
  SystemSpec spec;
  spec.name = "rigid-body";
  PoissonSystem& sys = spec.system;
  sys.name = "rigid-body";
  sys.tensor = PoissonTensorField{3, [](const Vec& x) { return hat(x); }};
  sys.hamiltonian = ScalarField::generic(
      3,
      [Js, tr](auto x) {
        using T = typename decltype(x)::value_type;
        T s(0.0);
        for (int i = 0; i < 3; ++i) {
          s += tr * (x[i] * x[i]);
          for (int j = 0; j < 3; ++j)
            if (Js(i, j) != 0.0) s -= Js(i, j) * (x[i] * x[j]);
        }
        return 0.5 * s;
      },
      [Js, tr](auto x) {
        using T = typename decltype(x)::value_type;
        std::vector<T> g(3);
        for (int i = 0; i < 3; ++i) {
          T s = tr * x[i];
          for (int j = 0; j < 3; ++j)
            if (Js(i, j) != 0.0) s -= Js(i, j) * x[j];
          g[i] = s;
        }
        return g;
      });
  ScalarField norm2 = ScalarField::numeric(
      3, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; },
      [](std::span<const double> x) {
        return std::vector<double>{2.0 * x[0], 2.0 * x[1], 2.0 * x[2]};
      });
  sys.casimirs = {norm2};
  spec.leaf_invariants = {norm2};
  spec.default_x0 = x0;
  spec.bireal = auto_orient(so3_cayley(), sys, x0);
  spec.notes = "x' = -x ^ J x on so(3)^*, Casimir |x|^2";
  return spec;
}

SystemSpec rigid_body() { return rigid_body(default_inertia(), Vec::Ones(3)); }

SystemSpec harmonic_oscillator() {
  SystemSpec spec;
  spec.name = "harmonic";
  PoissonSystem& sys = spec.system;
  sys.name = "harmonic";
  sys.tensor = PoissonTensorField{2, [](const Vec&) {
                                    Mat pi(2, 2);
                                    pi << 0.0, 1.0, -1.0, 0.0;
                                    return pi;
                                  }};
  sys.hamiltonian = ScalarField::generic(
      2, [](auto x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
      [](auto x) {
        using T = typename decltype(x)::value_type;
        return std::vector<T>{x[0], x[1]};
      });
  spec.default_x0 = Vec::Unit(2, 0);
  spec.bireal = auto_orient(canonical_symplectic(1), sys, spec.default_x0);
  spec.notes = "(q, p) ordering, q' = p, p' = -q";
  return spec;
}

double quad_leaf_invariant(const Vec& x) { return x[0] - x[1] + x[2]; }

Vec quad_example_printed_rhs(const Vec& x) {
  const double a = x[0], b = x[1], c = x[2];
  const double u = a - b + c, v = a + b - c;
  Vec r(3);
  r[0] = -(a + b - c) / 8.0 * ((-a - b + c) * (-a - b + c) + v * v);
  r[1] = (-b + c) / 4.0 * (u * u + v * v);
  r[2] = (a - b + c) / 8.0 * (u * u + v * v);
  return r;
}

SystemSpec quad_example() {
  SystemSpec spec;
  spec.name = "quad-example";
  PoissonSystem& sys = spec.system;
  sys.name = "quad-example";
  sys.tensor = PoissonTensorField{3, [](const Vec& x) {
                                    const double u = x[0] - x[1] + x[2];
                                    const double v = x[0] + x[1] - x[2];
                                    Mat K(3, 3);
                                    K << 0, -1, -1, 1, 0, -1, 1, 1, 0;
                                    return Mat((u * u + v * v) / 4.0 * K);
                                  }};
  sys.hamiltonian = ScalarField::generic(
      3,
      [](auto x) {
        const auto u = x[0] - x[1] + x[2];
        const auto v = x[0] + x[1] - x[2];
        return (u * u + v * v) / 8.0;
      },
      [](auto x) {
        using T = typename decltype(x)::value_type;
        const T u = x[0] - x[1] + x[2];
        const T v = x[0] + x[1] - x[2];
        // grad u = (1,-1,1), grad v = (1,1,-1)
        return std::vector<T>{(u + v) / 4.0, (v - u) / 4.0, (u - v) / 4.0};
      });
  ScalarField leaf = ScalarField::numeric(
      3, [](std::span<const double> x) { return x[0] - x[1] + x[2]; },
      [](std::span<const double>) { return std::vector<double>{1.0, -1.0, 1.0}; });
  sys.casimirs = {leaf};
  spec.leaf_invariants = {leaf};
  spec.default_x0 = Vec(3);
  spec.default_x0 << 1.0, 1.0, 2.0;
  spec.notes = "dynamics generated as pi grad H; leaves are the planes x - y + z = const";
  return spec;
}

std::vector<std::string> catalog_names() { return {"lv3", "rigid-body", "harmonic", "quad-example"}; }

SystemSpec system_by_name(const std::string& name) {
  if (name == "lv3") return lotka_volterra3();
  if (name == "rigid-body") return rigid_body();
  if (name == "harmonic") return harmonic_oscillator();
  if (name == "quad-example") return quad_example();
  throw ConfigError("unknown system '" + name + "' (expected lv3, rigid-body, harmonic, quad-example)");
}

}  // namespace phikit
