#pragma once

#include <cmath>
#include <numbers>

#include "phikit/fields.hpp"

namespace testing {

using phikit::Mat;
using phikit::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline double sup(const Vec& v) { return v.lpNorm<Eigen::Infinity>(); }

// Coordinate function x_i as an AD-capable field.
inline phikit::ScalarField coordinate(int dim, int i) {
  return phikit::ScalarField::generic(
      dim, [i](auto x) { return x[i]; },
      [dim, i](auto x) {
        using T = typename decltype(x)::value_type;
        std::vector<T> g(dim, T(0.0));
        g[i] = T(1.0);
        return g;
      });
}

// Central-difference gradient, written independently of the library helpers.
template <class F>
Vec fd_gradient(const F& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

}  // namespace testing
