// Type-erased fields that can be evaluated on every scalar type in PerScalar.
//
// Catalog formulas are written once as generic lambdas taking
// std::span<const T>; the factories below instantiate them for double, the
// dual numbers and the jets, so the Hamilton-Jacobi machinery can push AD
// numbers through Hamiltonians and bi-realisations chosen at run time.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "phikit/autodiff.hpp"
#include "phikit/errors.hpp"

namespace phikit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

template <class T>
using ValueFn = std::function<T(std::span<const T>)>;
template <class T>
using VectorFn = std::function<std::vector<T>(std::span<const T>)>;
template <class T>
using FiberFn = std::function<std::vector<T>(std::span<const T>, std::span<const T>)>;

inline std::span<const double> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vec to_vec(std::span<const double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

namespace detail {

template <template <class> class Fn, class F>
PerScalar<Fn> instantiate_all(const F& f) {
  return PerScalar<Fn>{Fn<double>(f), Fn<D1>(f), Fn<D2>(f),
                       Fn<J0>(f),     Fn<J1>(f), Fn<J2>(f)};
}

template <class Fn>
const Fn& require(const Fn& fn, const char* what) {
  if (!fn) throw ConfigError(std::string(what) + " is not available for this scalar type");
  return fn;
}

}  // namespace detail

// A real function on an open subset of R^dim together with its gradient.
class ScalarField {
 public:
  ScalarField() = default;

  // `value` and `gradient` are generic callables taking std::span<const T>;
  // they are instantiated for every AD scalar type.
  template <class F, class G>
  static ScalarField generic(int dim, F value, G gradient) {
    ScalarField s;
    s.dim_ = dim;
    s.value_ = detail::instantiate_all<ValueFn>(value);
    s.gradient_ = detail::instantiate_all<VectorFn>(gradient);
    return s;
  }

  // Double-only field (Casimirs, leaf invariants).
  static ScalarField numeric(int dim, ValueFn<double> value, VectorFn<double> gradient) {
    ScalarField s;
    s.dim_ = dim;
    std::get<ValueFn<double>>(s.value_) = std::move(value);
    std::get<VectorFn<double>>(s.gradient_) = std::move(gradient);
    return s;
  }

  int dim() const { return dim_; }

  template <class T>
  T value(std::span<const T> x) const {
    return detail::require(std::get<ValueFn<T>>(value_), "scalar field value")(x);
  }
  template <class T>
  std::vector<T> gradient(std::span<const T> x) const {
    return detail::require(std::get<VectorFn<T>>(gradient_), "scalar field gradient")(x);
  }

  double operator()(const Vec& x) const { return value<double>(as_span(x)); }
  Vec grad(const Vec& x) const { return to_vec(gradient<double>(as_span(x))); }

  bool supports_ad() const { return static_cast<bool>(std::get<ValueFn<J2>>(value_)); }

 private:
  int dim_ = 0;
  PerScalar<ValueFn> value_;
  PerScalar<VectorFn> gradient_;
};

// A map (x, p) -> state, generic over scalar types.
class FiberMap {
 public:
  FiberMap() = default;

  template <class F>
  static FiberMap generic(F f) {
    FiberMap m;
    m.fn_ = detail::instantiate_all<FiberFn>(f);
    return m;
  }

  template <class T>
  std::vector<T> eval(std::span<const T> x, std::span<const T> p) const {
    return detail::require(std::get<FiberFn<T>>(fn_), "fiber map")(x, p);
  }

  Vec operator()(const Vec& x, const Vec& p) const {
    return to_vec(eval<double>(as_span(x), as_span(p)));
  }

 private:
  PerScalar<FiberFn> fn_;
};

}  // namespace phikit
