// Forward-mode dual numbers and truncated Taylor jets.
//
// The Hamilton-Jacobi recursion needs t-derivatives of compositions such as
// H(alpha(m, grad S_t(m))) and, for the stepping scheme, gradients of those
// derivatives in m.  Both layers are plain value arithmetic:
//
//   Dual<T>  carries one tangent direction (value + eps * derivative);
//   Jet<T>   carries the Taylor coefficients c0 + c1 t + c2 t^2 (mod t^3).
//
// Nesting (Jet<Dual<Dual<double>>>) gives mixed derivatives without any
// symbolic machinery.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <tuple>
#include <type_traits>
#include <utility>

namespace phikit {

template <class T>
struct Dual;
template <class T>
struct Jet;

template <class T>
struct is_ad_number : std::false_type {};
template <class T>
struct is_ad_number<Dual<T>> : std::true_type {};
template <class T>
struct is_ad_number<Jet<T>> : std::true_type {};

template <class S>
concept Arithmetic = std::is_arithmetic_v<S>;

// ---------------------------------------------------------------------------
// Dual<T>

template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit for literals
  constexpr Dual(T value, T deriv) requires(!std::is_same_v<T, double>) : v(value), d(deriv) {}
  constexpr Dual(double value, double deriv) requires std::is_same_v<T, double> : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator-(const Dual& a) { return make(-a.v, -a.d); }
  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return make(q, (a.d - q * b.d) / b.v);
  }
  template <Arithmetic S>
  friend Dual operator*(S s, const Dual& a) { return make(a.v * double(s), a.d * double(s)); }
  template <Arithmetic S>
  friend Dual operator*(const Dual& a, S s) { return s * a; }
  template <Arithmetic S>
  friend Dual operator/(const Dual& a, S s) { return make(a.v / double(s), a.d / double(s)); }
  template <Arithmetic S>
  friend Dual operator+(const Dual& a, S s) { return make(a.v + double(s), a.d); }
  template <Arithmetic S>
  friend Dual operator+(S s, const Dual& a) { return a + s; }
  template <Arithmetic S>
  friend Dual operator-(const Dual& a, S s) { return make(a.v - double(s), a.d); }
  template <Arithmetic S>
  friend Dual operator-(S s, const Dual& a) { return make(double(s) - a.v, -a.d); }
  template <Arithmetic S>
  friend Dual operator/(S s, const Dual& a) { return Dual(double(s)) / a; }

  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.v);
    return make(e, e * a.d);
  }
  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return make(sin(a.v), cos(a.v) * a.d);
  }
  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return make(cos(a.v), -(sin(a.v) * a.d));
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return make(log(a.v), a.d / a.v);
  }

 private:
  static Dual make(T value, T deriv) {
    Dual r;
    r.v = value;
    r.d = deriv;
    return r;
  }
};

// ---------------------------------------------------------------------------
// Jet<T>: truncated Taylor polynomial in t, coefficients c[0..kJetSize-1].

inline constexpr std::size_t kJetSize = 3;

template <class T>
struct Jet {
  std::array<T, kJetSize> c{};

  constexpr Jet() = default;
  constexpr Jet(double value) { c[0] = T(value); }  // NOLINT: implicit for literals
  explicit constexpr Jet(const T& value) requires(!std::is_same_v<T, double>) { c[0] = value; }

  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k < kJetSize; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k < kJetSize; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { *this = *this * o; return *this; }
  Jet& operator/=(const Jet& o) { *this = *this / o; return *this; }

  friend Jet operator-(Jet a) {
    for (auto& x : a.c) x = -x;
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t k = 0; k < kJetSize; ++k) {
      T s = a.c[0] * b.c[k];
      for (std::size_t j = 1; j <= k; ++j) s += a.c[j] * b.c[k - j];
      r.c[k] = s;
    }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    for (std::size_t k = 0; k < kJetSize; ++k) {
      T s = a.c[k];
      for (std::size_t j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
      q.c[k] = s / b.c[0];
    }
    return q;
  }
  template <Arithmetic S>
  friend Jet operator*(S s, Jet a) {
    for (auto& x : a.c) x = x * double(s);
    return a;
  }
  template <Arithmetic S>
  friend Jet operator*(const Jet& a, S s) { return s * a; }
  template <Arithmetic S>
  friend Jet operator/(Jet a, S s) {
    for (auto& x : a.c) x = x / double(s);
    return a;
  }
  template <Arithmetic S>
  friend Jet operator+(Jet a, S s) { a.c[0] = a.c[0] + double(s); return a; }
  template <Arithmetic S>
  friend Jet operator+(S s, Jet a) { return a + s; }
  template <Arithmetic S>
  friend Jet operator-(Jet a, S s) { a.c[0] = a.c[0] - double(s); return a; }
  template <Arithmetic S>
  friend Jet operator-(S s, const Jet& a) { return Jet(double(s)) - a; }
  template <Arithmetic S>
  friend Jet operator/(S s, const Jet& a) { return Jet(double(s)) / a; }

  // e' = a' e  =>  k e_k = sum_{j=1..k} j a_j e_{k-j}
  friend Jet exp(const Jet& a) {
    using std::exp;
    Jet e;
    e.c[0] = exp(a.c[0]);
    for (std::size_t k = 1; k < kJetSize; ++k) {
      T s = a.c[1] * e.c[k - 1];
      for (std::size_t j = 2; j <= k; ++j) s += double(j) * a.c[j] * e.c[k - j];
      e.c[k] = s / double(k);
    }
    return e;
  }
  friend Jet sin(const Jet& a) { return sincos(a).first; }
  friend Jet cos(const Jet& a) { return sincos(a).second; }
  // l' = a' / a
  friend Jet log(const Jet& a) {
    using std::log;
    Jet l;
    l.c[0] = log(a.c[0]);
    for (std::size_t k = 1; k < kJetSize; ++k) {
      T s = double(k) * a.c[k];
      for (std::size_t j = 1; j < k; ++j) s -= double(j) * l.c[j] * a.c[k - j];
      l.c[k] = s / (double(k) * a.c[0]);
    }
    return l;
  }

 private:
  static std::pair<Jet, Jet> sincos(const Jet& a) {
    using std::cos;
    using std::sin;
    Jet s, co;
    s.c[0] = sin(a.c[0]);
    co.c[0] = cos(a.c[0]);
    for (std::size_t k = 1; k < kJetSize; ++k) {
      T ss = double(1) * a.c[1] * co.c[k - 1];
      T cc = -(double(1) * a.c[1] * s.c[k - 1]);
      for (std::size_t j = 2; j <= k; ++j) {
        ss += double(j) * a.c[j] * co.c[k - j];
        cc -= double(j) * a.c[j] * s.c[k - j];
      }
      s.c[k] = ss / double(k);
      co.c[k] = cc / double(k);
    }
    return {s, co};
  }
};

// The closed set of scalar types every generic field is instantiated for.
// Order matters only for tuple indexing.
using D1 = Dual<double>;
using D2 = Dual<D1>;
using J0 = Jet<double>;
using J1 = Jet<D1>;
using J2 = Jet<D2>;

template <template <class> class F>
using PerScalar = std::tuple<F<double>, F<D1>, F<D2>, F<J0>, F<J1>, F<J2>>;

// Value of an arbitrary AD number stripped down to its double part.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) { return primal(x.v); }
template <class T>
double primal(const Jet<T>& x) { return primal(x.c[0]); }

}  // namespace phikit
