#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> carries two
// independent infinitesimals, which is how second derivatives of metric
// components are obtained without finite differences.

#include <cmath>
#include <concepts>
#include <ostream>
#include <type_traits>

#include <Eigen/Core>

namespace lorentz {

template <class T>
struct Dual {
  T val{};
  T eps{};

  constexpr Dual() = default;
  constexpr Dual(const T& v, const T& e) : val(v), eps(e) {}
  constexpr Dual(const T& v) : val(v), eps(T(0)) {}  // NOLINT: implicit lift
  template <class U>
    requires(std::is_arithmetic_v<U> && !std::is_same_v<T, U>)
  constexpr Dual(U v) : val(T(v)), eps(T(0)) {}  // NOLINT

  Dual& operator+=(const Dual& o) { val += o.val; eps += o.eps; return *this; }
  Dual& operator-=(const Dual& o) { val -= o.val; eps -= o.eps; return *this; }
  Dual& operator*=(const Dual& o) {
    eps = eps * o.val + val * o.eps;
    val *= o.val;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    eps = (eps * o.val - val * o.eps) / (o.val * o.val);
    val /= o.val;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(const Dual& a) { return {-a.val, -a.eps}; }
  friend Dual operator+(const Dual& a) { return a; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.val < b.val; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.val > b.val; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.val <= b.val; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.val >= b.val; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.val == b.val; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.val != b.val; }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    T s = sqrt(a.val);
    return {s, a.eps / (T(2) * s)};
  }
  friend Dual sin(const Dual& a) {
    using std::cos;
    using std::sin;
    return {sin(a.val), cos(a.val) * a.eps};
  }
  friend Dual cos(const Dual& a) {
    using std::cos;
    using std::sin;
    return {cos(a.val), -sin(a.val) * a.eps};
  }
  friend Dual tan(const Dual& a) {
    using std::tan;
    T t = tan(a.val);
    return {t, (T(1) + t * t) * a.eps};
  }
  friend Dual sinh(const Dual& a) {
    using std::cosh;
    using std::sinh;
    return {sinh(a.val), cosh(a.val) * a.eps};
  }
  friend Dual cosh(const Dual& a) {
    using std::cosh;
    using std::sinh;
    return {cosh(a.val), sinh(a.val) * a.eps};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.val);
    return {e, e * a.eps};
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return {log(a.val), a.eps / a.val};
  }
  friend Dual atan(const Dual& a) {
    using std::atan;
    return {atan(a.val), a.eps / (T(1) + a.val * a.val)};
  }
  friend Dual pow(const Dual& a, double p) {
    using std::pow;
    return {pow(a.val, p), T(p) * pow(a.val, p - 1.0) * a.eps};
  }
  friend Dual abs(const Dual& a) { return a.val < T(0) ? -a : a; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& a) {
    return os << '(' << a.val << " + " << a.eps << "e)";
  }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Innermost real part.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.val);
}

/// Integer power by repeated multiplication; exact for dual arithmetic.
template <class S>
S ipow(const S& x, int k) {
  if (k < 0) return S(1) / ipow(x, -k);
  S r(1);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

}  // namespace lorentz

namespace Eigen {

template <class T>
struct NumTraits<lorentz::Dual<T>> : NumTraits<double> {
  using Real = lorentz::Dual<T>;
  using NonInteger = lorentz::Dual<T>;
  using Nested = lorentz::Dual<T>;
  using Literal = lorentz::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(NumTraits<double>::highest()); }
  static inline Real lowest() { return Real(NumTraits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<lorentz::Dual<T>, double, BinaryOp> {
  using ReturnType = lorentz::Dual<T>;
};
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<double, lorentz::Dual<T>, BinaryOp> {
  using ReturnType = lorentz::Dual<T>;
};

}  // namespace Eigen
