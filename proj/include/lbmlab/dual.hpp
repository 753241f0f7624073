#pragma once

#include <type_traits>

// Forward-mode dual number: value + eps * derivative, eps^2 = 0.
// Lets the templated equilibrium functions produce exact Jacobians.

namespace lbmlab {

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(T value) : v(value), d() {}
  Dual(T value, T deriv) : v(value), d(deriv) {}
  explicit Dual(double value) requires(!std::is_same_v<T, double>) : v(value), d() {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
  friend Dual operator/(const Dual& a, const Dual& b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
  friend Dual operator*(double s, const Dual& a) { return {T(s) * a.v, T(s) * a.d}; }
  friend Dual operator*(const Dual& a, double s) { return {a.v * T(s), a.d * T(s)}; }
  friend Dual operator+(double s, const Dual& a) { return {T(s) + a.v, a.d}; }
  friend Dual operator+(const Dual& a, double s) { return {a.v + T(s), a.d}; }
  friend Dual operator-(double s, const Dual& a) { return {T(s) - a.v, -a.d}; }
  friend Dual operator-(const Dual& a, double s) { return {a.v - T(s), a.d}; }
  friend Dual operator/(const Dual& a, double s) { return {a.v / T(s), a.d / T(s)}; }
  friend Dual operator/(double s, const Dual& a) { return Dual(T(s)) / a; }
  Dual& operator+=(const Dual& b) { return *this = *this + b; }
};

}  // namespace lbmlab
