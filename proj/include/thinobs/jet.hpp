#pragma once

// Second-order forward-mode jets: value, gradient and Hessian with respect
// to D seeded variables. Exact up to floating point, no step sizes.

#include <array>
#include <cmath>

namespace thinobs {

template <int D>
struct Jet {
  double v = 0.0;
  std::array<double, D> g{};
  std::array<double, D * D> H{};

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet variable(double value, int index) {
    Jet j(value);
    j.g[index] = 1.0;
    return j;
  }

  double hess(int i, int k) const { return H[i * D + k]; }
  double laplacian() const {
    double t = 0.0;
    for (int i = 0; i < D; ++i) t += H[i * D + i];
    return t;
  }

  // f(u) given f, f', f'' at u.
  Jet chain(double f0, double f1, double f2) const {
    Jet r(f0);
    for (int i = 0; i < D; ++i) r.g[i] = f1 * g[i];
    for (int i = 0; i < D; ++i)
      for (int k = 0; k < D; ++k) r.H[i * D + k] = f1 * H[i * D + k] + f2 * g[i] * g[k];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < D; ++i) g[i] += o.g[i];
    for (int i = 0; i < D * D; ++i) H[i] += o.H[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < D; ++i) g[i] -= o.g[i];
    for (int i = 0; i < D * D; ++i) H[i] -= o.H[i];
    return *this;
  }
  Jet& operator*=(double c) {
    v *= c;
    for (auto& x : g) x *= c;
    for (auto& x : H) x *= c;
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    Jet r(v * o.v);
    for (int i = 0; i < D; ++i) r.g[i] = v * o.g[i] + o.v * g[i];
    for (int i = 0; i < D; ++i)
      for (int k = 0; k < D; ++k)
        r.H[i * D + k] = v * o.H[i * D + k] + o.v * H[i * D + k] + g[i] * o.g[k] + g[k] * o.g[i];
    return *this = r;
  }
  Jet& operator/=(const Jet& o) { return *this *= o.chain(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v)); }
  Jet& operator/=(double c) { return *this *= 1.0 / c; }

  Jet operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
  }
};

template <int D> Jet<D> operator+(Jet<D> a, const Jet<D>& b) { return a += b; }
template <int D> Jet<D> operator-(Jet<D> a, const Jet<D>& b) { return a -= b; }
template <int D> Jet<D> operator*(Jet<D> a, const Jet<D>& b) { return a *= b; }
template <int D> Jet<D> operator/(Jet<D> a, const Jet<D>& b) { return a /= b; }
template <int D> Jet<D> operator+(Jet<D> a, double b) { a.v += b; return a; }
template <int D> Jet<D> operator+(double b, Jet<D> a) { a.v += b; return a; }
template <int D> Jet<D> operator-(Jet<D> a, double b) { a.v -= b; return a; }
template <int D> Jet<D> operator-(double b, const Jet<D>& a) { return -a + b; }
template <int D> Jet<D> operator*(Jet<D> a, double b) { return a *= b; }
template <int D> Jet<D> operator*(double b, Jet<D> a) { return a *= b; }
template <int D> Jet<D> operator/(Jet<D> a, double b) { return a /= b; }
template <int D> Jet<D> operator/(double b, const Jet<D>& a) {
  return a.chain(b / a.v, -b / (a.v * a.v), 2.0 * b / (a.v * a.v * a.v));
}

template <int D> Jet<D> pow(const Jet<D>& a, double p) {
  if (p == 0.0) return Jet<D>(1.0);
  const double f0 = std::pow(a.v, p);
  return a.chain(f0, p * std::pow(a.v, p - 1.0), p * (p - 1.0) * std::pow(a.v, p - 2.0));
}
template <int D> Jet<D> sqrt(const Jet<D>& a) {
  const double r = std::sqrt(a.v);
  return a.chain(r, 0.5 / r, -0.25 / (r * a.v));
}
template <int D> Jet<D> exp(const Jet<D>& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e, e);
}
template <int D> Jet<D> log(const Jet<D>& a) { return a.chain(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
template <int D> Jet<D> sin(const Jet<D>& a) { return a.chain(std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
template <int D> Jet<D> cos(const Jet<D>& a) { return a.chain(std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

// Scalar access that works for both double and Jet.
inline double value_of(double x) { return x; }
template <int D> double value_of(const Jet<D>& x) { return x.v; }

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

}  // namespace thinobs
