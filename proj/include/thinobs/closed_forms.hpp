#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "thinobs/errors.hpp"
#include "thinobs/jet.hpp"

namespace thinobs {

using Jet3 = Jet<3>;

// Jet3 variable slots: 0 = tangential x_1 (unused when n = 1), 1 = x_n, 2 = x_{n+1}.
inline constexpr int kTan = 0;
inline constexpr int kNor = 1;
inline constexpr int kVert = 2;

// d_n w_{1,s} = kCs * w_{0,s}.
inline constexpr double kCs = 1.0;
// Legendre function of w_{1,s} is kVModelScale * (-(s/(s+1)) y_n^{2s+2} + y_n^{2s} y_{n+1}^2).
inline constexpr double kVModelScale = 0.5;

class FracOrder {
 public:
  FracOrder(double s);  // NOLINT: implicit from double, validated
  double value() const { return s_; }
  operator double() const { return s_; }  // NOLINT

 private:
  double s_;
};

struct HalfPoint {
  std::vector<double> x_tan;  // x''
  double x_n = 0.0;
  double x_np1 = 0.0;

  HalfPoint() = default;
  HalfPoint(double xn, double xnp1) : x_n(xn), x_np1(xnp1) { validate(); }
  HalfPoint(std::vector<double> tan, double xn, double xnp1)
      : x_tan(std::move(tan)), x_n(xn), x_np1(xnp1) {
    validate();
  }
  void validate() const;
  int n() const { return static_cast<int>(x_tan.size()) + 1; }
};

// (r + x_n)^s, and r + x_n itself in the cancellation-free form.
template <class T>
T plus_part(const T& xn, const T& xp) {
  const T r = sqrt(xn * xn + xp * xp);
  if (value_of(xn) >= 0.0) return r + xn;
  return xp * xp / (r - xn);
}

template <class T>
T w0s_t(double s, const T& xn, const T& xp) {
  if (value_of(xp) == 0.0 && value_of(xn) <= 0.0) return T(0.0);
  return pow(plus_part(xn, xp), s);
}

template <class T>
T w1s_t(double s, const T& xn, const T& xp) {
  if (value_of(xp) == 0.0 && value_of(xn) <= 0.0) return T(0.0);
  const T r = sqrt(xn * xn + xp * xp);
  return pow(plus_part(xn, xp), s) * (s * r - xn) / (s * s - 1.0);
}

template <class T>
T v_model_t(double s, const T& yn, const T& yp) {
  if (value_of(yn) == 0.0) return T(0.0);
  const T a = pow(yn, 2.0 * s);
  return kVModelScale * (a * yn * yn * (-s / (s + 1.0)) + a * yp * yp);
}

double eval_w0s(FracOrder s, const HalfPoint& p);
double eval_w1s(FracOrder s, const HalfPoint& p);
double eval_v_model(FracOrder s, double y_n, double y_np1);

struct W1sGradient {
  double d_n;            // d_n w_{1,s}
  double weighted_dnp1;  // x_{n+1}^{1-2s} d_{n+1} w_{1,s}
};

// Throws DegeneratePoint on {x_{n+1} = 0, x_n <= 0}.
W1sGradient grad_w1s(FracOrder s, const HalfPoint& p);

// One-sided limit of x_{n+1}^{1-2s} d_{n+1} w_{1,s} at (x_n, 0+); defined on the whole line.
double thin_flux_w1s(FracOrder s, double x_n);

// L_s u = x^{1-2s} Delta u + (1-2s) x^{-2s} d_{n+1} u, from a jet seeded at a point with x_{n+1} = xp > 0.
double apply_Ls(const Jet3& u, double xp, double s);

// Shifted/rotated closed forms. nu lives in the (x'', x_n) plane with nu_n > 0.
class ClosedFormField {
 public:
  enum class Kind { W0S, W1S, W0S_POWER, V_MODEL, EIGENMODE };

  ClosedFormField(Kind kind, FracOrder s);
  ClosedFormField& with_tau(double tau);
  ClosedFormField& with_mode(int k);
  ClosedFormField& with_shift(std::vector<double> x0_tan, double x0_n);
  ClosedFormField& with_rotation(std::vector<double> nu);  // (nu'', nu_n)

  Kind kind() const { return kind_; }
  double s() const { return s_; }

  double operator()(const HalfPoint& p) const;
  Jet3 jet(const HalfPoint& p) const;
  template <class T>
  T eval(const T& x1, const T& xn, const T& xp) const;

 private:
  Kind kind_;
  double s_;
  double tau_ = 0.0;
  int k_ = 0;
  double shift_tan_ = 0.0;
  double shift_n_ = 0.0;
  double nu_tan_ = 0.0;
  double nu_n_ = 1.0;
  std::vector<double> mode_coeffs_;
};

struct InhomogeneityField {
  std::function<double(const HalfPoint&)> value;
  // Thin-space traces at (x', 0); empty means unavailable.
  std::function<double(const HalfPoint&)> dnp1;
  std::function<double(const HalfPoint&)> d2np1;
  std::function<double(const HalfPoint&)> lap_tan;
  std::function<double(const HalfPoint&)> lap_tan_dnp1;
};

struct ReducedInhomogeneity {
  double offset;
  double f;
};

ReducedInhomogeneity reduce_inhomogeneity(FracOrder s, const InhomogeneityField& f_tilde, const HalfPoint& p);

struct Field {
  std::function<double(const HalfPoint&)> eval;
  double domain_radius = std::numeric_limits<double>::infinity();
  double operator()(const HalfPoint& p) const { return eval(p); }
};

// c * w(x0 + lambda x); x0 on the thin space.
Field rescale_solution(const Field& w, double c, double lambda, const HalfPoint& x0);
// c * lambda^2 * f(x0 + lambda x).
Field rescale_inhomogeneity(const Field& f, double c, double lambda, const HalfPoint& x0);

}  // namespace thinobs
