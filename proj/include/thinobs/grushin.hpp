#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "thinobs/closed_forms.hpp"

namespace thinobs {

struct QuarterPoint {
  std::vector<double> y_tan;  // y''
  double y_n = 0.0;
  double y_np1 = 0.0;

  QuarterPoint() = default;
  QuarterPoint(double yn, double ynp1) : y_n(yn), y_np1(ynp1) { validate(); }
  QuarterPoint(std::vector<double> tan, double yn, double ynp1) : y_tan(std::move(tan)), y_n(yn), y_np1(ynp1) {
    validate();
  }
  void validate() const;
};

// delta_lambda(y) = (lambda^2 y'', lambda y_n, lambda y_{n+1}).
QuarterPoint dilate(const QuarterPoint& y, double lambda);

// |dy_n| + |dy_{n+1}| + |dy''| / (|p_n| + |p_{n+1}| + |q_n| + |q_{n+1}| + |dy''|^{1/2}); zero when p == q.
double quasi_metric(const QuarterPoint& p, const QuarterPoint& q);

// Max of d(p,r) / (d(p,q) + d(q,r)) over seeded random triples in [-1,1]^{n-1} x [0,1]^2.
double quasi_triangle_constant(int n, int triples, std::uint64_t seed);

// Polynomial in (y'', y_n, y_{n+1}) with Grushin degree sum 2 beta'' + beta_n + beta_{n+1}.
class GrushinPolynomial {
 public:
  using Index = std::vector<int>;  // length n + 1

  explicit GrushinPolynomial(int n) : n_(n) {}
  int n() const { return n_; }
  void set(const Index& beta, double b);
  const std::map<Index, double>& terms() const { return terms_; }
  int degree(const Index& beta) const;
  bool in_Pk(int k) const;
  bool in_Pk_hom(int k) const;
  double operator()(const QuarterPoint& y) const;

  // All multi-indices with Grushin degree <= k (hom: == k).
  static std::vector<Index> basis(int n, int k, bool homogeneous);

 private:
  int n_;
  std::map<Index, double> terms_;
};

enum class DiffMode { Analytic, FiniteDifference };

// Jet3 seeded at (y_1, y_n, y_{n+1}); the y_1 slot is inert for n = 1.
using JetFn = std::function<Jet3(const Jet3& a, const Jet3& b, const Jet3& c)>;
using ScalarFn3 = std::function<double(double a, double b, double c)>;

// (y_n y_{n+1})^{1-2s} [(y_n^2 + y_{n+1}^2) Delta'' u + d_nn u + d_pp u] + lower-order weight terms.
double delta_Gs(const Jet3& u, double y_n, double y_np1, double s);
double delta_Gs(const JetFn& u, double y1, double y_n, double y_np1, double s);
// Fourth-order centered differences with spacing `step`; AxisSingularity within 2 steps of an axis.
double delta_Gs_fd(const ScalarFn3& u, double y1, double y_n, double y_np1, double s, double step, int n = 1);

struct OpeningDefect {
  double max_abs = 0.0;
  double max_rel = 0.0;  // |lhs - rhs| / max(1, |lhs|, |rhs|)
};

// Delta_{G,s}(u o psi)(y) against (y_n^2 + y_{n+1}^2)(L_s u)(psi(y)), psi(y) = (y'', (y_n^2 - y_{n+1}^2)/2, y_n y_{n+1}).
// u is a jet function of (x_1, x_n, x_{n+1}).
OpeningDefect open_domain_check(const JetFn& u, const std::vector<QuarterPoint>& samples, double s,
                                DiffMode mode = DiffMode::Analytic, double step = 1e-3);

// Samples on quasi-metric balls around a point of P = {y_n = y_{n+1} = 0}.
struct GrushinSample {
  QuarterPoint y;
  double weight;  // (y_n y_{n+1})^{1-2s} times cell volume
  double value;
};

std::vector<GrushinSample> sample_grushin_ball(const std::function<double(const QuarterPoint&)>& v,
                                               const QuarterPoint& center, double radius, double s,
                                               int cells_per_axis = 24);

struct EigenpolyFit {
  std::vector<double> a_tan;  // a_i, i < n
  double a0 = 0.0, a_n = 0.0, a_np1 = 0.0;
  std::vector<double> radii;
  std::vector<double> remainder;  // weighted averaged L2 norm per ball
  double decay_slope = 0.0;
  double harmonicity_defect = 0.0;  // (1+s) a_n + (1-s) a_{n+1}
};

// Template y_n^{2s}(a0 + sum a_i (y_i - c_i) + a_n y_n^2 + a_{n+1} y_{n+1}^2), fitted per ball;
// coefficients reported from the smallest ball.
EigenpolyFit fit_grushin_eigenpoly(const std::function<double(const QuarterPoint&)>& v, const QuarterPoint& center,
                                   const std::vector<double>& radii, double s, int n, int cells_per_axis = 24);

struct XYOptions {
  double alpha = 0.5;
  double epsilon = 0.25;
  double collar = 0.25;           // fit window in (y_n, y_{n+1})
  int collar_cells = 16;
  std::vector<double> tan_grid;   // y'' values for n = 2; ignored for n = 1
  int pairs = 10000;
  std::uint64_t seed = 1;
  double boundary_tol = 1e-10;
};

struct XYDecomposition {
  std::vector<double> y_tan;  // P-grid
  std::vector<double> c0, a0, a1;
  std::vector<QuarterPoint> sample_points;
  std::vector<double> C0;  // y_n^{-2s} r^{-(2+2 alpha - eps)} (v - leading), r = y_n + y_{n+1}
  double seminorm_dc0 = 0.0;
  double seminorm_a0 = 0.0;
  double seminorm_a1 = 0.0;
  double seminorm_C0 = 0.0;
  double max_C0 = 0.0;
};

XYDecomposition xy_decompose(const std::function<double(const QuarterPoint&)>& v, double s, int n,
                             const XYOptions& opts = {});

struct YDecomposition {
  std::vector<double> y_tan;
  std::vector<double> f0;
  double max_f1 = 0.0;  // sup of |f / (y_n y_{n+1}^{1-2s}) - f0(y'')| over the collar
};

YDecomposition y_decompose(const std::function<double(const QuarterPoint&)>& f, double s, int n,
                           const XYOptions& opts = {});

}  // namespace thinobs
