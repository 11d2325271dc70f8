#pragma once

#include <array>
#include <vector>

#include "thinobs/closed_forms.hpp"
#include "thinobs/grushin.hpp"
#include "thinobs/solver.hpp"

namespace thinobs {

// Strict raises MonotonicityViolated; Report keeps going with |d_n w| and |weighted d_{n+1} w|.
enum class MonotonicityPolicy { Strict, Report };

struct TransformOptions {
  MonotonicityPolicy policy = MonotonicityPolicy::Strict;
  double clamp = 1e-12;  // negativity tolerated (and clamped) before rooting
};

struct TransformPoint {
  std::size_t node;
  HalfPoint x;
  double y_n, y_np1;  // y'' = x''
  double d_n;         // d_n w
  double weighted_dnp1;  // x_{n+1}^{1-2s} d_{n+1} w
};

struct TransformResult {
  std::vector<TransformPoint> points;  // one per grid node, in node order
  std::vector<std::size_t> violations;
};

TransformResult forward_transform(const DiscreteSolution& sol, const TransformOptions& opts = {});

// Quarter grid over (y'', y_n, y_{n+1}); y'' follows the solution grid's x'' nodes.
struct LegendreField {
  double s = 0.5;
  int n = 1;
  std::vector<double> y_tan{0.0};
  double extent = 0.9;  // y_n, y_{n+1} in [0, extent]
  int count = 33;       // nodes per normal axis
  std::vector<double> v, x_n, x_np1;

  double spacing() const { return extent / (count - 1); }
  std::size_t index(int a, int i, int j) const {
    return (static_cast<std::size_t>(j) * count + i) * y_tan.size() + a;
  }
  std::size_t size() const { return y_tan.size() * count * count; }
};

struct ResampleOptions {
  double extent = 0.9;
  int count = 33;
};

// v = w - x_n y_n^{2s} + x_{n+1}^{2s} y_{n+1}^{2(1-s)} / (2(1-s)), moved to the quarter grid by
// inverting the bilinear image of every grid cell. ResampleGap if a quarter-grid node is not reached.
LegendreField legendre_function(const DiscreteSolution& sol, const ResampleOptions& ropts = {},
                                const TransformOptions& topts = {});

// Quarter-grid field filled from the closed forms v_model and x(y) = ((y_n^2 - y_{n+1}^2)/2, y_n y_{n+1}).
LegendreField model_legendre_field(FracOrder s, int n = 1, const ResampleOptions& ropts = {},
                                   std::vector<double> y_tan = {0.0});

// Value of the nonlinear functional and its pieces at one point.
struct FValue {
  double F = 0.0;
  double J = 0.0;
  double x_n = 0.0;
  double x_np1 = 0.0;
};

// Derivatives of v at a point; slot order follows Jet3 (y'', y_n, y_{n+1}).
struct VDerivs {
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<double, 9> H{};
};

FValue eval_F(const VDerivs& d, double y1, double y_n, double y_np1, double s, int n, const PointFn& f = {});
FValue eval_F(const JetFn& v, double y1, double y_n, double y_np1, double s, int n, const PointFn& f = {});

// Grid mode: fourth-order centered differences; NaN where the stencil would reach within two cells of an axis
// or leaves the grid.
std::vector<double> eval_F_grid(const LegendreField& field, const PointFn& f = {});

// y_n^{2s}(a_n y_n^2 + a_np1 y_{n+1}^2); defaults give the calibrated model.
JetFn v_model_jet(FracOrder s, double a_n, double a_np1);
JetFn v_model_jet(FracOrder s);

// Smooth bump (1 - |y - c|^2 / rho^2)^4_+ in (y_n, y_{n+1}), times an optional tangential profile.
JetFn bump_jet(double c_n, double c_np1, double rho, double c_tan = 0.0, double tan_rho = 0.0);

struct LinearizationResult {
  std::vector<double> t;
  std::vector<double> c;       // fitted constant per t
  std::vector<double> defect;  // ||D(t) - c Delta_{G,s} h|| / ||Delta_{G,s} h||
  double slope = 0.0;          // log-log slope of defect against t
  bool degenerate = false;     // Delta_{G,s} h vanishes on the sample
};

LinearizationResult linearization_check(const JetFn& v0, const JetFn& h, const std::vector<double>& t_list,
                                        const std::vector<QuarterPoint>& samples, double s, int n);

struct InverseAsymptotics {
  double y_tan = 0.0;
  double g = 0.0, a0 = 0.0, a1 = 0.0;
  double a1_from_xnp1 = 0.0;  // from x_{n+1}^{2s} ~ 2 a1 (y_n y_{n+1})^{2s}
  std::vector<double> radii, residuals;
  double residual_exponent = 0.0;
};

struct AsymptoticsOptions {
  double rho = 0.4;
  int levels = 4;
};

std::vector<InverseAsymptotics> inverse_asymptotics(const LegendreField& field, const AsymptoticsOptions& opts = {});

struct TransformDiag {
  double jac_min = 0.0;
  double jac_max = 0.0;
  bool injectivity_flag = true;
  std::size_t samples = 0;
  std::vector<std::size_t> violations;
};

struct JacobianOptions {
  TransformOptions transform;
  double cone = 0.25;           // x_{n+1} >= cone * |x - x0|
  double separation = 1e-6;     // |dy| < separation |dx| flags a collision
  std::size_t max_pairs_points = 2000;
};

// Rescaled determinant lambda * det DT(x0 + lambda x) over annuli lambda/2 <= |x - x0| <= lambda.
TransformDiag jacobian_diag(const DiscreteSolution& sol, const HalfPoint& x0, const std::vector<double>& lambdas,
                            const JacobianOptions& opts = {});

// eta(y_n, y_{n+1}): 1 for rho <= 1/4, 0 for rho >= 1/2, C-infinity in between.
double diffeo_cutoff(double y_n, double y_np1);

// Phi_a(y): RK4 flow of phi' = a ((3/4)^2 - |phi|^2)^3_+ eta(y_n, y_{n+1}) over t in [0, 1].
QuarterPoint diffeo_flow(const std::vector<double>& a, const QuarterPoint& y, int steps = 64);

}  // namespace thinobs
