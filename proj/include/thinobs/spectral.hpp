#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "thinobs/closed_forms.hpp"

namespace thinobs {

struct HomogeneousMode {
  int k = 0;
  double s = 0.5;
  std::vector<double> coeffs;  // a_0..a_k of h(z)
  double eigenvalue = 0.0;     // lambda^2
  double homogeneity = 0.0;    // kappa = k + s
};

double eigenvalue(int k, FracOrder s);

// Ratio a_{m+1}/a_m of the terminating series; vanishes at m = k.
template <class T>
T recurrence_factor(int m, int k, const T& s) {
  const T num = T(m * (m + 1) - k * (k + 1));
  const T den = T(m * m + 2 * m + 1) + T(m) * s + s;
  return num / den;
}

template <class T>
std::vector<T> hypergeom_coeffs_t(int k, const T& s) {
  std::vector<T> a{T(1)};
  for (int m = 0; m < k; ++m) a.push_back(a.back() * recurrence_factor(m, k, s));
  return a;
}

std::vector<double> hypergeom_coeffs(int k, FracOrder s);
HomogeneousMode make_mode(int k, FracOrder s);

// r^{k+s} z^s h(z) with z = (1 + x_n/r)/2, using r z = (r + x_n)/2 in stable form.
template <class T>
T eval_mode_2d_t(int k, double s, const std::vector<double>& a, const T& xn, const T& xp) {
  if (value_of(xp) == 0.0 && value_of(xn) <= 0.0) return T(0.0);
  const T r = sqrt(xn * xn + xp * xp);
  const T half_plus = 0.5 * plus_part(xn, xp);  // r z
  const T z = half_plus / r;
  T h(a.back());
  for (int m = static_cast<int>(a.size()) - 2; m >= 0; --m) h = h * z + a[m];
  T out = pow(half_plus, s) * h;
  for (int i = 0; i < k; ++i) out = out * r;
  return out;
}

double eval_mode_2d(const HomogeneousMode& mode, double x_n, double x_np1);

enum class SlWeightRule { Midpoint, CellIntegrated };

// First `count` eigenvalues of sin^{2s-1}(sin^{1-2s}u')' = -lambda^2 u on (0,pi),
// weighted Neumann at 0, Dirichlet at pi. Ascending.
std::vector<double> sl_eigen_oracle(FracOrder s, int grid_size, int count,
                                    SlWeightRule rule = SlWeightRule::CellIntegrated);

// Normalized weighted inner product of modes k1, k2 on the upper unit half circle.
double mode_inner_product(int k1, int k2, FracOrder s, int nodes = 10000);

// ---- homogeneous solutions in n+1 dimensions ----

enum class BoundaryKind { Dirichlet, Neumann, MixedDN };
const char* to_string(BoundaryKind kind);

using Monomial = std::vector<int>;
using Polynomial = std::map<Monomial, double>;

Polynomial poly_laplacian(const Polynomial& p);
std::vector<Monomial> monomials_of_degree(int vars, int degree);
template <class T>
T eval_poly(const Polynomial& p, const std::vector<T>& x) {
  T out(0.0);
  for (const auto& [mono, c] : p) {
    T term(c);
    for (std::size_t i = 0; i < mono.size(); ++i)
      for (int e = 0; e < mono[i]; ++e) term = term * x[i];
    out = out + term;
  }
  return out;
}

struct BasisElement {
  Polynomial seed;  // the generating polynomial of the thin variables
  // sum over j of (vertical or radial)^{2j} * terms[j]
  std::vector<Polynomial> terms;
  int mode_m = -1;  // MixedDN: index of the 2D slit mode
};

struct HomogeneousBasis {
  BoundaryKind kind = BoundaryKind::Neumann;
  int n = 1;
  double kappa = 0.0;
  double s = 0.5;
  std::vector<BasisElement> elements;
  // Thin-variable count of each polynomial: n for Dirichlet/Neumann, n-1 for MixedDN.
  int poly_vars() const { return kind == BoundaryKind::MixedDN ? n - 1 : n; }
};

HomogeneousBasis enumerate_homogeneous(BoundaryKind kind, double kappa, int n, FracOrder s);

template <class T>
T eval_basis_element(const HomogeneousBasis& basis, const BasisElement& e, const T& x1, const T& xn, const T& xp);

// Residual of L_s applied to a basis element, scaled by r^{2 - kappa + (2s - 1)} to be scale free.
double basis_residual(const HomogeneousBasis& basis, const BasisElement& e, const HalfPoint& p);

// ---- boundary expansion fitting ----

struct WeightedSample {
  HalfPoint x;
  double value = 0.0;
  double weight = 0.0;
};

struct SampleBall {
  double radius = 0.0;
  std::vector<WeightedSample> samples;
};

// Cell-centred samples of u on B_r^+ with weights int x_{n+1}^{1-2s} over each cell.
SampleBall sample_half_ball(const std::function<double(const HalfPoint&)>& u, int n, double radius,
                            int cells_per_axis, FracOrder s);

struct BoundaryFit {
  BoundaryKind kind = BoundaryKind::MixedDN;
  std::vector<std::string> names;
  std::vector<double> coeffs;                      // from the smallest ball
  std::vector<std::vector<double>> coeffs_per_ball;
  std::vector<double> radii;
  std::vector<double> remainder;  // weighted averaged L2 norm per ball
  double decay_exponent = 0.0;    // NaN when every remainder sits at the floor
  bool at_floor = false;
};

BoundaryFit fit_boundary_expansion(const std::vector<SampleBall>& balls, BoundaryKind kind, FracOrder s, int n,
                                   double f0 = 0.0);

}  // namespace thinobs
