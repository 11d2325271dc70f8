#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "thinobs/closed_forms.hpp"
#include "thinobs/solver.hpp"

namespace thinobs {

// n = 1: polyline of crossing abscissae; n = 2: one point per x_1 column.
std::vector<HalfPoint> extract_free_boundary(const DiscreteSolution& sol);

struct FreeBoundaryFit {
  HalfPoint x0;
  std::vector<double> nu;  // (nu'', nu_n)
  double c = 0.0;
  std::vector<double> window_radii;
  std::vector<double> residuals;  // relative residual per annulus
  double remainder_exponent = 0.0;
};

struct FitOptions {
  double rho_max = 0.5;
  int levels = 5;
};

FreeBoundaryFit fit_expansion(const DiscreteSolution& sol, const HalfPoint& x0, const FitOptions& opts = {});

// Free boundary Gamma = {x_n = g(x''), x_{n+1} = 0}; for n = 1 only g(0) is used.
struct ThinGraph {
  std::function<double(double)> g = [](double) { return 0.0; };
  std::function<double(double)> dg = [](double) { return 0.0; };
  std::function<double(double)> d2g = [](double) { return 0.0; };
};

// Foot point on Gamma (t = x_1 coordinate) and distance; projected Newton, three steps.
struct GraphDistance {
  double t;
  double dist;
};
GraphDistance distance_to_graph(const ThinGraph& g, int n, const HalfPoint& p);

struct WhitneyCube {
  std::array<double, 3> center{};  // (x_1, x_n, x_{n+1})
  double side = 0.0;
  int level = 0;
  double diam = 0.0;
  double dist = 0.0;  // dist(Q, Gamma)
  std::array<double, 3> foot{};
  std::array<double, 2> nu{0.0, 1.0};  // in-plane normal (nu_1, nu_n)
};

class WhitneyCover {
 public:
  WhitneyCover() = default;
  WhitneyCover(const ThinGraph& g, int n, int max_level);

  int n() const { return n_; }
  const std::vector<WhitneyCube>& cubes() const { return cubes_; }
  double bump_radius(const WhitneyCube& q) const;
  // Cube indices whose (mirror paired) bump is nonzero at p.
  std::vector<int> supporting(const HalfPoint& p) const;
  // psi_j(p) as jets; eta_j = psi_j / sum psi.
  Jet3 bump(int j, const HalfPoint& p) const;
  std::vector<std::pair<int, Jet3>> partition(const HalfPoint& p) const;
  bool covers(const HalfPoint& p) const { return !supporting(p).empty(); }

 private:
  int n_ = 1;
  int max_level_ = 0;
  std::vector<WhitneyCube> cubes_;
  std::vector<std::unordered_map<std::uint64_t, int>> by_level_;
  std::uint64_t key(int l, const std::array<long, 3>& c) const;
  void lookup(const std::array<double, 3>& x, std::vector<int>& out) const;
};

enum class BarrierSign { Lower, Upper };

struct BarrierOptions {
  double alpha = 1.0;          // Hoelder exponent of grad'' g
  double roughness_limit = 1.0;
  int max_level = 7;
};

class BarrierField {
 public:
  BarrierField(ThinGraph g, int n, FracOrder s, double tau, BarrierSign sign, const BarrierOptions& opts);
  double s() const { return s_; }
  double tau() const { return tau_; }
  int n() const { return cover_.n(); }
  BarrierSign sign() const { return sign_; }
  const WhitneyCover& cover() const { return cover_; }
  const ThinGraph& graph() const { return g_; }

  Jet3 jet(const HalfPoint& p) const;
  double operator()(const HalfPoint& p) const { return jet(p).v; }
  double Ls(const HalfPoint& p) const;

 private:
  ThinGraph g_;
  double s_, tau_;
  BarrierSign sign_;
  WhitneyCover cover_;
};

BarrierField build_barrier(const ThinGraph& g, int n, FracOrder s, double tau, BarrierSign sign,
                           const BarrierOptions& opts = {});

// Lower: min over samples of L_s h / (x_{n+1}^{1-2s} dist^{-2+s+s tau}); Upper: the max.
double subsolution_check(const BarrierField& b, const std::vector<HalfPoint>& points);

// Seeded samples in B_radius^+ with min_dist <= dist(x, Gamma) <= max_dist, covered by the Whitney cover.
std::vector<HalfPoint> barrier_samples(const BarrierField& b, int count, std::uint64_t seed, double radius,
                                       double min_dist, double max_dist);

// min over covered samples of h / (dist_G^s (dist_L / dist_G)^{2s}).
double barrier_nondegeneracy(const BarrierField& b, const std::vector<HalfPoint>& points);

struct DiagnosticBox {
  double half_width = 0.5;  // |x''|, |x_n - center| <= half_width
  double height = 0.25;     // 0 < x_{n+1} <= height
};

double nondegeneracy_check(const DiscreteSolution& sol, const std::vector<HalfPoint>& gamma,
                           const DiagnosticBox& box = {});

struct RatioBounds {
  double inf;
  double sup;
};

RatioBounds harnack_ratio(const DiscreteSolution& u1, const DiscreteSolution& u2, const DiagnosticBox& box = {},
                          double floor = 1e-12);

}  // namespace thinobs
