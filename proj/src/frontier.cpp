#include "thinobs/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace thinobs {

std::vector<HalfPoint> extract_free_boundary(const DiscreteSolution& sol) {
  const WeightedGrid& g = sol.grid;
  const int na = g.count_tan(), ni = g.count_nor();
  std::vector<HalfPoint> out;
  bool any_contact = false, any_free = false;
  const int a0 = g.n == 2 ? 1 : 0, a1 = g.n == 2 ? na - 1 : 1;
  for (int a = a0; a < a1; ++a) {
    for (int i = 1; i + 1 < ni; ++i) {
      const bool c = sol.contact_mask[g.index(a, i, 0)] != 0;
      (c ? any_contact : any_free) = true;
      if (i + 2 >= ni) continue;
      const bool c2 = sol.contact_mask[g.index(a, i + 1, 0)] != 0;
      if (c == c2) continue;
      // the mask jumps between nodes i and i+1; its 1/2 level sits at the cell midpoint
      HalfPoint p = g.point(a, i, 0);
      p.x_n += 0.5 * g.h;
      out.push_back(p);
    }
  }
  if (!any_contact || !any_free || out.empty())
    throw Error(ErrorCode::EmptyFreeBoundary, "contact mask is constant on the thin space");
  return out;
}

namespace {

double log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = m * sxx - sx * sx;
  return den > 0 ? (m * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

struct FitNode {
  double q1, qn, xp, w, dist;
};

}  // namespace

FreeBoundaryFit fit_expansion(const DiscreteSolution& sol, const HalfPoint& x0, const FitOptions& opts) {
  const WeightedGrid& g = sol.grid;
  const double s = g.s;
  const double x01 = x0.x_tan.empty() ? 0.0 : x0.x_tan[0];
  std::vector<FitNode> nodes;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const HalfPoint p = g.point(idx);
    const double d1 = (p.x_tan.empty() ? 0.0 : p.x_tan[0]) - x01;
    const double dn = p.x_n - x0.x_n;
    const double r = std::sqrt(d1 * d1 + dn * dn + p.x_np1 * p.x_np1);
    if (r > opts.rho_max || r < opts.rho_max * std::ldexp(1.0, -opts.levels)) continue;
    nodes.push_back({d1, dn, p.x_np1, sol.values[idx], r});
  }
  if (nodes.size() < 4) throw Error(ErrorCode::DegenerateFit, "too few grid nodes in the fitting window");

  auto model = [s](const FitNode& nd, double nt, double nn) { return w1s_t<double>(s, nd.q1 * nt + nd.qn * nn, nd.xp); };
  auto fit_c = [&](double theta, double& c, double& rss) {
    const double nt = std::sin(theta), nn = std::cos(theta);
    double mm = 0, wm = 0, ww = 0;
    for (const auto& nd : nodes) {
      const double m = model(nd, nt, nn);
      mm += m * m;
      wm += nd.w * m;
      ww += nd.w * nd.w;
    }
    if (!(mm > 0)) throw Error(ErrorCode::DegenerateFit, "model vanishes on the fitting window");
    c = wm / mm;
    rss = ww - wm * wm / mm;
  };

  double theta = 0.0, c = 0.0, rss = 0.0;
  if (g.n == 2) {
    // coarse scan, then golden section around the best angle
    const double deg = M_PI / 180.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = -60; k <= 60; k += 2) {
      double ck, rk;
      fit_c(k * deg, ck, rk);
      if (rk < best) {
        best = rk;
        theta = k * deg;
      }
    }
    double lo = theta - 2 * deg, hi = theta + 2 * deg;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1, f2, tmp;
    fit_c(x1, tmp, f1);
    fit_c(x2, tmp, f2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        fit_c(x1, tmp, f1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        fit_c(x2, tmp, f2);
      }
    }
    theta = 0.5 * (lo + hi);
  }
  fit_c(theta, c, rss);

  FreeBoundaryFit fit;
  fit.x0 = x0;
  fit.c = c;
  fit.nu = g.n == 2 ? std::vector<double>{std::sin(theta), std::cos(theta)} : std::vector<double>{1.0};
  const double nt = std::sin(theta), nn = std::cos(theta);
  std::vector<double> xs, ys;
  for (int l = 0; l < opts.levels; ++l) {
    const double rho = opts.rho_max * std::ldexp(1.0, -l);
    double rr = 0.0, ww = 0.0;
    int count = 0;
    for (const auto& nd : nodes) {
      if (nd.dist > rho || nd.dist < 0.5 * rho) continue;
      const double e = nd.w - c * model(nd, nt, nn);
      rr += e * e;
      ww += nd.w * nd.w;
      ++count;
    }
    if (count == 0) continue;
    fit.window_radii.push_back(rho);
    fit.residuals.push_back(ww > 0 ? std::sqrt(rr / ww) : 0.0);
    const double abs_rms = std::sqrt(rr / count);
    if (abs_rms > 0) {
      xs.push_back(rho);
      ys.push_back(abs_rms);
    }
  }
  // an exact fit leaves no measurable remainder
  fit.remainder_exponent = xs.size() >= 2 ? log_slope(xs, ys) : std::numeric_limits<double>::infinity();
  return fit;
}

GraphDistance distance_to_graph(const ThinGraph& g, int n, const HalfPoint& p) {
  if (n == 1) {
    const double dn = p.x_n - g.g(0.0);
    return {0.0, std::sqrt(dn * dn + p.x_np1 * p.x_np1)};
  }
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  double t = x1;
  for (int it = 0; it < 3; ++it) {
    const double gv = g.g(t), d1 = g.dg(t), d2 = g.d2g(t);
    const double F = (t - x1) + (gv - p.x_n) * d1;
    const double dF = 1.0 + d1 * d1 + (gv - p.x_n) * d2;
    if (dF <= 0) break;
    t -= F / dF;
  }
  const double dn = g.g(t) - p.x_n, d1 = t - x1;
  return {t, std::sqrt(d1 * d1 + dn * dn + p.x_np1 * p.x_np1)};
}

// ---------------- Whitney cover ----------------

namespace {

constexpr double kBumpFactor = 0.6;  // bump radius in units of side * sqrt(d)

double box_point_dist(const std::array<double, 3>& lo, double side, const std::array<double, 3>& q, int d0) {
  double t = 0.0;
  for (int k = d0; k < 3; ++k) {
    const double a = lo[k], b = lo[k] + side;
    const double e = q[k] < a ? a - q[k] : (q[k] > b ? q[k] - b : 0.0);
    t += e * e;
  }
  return std::sqrt(t);
}

}  // namespace

std::uint64_t WhitneyCover::key(int l, const std::array<long, 3>& c) const {
  (void)l;
  const std::uint64_t off = 1u << 20;
  return ((static_cast<std::uint64_t>(c[0] + off)) << 42) ^ ((static_cast<std::uint64_t>(c[1] + off)) << 21) ^
         static_cast<std::uint64_t>(c[2] + off);
}

WhitneyCover::WhitneyCover(const ThinGraph& g, int n, int max_level) : n_(n), max_level_(max_level) {
  if (n != 1 && n != 2) throw Error(ErrorCode::InvalidArgument, "Whitney cover supports n in {1, 2}");
  const int d0 = n == 2 ? 0 : 1;  // first active coordinate
  const int dim = 3 - d0;
  // Gamma samples; the curve for n = 2 is resolved far below the finest cube.
  std::vector<std::array<double, 3>> gamma;
  if (n == 1) {
    gamma.push_back({0.0, g.g(0.0), 0.0});
  } else {
    const double step = std::ldexp(1.0, -(max_level + 4));
    for (double t = -1.5; t <= 1.5 + 1e-12; t += step) gamma.push_back({t, g.g(t), 0.0});
  }
  auto dist_box = [&](const std::array<double, 3>& lo, double side) {
    if (n == 1) return box_point_dist(lo, side, gamma[0], d0);
    // gamma is sorted in x_1: walk outward from the box center until the x_1 gap alone exceeds the best distance
    const double mid = lo[0] + 0.5 * side;
    auto it = std::lower_bound(gamma.begin(), gamma.end(), mid,
                               [](const std::array<double, 3>& q, double v) { return q[0] < v; });
    const long start = std::min<long>(it - gamma.begin(), static_cast<long>(gamma.size()) - 1);
    double best = std::numeric_limits<double>::infinity();
    for (long k = start; k >= 0; --k) {
      if (lo[0] - gamma[k][0] > best) break;
      best = std::min(best, box_point_dist(lo, side, gamma[k], d0));
    }
    for (long k = start + 1; k < static_cast<long>(gamma.size()); ++k) {
      if (gamma[k][0] - lo[0] - side > best) break;
      best = std::min(best, box_point_dist(lo, side, gamma[k], d0));
    }
    return best;
  };

  struct Pending {
    std::array<double, 3> lo;
    int level;
  };
  std::vector<Pending> stack;
  // roots: unit cubes of [-1,1]^n x [0,1]
  for (int a = 0; a < (n == 2 ? 2 : 1); ++a)
    for (int i = 0; i < 2; ++i) stack.push_back({{n == 2 ? -1.0 + a : 0.0, -1.0 + i, 0.0}, 0});
  by_level_.resize(max_level + 1);
  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    const double side = std::ldexp(1.0, -cur.level);
    const double diam = side * std::sqrt(static_cast<double>(dim));
    const double dist = dist_box(cur.lo, side);
    if (diam <= dist) {
      WhitneyCube q;
      q.side = side;
      q.level = cur.level;
      q.diam = diam;
      q.dist = dist;
      for (int k = 0; k < 3; ++k) q.center[k] = cur.lo[k] + 0.5 * side;
      if (n == 1) q.center[0] = 0.0;
      const HalfPoint cp = n == 2 ? HalfPoint({q.center[0]}, q.center[1], q.center[2]) : HalfPoint(q.center[1], q.center[2]);
      const GraphDistance gd = distance_to_graph(g, n, cp);
      const double slope = n == 2 ? g.dg(gd.t) : 0.0;
      const double len = std::sqrt(1.0 + slope * slope);
      q.foot = {gd.t, g.g(gd.t), 0.0};
      q.nu = {-slope / len, 1.0 / len};
      std::array<long, 3> c{};
      for (int k = 0; k < 3; ++k) c[k] = std::lround(std::floor((cur.lo[k] + 1.0) / side + 1e-9));
      by_level_[cur.level][key(cur.level, c)] = static_cast<int>(cubes_.size());
      cubes_.push_back(q);
      continue;
    }
    if (cur.level == max_level) continue;  // left uncovered next to Gamma
    const double hs = 0.5 * side;
    for (int a = 0; a < (n == 2 ? 2 : 1); ++a)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          stack.push_back({{cur.lo[0] + a * hs, cur.lo[1] + i * hs, cur.lo[2] + j * hs}, cur.level + 1});
  }
}

double WhitneyCover::bump_radius(const WhitneyCube& q) const {
  const int dim = n_ == 2 ? 3 : 2;
  return kBumpFactor * q.side * std::sqrt(static_cast<double>(dim));
}

void WhitneyCover::lookup(const std::array<double, 3>& x, std::vector<int>& out) const {
  const int d0 = n_ == 2 ? 0 : 1;
  for (int l = 0; l <= max_level_; ++l) {
    if (by_level_[l].empty()) continue;
    const double side = std::ldexp(1.0, -l);
    std::array<long, 3> base{};
    for (int k = 0; k < 3; ++k) base[k] = static_cast<long>(std::floor((x[k] + 1.0) / side));
    const int reach = 2;
    for (int da = (d0 == 0 ? -reach : 0); da <= (d0 == 0 ? reach : 0); ++da)
      for (int di = -reach; di <= reach; ++di)
        for (int dj = -reach; dj <= reach; ++dj) {
          std::array<long, 3> c{base[0] + da, base[1] + di, base[2] + dj};
          if (d0 == 1) c[0] = std::lround(std::floor((0.0 + 1.0) / side + 1e-9));
          auto it = by_level_[l].find(key(l, c));
          if (it == by_level_[l].end()) continue;
          const WhitneyCube& q = cubes_[it->second];
          double r2 = 0.0;
          for (int k = d0; k < 3; ++k) r2 += (x[k] - q.center[k]) * (x[k] - q.center[k]);
          const double R = bump_radius(q);
          if (r2 < R * R) out.push_back(it->second);
        }
  }
}

std::vector<int> WhitneyCover::supporting(const HalfPoint& p) const {
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  std::vector<int> out;
  lookup({x1, p.x_n, p.x_np1}, out);
  lookup({x1, p.x_n, -p.x_np1}, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Jet3 WhitneyCover::bump(int j, const HalfPoint& p) const {
  const WhitneyCube& q = cubes_[j];
  const double R = bump_radius(q);
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  const Jet3 X1 = Jet3::variable(x1, kTan), XN = Jet3::variable(p.x_n, kNor), XP = Jet3::variable(p.x_np1, kVert);
  auto one = [&](double sign) {
    Jet3 r2 = (XN - q.center[1]) * (XN - q.center[1]) + (sign * XP - q.center[2]) * (sign * XP - q.center[2]);
    if (n_ == 2) r2 = r2 + (X1 - q.center[0]) * (X1 - q.center[0]);
    const Jet3 t = 1.0 - r2 / (R * R);
    if (t.v <= 0.0) return Jet3(0.0);
    return t * t * t;
  };
  return one(1.0) + one(-1.0);
}

std::vector<std::pair<int, Jet3>> WhitneyCover::partition(const HalfPoint& p) const {
  const std::vector<int> idx = supporting(p);
  std::vector<std::pair<int, Jet3>> out;
  Jet3 total(0.0);
  for (int j : idx) {
    out.emplace_back(j, bump(j, p));
    total = total + out.back().second;
  }
  if (idx.empty() || total.v <= 0.0) throw Error(ErrorCode::OutOfDomain, "point is not covered by the Whitney cover");
  for (auto& e : out) e.second = e.second / total;
  return out;
}

// ---------------- barrier ----------------

namespace {

double graph_roughness(const ThinGraph& g, double alpha) {
  double worst = 0.0;
  const int m = 200;
  for (int i = 0; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) {
      const double a = -1.0 + 2.0 * i / m, b = -1.0 + 2.0 * j / m;
      worst = std::max(worst, std::abs(g.dg(a) - g.dg(b)) / std::pow(b - a, alpha));
    }
  return worst;
}

}  // namespace

BarrierField::BarrierField(ThinGraph g, int n, FracOrder s, double tau, BarrierSign sign, const BarrierOptions& opts)
    : g_(std::move(g)), s_(s), tau_(tau), sign_(sign) {
  const double limit = std::min(opts.alpha / s_, (1.0 - s_) / s_);
  if (!(tau > 0.0) || !(tau < limit))
    throw Error(ErrorCode::TauOutOfRange, "tau must lie in (0, " + std::to_string(limit) + ")");
  if (n == 2 && graph_roughness(g_, opts.alpha) > opts.roughness_limit)
    throw Error(ErrorCode::GraphTooRough, "Hoelder seminorm of the graph gradient exceeds the limit");
  cover_ = WhitneyCover(g_, n, opts.max_level);
}

Jet3 BarrierField::jet(const HalfPoint& p) const {
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  const Jet3 X1 = Jet3::variable(x1, kTan), XN = Jet3::variable(p.x_n, kNor), XP = Jet3::variable(p.x_np1, kVert);
  const auto parts = cover_.partition(p);
  const double sgn = sign_ == BarrierSign::Lower ? 1.0 : -1.0;
  Jet3 h(0.0);
  for (const auto& [j, eta] : parts) {
    const WhitneyCube& q = cover_.cubes()[j];
    Jet3 Q = (XN - q.foot[1]) * q.nu[1];
    if (n() == 2) Q = Q + (X1 - q.foot[0]) * q.nu[0];
    const Jet3 w = w0s_t(s_, Q, XP);
    const Jet3 prof = w.v > 0.0 ? w + sgn * pow(w, 1.0 + tau_) : Jet3(0.0);
    h = h + eta * prof;
  }
  return h;
}

double BarrierField::Ls(const HalfPoint& p) const {
  if (!(p.x_np1 > 0.0)) throw Error(ErrorCode::DegeneratePoint, "L_s is evaluated off the thin space");
  return apply_Ls(jet(p), p.x_np1, s_);
}

BarrierField build_barrier(const ThinGraph& g, int n, FracOrder s, double tau, BarrierSign sign,
                           const BarrierOptions& opts) {
  return BarrierField(g, n, s, tau, sign, opts);
}

double subsolution_check(const BarrierField& b, const std::vector<HalfPoint>& points) {
  const double s = b.s(), tau = b.tau();
  const bool lower = b.sign() == BarrierSign::Lower;
  double best = lower ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const double d = distance_to_graph(b.graph(), b.n(), p).dist;
    const double scale = std::pow(p.x_np1, 1.0 - 2.0 * s) * std::pow(d, -2.0 + s + s * tau);
    const double ratio = b.Ls(p) / scale;
    best = lower ? std::min(best, ratio) : std::max(best, ratio);
  }
  return best;
}

std::vector<HalfPoint> barrier_samples(const BarrierField& b, int count, std::uint64_t seed, double radius,
                                       double min_dist, double max_dist) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<HalfPoint> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++guard > 1000 * count) throw Error(ErrorCode::InsufficientSamples, "sampling region is empty");
    const double x1 = b.n() == 2 ? radius * U(rng) : 0.0;
    const double xn = radius * U(rng), xp = radius * std::abs(U(rng));
    if (x1 * x1 + xn * xn + xp * xp > radius * radius || xp <= 0.0) continue;
    const HalfPoint p = b.n() == 2 ? HalfPoint({x1}, xn, xp) : HalfPoint(xn, xp);
    const double d = distance_to_graph(b.graph(), b.n(), p).dist;
    if (d < min_dist || d > max_dist || !b.cover().covers(p)) continue;
    out.push_back(p);
  }
  return out;
}

double barrier_nondegeneracy(const BarrierField& b, const std::vector<HalfPoint>& points) {
  const double s = b.s();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const GraphDistance gd = distance_to_graph(b.graph(), b.n(), p);
    const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
    const bool over_contact = p.x_n <= b.graph().g(b.n() == 2 ? x1 : 0.0);
    const double dl = over_contact ? p.x_np1 : gd.dist;
    if (dl <= 0.0) continue;
    const double rhs = std::pow(gd.dist, s) * std::pow(dl / gd.dist, 2.0 * s);
    best = std::min(best, b(p) / rhs);
  }
  return best;
}

namespace {

struct ThinSet {
  std::vector<std::array<double, 2>> pts;  // (x_1, x_n)
};

double dist_to_set(const ThinSet& set, double x1, double xn, double xp) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set.pts) {
    const double d = (q[0] - x1) * (q[0] - x1) + (q[1] - xn) * (q[1] - xn);
    best = std::min(best, d);
  }
  return std::sqrt(best + xp * xp);
}

ThinSet contact_set(const DiscreteSolution& sol) {
  ThinSet set;
  for (std::size_t idx = 0; idx < sol.contact_mask.size(); ++idx) {
    if (!sol.contact_mask[idx]) continue;
    const HalfPoint p = sol.grid.point(idx);
    set.pts.push_back({p.x_tan.empty() ? 0.0 : p.x_tan[0], p.x_n});
  }
  return set;
}

bool in_box(const HalfPoint& p, const DiagnosticBox& box) {
  if (!(p.x_np1 > 0.0) || p.x_np1 > box.height) return false;
  if (std::abs(p.x_n) > box.half_width) return false;
  for (double t : p.x_tan)
    if (std::abs(t) > box.half_width) return false;
  return true;
}

}  // namespace

double nondegeneracy_check(const DiscreteSolution& sol, const std::vector<HalfPoint>& gamma, const DiagnosticBox& box) {
  const double s = sol.grid.s, h = sol.grid.h;
  ThinSet gam;
  for (const auto& p : gamma) gam.pts.push_back({p.x_tan.empty() ? 0.0 : p.x_tan[0], p.x_n});
  const ThinSet lam = contact_set(sol);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t idx = sol.grid.thin_size(); idx < sol.grid.size(); ++idx) {
    const HalfPoint p = sol.grid.point(idx);
    if (!in_box(p, box)) continue;
    const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
    const double dg = dist_to_set(gam, x1, p.x_n, p.x_np1);
    if (dg < h) continue;
    const double dl = lam.pts.empty() ? dg : std::min(dg, dist_to_set(lam, x1, p.x_n, p.x_np1));
    const double rhs = std::pow(dg, s) * std::pow(dl / dg, 2.0 * s);
    best = std::min(best, sol.values[idx] / rhs);
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::InsufficientSamples, "no sample points in the diagnostic box");
  return best;
}

RatioBounds harnack_ratio(const DiscreteSolution& u1, const DiscreteSolution& u2, const DiagnosticBox& box,
                          double floor) {
  if (u1.values.size() != u2.values.size()) throw Error(ErrorCode::InvalidArgument, "solutions live on different grids");
  const double h = u1.grid.h;
  const ThinSet lam = contact_set(u1);
  RatioBounds rb{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t idx = u1.grid.thin_size(); idx < u1.grid.size(); ++idx) {
    const HalfPoint p = u1.grid.point(idx);
    if (!in_box(p, box)) continue;
    const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
    if (!lam.pts.empty() && dist_to_set(lam, x1, p.x_n, p.x_np1) <= h * (1.0 + 1e-9)) continue;
    if (u1.values[idx] < floor)
      throw Error(ErrorCode::DivisionNearZero, "reference solution is below the floor off the contact set");
    const double r = u2.values[idx] / u1.values[idx];
    rb.inf = std::min(rb.inf, r);
    rb.sup = std::max(rb.sup, r);
  }
  if (!std::isfinite(rb.inf)) throw Error(ErrorCode::InsufficientSamples, "no sample points in the diagnostic box");
  return rb;
}

}  // namespace thinobs
