#include "thinobs/hodograph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace thinobs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Derivative in sigma = x^{2s}/(2s): exact on a + b x_{n+1}^{2s}, the thin-plane behaviour.
double weighted_vertical(const std::vector<double>& w, const WeightedGrid& g, int a, int i, int j) {
  const int nv = g.count_vert();
  const int lo = j == 0 ? 0 : j - 1, hi = j == nv - 1 ? nv - 1 : j + 1;
  const double s2 = 2.0 * g.s;
  const double den = (std::pow(hi * g.h, s2) - std::pow(lo * g.h, s2)) / s2;
  return (w[g.index(a, i, hi)] - w[g.index(a, i, lo)]) / den;
}

double normal_derivative(const std::vector<double>& w, const WeightedGrid& g, int a, int i, int j) {
  const int ni = g.count_nor();
  if (i == 0) return (-3.0 * w[g.index(a, 0, j)] + 4.0 * w[g.index(a, 1, j)] - w[g.index(a, 2, j)]) / (2.0 * g.h);
  if (i == ni - 1)
    return (3.0 * w[g.index(a, i, j)] - 4.0 * w[g.index(a, i - 1, j)] + w[g.index(a, i - 2, j)]) / (2.0 * g.h);
  return (w[g.index(a, i + 1, j)] - w[g.index(a, i - 1, j)]) / (2.0 * g.h);
}

double root_or_throw(double x, double expo, double clamp, bool& bad) {
  if (x < -clamp) bad = true;
  return std::pow(std::abs(x) <= clamp ? 0.0 : std::abs(x), expo);
}

}  // namespace

TransformResult forward_transform(const DiscreteSolution& sol, const TransformOptions& opts) {
  const WeightedGrid& g = sol.grid;
  const double s = g.s;
  TransformResult out;
  out.points.reserve(g.size());
  for (int j = 0; j < g.count_vert(); ++j)
    for (int i = 0; i < g.count_nor(); ++i)
      for (int a = 0; a < g.count_tan(); ++a) {
        TransformPoint tp;
        tp.node = g.index(a, i, j);
        tp.x = g.point(a, i, j);
        tp.d_n = normal_derivative(sol.values, g, a, i, j);
        // off the contact set the thin trace satisfies the equation, so the weighted flux vanishes there
        const bool free_thin =
            j == 0 && !g.on_outer_boundary(a, i, j) && !sol.contact_mask.empty() && !sol.contact_mask[tp.node];
        tp.weighted_dnp1 = free_thin ? 0.0 : weighted_vertical(sol.values, g, a, i, j);
        bool bad = false;
        tp.y_n = root_or_throw(tp.d_n, 1.0 / (2.0 * s), opts.clamp, bad);
        tp.y_np1 = root_or_throw(-((1.0 - s) / s) * tp.weighted_dnp1, 1.0 / (2.0 * (1.0 - s)), opts.clamp, bad);
        if (bad) out.violations.push_back(tp.node);
        out.points.push_back(tp);
      }
  std::sort(out.points.begin(), out.points.end(), [](const auto& l, const auto& r) { return l.node < r.node; });
  std::sort(out.violations.begin(), out.violations.end());
  if (!out.violations.empty() && opts.policy == MonotonicityPolicy::Strict)
    throw MonotonicityViolated("transform monotonicity fails at " + std::to_string(out.violations.size()) + " nodes",
                               out.violations);
  return out;
}

// ---------------- Legendre function ----------------

namespace {

struct Quad {
  std::array<double, 4> yn, yp;  // corners (0,0) (1,0) (0,1) (1,1)
};

// Solve P(xi, eta) = target for the bilinear quad; true if inside.
bool invert_bilinear(const Quad& q, double tn, double tp, double& xi, double& eta) {
  xi = 0.5;
  eta = 0.5;
  for (int it = 0; it < 30; ++it) {
    const double b0 = (1 - xi) * (1 - eta), b1 = xi * (1 - eta), b2 = (1 - xi) * eta, b3 = xi * eta;
    const double fn = b0 * q.yn[0] + b1 * q.yn[1] + b2 * q.yn[2] + b3 * q.yn[3] - tn;
    const double fp = b0 * q.yp[0] + b1 * q.yp[1] + b2 * q.yp[2] + b3 * q.yp[3] - tp;
    const double dn_dxi = (1 - eta) * (q.yn[1] - q.yn[0]) + eta * (q.yn[3] - q.yn[2]);
    const double dn_deta = (1 - xi) * (q.yn[2] - q.yn[0]) + xi * (q.yn[3] - q.yn[1]);
    const double dp_dxi = (1 - eta) * (q.yp[1] - q.yp[0]) + eta * (q.yp[3] - q.yp[2]);
    const double dp_deta = (1 - xi) * (q.yp[2] - q.yp[0]) + xi * (q.yp[3] - q.yp[1]);
    const double det = dn_dxi * dp_deta - dn_deta * dp_dxi;
    if (std::abs(det) < 1e-300) return false;
    const double dxi = (fn * dp_deta - fp * dn_deta) / det, deta = (dn_dxi * fp - dp_dxi * fn) / det;
    xi -= dxi;
    eta -= deta;
    if (std::abs(dxi) + std::abs(deta) < 1e-14) break;
    if (std::abs(xi) > 10 || std::abs(eta) > 10) return false;
  }
  const double tol = 1e-9;
  return xi >= -tol && xi <= 1 + tol && eta >= -tol && eta <= 1 + tol;
}

}  // namespace

LegendreField legendre_function(const DiscreteSolution& sol, const ResampleOptions& ropts,
                                const TransformOptions& topts) {
  const WeightedGrid& g = sol.grid;
  const double s = g.s;
  if (ropts.count < 2 || !(ropts.extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "bad quarter grid");
  const TransformResult tr = forward_transform(sol, topts);
  std::vector<double> vnode(g.size());
  for (const auto& tp : tr.points) {
    vnode[tp.node] = sol.values[tp.node] - tp.x.x_n * std::pow(tp.y_n, 2.0 * s) +
                     std::pow(tp.x.x_np1, 2.0 * s) * std::pow(tp.y_np1, 2.0 * (1.0 - s)) / (2.0 * (1.0 - s));
  }
  LegendreField field;
  field.s = s;
  field.n = g.n;
  field.extent = ropts.extent;
  field.count = ropts.count;
  field.y_tan.clear();
  for (int a = 0; a < g.count_tan(); ++a) field.y_tan.push_back(g.n == 2 ? g.point(a, 0, 0).x_tan[0] : 0.0);
  field.v.assign(field.size(), kNaN);
  field.x_n.assign(field.size(), kNaN);
  field.x_np1.assign(field.size(), kNaN);
  const double hy = field.spacing();
  for (int a = 0; a < g.count_tan(); ++a) {
    for (int j = 0; j + 1 < g.count_vert(); ++j)
      for (int i = 0; i + 1 < g.count_nor(); ++i) {
        const std::array<std::size_t, 4> nd{g.index(a, i, j), g.index(a, i + 1, j), g.index(a, i, j + 1),
                                            g.index(a, i + 1, j + 1)};
        Quad q;
        double lo_n = 1e300, hi_n = -1e300, lo_p = 1e300, hi_p = -1e300;
        for (int c = 0; c < 4; ++c) {
          q.yn[c] = tr.points[nd[c]].y_n;
          q.yp[c] = tr.points[nd[c]].y_np1;
          lo_n = std::min(lo_n, q.yn[c]);
          hi_n = std::max(hi_n, q.yn[c]);
          lo_p = std::min(lo_p, q.yp[c]);
          hi_p = std::max(hi_p, q.yp[c]);
        }
        const int i0 = std::max(0, static_cast<int>(std::ceil(lo_n / hy - 1e-9)));
        const int i1 = std::min(field.count - 1, static_cast<int>(std::floor(hi_n / hy + 1e-9)));
        const int j0 = std::max(0, static_cast<int>(std::ceil(lo_p / hy - 1e-9)));
        const int j1 = std::min(field.count - 1, static_cast<int>(std::floor(hi_p / hy + 1e-9)));
        for (int jj = j0; jj <= j1; ++jj)
          for (int ii = i0; ii <= i1; ++ii) {
            const std::size_t k = field.index(a, ii, jj);
            if (!std::isnan(field.v[k])) continue;
            double xi, eta;
            if (!invert_bilinear(q, ii * hy, jj * hy, xi, eta)) continue;
            xi = std::clamp(xi, 0.0, 1.0);
            eta = std::clamp(eta, 0.0, 1.0);
            const std::array<double, 4> b{(1 - xi) * (1 - eta), xi * (1 - eta), (1 - xi) * eta, xi * eta};
            double v = 0, xn = 0, xp = 0;
            for (int c = 0; c < 4; ++c) {
              v += b[c] * vnode[nd[c]];
              xn += b[c] * tr.points[nd[c]].x.x_n;
              xp += b[c] * tr.points[nd[c]].x.x_np1;
            }
            field.v[k] = v;
            field.x_n[k] = xn;
            field.x_np1[k] = xp;
          }
      }
  }
  // Axis nodes missed by the cells: interpolate along the image of the thin row, which bounds the image.
  for (int a = 0; a < g.count_tan(); ++a)
    for (int jj = 0; jj < field.count; ++jj)
      for (int ii = 0; ii < field.count; ++ii) {
        if (ii != 0 && jj != 0) continue;
        const std::size_t k = field.index(a, ii, jj);
        if (!std::isnan(field.v[k])) continue;
        const double tn = ii * hy, tp = jj * hy;
        double best = 2.0 * hy, bv = kNaN, bxn = kNaN;
        for (int i = 0; i + 1 < g.count_nor(); ++i) {
          const auto& P = tr.points[g.index(a, i, 0)];
          const auto& Q = tr.points[g.index(a, i + 1, 0)];
          const double dn = Q.y_n - P.y_n, dp = Q.y_np1 - P.y_np1;
          const double len2 = dn * dn + dp * dp;
          const double u = len2 > 0 ? std::clamp(((tn - P.y_n) * dn + (tp - P.y_np1) * dp) / len2, 0.0, 1.0) : 0.0;
          const double d = std::hypot(P.y_n + u * dn - tn, P.y_np1 + u * dp - tp);
          if (d < best) {
            best = d;
            bv = (1 - u) * vnode[P.node] + u * vnode[Q.node];
            bxn = (1 - u) * P.x.x_n + u * Q.x.x_n;
          }
        }
        field.v[k] = bv;
        field.x_n[k] = bxn;
        field.x_np1[k] = std::isnan(bv) ? kNaN : 0.0;
      }
  // The discrete image leaves a hole of size O(h^{1/2}) around P (finite differences smear the square-root
  // behaviour at the free boundary); nodes there take the nearest scattered value.
  const double hole = 2.0 * std::sqrt(2.0 * g.h);
  for (int a = 0; a < g.count_tan(); ++a)
    for (int jj = 0; jj < field.count; ++jj)
      for (int ii = 0; ii < field.count; ++ii) {
        const std::size_t k = field.index(a, ii, jj);
        const double tn = ii * hy, tp = jj * hy;
        if (!std::isnan(field.v[k]) || std::hypot(tn, tp) > hole) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < g.count_vert(); ++j)
          for (int i = 0; i < g.count_nor(); ++i) {
            const auto& P = tr.points[g.index(a, i, j)];
            const double d = std::hypot(P.y_n - tn, P.y_np1 - tp);
            if (d < best) {
              best = d;
              field.v[k] = vnode[P.node];
              field.x_n[k] = P.x.x_n;
              field.x_np1[k] = P.x.x_np1;
            }
          }
      }
  const auto gaps = std::count_if(field.v.begin(), field.v.end(), [](double x) { return std::isnan(x); });
  if (gaps > 0)
    throw Error(ErrorCode::ResampleGap,
                std::to_string(gaps) + " quarter-grid nodes lie outside the image of the solution grid");
  return field;
}

LegendreField model_legendre_field(FracOrder s, int n, const ResampleOptions& ropts, std::vector<double> y_tan) {
  LegendreField field;
  field.s = s;
  field.n = n;
  field.y_tan = n == 2 ? std::move(y_tan) : std::vector<double>{0.0};
  field.extent = ropts.extent;
  field.count = ropts.count;
  field.v.resize(field.size());
  field.x_n.resize(field.size());
  field.x_np1.resize(field.size());
  const double hy = field.spacing();
  for (std::size_t a = 0; a < field.y_tan.size(); ++a)
    for (int j = 0; j < field.count; ++j)
      for (int i = 0; i < field.count; ++i) {
        const std::size_t k = field.index(static_cast<int>(a), i, j);
        const double yn = i * hy, yp = j * hy;
        field.v[k] = eval_v_model(s, yn, yp);
        field.x_n[k] = 0.5 * (yn * yn - yp * yp);
        field.x_np1[k] = yn * yp;
      }
  return field;
}

// ---------------- nonlinear functional ----------------

FValue eval_F(const VDerivs& d, double y1, double y_n, double y_np1, double s, int n, const PointFn& f) {
  if (!(y_n > 0.0) || !(y_np1 > 0.0)) throw Error(ErrorCode::AxisSingularity, "F is evaluated off the axes only");
  auto H = [&d](int i, int k) { return d.H[i * 3 + k]; };
  const double k2s = 1.0 / (2.0 * s);
  const double a = std::pow(y_n, 1.0 - 2.0 * s), b = std::pow(y_np1, 2.0 * s - 1.0);
  const double p = a * d.g[kNor], q = b * d.g[kVert];
  const double dn_p = (1.0 - 2.0 * s) * std::pow(y_n, -2.0 * s) * d.g[kNor] + a * H(kNor, kNor);
  const double dp_p = a * H(kNor, kVert);
  const double d1_p = a * H(kTan, kNor);
  const double dp_q = (2.0 * s - 1.0) * std::pow(y_np1, 2.0 * s - 2.0) * d.g[kVert] + b * H(kVert, kVert);
  const double dn_q = b * H(kNor, kVert);
  const double d1_q = b * H(kTan, kVert);
  if (q < -1e-12) throw Error(ErrorCode::NegativeRadicand, "y_{n+1}^{2s-1} d_{n+1} v < 0");
  FValue out;
  out.x_np1 = std::pow(std::max(q, 0.0), k2s);
  out.x_n = -p * k2s;
  const double xw = std::pow(out.x_np1, 1.0 - 2.0 * s);
  out.J = (-dn_p * k2s) * (xw * dp_q * k2s) - (-dp_p * k2s) * (xw * dn_q * k2s);
  double F = std::pow(y_np1, 1.0 - 2.0 * s) * dn_p + std::pow(out.x_np1, 2.0 - 4.0 * s) * std::pow(y_n, 2.0 * s - 1.0) * dp_q;
  if (n == 2) {
    // rows: Hessian row of v, gradient of x_n, gradient of x_{n+1}^{2s} (each over 2s)
    const double m[3][3] = {{H(kTan, kTan), H(kTan, kNor), H(kTan, kVert)},
                            {-d1_p * k2s, -dn_p * k2s, -dp_p * k2s},
                            {d1_q * k2s, dn_q * k2s, dp_q * k2s}};
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    F += std::pow(out.x_np1, 2.0 - 4.0 * s) * det;
  }
  if (f) {
    const HalfPoint x = n == 2 ? HalfPoint({y1}, out.x_n, out.x_np1) : HalfPoint(out.x_n, out.x_np1);
    F -= std::pow(out.x_np1, 3.0 - 2.0 * s) * out.J * f(x);
  }
  out.F = F;
  return out;
}

FValue eval_F(const JetFn& v, double y1, double y_n, double y_np1, double s, int n, const PointFn& f) {
  const Jet3 j = v(Jet3::variable(y1, kTan), Jet3::variable(y_n, kNor), Jet3::variable(y_np1, kVert));
  VDerivs d;
  d.v = j.v;
  d.g = j.g;
  d.H = j.H;
  return eval_F(d, y1, y_n, y_np1, s, n, f);
}

std::vector<double> eval_F_grid(const LegendreField& field, const PointFn& f) {
  const int na = static_cast<int>(field.y_tan.size());
  const int m = field.count;
  const double h = field.spacing();
  const double ht = na > 1 ? field.y_tan[1] - field.y_tan[0] : 1.0;
  constexpr double c1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  constexpr double c2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  std::vector<double> out(field.size(), kNaN);
  for (int a = 0; a < na; ++a)
    for (int j = 2; j + 2 < m; ++j)
      for (int i = 2; i + 2 < m; ++i) {
        if (field.n == 2 && (a < 2 || a + 2 >= na)) continue;
        auto V = [&](int da, int di, int dj) { return field.v[field.index(a + da, i + di, j + dj)]; };
        VDerivs d;
        d.v = V(0, 0, 0);
        for (int k = 0; k < 5; ++k) {
          d.g[kNor] += c1[k] * V(0, k - 2, 0) / h;
          d.g[kVert] += c1[k] * V(0, 0, k - 2) / h;
          d.H[kNor * 3 + kNor] += c2[k] * V(0, k - 2, 0) / (h * h);
          d.H[kVert * 3 + kVert] += c2[k] * V(0, 0, k - 2) / (h * h);
          for (int l = 0; l < 5; ++l) d.H[kNor * 3 + kVert] += c1[k] * c1[l] * V(0, k - 2, l - 2) / (h * h);
          if (field.n == 2) {
            d.g[kTan] += c1[k] * V(k - 2, 0, 0) / ht;
            d.H[kTan * 3 + kTan] += c2[k] * V(k - 2, 0, 0) / (ht * ht);
            for (int l = 0; l < 5; ++l) {
              d.H[kTan * 3 + kNor] += c1[k] * c1[l] * V(k - 2, l - 2, 0) / (ht * h);
              d.H[kTan * 3 + kVert] += c1[k] * c1[l] * V(k - 2, 0, l - 2) / (ht * h);
            }
          }
        }
        d.H[kVert * 3 + kNor] = d.H[kNor * 3 + kVert];
        d.H[kNor * 3 + kTan] = d.H[kTan * 3 + kNor];
        d.H[kVert * 3 + kTan] = d.H[kTan * 3 + kVert];
        out[field.index(a, i, j)] = eval_F(d, field.y_tan[a], i * h, j * h, field.s, field.n, f).F;
      }
  return out;
}

JetFn v_model_jet(FracOrder s, double a_n, double a_np1) {
  const double sv = s;
  return [sv, a_n, a_np1](const Jet3&, const Jet3& yn, const Jet3& yp) {
    return pow(yn, 2.0 * sv) * (a_n * yn * yn + a_np1 * yp * yp);
  };
}

JetFn v_model_jet(FracOrder s) { return v_model_jet(s, -kVModelScale * s / (s + 1.0), kVModelScale); }

JetFn bump_jet(double c_n, double c_np1, double rho, double c_tan, double tan_rho) {
  return [=](const Jet3& y1, const Jet3& yn, const Jet3& yp) {
    Jet3 r2 = ((yn - c_n) * (yn - c_n) + (yp - c_np1) * (yp - c_np1)) / (rho * rho);
    if (tan_rho > 0.0) r2 = r2 + (y1 - c_tan) * (y1 - c_tan) / (tan_rho * tan_rho);
    if (r2.v >= 1.0) return Jet3(0.0);
    const Jet3 t = 1.0 - r2;
    return t * t * t * t;
  };
}

// ---------------- linearization ----------------

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
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

LinearizationResult linearization_check(const JetFn& v0, const JetFn& h, const std::vector<double>& t_list,
                                        const std::vector<QuarterPoint>& samples, double s, int n) {
  LinearizationResult out;
  std::vector<double> L(samples.size()), F0(samples.size());
  double LL = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const QuarterPoint& y = samples[k];
    const double y1 = y.y_tan.empty() ? 0.0 : y.y_tan[0];
    L[k] = delta_Gs(h, y1, y.y_n, y.y_np1, s);
    F0[k] = eval_F(v0, y1, y.y_n, y.y_np1, s, n).F;
    LL += L[k] * L[k];
  }
  out.degenerate = !(LL > 0.0);
  std::vector<double> xs, ys;
  for (double t : t_list) {
    const JetFn vt = [&v0, &h, t](const Jet3& a, const Jet3& b, const Jet3& c) { return v0(a, b, c) + t * h(a, b, c); };
    double DL = 0.0, DD = 0.0;
    std::vector<double> D(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const QuarterPoint& y = samples[k];
      const double y1 = y.y_tan.empty() ? 0.0 : y.y_tan[0];
      D[k] = (eval_F(vt, y1, y.y_n, y.y_np1, s, n).F - F0[k]) / t;
      DL += D[k] * L[k];
      DD += D[k] * D[k];
    }
    out.t.push_back(t);
    if (out.degenerate) {
      out.c.push_back(kNaN);
      out.defect.push_back(std::sqrt(DD));
      continue;
    }
    const double c = DL / LL;
    double rr = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) rr += (D[k] - c * L[k]) * (D[k] - c * L[k]);
    out.c.push_back(c);
    out.defect.push_back(std::sqrt(rr / LL));
    if (out.defect.back() > 0.0) {
      xs.push_back(t);
      ys.push_back(out.defect.back());
    }
  }
  out.slope = xs.size() >= 2 ? log_slope(xs, ys) : std::numeric_limits<double>::infinity();
  return out;
}

// ---------------- inverse asymptotics ----------------

std::vector<InverseAsymptotics> inverse_asymptotics(const LegendreField& field, const AsymptoticsOptions& opts) {
  const double h = field.spacing();
  const double s = field.s;
  std::vector<InverseAsymptotics> out;
  for (std::size_t a = 0; a < field.y_tan.size(); ++a) {
    std::vector<std::array<double, 4>> rows;  // y_n, y_{n+1}, x_n, x_{n+1}
    for (int j = 0; j < field.count; ++j)
      for (int i = 0; i < field.count; ++i) {
        const double yn = i * h, yp = j * h;
        if (std::hypot(yn, yp) > opts.rho) continue;
        const std::size_t k = field.index(static_cast<int>(a), i, j);
        rows.push_back({yn, yp, field.x_n[k], field.x_np1[k]});
      }
    if (rows.size() < 6) throw Error(ErrorCode::DegenerateFit, "P-collar holds too few quarter-grid nodes");
    Eigen::MatrixXd A(rows.size(), 3);
    Eigen::VectorXd b(rows.size());
    double mm = 0.0, mx = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& [yn, yp, xn, xp] = rows[r];
      A(r, 0) = 1.0;
      A(r, 1) = yn * yn;
      A(r, 2) = -yp * yp;
      b(r) = xn;
      const double m = std::pow(yn * yp, 2.0 * s);
      mm += m * m;
      mx += m * std::pow(std::max(xp, 0.0), 2.0 * s);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 3 || !(mm > 0.0)) throw Error(ErrorCode::DegenerateFit, "singular asymptotic fit");
    const Eigen::VectorXd c = qr.solve(b);
    InverseAsymptotics ia;
    ia.y_tan = field.y_tan[a];
    ia.g = c(0);
    ia.a0 = c(1);
    ia.a1 = c(2);
    ia.a1_from_xnp1 = 0.5 * mx / mm;
    std::vector<double> xs, ys;
    for (int l = 0; l < opts.levels; ++l) {
      const double rho = opts.rho * std::ldexp(1.0, -l);
      double rr = 0.0;
      int cnt = 0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double d = std::hypot(rows[r][0], rows[r][1]);
        if (d > rho || d < 0.5 * rho) continue;
        const double e = (A.row(r) * c)(0) - b(r);
        rr += e * e;
        ++cnt;
      }
      if (cnt == 0) continue;
      ia.radii.push_back(rho);
      ia.residuals.push_back(std::sqrt(rr / cnt));
      if (ia.residuals.back() > 1e-13) {
        xs.push_back(rho);
        ys.push_back(ia.residuals.back());
      }
    }
    ia.residual_exponent = xs.size() >= 2 ? log_slope(xs, ys) : std::numeric_limits<double>::infinity();
    out.push_back(ia);
  }
  return out;
}

// ---------------- Jacobian diagnostics ----------------

TransformDiag jacobian_diag(const DiscreteSolution& sol, const HalfPoint& x0, const std::vector<double>& lambdas,
                            const JacobianOptions& opts) {
  const WeightedGrid& g = sol.grid;
  const TransformResult tr = forward_transform(sol, opts.transform);
  TransformDiag diag;
  diag.violations = tr.violations;
  diag.jac_min = std::numeric_limits<double>::infinity();
  diag.jac_max = -std::numeric_limits<double>::infinity();
  const double x01 = x0.x_tan.empty() ? 0.0 : x0.x_tan[0];
  std::vector<char> used(g.size(), 0);
  std::vector<std::size_t> chosen;
  for (double lambda : lambdas) {
    for (int j = 1; j + 1 < g.count_vert(); ++j)
      for (int i = 1; i + 1 < g.count_nor(); ++i)
        for (int a = 0; a < g.count_tan(); ++a) {
          const std::size_t k = g.index(a, i, j);
          const HalfPoint& p = tr.points[k].x;
          const double d1 = (p.x_tan.empty() ? 0.0 : p.x_tan[0]) - x01;
          const double r = std::sqrt(d1 * d1 + (p.x_n - x0.x_n) * (p.x_n - x0.x_n) + p.x_np1 * p.x_np1);
          if (r > lambda || r < 0.5 * lambda || p.x_np1 < opts.cone * r) continue;
          auto Y = [&](int ii, int jj, bool normal) {
            const auto& t = tr.points[g.index(a, ii, jj)];
            return normal ? t.y_n : t.y_np1;
          };
          const double h2 = 2.0 * g.h;
          const double yn_n = (Y(i + 1, j, true) - Y(i - 1, j, true)) / h2;
          const double yn_p = (Y(i, j + 1, true) - Y(i, j - 1, true)) / h2;
          const double yp_n = (Y(i + 1, j, false) - Y(i - 1, j, false)) / h2;
          const double yp_p = (Y(i, j + 1, false) - Y(i, j - 1, false)) / h2;
          const double det = lambda * std::abs(yn_n * yp_p - yn_p * yp_n);
          diag.jac_min = std::min(diag.jac_min, det);
          diag.jac_max = std::max(diag.jac_max, det);
          ++diag.samples;
          if (!used[k]) {
            used[k] = 1;
            chosen.push_back(k);
          }
        }
  }
  if (diag.samples == 0) throw Error(ErrorCode::InsufficientSamples, "no grid nodes in the requested annuli");
  const std::size_t stride = std::max<std::size_t>(1, chosen.size() / opts.max_pairs_points);
  std::vector<std::size_t> pick;
  for (std::size_t t = 0; t < chosen.size(); t += stride) pick.push_back(chosen[t]);
  for (std::size_t u = 0; u < pick.size() && diag.injectivity_flag; ++u)
    for (std::size_t v = u + 1; v < pick.size(); ++v) {
      const auto& P = tr.points[pick[u]];
      const auto& Q = tr.points[pick[v]];
      const double t1 = (P.x.x_tan.empty() ? 0.0 : P.x.x_tan[0] - Q.x.x_tan[0]);
      const double dx = std::sqrt(t1 * t1 + std::pow(P.x.x_n - Q.x.x_n, 2) + std::pow(P.x.x_np1 - Q.x.x_np1, 2));
      const double dy = std::sqrt(t1 * t1 + std::pow(P.y_n - Q.y_n, 2) + std::pow(P.y_np1 - Q.y_np1, 2));
      if (dy < opts.separation * dx) {
        diag.injectivity_flag = false;
        break;
      }
    }
  return diag;
}

// ---------------- diffeomorphism flow ----------------

double diffeo_cutoff(double y_n, double y_np1) {
  const double rho = std::hypot(y_n, y_np1);
  auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double in = psi(0.5 - rho), out = psi(rho - 0.25);
  return in / (in + out);
}

QuarterPoint diffeo_flow(const std::vector<double>& a, const QuarterPoint& y, int steps) {
  if (a.size() != y.y_tan.size()) throw Error(ErrorCode::InvalidArgument, "a must have the dimension of y''");
  double norm = 0.0;
  for (double c : a) norm += c * c;
  if (!(std::sqrt(norm) < 1.0)) throw Error(ErrorCode::InvalidArgument, "|a| must be below 1");
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be positive");
  const double eta = diffeo_cutoff(y.y_n, y.y_np1);
  QuarterPoint out = y;
  if (eta == 0.0 || norm == 0.0) return out;
  const std::size_t d = a.size();
  auto rhs = [&](const std::vector<double>& phi) {
    double r2 = 0.0;
    for (double c : phi) r2 += c * c;
    const double base = std::max(0.5625 - r2, 0.0);
    const double mag = base * base * base * eta;
    std::vector<double> k(d);
    for (std::size_t i = 0; i < d; ++i) k[i] = a[i] * mag;
    return k;
  };
  std::vector<double> phi = y.y_tan, tmp(d);
  const double dt = 1.0 / steps;
  for (int st = 0; st < steps; ++st) {
    const auto k1 = rhs(phi);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = phi[i] + 0.5 * dt * k1[i];
    const auto k2 = rhs(tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = phi[i] + 0.5 * dt * k2[i];
    const auto k3 = rhs(tmp);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = phi[i] + dt * k3[i];
    const auto k4 = rhs(tmp);
    for (std::size_t i = 0; i < d; ++i) phi[i] += dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
  }
  out.y_tan = phi;
  return out;
}

}  // namespace thinobs
