#include "thinobs/grushin.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace thinobs {

void QuarterPoint::validate() const {
  if (!(y_n >= 0.0) || !(y_np1 >= 0.0))
    throw Error(ErrorCode::OutOfDomain, "quarter-space point needs y_n >= 0 and y_{n+1} >= 0");
}

QuarterPoint dilate(const QuarterPoint& y, double lambda) {
  QuarterPoint out = y;
  for (double& t : out.y_tan) t *= lambda * lambda;
  out.y_n *= lambda;
  out.y_np1 *= lambda;
  return out;
}

double quasi_metric(const QuarterPoint& p, const QuarterPoint& q) {
  if (p.y_tan.size() != q.y_tan.size()) throw Error(ErrorCode::InvalidArgument, "points of different dimension");
  double dt2 = 0.0;
  for (std::size_t i = 0; i < p.y_tan.size(); ++i) dt2 += (p.y_tan[i] - q.y_tan[i]) * (p.y_tan[i] - q.y_tan[i]);
  const double dt = std::sqrt(dt2);
  const double normal = std::abs(p.y_n - q.y_n) + std::abs(p.y_np1 - q.y_np1);
  if (dt == 0.0) return normal;
  const double den = std::abs(p.y_n) + std::abs(p.y_np1) + std::abs(q.y_n) + std::abs(q.y_np1) + std::sqrt(dt);
  return normal + dt / den;
}

double quasi_triangle_constant(int n, int triples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), pos(0.0, 1.0);
  auto draw = [&] {
    QuarterPoint y;
    for (int i = 0; i + 1 < n; ++i) y.y_tan.push_back(sym(rng));
    y.y_n = pos(rng);
    y.y_np1 = pos(rng);
    return y;
  };
  double K = 0.0;
  for (int t = 0; t < triples; ++t) {
    const QuarterPoint p = draw(), q = draw(), r = draw();
    const double den = quasi_metric(p, q) + quasi_metric(q, r);
    if (den > 0.0) K = std::max(K, quasi_metric(p, r) / den);
  }
  return K;
}

// ---------------- polynomials ----------------

void GrushinPolynomial::set(const Index& beta, double b) {
  if (static_cast<int>(beta.size()) != n_ + 1) throw Error(ErrorCode::InvalidArgument, "multi-index length must be n+1");
  for (int e : beta)
    if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
  if (b == 0.0)
    terms_.erase(beta);
  else
    terms_[beta] = b;
}

int GrushinPolynomial::degree(const Index& beta) const {
  int d = 0;
  for (int j = 0; j < n_ - 1; ++j) d += 2 * beta[j];
  return d + beta[n_ - 1] + beta[n_];
}

bool GrushinPolynomial::in_Pk(int k) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return degree(t.first) <= k; });
}

bool GrushinPolynomial::in_Pk_hom(int k) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return degree(t.first) == k; });
}

double GrushinPolynomial::operator()(const QuarterPoint& y) const {
  if (static_cast<int>(y.y_tan.size()) != n_ - 1) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  double total = 0.0;
  for (const auto& [beta, b] : terms_) {
    double m = b;
    for (int j = 0; j < n_ - 1; ++j) m *= std::pow(y.y_tan[j], beta[j]);
    m *= std::pow(y.y_n, beta[n_ - 1]) * std::pow(y.y_np1, beta[n_]);
    total += m;
  }
  return total;
}

std::vector<GrushinPolynomial::Index> GrushinPolynomial::basis(int n, int k, bool homogeneous) {
  std::vector<Index> out;
  Index cur(n + 1, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n + 1) {
      if (!homogeneous || left == 0) out.push_back(cur);
      return;
    }
    const int unit = pos < n - 1 ? 2 : 1;
    for (int e = 0; e * unit <= left; ++e) {
      cur[pos] = e;
      rec(pos + 1, left - e * unit);
    }
    cur[pos] = 0;
  };
  rec(0, k);
  return out;
}

// ---------------- Delta_{G,s} ----------------

double delta_Gs(const Jet3& u, double y_n, double y_np1, double s) {
  if (!(y_n > 0.0) || !(y_np1 > 0.0)) throw Error(ErrorCode::AxisSingularity, "Delta_{G,s} needs y_n, y_{n+1} > 0");
  const double w = std::pow(y_n * y_np1, 1.0 - 2.0 * s);
  const double second = (y_n * y_n + y_np1 * y_np1) * u.hess(kTan, kTan) + u.hess(kNor, kNor) + u.hess(kVert, kVert);
  const double first = u.g[kNor] / y_n + u.g[kVert] / y_np1;
  return w * (second + (1.0 - 2.0 * s) * first);
}

double delta_Gs(const JetFn& u, double y1, double y_n, double y_np1, double s) {
  return delta_Gs(u(Jet3::variable(y1, kTan), Jet3::variable(y_n, kNor), Jet3::variable(y_np1, kVert)), y_n, y_np1, s);
}

double delta_Gs_fd(const ScalarFn3& u, double y1, double y_n, double y_np1, double s, double step, int n) {
  if (y_n < 2.0 * step || y_np1 < 2.0 * step)
    throw Error(ErrorCode::AxisSingularity, "finite-difference stencil reaches an axis");
  const double h = step;
  auto d1 = [h](double m2, double m1, double p1, double p2) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h); };
  auto d2 = [h](double m2, double m1, double c, double p1, double p2) {
    return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
  };
  const double c = u(y1, y_n, y_np1);
  const double nm2 = u(y1, y_n - 2 * h, y_np1), nm1 = u(y1, y_n - h, y_np1);
  const double np1 = u(y1, y_n + h, y_np1), np2 = u(y1, y_n + 2 * h, y_np1);
  const double pm2 = u(y1, y_n, y_np1 - 2 * h), pm1 = u(y1, y_n, y_np1 - h);
  const double pp1 = u(y1, y_n, y_np1 + h), pp2 = u(y1, y_n, y_np1 + 2 * h);
  double u11 = 0.0;
  if (n == 2)
    u11 = d2(u(y1 - 2 * h, y_n, y_np1), u(y1 - h, y_n, y_np1), c, u(y1 + h, y_n, y_np1), u(y1 + 2 * h, y_n, y_np1));
  const double w = std::pow(y_n * y_np1, 1.0 - 2.0 * s);
  const double second = (y_n * y_n + y_np1 * y_np1) * u11 + d2(nm2, nm1, c, np1, np2) + d2(pm2, pm1, c, pp1, pp2);
  const double first = d1(nm2, nm1, np1, np2) / y_n + d1(pm2, pm1, pp1, pp2) / y_np1;
  return w * (second + (1.0 - 2.0 * s) * first);
}

OpeningDefect open_domain_check(const JetFn& u, const std::vector<QuarterPoint>& samples, double s, DiffMode mode,
                                double step) {
  OpeningDefect out;
  for (const auto& y : samples) {
    const double y1 = y.y_tan.empty() ? 0.0 : y.y_tan[0];
    const int n = static_cast<int>(y.y_tan.size()) + 1;
    double lhs;
    if (mode == DiffMode::Analytic) {
      const Jet3 Y1 = Jet3::variable(y1, kTan), Yn = Jet3::variable(y.y_n, kNor), Yp = Jet3::variable(y.y_np1, kVert);
      lhs = delta_Gs(u(Y1, 0.5 * (Yn * Yn - Yp * Yp), Yn * Yp), y.y_n, y.y_np1, s);
    } else {
      const ScalarFn3 composed = [&u](double a, double b, double c) {
        return u(Jet3(a), Jet3(0.5 * (b * b - c * c)), Jet3(b * c)).v;
      };
      lhs = delta_Gs_fd(composed, y1, y.y_n, y.y_np1, s, step, n);
    }
    const double xn = 0.5 * (y.y_n * y.y_n - y.y_np1 * y.y_np1), xp = y.y_n * y.y_np1;
    const Jet3 ux = u(Jet3::variable(y1, kTan), Jet3::variable(xn, kNor), Jet3::variable(xp, kVert));
    const double rhs = (y.y_n * y.y_n + y.y_np1 * y.y_np1) * apply_Ls(ux, xp, s);
    const double d = std::abs(lhs - rhs);
    out.max_abs = std::max(out.max_abs, d);
    out.max_rel = std::max(out.max_rel, d / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
  return out;
}

// ---------------- eigenpolynomial fits ----------------

namespace {

double weight_integral(double a, double b, double s) {
  const double p = 2.0 - 2.0 * s;
  return (std::pow(b, p) - std::pow(a, p)) / p;
}

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

Eigen::VectorXd weighted_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd Aw = sw.asDiagonal() * A;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Aw);
  if (qr.rank() < A.cols()) throw Error(ErrorCode::DegenerateFit, "design matrix is rank deficient");
  return qr.solve(sw.asDiagonal() * b);
}

}  // namespace

std::vector<GrushinSample> sample_grushin_ball(const std::function<double(const QuarterPoint&)>& v,
                                               const QuarterPoint& center, double radius, double s,
                                               int cells_per_axis) {
  const int n = static_cast<int>(center.y_tan.size()) + 1;
  const double hn = radius / cells_per_axis;
  // d <= r forces |dy''| <= 4 r^2 when the center is on P
  const double tan_half = 4.0 * radius * radius;
  const int ta = n == 2 ? cells_per_axis : 1;
  const double ht = 2.0 * tan_half / ta;
  std::vector<GrushinSample> out;
  for (int a = 0; a < ta; ++a)
    for (int i = 0; i < cells_per_axis; ++i)
      for (int j = 0; j < cells_per_axis; ++j) {
        QuarterPoint y;
        if (n == 2) y.y_tan = {center.y_tan[0] - tan_half + (a + 0.5) * ht};
        y.y_n = (i + 0.5) * hn;
        y.y_np1 = (j + 0.5) * hn;
        if (quasi_metric(y, center) > radius) continue;
        const double w = weight_integral(i * hn, (i + 1) * hn, s) * weight_integral(j * hn, (j + 1) * hn, s) *
                         (n == 2 ? ht : 1.0);
        out.push_back({y, w, v(y)});
      }
  return out;
}

EigenpolyFit fit_grushin_eigenpoly(const std::function<double(const QuarterPoint&)>& v, const QuarterPoint& center,
                                   const std::vector<double>& radii, double s, int n, int cells_per_axis) {
  if (static_cast<int>(center.y_tan.size()) != n - 1) throw Error(ErrorCode::InvalidArgument, "center dimension");
  const int cols = n + 2;
  EigenpolyFit fit;
  std::vector<double> best;
  double best_r = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  std::vector<double> xs, ys;
  for (double r : radii) {
    const auto samples = sample_grushin_ball(v, center, r, s, cells_per_axis);
    if (static_cast<int>(samples.size()) < 2 * cols)
      throw Error(ErrorCode::InsufficientSamples, "too few samples in a Grushin ball");
    Eigen::MatrixXd A(samples.size(), cols);
    Eigen::VectorXd b(samples.size()), w(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const QuarterPoint& y = samples[k].y;
      const double base = std::pow(y.y_n, 2.0 * s);
      int c = 0;
      A(k, c++) = base;
      if (n == 2) A(k, c++) = base * (y.y_tan[0] - center.y_tan[0]);
      A(k, c++) = base * y.y_n * y.y_n;
      A(k, c++) = base * y.y_np1 * y.y_np1;
      b(k) = samples[k].value;
      w(k) = samples[k].weight;
    }
    const Eigen::VectorXd coef = weighted_lsq(A, b, w);
    const Eigen::VectorXd e = A * coef - b;
    const double rem = std::sqrt(e.cwiseProduct(e).dot(w) / w.sum());
    scale = std::max(scale, std::sqrt(b.cwiseProduct(b).dot(w) / w.sum()));
    fit.radii.push_back(r);
    fit.remainder.push_back(rem);
    if (r < best_r) {
      best_r = r;
      best.assign(coef.data(), coef.data() + cols);
    }
  }
  for (std::size_t k = 0; k < fit.radii.size(); ++k)
    if (fit.remainder[k] > 1e-12 * scale) {
      xs.push_back(fit.radii[k]);
      ys.push_back(fit.remainder[k]);
    }
  fit.decay_slope = xs.size() >= 2 ? log_slope(xs, ys) : std::numeric_limits<double>::infinity();
  int c = 0;
  fit.a0 = best[c++];
  if (n == 2) fit.a_tan = {best[c++]};
  fit.a_n = best[c++];
  fit.a_np1 = best[c++];
  fit.harmonicity_defect = (1.0 + s) * fit.a_n + (1.0 - s) * fit.a_np1;
  return fit;
}

// ---------------- X/Y decompositions ----------------

namespace {

std::vector<double> tan_points(int n, const XYOptions& opts) {
  if (n == 1) return {0.0};
  if (opts.tan_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "n = 2 needs a tangential grid");
  return opts.tan_grid;
}

QuarterPoint make_point(int n, double y1, double yn, double yp) {
  return n == 2 ? QuarterPoint({y1}, yn, yp) : QuarterPoint(yn, yp);
}

double holder_on_P(const std::vector<double>& t, const std::vector<double>& f, double alpha) {
  double best = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const double d = std::sqrt(std::abs(t[i] - t[j]));  // quasi-metric on P
      if (d > 0.0) best = std::max(best, std::abs(f[i] - f[j]) / std::pow(d, alpha));
    }
  return best;
}

}  // namespace

XYDecomposition xy_decompose(const std::function<double(const QuarterPoint&)>& v, double s, int n,
                             const XYOptions& opts) {
  if (opts.epsilon > opts.alpha) throw Error(ErrorCode::InvalidArgument, "epsilon must not exceed alpha");
  XYDecomposition out;
  out.y_tan = tan_points(n, opts);
  const int m = opts.collar_cells;
  const double hc = opts.collar / m;
  for (double y1 : out.y_tan) {
    for (int j = 0; j <= m; ++j) {
      const double b = v(make_point(n, y1, 0.0, j * hc));
      if (std::abs(b) > opts.boundary_tol)
        throw Error(ErrorCode::BoundaryConditionViolated, "v does not vanish on {y_n = 0}");
    }
    Eigen::MatrixXd A(m * m, 3);
    Eigen::VectorXd b(m * m), w(m * m);
    std::vector<QuarterPoint> pts;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double yn = (i + 0.5) * hc, yp = (j + 0.5) * hc;
        const double base = std::pow(yn, 2.0 * s);
        const int k = i * m + j;
        A(k, 0) = base;
        A(k, 1) = base * yn * yn;
        A(k, 2) = base * yp * yp;
        pts.push_back(make_point(n, y1, yn, yp));
        b(k) = v(pts.back());
        w(k) = std::pow(yn * yp, 1.0 - 2.0 * s);
      }
    const Eigen::VectorXd c = weighted_lsq(A, b, w);
    out.c0.push_back(c(0));
    out.a0.push_back(c(1));
    out.a1.push_back(c(2));
    const Eigen::VectorXd e = b - A * c;
    for (int k = 0; k < m * m; ++k) {
      const double yn = pts[k].y_n, r = pts[k].y_n + pts[k].y_np1;
      const double C0 = e(k) / (std::pow(yn, 2.0 * s) * std::pow(r, 2.0 + 2.0 * opts.alpha - opts.epsilon));
      out.sample_points.push_back(pts[k]);
      out.C0.push_back(C0);
      out.max_C0 = std::max(out.max_C0, std::abs(C0));
    }
  }
  if (n == 2) {
    std::vector<double> dc0(out.y_tan.size());
    for (std::size_t i = 0; i < out.y_tan.size(); ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1, hi = std::min(i + 1, out.y_tan.size() - 1);
      dc0[i] = (out.c0[hi] - out.c0[lo]) / (out.y_tan[hi] - out.y_tan[lo]);
    }
    out.seminorm_dc0 = holder_on_P(out.y_tan, dc0, opts.alpha);
    out.seminorm_a0 = holder_on_P(out.y_tan, out.a0, opts.alpha);
    out.seminorm_a1 = holder_on_P(out.y_tan, out.a1, opts.alpha);
  }
  // pair sampling: half global pairs, half local ones
  std::mt19937_64 rng(opts.seed);
  const std::size_t N = out.sample_points.size();
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  std::uniform_int_distribution<long> offset(-(m + 1), m + 1);
  for (int t = 0; t < opts.pairs; ++t) {
    const std::size_t i = pick(rng);
    std::size_t j;
    if (t % 2 == 0) {
      j = pick(rng);
    } else {
      const long jj = static_cast<long>(i) + offset(rng);
      if (jj < 0 || jj >= static_cast<long>(N)) continue;
      j = static_cast<std::size_t>(jj);
    }
    if (i == j) continue;
    const double d = quasi_metric(out.sample_points[i], out.sample_points[j]);
    if (d > 0.0) out.seminorm_C0 = std::max(out.seminorm_C0, std::abs(out.C0[i] - out.C0[j]) / std::pow(d, opts.epsilon));
  }
  return out;
}

YDecomposition y_decompose(const std::function<double(const QuarterPoint&)>& f, double s, int n,
                           const XYOptions& opts) {
  YDecomposition out;
  out.y_tan = tan_points(n, opts);
  const int m = opts.collar_cells;
  const double hc = opts.collar / m;
  for (double y1 : out.y_tan) {
    Eigen::MatrixXd A(m * m, 3);
    Eigen::VectorXd b(m * m), w = Eigen::VectorXd::Ones(m * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double yn = (i + 0.5) * hc, yp = (j + 0.5) * hc;
        const int k = i * m + j;
        A(k, 0) = 1.0;
        A(k, 1) = yn;
        A(k, 2) = yp;
        b(k) = f(make_point(n, y1, yn, yp)) / (yn * std::pow(yp, 1.0 - 2.0 * s));
      }
    const Eigen::VectorXd c = weighted_lsq(A, b, w);
    out.f0.push_back(c(0));
    out.max_f1 = std::max(out.max_f1, (b.array() - c(0)).abs().maxCoeff());
  }
  return out;
}

}  // namespace thinobs
