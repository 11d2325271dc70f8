#include "thinobs/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace thinobs {

double eigenvalue(int k, FracOrder s) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "mode index must be nonnegative");
  const double sv = s;
  return k * (k + 1.0) - sv * (sv - 1.0);
}

std::vector<double> hypergeom_coeffs(int k, FracOrder s) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "mode index must be nonnegative");
  return hypergeom_coeffs_t<double>(k, s.value());
}

HomogeneousMode make_mode(int k, FracOrder s) {
  HomogeneousMode m;
  m.k = k;
  m.s = s;
  m.coeffs = hypergeom_coeffs(k, s);
  m.eigenvalue = eigenvalue(k, s);
  m.homogeneity = k + m.s;
  return m;
}

double eval_mode_2d(const HomogeneousMode& mode, double x_n, double x_np1) {
  if (x_np1 < 0.0) throw Error(ErrorCode::InvalidArgument, "x_{n+1} must be nonnegative");
  if (x_n == 0.0 && x_np1 == 0.0) return 0.0;
  return eval_mode_2d_t<double>(mode.k, mode.s, mode.coeffs, x_n, x_np1);
}

namespace {

// int_a^b sin(t)^q dt for a cell inside [0, pi]. The smooth factor (sin t / t)^q is
// frozen at the midpoint and t^q is integrated exactly, t measured from the nearer end.
double sin_power_integral(double a, double b, double q) {
  if (b <= a) return 0.0;
  const double mid = 0.5 * (a + b);
  double lo = a, hi = b, m = mid;
  if (mid > 0.5 * M_PI) {
    lo = M_PI - b;
    hi = M_PI - a;
    m = M_PI - mid;
  }
  lo = std::max(lo, 0.0);
  const double g = std::pow(std::sin(m) / m, q);
  return g * (std::pow(hi, q + 1.0) - std::pow(lo, q + 1.0)) / (q + 1.0);
}

}  // namespace

std::vector<double> sl_eigen_oracle(FracOrder s, int grid_size, int count, SlWeightRule rule) {
  if (grid_size < 100) throw Error(ErrorCode::InvalidArgument, "grid_size must be at least 100");
  if (count < 1 || count > 10) throw Error(ErrorCode::InvalidArgument, "count must lie in [1, 10]");
  const int N = grid_size;
  const double d = M_PI / N;
  const double p = 1.0 - 2.0 * s.value();

  // Unknowns at phi_i = i d, i = 0..N-1; phi_N = pi carries the Dirichlet value.
  std::vector<double> kappa(N), mass(N, 0.0);
  for (int i = 0; i < N; ++i) {
    const double a = i * d, b = (i + 1) * d;
    if (rule == SlWeightRule::Midpoint) {
      kappa[i] = std::pow(std::sin(0.5 * (a + b)), p) / d;
    } else {
      kappa[i] = 1.0 / sin_power_integral(a, b, -p);
    }
  }
  for (int i = 0; i < N; ++i) {
    if (rule == SlWeightRule::Midpoint) {
      const double right = std::pow(std::sin((i + 0.5) * d), p);
      const double left = i > 0 ? std::pow(std::sin((i - 0.5) * d), p) : 0.0;
      mass[i] = 0.5 * d * (left + right);
    } else {
      mass[i] = sin_power_integral(std::max(0.0, (i - 0.5) * d), (i + 0.5) * d, p);
    }
  }

  Eigen::VectorXd diag(N), sub(N - 1);
  for (int i = 0; i < N; ++i) {
    const double kl = i > 0 ? kappa[i - 1] : 0.0;
    diag[i] = (kl + kappa[i]) / mass[i];
  }
  for (int i = 0; i + 1 < N; ++i) sub[i] = -kappa[i] / std::sqrt(mass[i] * mass[i + 1]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "tridiagonal eigensolve failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + count);
}

double mode_inner_product(int k1, int k2, FracOrder s, int nodes) {
  if (nodes < 16) throw Error(ErrorCode::InvalidArgument, "need at least 16 quadrature nodes");
  const HomogeneousMode m1 = make_mode(k1, s), m2 = make_mode(k2, s);
  const double p = 1.0 - 2.0 * s.value();
  // tanh-sinh rule on (0, pi); the endpoint singularities are algebraic.
  const double tmax = 3.2;
  const double h = 2.0 * tmax / (nodes - 1);
  double i11 = 0.0, i22 = 0.0, i12 = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double t = -tmax + j * h;
    const double u = 0.5 * M_PI * std::sinh(t);
    const double cu = std::cosh(u);
    const double w = h * 0.5 * M_PI * std::cosh(t) / (cu * cu) * 0.5 * M_PI;
    // distance of phi to the nearer endpoint, computed without cancellation
    const double e = std::exp(-2.0 * std::abs(u));
    const double dist = M_PI * e / (1.0 + e);
    const double sphi = std::sin(dist);
    if (sphi <= 0.0) continue;
    const double xn = (u < 0 ? 1.0 : -1.0) * std::cos(dist);
    const double a = eval_mode_2d(m1, xn, sphi), b = eval_mode_2d(m2, xn, sphi);
    const double weight = std::pow(sphi, p) * w;
    i11 += weight * a * a;
    i22 += weight * b * b;
    i12 += weight * a * b;
  }
  return i12 / std::sqrt(i11 * i22);
}

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Dirichlet: return "Dirichlet";
    case BoundaryKind::Neumann: return "Neumann";
    case BoundaryKind::MixedDN: return "MixedDN";
  }
  return "?";
}

Polynomial poly_laplacian(const Polynomial& p) {
  Polynomial out;
  for (const auto& [mono, c] : p) {
    for (std::size_t i = 0; i < mono.size(); ++i) {
      if (mono[i] < 2) continue;
      Monomial m = mono;
      m[i] -= 2;
      out[m] += c * mono[i] * (mono[i] - 1);
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0.0 ? out.erase(it) : std::next(it);
  return out;
}

std::vector<Monomial> monomials_of_degree(int vars, int degree) {
  std::vector<Monomial> out;
  if (vars == 0) {
    if (degree == 0) out.push_back({});
    return out;
  }
  Monomial cur(vars, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == vars - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[i] = e;
      rec(i + 1, left - e);
    }
  };
  rec(0, degree);
  return out;
}

namespace {

bool near_integer(double x, int& out) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || r < 0) return false;
  out = static_cast<int>(r);
  return true;
}

// u = sum_j c_j t^{2j} Delta^j p with c_{j+1} = -c_j / denom(j).
BasisElement tower(const Polynomial& seed, const std::function<double(int)>& denom) {
  BasisElement e;
  e.seed = seed;
  Polynomial cur = seed;
  double c = 1.0;
  for (int j = 0; !cur.empty(); ++j) {
    Polynomial scaled;
    for (const auto& [m, v] : cur) scaled[m] = c * v;
    e.terms.push_back(scaled);
    cur = poly_laplacian(cur);
    c = -c / denom(j);
  }
  return e;
}

}  // namespace

HomogeneousBasis enumerate_homogeneous(BoundaryKind kind, double kappa, int n, FracOrder s) {
  if (!(kappa >= 0.0)) throw Error(ErrorCode::InvalidArgument, "homogeneity must be nonnegative");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 1");
  const double sv = s;
  HomogeneousBasis basis;
  basis.kind = kind;
  basis.n = n;
  basis.kappa = kappa;
  basis.s = sv;
  int deg = 0;
  switch (kind) {
    case BoundaryKind::Neumann:
      if (!near_integer(kappa, deg)) return basis;
      for (const auto& m : monomials_of_degree(n, deg))
        basis.elements.push_back(tower({{m, 1.0}}, [sv](int j) { return (2.0 * j + 2.0) * (2.0 * j + 2.0 - 2.0 * sv); }));
      break;
    case BoundaryKind::Dirichlet:
      if (!near_integer(kappa - 2.0 * sv, deg)) return basis;
      for (const auto& m : monomials_of_degree(n, deg))
        basis.elements.push_back(tower({{m, 1.0}}, [sv](int j) { return (2.0 * j + 2.0) * (2.0 * j + 2.0 + 2.0 * sv); }));
      break;
    case BoundaryKind::MixedDN: {
      int total = 0;
      if (!near_integer(kappa - sv, total)) return basis;
      for (int m = 0; m <= total; ++m) {
        const int d = total - m;
        if (n == 1 && d > 0) continue;
        const double km = m + sv;
        for (const auto& mono : monomials_of_degree(n - 1, d)) {
          BasisElement e = tower({{mono, 1.0}}, [km, sv](int j) {
            return 2.0 * (j + 1.0) * (2.0 * (j + 1.0) + 2.0 * km + 1.0 - 2.0 * sv);
          });
          e.mode_m = m;
          basis.elements.push_back(std::move(e));
        }
      }
      break;
    }
  }
  return basis;
}

template <class T>
T eval_basis_element(const HomogeneousBasis& basis, const BasisElement& e, const T& x1, const T& xn, const T& xp) {
  std::vector<T> vars;
  if (basis.kind == BoundaryKind::MixedDN) {
    if (basis.n >= 2) vars.push_back(x1);
  } else {
    if (basis.n >= 2) vars.push_back(x1);
    vars.push_back(xn);
  }
  if (basis.n > 2) throw Error(ErrorCode::InvalidArgument, "evaluation supports n <= 2");
  const T t2 = basis.kind == BoundaryKind::MixedDN ? xn * xn + xp * xp : xp * xp;
  T sum(0.0), power(1.0);
  for (const auto& term : e.terms) {
    sum = sum + power * eval_poly(term, vars);
    power = power * t2;
  }
  switch (basis.kind) {
    case BoundaryKind::Neumann: return sum;
    case BoundaryKind::Dirichlet:
      if (value_of(xp) == 0.0) return T(0.0);
      return pow(xp, 2.0 * basis.s) * sum;
    case BoundaryKind::MixedDN: {
      const auto coeffs = hypergeom_coeffs_t<double>(e.mode_m, basis.s);
      return sum * eval_mode_2d_t(e.mode_m, basis.s, coeffs, xn, xp);
    }
  }
  return sum;
}

template double eval_basis_element<double>(const HomogeneousBasis&, const BasisElement&, const double&,
                                           const double&, const double&);
template Jet3 eval_basis_element<Jet3>(const HomogeneousBasis&, const BasisElement&, const Jet3&, const Jet3&,
                                       const Jet3&);

double basis_residual(const HomogeneousBasis& basis, const BasisElement& e, const HalfPoint& p) {
  const double x1 = p.x_tan.empty() ? 0.0 : p.x_tan[0];
  const Jet3 u = eval_basis_element(basis, e, Jet3::variable(x1, kTan), Jet3::variable(p.x_n, kNor),
                                    Jet3::variable(p.x_np1, kVert));
  const double unweighted = u.laplacian() + (1.0 - 2.0 * basis.s) / p.x_np1 * u.g[kVert];
  const double r = std::sqrt(x1 * x1 + p.x_n * p.x_n + p.x_np1 * p.x_np1);
  return unweighted * std::pow(r, 2.0 - basis.kappa);
}

SampleBall sample_half_ball(const std::function<double(const HalfPoint&)>& u, int n, double radius,
                            int cells_per_axis, FracOrder s) {
  if (n < 1 || n > 2) throw Error(ErrorCode::InvalidArgument, "sampling supports n in {1, 2}");
  if (cells_per_axis < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 cells per axis");
  SampleBall ball;
  ball.radius = radius;
  const int M = cells_per_axis;
  const double d = radius / M;
  const double q = 2.0 - 2.0 * s.value();
  const int tan_cells = n == 2 ? 2 * M : 1;
  for (int a = 0; a < tan_cells; ++a) {
    for (int i = 0; i < 2 * M; ++i) {
      for (int j = 0; j < M; ++j) {
        const double x1 = -radius + (a + 0.5) * d;
        const double xn = -radius + (i + 0.5) * d;
        const double xp = (j + 0.5) * d;
        const double r2 = xn * xn + xp * xp + (n == 2 ? x1 * x1 : 0.0);
        if (r2 > radius * radius) continue;
        WeightedSample ws;
        ws.x = n == 2 ? HalfPoint({x1}, xn, xp) : HalfPoint(xn, xp);
        ws.value = u(ws.x);
        ws.weight = (std::pow((j + 1) * d, q) - std::pow(j * d, q)) / q * std::pow(d, n);
        ball.samples.push_back(std::move(ws));
      }
    }
  }
  return ball;
}

namespace {

struct Template {
  std::vector<std::string> names;
  std::vector<std::function<double(const HalfPoint&)>> basis;
  std::function<double(const HalfPoint&)> fixed;
};

Template make_template(BoundaryKind kind, double s, int n, double f0) {
  Template t;
  auto coord = [n](const HalfPoint& p, int j) { return j < n - 1 ? p.x_tan[j] : p.x_n; };
  switch (kind) {
    case BoundaryKind::Dirichlet:
      t.names.push_back("a");
      t.basis.push_back([s](const HalfPoint& p) { return std::pow(p.x_np1, 2.0 * s); });
      for (int j = 0; j < n; ++j) {
        t.names.push_back("b_" + std::to_string(j + 1));
        t.basis.push_back([s, j, coord](const HalfPoint& p) { return std::pow(p.x_np1, 2.0 * s) * coord(p, j); });
      }
      t.fixed = [s, f0](const HalfPoint& p) { return f0 / (1.0 + 2.0 * s) * std::pow(p.x_np1, 1.0 + 2.0 * s); };
      break;
    case BoundaryKind::Neumann:
      t.names.push_back("c");
      t.basis.push_back([](const HalfPoint&) { return 1.0; });
      for (int j = 0; j < n; ++j) {
        t.names.push_back("a_" + std::to_string(j + 1));
        t.basis.push_back([j, coord](const HalfPoint& p) { return coord(p, j); });
      }
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          t.names.push_back("d_" + std::to_string(i + 1) + std::to_string(j + 1));
          t.basis.push_back([i, j, coord](const HalfPoint& p) { return coord(p, i) * coord(p, j); });
        }
      t.fixed = [s, f0](const HalfPoint& p) { return f0 / (2.0 * (2.0 - 2.0 * s)) * p.x_np1 * p.x_np1; };
      break;
    case BoundaryKind::MixedDN:
      t.names = {"a_0", "a_1"};
      t.basis.push_back([s](const HalfPoint& p) { return w0s_t<double>(s, p.x_n, p.x_np1); });
      t.basis.push_back([s](const HalfPoint& p) {
        const double r = std::hypot(p.x_n, p.x_np1);
        return w0s_t<double>(s, p.x_n, p.x_np1) * (s * r - p.x_n);
      });
      t.fixed = [s, f0](const HalfPoint& p) {
        const double w = w0s_t<double>(s, p.x_n, p.x_np1);
        return f0 / (2.0 * (2.0 + 2.0 * s)) * std::pow(w, 1.0 + 1.0 / s);
      };
      break;
  }
  return t;
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

}  // namespace

BoundaryFit fit_boundary_expansion(const std::vector<SampleBall>& balls, BoundaryKind kind, FracOrder s, int n,
                                   double f0) {
  const Template t = make_template(kind, s, n, f0);
  const std::size_t K = t.basis.size();
  if (balls.empty()) throw Error(ErrorCode::InsufficientSamples, "no sample balls");
  BoundaryFit fit;
  fit.kind = kind;
  fit.names = t.names;
  double scale = 0.0;
  for (const auto& ball : balls) {
    if (ball.samples.size() < 2 * K)
      throw Error(ErrorCode::InsufficientSamples, "ball of radius " + std::to_string(ball.radius) + " has too few samples");
    Eigen::MatrixXd A(ball.samples.size(), K);
    Eigen::VectorXd b(ball.samples.size());
    double wsum = 0.0;
    for (std::size_t i = 0; i < ball.samples.size(); ++i) {
      const auto& smp = ball.samples[i];
      const double sw = std::sqrt(smp.weight);
      for (std::size_t k = 0; k < K; ++k) A(i, k) = sw * t.basis[k](smp.x);
      b[i] = sw * (smp.value - t.fixed(smp.x));
      wsum += smp.weight;
      scale = std::max(scale, std::abs(smp.value));
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    const double rem = std::sqrt((A * c - b).squaredNorm() / wsum);
    fit.radii.push_back(ball.radius);
    fit.remainder.push_back(rem);
    fit.coeffs_per_ball.emplace_back(c.data(), c.data() + K);
  }
  std::size_t smallest = 0;
  for (std::size_t i = 1; i < fit.radii.size(); ++i)
    if (fit.radii[i] < fit.radii[smallest]) smallest = i;
  fit.coeffs = fit.coeffs_per_ball[smallest];

  const double floor = 1e-12 * std::max(scale, 1e-300);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < fit.radii.size(); ++i)
    if (fit.remainder[i] > floor) {
      xs.push_back(fit.radii[i]);
      ys.push_back(fit.remainder[i]);
    }
  fit.at_floor = xs.size() < 2;
  fit.decay_exponent = fit.at_floor ? std::numeric_limits<double>::quiet_NaN() : log_slope(xs, ys);
  return fit;
}

}  // namespace thinobs
