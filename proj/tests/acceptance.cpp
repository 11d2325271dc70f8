// One line per acceptance criterion; exit status 1 if any fails.
#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "thinobs/closed_forms.hpp"
#include "thinobs/frontier.hpp"
#include "thinobs/grushin.hpp"
#include "thinobs/hodograph.hpp"
#include "thinobs/solver.hpp"
#include "thinobs/spectral.hpp"

using namespace thinobs;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome eigenvalue_law() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  bool refines = true;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto a = sl_eigen_oracle(s, 2000, 5), b = sl_eigen_oracle(s, 4000, 5);
    for (int k = 0; k < 5; ++k) {
      const double exact = k * (k + 1.0) - s * (s - 1.0);
      const double ea = std::abs(a[k] - exact) / exact, eb = std::abs(b[k] - exact) / exact;
      worst = std::max(worst, ea);
      refines = refines && eb < ea;
    }
  }
  const double t = elapsed(t0);
  return {worst <= 1e-3 && refines && t <= 30.0,
          fmt("max rel err %.2e, ", worst) + (refines ? "refinement reduces every error" : "refinement not monotone") +
              fmt(", %.1fs", t)};
}

Outcome recurrence_identity() {
  using R = boost::multiprecision::cpp_rational;
  bool exact = true;
  for (const R s : {R(1, 4), R(1, 2), R(3, 4), R(1, 3)})
    for (int k = 0; k <= 12; ++k) {
      const auto a = hypergeom_coeffs_t<R>(k, s);
      exact = exact && a.size() == static_cast<std::size_t>(k + 1) && a.back() != 0 &&
              a.back() * recurrence_factor<R>(k, k, s) == 0;
    }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> xn(-1.0, 1.0), xp(0.01, 1.0);
  double spread = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto mode = make_mode(1, s);
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 100; ++i) {
      const HalfPoint p(xn(rng), xp(rng));
      const double ratio = eval_mode_2d(mode, p.x_n, p.x_np1) /
                           (eval_w0s(s, p) * (s * std::hypot(p.x_n, p.x_np1) - p.x_n));
      lo = std::min(lo, ratio), hi = std::max(hi, ratio);
    }
    spread = std::max(spread, (hi - lo) / std::abs(hi));
  }
  return {exact && spread <= 1e-12,
          std::string(exact ? "exact termination for k <= 12" : "termination failed") + fmt(", ratio spread %.2e", spread)};
}

Outcome model_pde() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xn(-1.0, 1.0), xp(0.01, 1.0);
  double ls = 0.0, comp = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    for (int i = 0; i < 10000; ++i) {
      const double a = xn(rng), b = xp(rng);
      const Jet3 u = w1s_t(s, Jet3::variable(a, kNor), Jet3::variable(b, kVert));
      ls = std::max(ls, std::abs(apply_Ls(u, b, s)));
    }
    for (int i = 0; i <= 2000; ++i) {
      const double x = -1.0 + i / 1000.0;
      const double w = eval_w1s(s, HalfPoint(x, 0.0));
      const double flux = thin_flux_w1s(s, x);
      comp = std::max({comp, std::max(0.0, -w), std::max(0.0, flux), std::abs(w * flux)});
    }
  }
  return {ls <= 1e-10 && comp <= 1e-12, fmt("max |L_s w1s| %.2e, complementarity %.2e", ls, comp)};
}

Outcome functional_zero() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  double worst = 0.0, off = INFINITY;
  for (double s : {0.3, 0.5, 0.7}) {
    const auto v = v_model_jet(s);
    const auto other = v_model_jet(s, -s / (2.0 * (1.0 + s)), 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double yn = u(rng), yp = u(rng);
      worst = std::max(worst, std::abs(eval_F(v, 0.0, yn, yp, s, 1).F));
      off = std::min(off, std::abs(eval_F(other, 0.0, 0.5, 0.5, s, 1).F));
    }
  }
  const double t = elapsed(t0);
  return {worst <= 1e-12 && off > 1e-6 && t <= 5.0,
          fmt("max |F(v_model)| %.2e, uncalibrated scaling %.2e, %.2fs", worst, off, t)};
}

Outcome linearization() {
  std::vector<QuarterPoint> smp;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) smp.emplace_back(0.2 + 0.6 * (i + 0.5) / 20, 0.2 + 0.6 * (j + 0.5) / 20);
  const std::vector<double> ts{1e-2, 3e-3, 1e-3};
  bool ok = true;
  double agree = 0.0, slope = INFINITY, last = 0.0;
  for (double s : {0.3, 0.7}) {
    const auto a = linearization_check(v_model_jet(s), bump_jet(0.5, 0.5, 0.3), ts, smp, s, 1);
    const auto b = linearization_check(v_model_jet(s), bump_jet(0.45, 0.55, 0.25), ts, smp, s, 1);
    agree = std::max(agree, std::abs(a.c.back() - b.c.back()) / std::abs(a.c.back()));
    slope = std::min({slope, a.slope, b.slope});
    last = std::max({last, a.defect.back(), b.defect.back()});
    for (const auto* r : {&a, &b})
      for (std::size_t k = 1; k < r->defect.size(); ++k) ok = ok && r->defect[k] < r->defect[k - 1];
  }
  return {ok && agree <= 0.01 && slope >= 0.8 && last <= 1e-2,
          fmt("constants agree to %.2e, min slope %.2f, defect(1e-3) %.2e", agree, slope, last)};
}

struct SolverRuns {
  double min_order = INFINITY, fb = 0.0, comp = 0.0, seconds = 0.0;
  std::vector<DiscreteSolution> finest;
};

SolverRuns& solver_runs() {
  static SolverRuns runs = [] {
    SolverRuns r;
    const auto t0 = std::chrono::steady_clock::now();
    for (double s : {0.3, 0.5, 0.7}) {
      double prev = 0.0;
      DiscreteSolution last;
      for (int m : {32, 64, 128}) {
        ProblemSpec spec;
        spec.grid = make_grid(1, 1.0 / m, s);
        spec.obstacle = [](const HalfPoint&) { return 0.0; };
        spec.dirichlet = [s](const HalfPoint& x) { return eval_w1s(s, x); };
        SolveOptions o;
        o.auto_omega = true;
        DiscreteSolution sol = solve_vi(spec, 1e-9, 400000, o);
        double err = 0.0;
        for (std::size_t k = 0; k < sol.values.size(); ++k)
          err = std::max(err, std::abs(sol.values[k] - eval_w1s(s, sol.grid.point(k))));
        if (prev > 0.0) r.min_order = std::min(r.min_order, std::log2(prev / err));
        prev = err;
        const auto rep = complementarity_report(sol);
        r.comp = std::max({r.comp, rep.max_violation, rep.max_positive_flux, rep.max_product});
        for (const auto& p : extract_free_boundary(sol)) r.fb = std::max(r.fb, std::abs(p.x_n) / sol.grid.h);
        last = std::move(sol);
      }
      r.finest.push_back(std::move(last));
    }
    r.seconds = elapsed(t0);
    return r;
  }();
  return runs;
}

Outcome solver_recovery() {
  const auto& r = solver_runs();
  return {r.min_order >= 0.8 && r.fb <= 2.0 && r.comp <= 1e-8 && r.seconds <= 120.0,
          fmt("min order %.2f, free boundary within %.2f h, complementarity %.2e, %.1fs", r.min_order, r.fb, r.comp,
              r.seconds)};
}

Outcome asymptotic_fit() {
  double cmin = INFINITY, cmax = -INFINITY, nu = 0.0;
  for (const auto& sol : solver_runs().finest) {
    const auto fit = fit_expansion(sol, extract_free_boundary(sol).front());
    cmin = std::min(cmin, fit.c), cmax = std::max(cmax, fit.c);
    nu = std::max(nu, std::abs(fit.nu.back() - 1.0));
  }
  return {cmin >= 0.95 && cmax <= 1.05 && nu == 0.0, fmt("c in [%.5f, %.5f], |nu - e_n| %.1e", cmin, cmax, nu)};
}

Outcome domain_opening() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> t(-1.0, 1.0), u(0.05, 1.0);
  std::vector<QuarterPoint> pts;
  for (int i = 0; i < 1000; ++i) pts.emplace_back(std::vector<double>{t(rng)}, u(rng), u(rng));
  double worst = 0.0;
  for (double s : {0.3, 0.5, 0.7}) {
    const std::vector<JetFn> fields{
        [](const Jet3&, const Jet3& b, const Jet3&) { return b; },
        [](const Jet3&, const Jet3&, const Jet3& c) { return c * c; },
        [s](const Jet3&, const Jet3& b, const Jet3& c) { return w1s_t(s, b, c); }};
    for (const auto& f : fields) worst = std::max(worst, open_domain_check(f, pts, s).max_rel);
  }
  return {worst <= 1e-10, fmt("max relative defect %.2e", worst)};
}

Outcome grushin_identities() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> t(-1.0, 1.0), u(0.05, 1.0);
  double zero = 0.0, mixed = 0.0;
  for (double s : {0.3, 0.5, 0.7})
    for (int i = 0; i < 1000; ++i) {
      const double y1 = t(rng), yn = u(rng), yp = u(rng);
      zero = std::max(zero, std::abs(delta_Gs([s](const Jet3&, const Jet3& b, const Jet3&) { return pow(b, 2.0 * s); },
                                              y1, yn, yp, s)));
      zero = std::max(zero, std::abs(delta_Gs(
                                [s](const Jet3& a, const Jet3& b, const Jet3&) { return pow(b, 2.0 * s) * a; }, y1, yn,
                                yp, s)));
      const double an = 0.7, ap = -1.3;
      const double exact = 4.0 * ((1.0 + s) * an + (1.0 - s) * ap) * yn * std::pow(yp, 1.0 - 2.0 * s);
      const double got = delta_Gs(
          [&](const Jet3&, const Jet3& b, const Jet3& c) { return pow(b, 2.0 * s) * (an * b * b + ap * c * c); }, y1,
          yn, yp, s);
      mixed = std::max(mixed, std::abs(got - exact) / std::max(1.0, std::abs(exact)));
    }
  return {zero <= 1e-12 && mixed <= 1e-10, fmt("harmonic residual %.2e, mixed formula defect %.2e", zero, mixed)};
}

Outcome quasi_metric_check() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> t(-1.0, 1.0), u(0.0, 1.0);
  double dil = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const QuarterPoint p({t(rng)}, u(rng), u(rng)), q({t(rng)}, u(rng), u(rng));
    for (double lam : {0.3, 2.0, 5.0})
      dil = std::max(dil, std::abs(quasi_metric(dilate(p, lam), dilate(q, lam)) - lam * quasi_metric(p, q)) /
                              (lam * quasi_metric(p, q)));
  }
  const double k1 = quasi_triangle_constant(1, 100000, 11), k2 = quasi_triangle_constant(2, 100000, 12);
  return {dil <= 1e-13 && k1 <= 4.0 && k2 <= 4.0,
          fmt("dilation defect %.2e, K(n=1) %.3f, K(n=2) %.3f", dil, k1, k2)};
}

Outcome barrier() {
  double flat_lo = INFINITY, flat_up = -INFINITY, curved = INFINITY, pou = 0.0;
  ThinGraph g;
  g.g = [](double x) { return 0.05 * std::sin(x); };
  g.dg = [](double x) { return 0.05 * std::cos(x); };
  g.d2g = [](double x) { return -0.05 * std::sin(x); };
  for (double s : {0.3, 0.5, 0.7})
    for (double tau : {0.1, 0.25}) {
      const auto lo = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Lower);
      const auto up = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Upper);
      const auto pts = barrier_samples(lo, 1000, 13, 0.5, 0.05, 0.5);
      flat_lo = std::min(flat_lo, subsolution_check(lo, pts));
      flat_up = std::max(flat_up, subsolution_check(up, pts));
      const auto cb = build_barrier(g, 2, s, tau, BarrierSign::Lower);
      const auto cpts = barrier_samples(cb, 1000, 14, 0.25, 0.02, 0.1);
      for (const auto& p : cpts) {
        double sum = 0.0;
        for (const auto& [j, eta] : cb.cover().partition(p)) sum += eta.v;
        pou = std::max(pou, std::abs(sum - 1.0));
      }
      curved = std::min(curved, subsolution_check(cb, cpts));
    }
  return {flat_lo > 0.0 && flat_up < 0.0 && pou <= 1e-12 && curved > 0.0,
          fmt("flat lower min %.3e, flat upper max %.3e, curved POU err %.1e, curved lower min %.3e", flat_lo, flat_up,
              pou, curved)};
}

Outcome diffeomorphism() {
  double id = 0.0, fixed = 0.0;
  std::vector<double> cs;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 14; ++j)
      for (int k = 0; k <= 14; ++k) {
        const QuarterPoint y({-1.0 + 0.1 * i}, 0.05 * j, 0.05 * k);
        id = std::max(id, std::abs(diffeo_flow({0.0}, y).y_tan[0] - y.y_tan[0]));
        if (std::hypot(y.y_n, y.y_np1) >= 0.5 || std::abs(y.y_tan[0]) >= 0.75)
          fixed = std::max(fixed, std::abs(diffeo_flow({0.9}, y).y_tan[0] - y.y_tan[0]));
      }
  for (double a : {1e-3, 1e-2, 1e-1}) {
    double c = 0.0;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 12; ++j)
        for (int k = 0; k <= 12; ++k) {
          const QuarterPoint y({-1.0 + 0.1 * i}, 0.05 * j, 0.05 * k);
          const auto z = diffeo_flow({a}, y);
          c = std::max(c, std::hypot(z.y_tan[0] - y.y_tan[0], std::hypot(z.y_n - y.y_n, z.y_np1 - y.y_np1)) / a);
        }
    cs.push_back(c);
  }
  const double spread = (*std::max_element(cs.begin(), cs.end()) - *std::min_element(cs.begin(), cs.end())) / cs[0];
  return {id <= 1e-12 && fixed == 0.0 && spread <= 0.05,
          fmt("identity err %.1e, fixed-region err %.1e, C = %.5f (spread %.1e)", id, fixed, cs[0], spread)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"eigenvalue law", eigenvalue_law},
      {"recurrence and mode identity", recurrence_identity},
      {"model solution PDE", model_pde},
      {"nonlinear functional zero", functional_zero},
      {"linearization", linearization},
      {"solver recovery", solver_recovery},
      {"asymptotic fit", asymptotic_fit},
      {"domain opening", domain_opening},
      {"Grushin identities", grushin_identities},
      {"quasi-metric", quasi_metric_check},
      {"barrier", barrier},
      {"diffeomorphism", diffeomorphism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2zu %-30s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
