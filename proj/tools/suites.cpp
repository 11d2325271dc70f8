#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "thinobs/closed_forms.hpp"
#include "thinobs/frontier.hpp"
#include "thinobs/grushin.hpp"
#include "thinobs/hodograph.hpp"
#include "thinobs/io.hpp"
#include "thinobs/solver.hpp"
#include "thinobs/spectral.hpp"

namespace thinobs::cli {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kSuites = {"solve", "spectrum", "hodograph", "grushin", "barrier"};

// ---------------- parameters ----------------

Params::Params(json j, std::set<std::string> allowed, std::string where) : j_(std::move(j)), where_(std::move(where)) {
  if (!j_.is_object()) throw Error(ErrorCode::ConfigInvalid, where_ + ": expected a JSON object");
  allowed.insert("schema_version");
  allowed.insert("suite");
  for (const auto& [k, v] : j_.items())
    if (!allowed.count(k)) throw Error(ErrorCode::ConfigInvalid, where_ + ": unknown key '" + k + "'");
  if (j_.contains("schema_version") && j_["schema_version"] != 1)
    throw Error(ErrorCode::ConfigInvalid, where_ + ": unsupported schema_version");
}

void Params::require(const std::string& key) const {
  if (!j_.contains(key)) throw Error(ErrorCode::ConfigInvalid, where_ + ": missing required field '" + key + "'");
}

double Params::number(const std::string& key, double fallback, double lo, double hi) const {
  if (!j_.contains(key)) return fallback;
  if (!j_[key].is_number()) throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' must be a number");
  const double v = j_[key].get<double>();
  if (!(v >= lo && v <= hi))
    throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' out of range [" + format_number(lo) + ", " +
                                              format_number(hi) + "]");
  return v;
}

std::vector<double> Params::numbers(const std::string& key, std::vector<double> fallback, double lo, double hi) const {
  if (!j_.contains(key)) return fallback;
  const json& v = j_[key];
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array() && !v.empty()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' must hold numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' must be a number or a non-empty list");
  }
  for (double x : out)
    if (!(x >= lo && x <= hi))
      throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' out of range [" + format_number(lo) + ", " +
                                                format_number(hi) + "]");
  return out;
}

std::vector<double> Params::s_values(std::vector<double> fallback) const {
  auto v = numbers("s", std::move(fallback), 0.0, 1.0);
  for (double s : v)
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::ConfigInvalid, where_ + ": field 's' must lie in (0, 1)");
  return v;
}

long Params::integer(const std::string& key, long fallback, long lo, long hi) const {
  if (!j_.contains(key)) return fallback;
  if (!j_[key].is_number_integer())
    throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' must be an integer");
  const long v = j_[key].get<long>();
  if (v < lo || v > hi)
    throw Error(ErrorCode::ConfigInvalid, where_ + ": field '" + key + "' out of range [" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "]");
  return v;
}

Params suite_params(const std::string& suite, const json& cfg, bool from_file) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"solve", {"s", "h", "tol", "max_iter", "omega"}},
      {"spectrum", {"s", "grid", "count", "refine"}},
      {"hodograph", {"s", "points", "seed", "h", "t"}},
      {"grushin", {"s", "points", "triples", "seed"}},
      {"barrier", {"s", "tau", "samples", "seed"}},
  };
  const auto it = keys.find(suite);
  if (it == keys.end()) throw Error(ErrorCode::ConfigInvalid, "unknown suite '" + suite + "'");
  Params p(cfg.is_null() ? json::object() : cfg, it->second, suite);
  if (from_file) p.require("s");
  return p;
}

// ---------------- helpers ----------------

namespace {

std::string tag_of(double s) { return "s" + format_number(s); }

void add(SuiteResult& r, std::string name, double value, double threshold, bool pass) {
  r.checks.push_back({std::move(name), value, threshold, pass});
}

std::uint64_t seed_of(const Params& p, const RunContext& ctx) {
  if (ctx.seed_given) return ctx.seed;
  return static_cast<std::uint64_t>(p.integer("seed", 1, 0, std::numeric_limits<long>::max()));
}

// ---------------- solve ----------------

SuiteResult run_solve(const Params& p, const RunContext& ctx) {
  SuiteResult r{"solve", p.raw(), {}};
  const auto svals = p.s_values({0.3, 0.5, 0.7});
  const auto hs = p.numbers("h", {1.0 / 32, 1.0 / 64, 1.0 / 128}, 1e-4, 0.125);
  const double tol = p.number("tol", 1e-9, 1e-14, 1e-3);
  const long max_iter = p.integer("max_iter", 400000, 1, 100000000);
  const double omega = p.number("omega", 0.0, 0.0, 1.99);  // 0 selects 2 / (1 + sin(pi h))
  r.params = {{"s", svals}, {"h", hs}, {"tol", tol}, {"max_iter", max_iter}, {"omega", omega}};
  for (double s : svals) {
    CsvTable conv{"convergence against w_{1,s}: h, sup_error, order_estimate", {"h", "sup_error", "order_estimate"}, {}};
    double prev = 0.0, min_order = std::numeric_limits<double>::infinity();
    double comp = 0.0;
    DiscreteSolution finest;
    for (double h : hs) {
      ProblemSpec spec;
      spec.grid = make_grid(1, h, s);
      spec.obstacle = [](const HalfPoint&) { return 0.0; };
      spec.dirichlet = [s](const HalfPoint& x) { return eval_w1s(s, x); };
      SolveOptions o;
      o.auto_omega = omega == 0.0;
      if (omega > 0.0) o.omega = omega;
      DiscreteSolution sol = solve_vi(spec, tol, static_cast<int>(max_iter), o);
      double err = 0.0;
      for (std::size_t k = 0; k < sol.values.size(); ++k)
        err = std::max(err, std::abs(sol.values[k] - eval_w1s(s, sol.grid.point(k))));
      const double ord = prev > 0.0 ? std::log(prev / err) / std::log(conv.rows.back()[0] / h) : NAN;
      if (prev > 0.0) min_order = std::min(min_order, ord);
      conv.rows.push_back({h, err, ord});
      const auto rep = complementarity_report(sol);
      comp = std::max({comp, rep.max_violation, rep.max_positive_flux, rep.max_product});
      prev = err;
      finest = std::move(sol);
    }
    write_csv(ctx.out / ("solve_convergence_" + tag_of(s) + ".csv"), conv);
    const auto fb = extract_free_boundary(finest);
    CsvTable fbt{"free boundary polyline: x1, x_n", {"x1", "x_n"}, {}};
    double fb_dist = 0.0;
    for (const auto& q : fb) {
      fbt.rows.push_back({q.x_tan.empty() ? 0.0 : q.x_tan[0], q.x_n});
      fb_dist = std::max(fb_dist, std::abs(q.x_n));
    }
    write_csv(ctx.out / ("solve_free_boundary_" + tag_of(s) + ".csv"), fbt);
    const auto fit = fit_expansion(finest, fb.front());
    const double hmin = finest.grid.h;
    add(r, "order_min_" + tag_of(s), min_order, 0.8, min_order >= 0.8);
    add(r, "free_boundary_offset_" + tag_of(s), fb_dist, 2.0 * hmin, fb_dist <= 2.0 * hmin);
    add(r, "complementarity_" + tag_of(s), comp, 1e-8, comp <= 1e-8);
    add(r, "fit_c_deviation_" + tag_of(s), std::abs(fit.c - 1.0), 0.05, std::abs(fit.c - 1.0) <= 0.05);
    add(r, "fit_nu_deviation_" + tag_of(s), std::abs(fit.nu.back() - 1.0), 1e-12, std::abs(fit.nu.back() - 1.0) <= 1e-12);
  }
  return r;
}

// ---------------- spectrum ----------------

SuiteResult run_spectrum(const Params& p, const RunContext& ctx) {
  SuiteResult r{"spectrum", p.raw(), {}};
  const auto svals = p.s_values({0.25, 0.5, 0.75});
  const long grid = p.integer("grid", 2000, 50, 1000000);
  const long count = p.integer("count", 5, 1, 50);
  const bool refine = !p.raw().contains("refine") || p.raw()["refine"].get<bool>();
  r.params = {{"s", svals}, {"grid", grid}, {"count", count}, {"refine", refine}};
  for (double s : svals) {
    const auto ev = sl_eigen_oracle(s, static_cast<int>(grid), static_cast<int>(count));
    std::vector<double> ev2;
    if (refine) ev2 = sl_eigen_oracle(s, static_cast<int>(2 * grid), static_cast<int>(count));
    CsvTable t{"eigenvalues: k, lambda2, exact, rel_err", {"k", "lambda2", "exact", "rel_err"}, {}};
    double worst = 0.0;
    bool improves = true;
    for (long k = 0; k < count; ++k) {
      const double exact = eigenvalue(static_cast<int>(k), s);
      const double rel = std::abs(ev[k] - exact) / exact;
      worst = std::max(worst, rel);
      if (refine && !(std::abs(ev2[k] - exact) / exact < rel)) improves = false;
      t.rows.push_back({double(k), ev[k], exact, rel});
      add(r, "eigenvalue_k" + std::to_string(k) + "_" + tag_of(s), ev[k], 1e-3, rel <= 1e-3);
    }
    write_csv(ctx.out / ("spectrum_" + tag_of(s) + ".csv"), t);
    add(r, "max_rel_error_" + tag_of(s), worst, 1e-3, worst <= 1e-3);
    if (refine) add(r, "refinement_reduces_error_" + tag_of(s), improves ? 1.0 : 0.0, 1.0, improves);
  }
  return r;
}

// ---------------- hodograph ----------------

SuiteResult run_hodograph(const Params& p, const RunContext& ctx) {
  SuiteResult r{"hodograph", p.raw(), {}};
  const auto svals = p.s_values({0.3, 0.5, 0.7});
  const long points = p.integer("points", 1000, 10, 1000000);
  const double h = p.number("h", 1.0 / 64, 1.0 / 512, 1.0 / 16);
  const auto ts = p.numbers("t", {1e-2, 3e-3, 1e-3}, 1e-8, 0.1);
  const std::uint64_t seed = seed_of(p, ctx);
  r.params = {{"s", svals}, {"points", points}, {"h", h}, {"t", ts}, {"seed", seed}};
  for (double s : svals) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.1, 1.0);
    const JetFn v0 = v_model_jet(s);
    const JetFn alt = v_model_jet(s, -s / (2.0 * (1.0 + s)), 1.0);
    double fmax = 0.0, falt = 0.0, jlo = INFINITY, jhi = -INFINITY;
    for (long k = 0; k < points; ++k) {
      const double yn = U(rng), yp = U(rng);
      const FValue fv = eval_F(v0, 0.0, yn, yp, s, 1);
      fmax = std::max(fmax, std::abs(fv.F));
      falt = std::max(falt, std::abs(eval_F(alt, 0.0, yn, yp, s, 1).F));
      const double ratio = fv.J / (yn * yn + yp * yp);
      jlo = std::min(jlo, ratio);
      jhi = std::max(jhi, ratio);
    }
    add(r, "F_model_max_" + tag_of(s), fmax, 1e-12, fmax <= 1e-12);
    add(r, "F_alternative_scaling_max_" + tag_of(s), falt, 1e-6, falt > 1e-6);
    add(r, "J_ratio_spread_" + tag_of(s), jhi - jlo, 1e-12, jhi - jlo <= 1e-12);

    // residual map on a regular grid
    CsvTable map{"analytic residual map: y_n, y_np1, |F|", {"y_n", "y_np1", "abs_F"}, {}};
    for (int i = 1; i <= 20; ++i)
      for (int j = 1; j <= 20; ++j) {
        const double yn = 0.05 * i, yp = 0.05 * j;
        map.rows.push_back({yn, yp, std::abs(eval_F(v0, 0.0, yn, yp, s, 1).F)});
      }
    write_csv(ctx.out / ("hodograph_residual_map_" + tag_of(s) + ".csv"), map);

    if (std::abs(s - 0.5) > 1e-12) {
      std::vector<QuarterPoint> smp;
      for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) smp.emplace_back(0.2 + 0.6 * (i + 0.5) / 20, 0.2 + 0.6 * (j + 0.5) / 20);
      const auto l1 = linearization_check(v0, bump_jet(0.5, 0.5, 0.3), ts, smp, s, 1);
      const auto l2 = linearization_check(v0, bump_jet(0.45, 0.55, 0.25), ts, smp, s, 1);
      const double agree = std::abs(l1.c.back() - l2.c.back()) / std::abs(l1.c.back());
      add(r, "linearization_constant_agreement_" + tag_of(s), agree, 0.01, agree <= 0.01);
      add(r, "linearization_defect_slope_" + tag_of(s), l1.slope, 0.8, l1.slope >= 0.8 && l2.slope >= 0.8);
    }

    const auto grid = make_grid(1, h, s);
    const auto sampled = sample_solution(grid, [s](const HalfPoint& x) { return eval_w1s(s, x); });
    const LegendreField lf = legendre_function(sampled);
    write_legendre(lf, ctx.out / ("hodograph_legendre_" + tag_of(s)));
    double verr = 0.0;
    for (int j = 0; j < lf.count; ++j)
      for (int i = 0; i < lf.count; ++i) {
        const double yn = i * lf.spacing(), yp = j * lf.spacing();
        if (yn < 0.1 || yp < 0.1) continue;
        verr = std::max(verr, std::abs(lf.v[lf.index(0, i, j)] - eval_v_model(s, yn, yp)));
      }
    add(r, "legendre_sup_error_" + tag_of(s), verr, 4.0 * h * h, verr <= 4.0 * h * h);
    const auto asym = inverse_asymptotics(model_legendre_field(s));
    const double adev = std::max({std::abs(asym[0].g), std::abs(asym[0].a0 - 0.5), std::abs(asym[0].a1 - 0.5)});
    add(r, "inverse_asymptotics_model_deviation_" + tag_of(s), adev, 1e-10, adev <= 1e-10);
    const auto jd = jacobian_diag(sampled, HalfPoint(0.0, 0.0), {0.5, 0.25, 0.125});
    add(r, "jacobian_min_" + tag_of(s), jd.jac_min, 0.25, jd.jac_min >= 0.25);
    add(r, "jacobian_max_" + tag_of(s), jd.jac_max, 2.0, jd.jac_max <= 2.0);
    add(r, "injectivity_" + tag_of(s), jd.injectivity_flag ? 1.0 : 0.0, 1.0, jd.injectivity_flag);
  }
  // diffeomorphism flow, n = 2
  CsvTable dt{"diffeomorphism displacement constant: a, C", {"a", "C"}, {}};
  std::vector<double> Cs;
  for (double a : {1e-3, 1e-2, 1e-1}) {
    double C = 0.0;
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 12; ++j)
        for (int k = 0; k <= 12; ++k) {
          const QuarterPoint y({-1.0 + 0.1 * i}, 0.05 * j, 0.05 * k);
          C = std::max(C, std::abs(diffeo_flow({a}, y).y_tan[0] - y.y_tan[0]) / a);
        }
    Cs.push_back(C);
    dt.rows.push_back({a, C});
  }
  write_csv(ctx.out / "hodograph_diffeo.csv", dt);
  double id_err = 0.0, fixed_err = 0.0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const QuarterPoint y({-1.0 + 0.1 * i}, 0.05 * j, 0.03 * j + 0.01 * i);
      id_err = std::max(id_err, std::abs(diffeo_flow({0.0}, y).y_tan[0] - y.y_tan[0]));
      const bool outside = std::hypot(y.y_n, y.y_np1) >= 0.5 || std::abs(y.y_tan[0]) >= 0.75;
      if (outside) fixed_err = std::max(fixed_err, std::abs(diffeo_flow({0.5}, y).y_tan[0] - y.y_tan[0]));
    }
  add(r, "diffeo_zero_identity", id_err, 1e-12, id_err <= 1e-12);
  add(r, "diffeo_fixed_region", fixed_err, 0.0, fixed_err == 0.0);
  const double spread = (*std::max_element(Cs.begin(), Cs.end()) - *std::min_element(Cs.begin(), Cs.end())) / Cs[0];
  add(r, "diffeo_constant_spread", spread, 0.05, spread <= 0.05);
  return r;
}

// ---------------- grushin ----------------

SuiteResult run_grushin(const Params& p, const RunContext& ctx) {
  SuiteResult r{"grushin", p.raw(), {}};
  const auto svals = p.s_values({0.3, 0.5, 0.7});
  const long points = p.integer("points", 1000, 10, 1000000);
  const long triples = p.integer("triples", 100000, 100, 100000000);
  const std::uint64_t seed = seed_of(p, ctx);
  r.params = {{"s", svals}, {"points", points}, {"triples", triples}, {"seed", seed}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.05, 1.0), S(-1.0, 1.0);
  std::vector<QuarterPoint> pts;
  for (long k = 0; k < points; ++k) pts.emplace_back(std::vector<double>{S(rng)}, U(rng), U(rng));
  CsvTable t{"identity defects: s, opening_x_n, opening_xnp1_sq, opening_w1s, grushin_yn2s, grushin_yn2s_y1, mixed",
             {"s", "opening_x_n", "opening_xnp1_sq", "opening_w1s", "grushin_yn2s", "grushin_yn2s_y1", "mixed"},
             {}};
  for (double s : svals) {
    const JetFn xn = [](const Jet3&, const Jet3& b, const Jet3&) { return b; };
    const JetFn xp2 = [](const Jet3&, const Jet3&, const Jet3& c) { return c * c; };
    const JetFn w1 = [s](const Jet3&, const Jet3& b, const Jet3& c) { return w1s_t(s, b, c); };
    const double d1 = open_domain_check(xn, pts, s).max_rel;
    const double d2 = open_domain_check(xp2, pts, s).max_rel;
    const double d3 = open_domain_check(w1, pts, s).max_rel;
    double g1 = 0, g2 = 0, g3 = 0;
    const double an = 0.7, ap = -1.3;
    for (const auto& y : pts) {
      const double y1 = y.y_tan[0];
      g1 = std::max(g1, std::abs(delta_Gs([s](const Jet3&, const Jet3& b, const Jet3&) { return pow(b, 2.0 * s); }, y1,
                                          y.y_n, y.y_np1, s)));
      g2 = std::max(g2, std::abs(delta_Gs([s](const Jet3& a, const Jet3& b, const Jet3&) { return pow(b, 2.0 * s) * a; },
                                          y1, y.y_n, y.y_np1, s)));
      const double exact = 4.0 * ((1.0 + s) * an + (1.0 - s) * ap) * y.y_n * std::pow(y.y_np1, 1.0 - 2.0 * s);
      const double got = delta_Gs(
          [&](const Jet3&, const Jet3& b, const Jet3& c) { return pow(b, 2.0 * s) * (an * b * b + ap * c * c); }, y1,
          y.y_n, y.y_np1, s);
      g3 = std::max(g3, std::abs(got - exact) / std::max(1.0, std::abs(exact)));
    }
    t.rows.push_back({s, d1, d2, d3, g1, g2, g3});
    add(r, "opening_x_n_" + tag_of(s), d1, 1e-10, d1 <= 1e-10);
    add(r, "opening_xnp1_squared_" + tag_of(s), d2, 1e-10, d2 <= 1e-10);
    add(r, "opening_w1s_" + tag_of(s), d3, 1e-10, d3 <= 1e-10);
    add(r, "delta_G_yn2s_" + tag_of(s), g1, 1e-12, g1 <= 1e-12);
    add(r, "delta_G_yn2s_y1_" + tag_of(s), g2, 1e-12, g2 <= 1e-12);
    add(r, "delta_G_mixed_quadratic_" + tag_of(s), g3, 1e-10, g3 <= 1e-10);
  }
  write_csv(ctx.out / "grushin_identities.csv", t);
  const double K1 = quasi_triangle_constant(1, static_cast<int>(triples), seed);
  const double K2 = quasi_triangle_constant(2, static_cast<int>(triples), seed + 1);
  add(r, "quasi_triangle_K_n1", K1, 4.0, K1 <= 4.0);
  add(r, "quasi_triangle_K_n2", K2, 4.0, K2 <= 4.0);
  double dil = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    for (double lam : {0.3, 2.0, 5.0}) {
      const double a = quasi_metric(dilate(pts[k], lam), dilate(pts[k + 1], lam));
      const double b = lam * quasi_metric(pts[k], pts[k + 1]);
      dil = std::max(dil, std::abs(a - b) / b);
    }
  add(r, "quasi_metric_dilation", dil, 1e-13, dil <= 1e-13);
  return r;
}

// ---------------- barrier ----------------

SuiteResult run_barrier(const Params& p, const RunContext& ctx) {
  SuiteResult r{"barrier", p.raw(), {}};
  const auto svals = p.s_values({0.3, 0.5, 0.7});
  const auto taus = p.numbers("tau", {0.1, 0.25}, 1e-6, 10.0);
  const long samples = p.integer("samples", 1000, 10, 1000000);
  const std::uint64_t seed = seed_of(p, ctx);
  r.params = {{"s", svals}, {"tau", taus}, {"samples", samples}, {"seed", seed}};
  CsvTable t{"barrier constants: s, tau, flat_lower, flat_upper, curved_lower, curved_pou_error",
             {"s", "tau", "flat_lower", "flat_upper", "curved_lower", "curved_pou_error"},
             {}};
  ThinGraph curved;
  curved.g = [](double x) { return 0.05 * std::sin(x); };
  curved.dg = [](double x) { return 0.05 * std::cos(x); };
  curved.d2g = [](double x) { return -0.05 * std::sin(x); };
  for (double s : svals)
    for (double tau : taus) {
      const std::string tag = tag_of(s) + "_tau" + format_number(tau);
      const auto lower = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Lower);
      const auto upper = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Upper);
      const auto pts = barrier_samples(lower, static_cast<int>(samples), seed, 0.5, 0.05, 0.5);
      const double cl = subsolution_check(lower, pts), cu = subsolution_check(upper, pts);
      const auto cb = build_barrier(curved, 2, s, tau, BarrierSign::Lower);
      const auto cpts = barrier_samples(cb, static_cast<int>(samples), seed, 0.25, 0.02, 0.1);
      double pou = 0.0;
      for (const auto& q : cpts) {
        double sum = 0.0;
        for (const auto& [j, eta] : cb.cover().partition(q)) sum += eta.v;
        pou = std::max(pou, std::abs(sum - 1.0));
      }
      const double cc = subsolution_check(cb, cpts);
      t.rows.push_back({s, tau, cl, cu, cc, pou});
      add(r, "flat_lower_" + tag, cl, 0.0, cl > 0.0);
      add(r, "flat_upper_" + tag, cu, 0.0, cu < 0.0);
      add(r, "curved_partition_" + tag, pou, 1e-12, pou <= 1e-12);
      add(r, "curved_lower_" + tag, cc, 0.0, cc > 0.0);
    }
  write_csv(ctx.out / "barrier_constants.csv", t);
  return r;
}

}  // namespace

SuiteResult run_suite(const std::string& suite, const Params& p, const RunContext& ctx) {
  fs::create_directories(ctx.out);
  if (suite == "solve") return run_solve(p, ctx);
  if (suite == "spectrum") return run_spectrum(p, ctx);
  if (suite == "hodograph") return run_hodograph(p, ctx);
  if (suite == "grushin") return run_grushin(p, ctx);
  if (suite == "barrier") return run_barrier(p, ctx);
  throw Error(ErrorCode::ConfigInvalid, "unknown suite '" + suite + "'");
}

void write_summary(const SuiteResult& r, const fs::path& out) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  const json j = {{"suite", r.suite}, {"params", r.params}, {"checks", checks}};
  const fs::path path = out / (r.suite + "_summary.json");
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace thinobs::cli
