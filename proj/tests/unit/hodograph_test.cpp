#include "support.hpp"
#include "thinobs/frontier.hpp"
#include "thinobs/hodograph.hpp"

using namespace thinobs;
using doctest::Approx;

namespace {

DiscreteSolution model(double s, double h) {
  return sample_solution(make_grid(1, h, s), [s](const HalfPoint& x) { return eval_w1s(s, x); });
}

DiscreteSolution symmetrized(double s, double h) {
  return sample_solution(make_grid(1, h, s),
                         [s](const HalfPoint& x) { return eval_w1s(s, HalfPoint(std::abs(x.x_n), x.x_np1)); });
}

std::vector<QuarterPoint> quarter_samples(int count, std::uint64_t seed, double lo = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, 1.0);
  std::vector<QuarterPoint> out;
  for (int i = 0; i < count; ++i) out.emplace_back(u(rng), u(rng));
  return out;
}

}  // namespace

TEST_SUITE("hodograph") {
  TEST_CASE("forward transform of the model is the square root map") {
    const double s = 0.5, h = 1.0 / 64;
    const auto sol = model(s, h);
    const auto tr = forward_transform(sol);
    CHECK(tr.points.size() == sol.values.size());
    CHECK(tr.violations.empty());
    double worst = 0.0;
    for (const auto& p : tr.points) {
      const double r = std::hypot(p.x.x_n, p.x.x_np1);
      if (r < 0.25 || r > 0.8 || p.x.x_np1 < 0.1) continue;
      worst = std::max({worst, std::abs(p.y_n * p.y_n - (r + p.x.x_n)), std::abs(p.y_np1 * p.y_np1 - (r - p.x.x_n))});
    }
    CHECK(worst < 0.01);
    for (const auto& p : tr.points)
      if (p.x.x_np1 == 0.0 && p.x.x_n < -2.0 * h) CHECK(p.y_n < 1e-12);
  }

  TEST_CASE("free boundary maps close to P") {
    const double s = 0.5, h = 1.0 / 64;
    const auto tr = forward_transform(model(s, h));
    for (const auto& p : tr.points)
      if (p.x.x_np1 == 0.0 && std::abs(p.x.x_n) <= 2.0 * h) CHECK(std::hypot(p.y_n, p.y_np1) <= 3.0 * std::sqrt(h));
  }

  TEST_CASE("monotonicity violations") {
    CHECK_THROWS_AS(forward_transform(symmetrized(0.5, 1.0 / 16)), MonotonicityViolated);
    TransformOptions o;
    o.policy = MonotonicityPolicy::Report;
    CHECK(!forward_transform(symmetrized(0.5, 1.0 / 16), o).violations.empty());
  }

  TEST_CASE("Legendre function of the sampled model") {
    for (double s : {0.3, 0.5}) {
      const double h = 1.0 / 64;
      const auto lf = legendre_function(model(s, h));
      double err = 0.0, axis = 0.0;
      for (int j = 0; j < lf.count; ++j)
        for (int i = 0; i < lf.count; ++i) {
          const double yn = i * lf.spacing(), yp = j * lf.spacing();
          if (i == 0) axis = std::max(axis, std::abs(lf.v[lf.index(0, i, j)]));
          if (yn >= 0.1 && yp >= 0.1) err = std::max(err, std::abs(lf.v[lf.index(0, i, j)] - eval_v_model(s, yn, yp)));
        }
      CHECK(err <= h);
      CHECK(axis <= h * h);
      // x_n along P sits at the extracted free boundary.
      const auto fb = extract_free_boundary(model(s, h));
      CHECK(std::abs(lf.x_n[lf.index(0, 0, 0)] - fb[0].x_n) <= 2.0 * h);
    }
  }

  TEST_CASE("nonlinear functional on the calibrated model") {
    for (double s : {0.3, 0.5, 0.7}) {
      const auto v = v_model_jet(s);
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& y : quarter_samples(1000, 17)) {
        const auto fv = eval_F(v, 0.0, y.y_n, y.y_np1, s, 1);
        CHECK(std::abs(fv.F) <= 1e-12);
        const double r = fv.J / (y.y_n * y.y_n + y.y_np1 * y.y_np1);
        lo = std::min(lo, r), hi = std::max(hi, r);
        CHECK(fv.x_n == Approx(0.5 * (y.y_n * y.y_n - y.y_np1 * y.y_np1)).epsilon(1e-12));
        CHECK(fv.x_np1 == Approx(y.y_n * y.y_np1).epsilon(1e-12));
      }
      CHECK(hi - lo <= 1e-12);
      // F is linear at s = 1/2, so only there does a rescaled model stay a zero.
      const auto scaled = v_model_jet(s, -1.5 * s / (s + 1.0), 1.5);
      const double Fs = std::abs(eval_F(scaled, 0.0, 0.5, 0.5, s, 1).F);
      if (s == 0.5)
        CHECK(Fs < 1e-12);
      else
        CHECK(Fs > 1e-3);
    }
  }

  TEST_CASE("grid mode agrees with the analytic zero") {
    const auto field = model_legendre_field(0.5, 1, {0.9, 91});
    const auto F = eval_F_grid(field);
    double worst = 0.0;
    int finite = 0;
    for (double x : F)
      if (!std::isnan(x)) worst = std::max(worst, std::abs(x)), ++finite;
    CHECK(finite > 1000);
    CHECK(worst < 1e-6);
  }

  TEST_CASE("negative radicand") {
    CHECK_THROWS_AS(eval_F(v_model_jet(0.5, 0.0, -1.0), 0.0, 0.5, 0.5, 0.5, 1), Error);
  }

  TEST_CASE("linearization") {
    const double s = 0.3;
    std::vector<QuarterPoint> smp;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) smp.emplace_back(0.2 + 0.6 * (i + 0.5) / 12, 0.2 + 0.6 * (j + 0.5) / 12);
    const std::vector<double> ts{1e-2, 3e-3, 1e-3};
    const auto l1 = linearization_check(v_model_jet(s), bump_jet(0.5, 0.5, 0.3), ts, smp, s, 1);
    const auto l2 = linearization_check(v_model_jet(s), bump_jet(0.45, 0.55, 0.25), ts, smp, s, 1);
    CHECK(l1.c.back() == Approx(l2.c.back()).epsilon(0.01));
    CHECK(l1.slope >= 0.8);
    CHECK(l1.defect.back() <= 1e-2);
    CHECK(l1.defect[0] > l1.defect[1]);
    CHECK(l1.defect[1] > l1.defect[2]);
    const JetFn zero = [](const Jet3&, const Jet3&, const Jet3&) { return Jet3(0.0); };
    const auto l0 = linearization_check(v_model_jet(s), zero, ts, smp, s, 1);
    CHECK(l0.degenerate);
    for (double d : l0.defect) CHECK(d == 0.0);
  }

  TEST_CASE("inverse asymptotics of the model") {
    for (double s : {0.3, 0.7}) {
      const auto a = inverse_asymptotics(model_legendre_field(s));
      REQUIRE(a.size() == 1);
      CHECK(std::abs(a[0].g) < 1e-12);
      CHECK(a[0].a0 == Approx(0.5).epsilon(1e-12));
      CHECK(a[0].a1 == Approx(0.5).epsilon(1e-12));
      CHECK(a[0].a1_from_xnp1 == Approx(0.5).epsilon(1e-12));
    }
  }

  TEST_CASE("Jacobian and injectivity") {
    const double s = 0.5;
    const auto jd = jacobian_diag(model(s, 1.0 / 64), HalfPoint(0.0, 0.0), {0.5, 0.25, 0.125});
    CHECK(jd.samples > 0);
    CHECK(jd.jac_min > 0.25);
    CHECK(jd.jac_max < 2.0);
    CHECK(jd.injectivity_flag);
    JacobianOptions o;
    o.transform.policy = MonotonicityPolicy::Report;
    CHECK(!jacobian_diag(symmetrized(s, 1.0 / 64), HalfPoint(0.0, 0.0), {0.5, 0.25, 0.125}, o).injectivity_flag);
  }

  TEST_CASE("diffeomorphism family") {
    CHECK(diffeo_cutoff(0.1, 0.1) == 1.0);
    CHECK(diffeo_cutoff(0.4, 0.4) == 0.0);
    const double mid = diffeo_cutoff(0.3, 0.2);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> t(-1.0, 1.0), q(0.0, 0.7);
    for (int k = 0; k < 200; ++k) {
      const QuarterPoint y({t(rng)}, q(rng), q(rng));
      const auto z0 = diffeo_flow({0.0}, y);
      CHECK(std::abs(z0.y_tan[0] - y.y_tan[0]) <= 1e-12);
      const auto z = diffeo_flow({0.4}, y);
      CHECK(z.y_n == y.y_n);
      CHECK(z.y_np1 == y.y_np1);
      if (std::hypot(y.y_n, y.y_np1) >= 0.5 || std::abs(y.y_tan[0]) >= 0.75) CHECK(z.y_tan[0] == y.y_tan[0]);
      CHECK(std::abs(z.y_tan[0] - y.y_tan[0]) <= 0.4 * 0.2);
    }
  }
}
