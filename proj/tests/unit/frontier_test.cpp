#include "support.hpp"
#include "thinobs/frontier.hpp"
#include "thinobs/solver.hpp"

using namespace thinobs;
using doctest::Approx;

namespace {

DiscreteSolution sampled(double s, double h, const PointFn& w, int n = 1) {
  return sample_solution(make_grid(n, h, s), w);
}

ThinGraph wavy() {
  ThinGraph g;
  g.g = [](double x) { return 0.05 * std::sin(x); };
  g.dg = [](double x) { return 0.05 * std::cos(x); };
  g.d2g = [](double x) { return -0.05 * std::sin(x); };
  return g;
}

}  // namespace

TEST_SUITE("frontier") {
  TEST_CASE("free boundary of the model and its translate") {
    const double h = 1.0 / 32;
    for (double s : {0.3, 0.7}) {
      const auto fb = extract_free_boundary(sampled(s, h, [s](const HalfPoint& x) { return eval_w1s(s, x); }));
      REQUIRE(fb.size() == 1);
      CHECK(std::abs(fb[0].x_n) <= 2.0 * h);
      const double a = 0.3;
      const auto moved =
          extract_free_boundary(sampled(s, h, [s, a](const HalfPoint& x) { return eval_w1s(s, HalfPoint(x.x_n - a, x.x_np1)); }));
      REQUIRE(moved.size() == 1);
      CHECK(std::abs(moved[0].x_n - a) <= 2.0 * h);
    }
    CHECK_THROWS_AS(extract_free_boundary(sampled(0.5, h, [](const HalfPoint&) { return 0.0; })), Error);
  }

  TEST_CASE("expansion fit on the exact model") {
    const double s = 0.5, h = 1.0 / 64;
    const auto sol = sampled(s, h, [s](const HalfPoint& x) { return eval_w1s(s, x); });
    const auto fb = extract_free_boundary(sol);
    CHECK(std::abs(fb[0].x_n) <= h);
    const auto fit = fit_expansion(sol, HalfPoint(0.0, 0.0));
    CHECK(fit.c == Approx(1.0).epsilon(1e-3));
    CHECK(fit.nu.back() == Approx(1.0));
    CHECK(fit.remainder_exponent >= 1.0 + s);
    const double mu = 2.5;
    const auto scaled = sampled(s, h, [s, mu](const HalfPoint& x) { return mu * eval_w1s(s, x); });
    const auto fit2 = fit_expansion(scaled, HalfPoint(0.0, 0.0));
    CHECK(fit2.c == Approx(mu * fit.c).epsilon(1e-9));
    CHECK(fit2.nu.back() == Approx(fit.nu.back()));
  }

  TEST_CASE("rotated model in two thin dimensions") {
    const double s = 0.5, h = 1.0 / 64, theta = 10.0 * M_PI / 180.0;
    ClosedFormField w(ClosedFormField::Kind::W1S, s);
    w.with_rotation({std::sin(theta), std::cos(theta)});
    const auto sol = sampled(s, h, [&w](const HalfPoint& x) { return w(x); }, 2);
    const auto fit = fit_expansion(sol, HalfPoint({0.0}, 0.0, 0.0));
    REQUIRE(fit.nu.size() == 2);
    CHECK(std::abs(std::atan2(fit.nu[0], fit.nu[1]) - theta) <= M_PI / 180.0);
  }

  TEST_CASE("graph distance") {
    const auto g = wavy();
    const auto d = distance_to_graph(g, 2, HalfPoint({0.3}, g.g(0.3) + 0.1, 0.0));
    CHECK(d.dist == Approx(0.1 / std::sqrt(1.0 + std::pow(g.dg(0.3), 2))).epsilon(1e-4));
    CHECK(distance_to_graph(ThinGraph{}, 1, HalfPoint(0.3, 0.4)).dist == Approx(0.5));
  }

  TEST_CASE("Whitney cover geometry and partition of unity") {
    const WhitneyCover cover(wavy(), 2, 6);
    CHECK(!cover.cubes().empty());
    for (const auto& q : cover.cubes()) CHECK(q.diam <= q.dist + 1e-14);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.4, 0.4), v(0.02, 0.4);
    int covered = 0;
    for (int k = 0; k < 300; ++k) {
      const HalfPoint p({u(rng)}, u(rng), v(rng));
      if (!cover.covers(p)) continue;
      ++covered;
      double sum = 0.0;
      for (const auto& [j, eta] : cover.partition(p)) sum += eta.v;
      CHECK(sum == Approx(1.0).epsilon(1e-12));
    }
    CHECK(covered > 200);
  }

  TEST_CASE("flat barriers") {
    for (double s : {0.3, 0.5, 0.7})
      for (double tau : {0.1, 0.25}) {
        const auto lo = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Lower);
        const auto up = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Upper);
        const auto pts = barrier_samples(lo, 1000, 3, 0.5, 0.05, 0.5);
        CHECK(pts.size() == 1000);
        const double cl = subsolution_check(lo, pts);
        CHECK(cl > 0.0);
        CHECK(subsolution_check(up, pts) == Approx(-cl));
        CHECK(barrier_nondegeneracy(lo, pts) > 0.0);
      }
  }

  TEST_CASE("flat barrier constant is proportional to tau as tau -> 0") {
    const double s = 0.5;
    auto constant = [&](double tau) {
      const auto b = build_barrier(ThinGraph{}, 1, s, tau, BarrierSign::Lower);
      return subsolution_check(b, barrier_samples(b, 200, 5, 0.5, 0.05, 0.5));
    };
    const double r1 = constant(1e-3) / 1e-3, r2 = constant(1e-4) / 1e-4;
    CHECK(r1 == Approx(r2).epsilon(0.02));
  }

  TEST_CASE("barrier parameter validation") {
    CHECK_THROWS_AS(build_barrier(ThinGraph{}, 1, 0.5, 2.0, BarrierSign::Lower), Error);
    CHECK_THROWS_AS(build_barrier(ThinGraph{}, 1, 0.5, 0.0, BarrierSign::Lower), Error);
    ThinGraph rough;
    rough.g = [](double x) { return 0.5 * std::sqrt(std::abs(x)); };
    rough.dg = [](double x) { return x == 0.0 ? 0.0 : 0.25 / std::sqrt(std::abs(x)) * (x > 0 ? 1.0 : -1.0); };
    rough.d2g = [](double) { return 0.0; };
    CHECK_THROWS_AS(build_barrier(rough, 2, 0.5, 0.1, BarrierSign::Lower), Error);
  }

  TEST_CASE("curved barrier stays a subsolution near the free boundary") {
    const auto b = build_barrier(wavy(), 2, 0.5, 0.25, BarrierSign::Lower);
    const auto pts = barrier_samples(b, 300, 2, 0.25, 0.02, 0.1);
    CHECK(subsolution_check(b, pts) > 0.0);
  }

  TEST_CASE("nondegeneracy of the model") {
    const double s = 0.5;
    const std::vector<HalfPoint> gamma{HalfPoint(0.0, 0.0)};
    const auto w0 = [s](const HalfPoint& x) { return eval_w0s(s, x); };
    const double c1 = nondegeneracy_check(sampled(s, 1.0 / 16, w0), gamma);
    const double c2 = nondegeneracy_check(sampled(s, 1.0 / 32, w0), gamma);
    CHECK(c1 > 0.1);
    CHECK(c2 == Approx(c1).epsilon(0.05));
    const double c3 = nondegeneracy_check(sampled(s, 1.0 / 16, [&](const HalfPoint& x) { return 3.0 * w0(x); }), gamma);
    CHECK(c3 == Approx(3.0 * c1).epsilon(1e-12));
    CHECK(nondegeneracy_check(sampled(s, 1.0 / 16, [](const HalfPoint&) { return 0.0; }), gamma) == 0.0);
  }

  TEST_CASE("Harnack ratio") {
    const double s = 0.5;
    const auto u1 = sampled(s, 1.0 / 16, [s](const HalfPoint& x) { return eval_w0s(s, x); });
    const auto u2 = sampled(s, 1.0 / 16, [s](const HalfPoint& x) { return 3.0 * eval_w0s(s, x); });
    const auto r = harnack_ratio(u1, u2);
    CHECK(r.inf == Approx(3.0));
    CHECK(r.sup == Approx(3.0));
    const auto u3 = sampled(s, 1.0 / 16, [s](const HalfPoint& x) { return eval_w0s(s, x) * (x.x_n - 0.1); });
    CHECK(harnack_ratio(u1, u3).inf < 0.0);
  }
}
