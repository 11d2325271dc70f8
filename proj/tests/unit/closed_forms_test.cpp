#include "support.hpp"

using namespace thinobs;
using doctest::Approx;

TEST_SUITE("closed_forms") {
  TEST_CASE("w0s values at reference points") {
    for (double s : {0.2, 0.5, 0.8}) {
      CHECK(eval_w0s(s, HalfPoint(-1.0, 0.0)) == 0.0);
      CHECK(eval_w0s(s, HalfPoint(0.0, 1.0)) == Approx(1.0).epsilon(1e-15));
    }
    CHECK(eval_w0s(0.5, HalfPoint(1.0, 0.0)) == Approx(std::sqrt(2.0)).epsilon(1e-15));
  }

  TEST_CASE("w1s values at reference points") {
    CHECK(eval_w1s(0.5, HalfPoint(-2.0, 0.0)) == 0.0);
    CHECK(eval_w1s(0.5, HalfPoint(1.0, 0.0)) == Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-14));
    CHECK(eval_w1s(0.5, HalfPoint(0.0, 1.0)) == Approx(-2.0 / 3.0).epsilon(1e-14));
  }

  TEST_CASE("w1s gradient identities") {
    for (double s : {0.3, 0.5, 0.7}) {
      const auto g = grad_w1s(s, HalfPoint(0.0, 1.0));
      CHECK(g.d_n == Approx(1.0).epsilon(1e-13));
      CHECK(g.weighted_dnp1 == Approx(s / (s - 1.0)).epsilon(1e-13));
    }
    CHECK(grad_w1s(0.5, HalfPoint(1.0, 0.0)).d_n == Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(grad_w1s(0.5, HalfPoint(-1.0, 0.0)), Error);
  }

  TEST_CASE("d_n w1s equals w0s off the contact ray") {
    for (const auto& p : test::random_half_points(200, 7))
      for (double s : {0.25, 0.6}) CHECK(grad_w1s(s, p).d_n == Approx(kCs * eval_w0s(s, p)).epsilon(1e-12));
  }

  TEST_CASE("v_model values") {
    for (double s : {0.3, 0.5, 0.7}) {
      for (double t : {0.0, 0.4, 2.0}) CHECK(eval_v_model(s, 0.0, t) == 0.0);
      CHECK(eval_v_model(s, std::sqrt(2.0), 0.0) == Approx(-s * std::pow(2.0, s) / (s + 1.0)).epsilon(1e-14));
      CHECK(eval_v_model(s, 1.0, 1.0) == Approx(1.0 / (2.0 * (1.0 + s))).epsilon(1e-14));
    }
  }

  TEST_CASE("L_s annihilates the model solutions") {
    for (double s : {0.3, 0.5, 0.7})
      for (const auto& p : test::random_half_points(300, 11)) {
        const Jet3 xn = test::seed_jet(kNor, p.x_n), xp = test::seed_jet(kVert, p.x_np1);
        CHECK(std::abs(apply_Ls(w1s_t(s, xn, xp), p.x_np1, s)) < 1e-10);
        CHECK(std::abs(apply_Ls(w0s_t(s, xn, xp), p.x_np1, s)) < 1e-10);
      }
  }

  TEST_CASE("L_s of x_{n+1}^2") {
    for (double s : {0.3, 0.5, 0.7})
      for (double x : {0.1, 0.5, 0.9}) {
        const Jet3 xp = test::seed_jet(kVert, x);
        CHECK(apply_Ls(xp * xp, x, s) == Approx(2.0 * (2.0 - 2.0 * s) * std::pow(x, 1.0 - 2.0 * s)).epsilon(1e-13));
      }
  }

  TEST_CASE("homogeneity of w1s") {
    for (const auto& p : test::random_half_points(100, 3))
      for (double lam : {0.25, 3.0}) {
        const double s = 0.4;
        const HalfPoint q(lam * p.x_n, lam * p.x_np1);
        CHECK(eval_w1s(s, q) == Approx(std::pow(lam, 1.0 + s) * eval_w1s(s, p)).epsilon(1e-12));
      }
  }

  TEST_CASE("FracOrder and HalfPoint validation") {
    CHECK_THROWS_AS(FracOrder(0.0), Error);
    CHECK_THROWS_AS(FracOrder(1.0), Error);
    CHECK_THROWS_AS(FracOrder(std::nan("")), Error);
    CHECK_THROWS_AS(HalfPoint(0.0, -0.1), Error);
  }

  TEST_CASE("inhomogeneity reduction") {
    const HalfPoint p(0.3, 0.4);
    auto zero = [](const HalfPoint&) { return 0.0; };
    InhomogeneityField constant{[](const HalfPoint&) { return 2.5; }, zero, zero, zero, zero};
    CHECK(reduce_inhomogeneity(0.4, constant, p).f == Approx(0.0).epsilon(1e-14));
    InhomogeneityField linear{[](const HalfPoint& x) { return x.x_np1; }, [](const HalfPoint&) { return 1.0; }, zero,
                              zero, zero};
    CHECK(std::abs(reduce_inhomogeneity(0.4, linear, p).f) < 1e-14);
    InhomogeneityField quad{[](const HalfPoint& x) { return x.x_np1 * x.x_np1; }, zero,
                            [](const HalfPoint&) { return 2.0; }, zero, zero};
    for (double s : {0.3, 0.7}) {
      CHECK(reduce_inhomogeneity(s, quad, p).f == Approx(1.0).epsilon(1e-13));
      CHECK(reduce_inhomogeneity(s, quad, HalfPoint(0.3, 0.0)).f == Approx(1.0).epsilon(1e-13));
    }
    InhomogeneityField missing{[](const HalfPoint&) { return 1.0; }, {}, {}, {}, {}};
    CHECK_THROWS_AS(reduce_inhomogeneity(0.5, missing, p), Error);
  }

  TEST_CASE("rescaling") {
    const double s = 0.35;
    const Field w{[s](const HalfPoint& x) { return eval_w1s(s, x); }};
    const Field id = rescale_solution(w, 1.0, 1.0, HalfPoint(0.0, 0.0));
    for (const auto& p : test::random_half_points(50, 5)) {
      CHECK(id(p) == Approx(w(p)).epsilon(1e-15));
      for (double lam : {0.1, 0.5, 4.0}) {
        const Field r = rescale_solution(w, std::pow(lam, -(1.0 + s)), lam, HalfPoint(0.0, 0.0));
        CHECK(r(p) == Approx(w(p)).epsilon(1e-12));
      }
    }
    const Field f0{[](const HalfPoint&) { return 0.0; }};
    CHECK(rescale_inhomogeneity(f0, 2.0, 0.5, HalfPoint(0.1, 0.0))(HalfPoint(0.2, 0.3)) == 0.0);
  }

  TEST_CASE("shifted closed form matches translation") {
    const double s = 0.5;
    ClosedFormField f(ClosedFormField::Kind::W1S, s);
    f.with_shift({}, 0.25);
    for (const auto& p : test::random_half_points(50, 9))
      CHECK(f(p) == Approx(eval_w1s(s, HalfPoint(p.x_n - 0.25, p.x_np1))).epsilon(1e-13));
  }
}
