#include "support.hpp"
#include "thinobs/solver.hpp"

using namespace thinobs;
using doctest::Approx;

namespace {

ProblemSpec model_spec(double s, double h) {
  ProblemSpec spec;
  spec.grid = make_grid(1, h, s);
  spec.obstacle = [](const HalfPoint&) { return 0.0; };
  spec.dirichlet = [s](const HalfPoint& x) { return eval_w1s(s, x); };
  return spec;
}

double power_integral(double a, double b, double q) { return (std::pow(b, q + 1.0) - std::pow(a, q + 1.0)) / (q + 1.0); }

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("grid validation") {
    CHECK_THROWS_AS(make_grid(1, 0.5, 0.5), Error);
    CHECK_THROWS_AS(make_grid(3, 0.1, 0.5), Error);
    CHECK_THROWS_AS(make_grid(1, -0.1, 0.5), Error);
    const auto g = make_grid(1, 1.0 / 16, 0.5);
    CHECK(g.count_nor() == 33);
    CHECK(g.count_vert() == 17);
    CHECK(g.point(g.index(0, 16, 0)).x_n == Approx(0.0));
  }

  TEST_CASE("interior rows are conservative and annihilate x_n") {
    for (double s : {0.3, 0.7}) {
      ProblemSpec spec;
      spec.grid = make_grid(1, 1.0 / 16, s);
      spec.dirichlet = [](const HalfPoint& x) { return x.x_n; };
      const auto sys = assemble(spec);
      Eigen::VectorXd xn(sys.unknown_nodes.size());
      for (std::size_t k = 0; k < sys.unknown_nodes.size(); ++k) xn[k] = spec.grid.point(sys.unknown_nodes[k]).x_n;
      const Eigen::VectorXd r = sys.A * xn - sys.b;
      CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
      Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.A.cols());
      const Eigen::VectorXd rows = sys.A * ones;
      int a, i, j, interior = 0;
      for (std::size_t k = 0; k < sys.unknown_nodes.size(); ++k) {
        spec.grid.unpack(sys.unknown_nodes[k], a, i, j);
        if (i < 2 || i > spec.grid.count_nor() - 3 || j > spec.grid.count_vert() - 3) continue;
        ++interior;
        CHECK(std::abs(rows[k]) < 1e-12);
      }
      CHECK(interior > 100);
      const Eigen::SparseMatrix<double> At = sys.A.transpose();
      CHECK((sys.A - At).norm() < 1e-14);
    }
  }

  TEST_CASE("unit load integrates the weight cellwise") {
    const double s = 0.4, h = 1.0 / 16;
    ProblemSpec spec;
    spec.grid = make_grid(1, h, s);
    spec.f = [](const HalfPoint&) { return 1.0; };
    spec.dirichlet = [](const HalfPoint&) { return 0.0; };
    const auto sys = assemble(spec);
    int a, i, j;
    for (std::size_t k = 0; k < sys.unknown_nodes.size(); ++k) {
      spec.grid.unpack(sys.unknown_nodes[k], a, i, j);
      const double lo = std::max(0.0, (j - 0.5) * h), hi = (j + 0.5) * h;
      // The system is scaled by 1/h, load included.
      CHECK(h * sys.cell_load[sys.unknown_nodes[k]] == Approx(h * power_integral(lo, hi, 3.0 - 2.0 * s)).epsilon(1e-12));
    }
  }

  TEST_CASE("unconstrained solve reproduces x_n") {
    ProblemSpec spec;
    spec.grid = make_grid(1, 1.0 / 16, 0.5);
    spec.dirichlet = [](const HalfPoint& x) { return x.x_n; };
    SolveOptions o;
    o.auto_omega = true;
    const auto sol = solve_vi(spec, 1e-13, 100000, o);
    for (std::size_t k = 0; k < sol.values.size(); ++k) CHECK(sol.values[k] == Approx(sol.grid.point(k).x_n).epsilon(1e-10));
  }

  TEST_CASE("large positive load forces full contact") {
    ProblemSpec spec;
    spec.grid = make_grid(1, 1.0 / 16, 0.5);
    spec.f = [](const HalfPoint&) { return 50.0; };
    spec.obstacle = [](const HalfPoint&) { return 0.0; };
    spec.dirichlet = [](const HalfPoint&) { return 0.0; };
    SolveOptions o;
    o.auto_omega = true;
    const auto sol = solve_vi(spec, 1e-10, 100000, o);
    for (int i = 1; i + 1 < sol.grid.count_nor(); ++i) {
      CHECK(sol.values[sol.grid.index(0, i, 0)] == 0.0);
      CHECK(sol.contact_mask[sol.grid.index(0, i, 0)]);
    }
  }

  TEST_CASE("model run satisfies complementarity and converges") {
    double prev = 0.0;
    for (double h : {1.0 / 16, 1.0 / 32}) {
      SolveOptions o;
      o.auto_omega = true;
      o.check_energy = true;
      const auto sol = solve_vi(model_spec(0.5, h), 1e-10, 200000, o);
      const auto rep = complementarity_report(sol);
      CHECK(rep.max_violation == 0.0);
      CHECK(rep.max_positive_flux <= 1e-8);
      CHECK(rep.max_product <= 1e-8);
      for (std::size_t k = 1; k < sol.energy_history.size(); ++k)
        CHECK(sol.energy_history[k] <= sol.energy_history[k - 1] + 1e-12 * std::abs(sol.energy_history[k - 1]));
      double err = 0.0;
      for (std::size_t k = 0; k < sol.values.size(); ++k)
        err = std::max(err, std::abs(sol.values[k] - eval_w1s(0.5, sol.grid.point(k))));
      if (prev > 0.0) CHECK(std::log2(prev / err) >= 0.8);
      prev = err;
    }
  }

  TEST_CASE("NotConverged carries the best iterate") {
    try {
      solve_vi(model_spec(0.5, 1.0 / 16), 1e-14, 3);
      FAIL("expected NotConverged");
    } catch (const NotConverged& e) {
      CHECK(e.code() == ErrorCode::NotConverged);
      CHECK(e.best().values.size() == make_grid(1, 1.0 / 16, 0.5).size());
      CHECK(e.best().iterations == 3);
    }
  }

  TEST_CASE("complementarity report on hand-built iterates") {
    const auto spec = model_spec(0.5, 1.0 / 16);
    std::vector<double> zeros(spec.grid.size(), 0.0);
    ProblemSpec zero_spec = spec;
    zero_spec.dirichlet = [](const HalfPoint&) { return 0.0; };
    const auto z = complementarity_report(evaluate_iterate(zero_spec, zeros));
    CHECK(z.max_violation == 0.0);
    CHECK(z.max_positive_flux >= 0.0);
    CHECK(z.max_product == 0.0);

    auto sampled = sample_solution(spec.grid, [](const HalfPoint& x) { return eval_w1s(0.5, x); });
    auto bad = sampled.values;
    bad[spec.grid.index(0, 4, 0)] = -0.3;
    CHECK(complementarity_report(evaluate_iterate(spec, bad)).max_violation == Approx(0.3));
  }

  TEST_CASE("comparison principle in the load") {
    const double s = 0.5;
    auto run = [&](double f) {
      ProblemSpec spec = model_spec(s, 1.0 / 16);
      spec.f = [f](const HalfPoint&) { return f; };
      SolveOptions o;
      o.auto_omega = true;
      return solve_vi(spec, 1e-11, 200000, o);
    };
    const auto w1 = run(0.0), w2 = run(2.0);
    for (std::size_t k = 0; k < w1.values.size(); ++k) CHECK(w1.values[k] >= w2.values[k] - 1e-9);
  }

  TEST_CASE("solve is deterministic") {
    SolveOptions o;
    o.auto_omega = true;
    const auto a = solve_vi(model_spec(0.3, 1.0 / 16), 1e-10, 100000, o);
    const auto b = solve_vi(model_spec(0.3, 1.0 / 16), 1e-10, 100000, o);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
  }
}
