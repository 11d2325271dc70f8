#include <filesystem>

#include "support.hpp"
#include "thinobs/io.hpp"

using namespace thinobs;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "thinobs_io_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("numbers round trip exactly") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
      CHECK(std::stod(format_number(x)) == x);
  }

  TEST_CASE("csv round trip") {
    const CsvTable t{"test table: a, b", {"a", "b"}, {{1.0, 1.0 / 3.0}, {-2.0, std::nan("")}}};
    const auto path = scratch_dir() / "table.csv";
    write_csv(path, t);
    const auto back = read_csv(path);
    CHECK(back.comment == t.comment);
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0][1] == 1.0 / 3.0);
    CHECK(std::isnan(back.rows[1][1]));
    CHECK_THROWS_AS(read_csv(scratch_dir() / "missing.csv"), Error);
  }

  TEST_CASE("solution round trip") {
    const double s = 0.3;
    ProblemSpec spec;
    spec.grid = make_grid(1, 1.0 / 16, s);
    spec.obstacle = [](const HalfPoint&) { return 0.0; };
    spec.dirichlet = [s](const HalfPoint& x) { return eval_w1s(s, x); };
    SolveOptions o;
    o.auto_omega = true;
    const auto sol = solve_vi(spec, 1e-10, 100000, o);
    const auto stem = scratch_dir() / "sol";
    write_solution(sol, stem);
    const auto back = read_solution(stem);
    CHECK(back.values == sol.values);
    CHECK(back.contact_mask == sol.contact_mask);
    CHECK(back.flux == sol.flux);
    CHECK(back.grid.h == sol.grid.h);
    CHECK(back.grid.s == sol.grid.s);
    CHECK(back.iterations == sol.iterations);
  }

  TEST_CASE("Legendre field round trip") {
    const auto f = model_legendre_field(0.6);
    const auto stem = scratch_dir() / "leg";
    write_legendre(f, stem);
    const auto back = read_legendre(stem);
    CHECK(back.v == f.v);
    CHECK(back.x_n == f.x_n);
    CHECK(back.x_np1 == f.x_np1);
    CHECK(back.count == f.count);
  }

  TEST_CASE("polynomial json round trip") {
    GrushinPolynomial p(2);
    p.set({1, 0, 2}, 0.25);
    p.set({0, 3, 0}, -1.0 / 3.0);
    const auto back = polynomial_from_json(polynomial_to_json(p));
    CHECK(back.n() == 2);
    CHECK(back.terms() == p.terms());
    CHECK_THROWS_AS(polynomial_from_json("{\"kind\": 3}"), Error);
  }
}
