#include "thinobs/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace thinobs {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(const std::string& tok) {
  if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw Error(ErrorCode::IoFailure, "malformed number '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + e.what());
  }
}

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

}  // namespace

void write_csv(const fs::path& path, const CsvTable& table) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  if (!table.comment.empty()) os << "# " << table.comment << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw Error(ErrorCode::IoFailure, "row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (t.comment.empty()) t.comment = line.size() > 2 ? line.substr(2) : "";
      continue;
    }
    if (!header) {
      t.columns = split(line);
      header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& tok : split(line)) row.push_back(parse_number(tok));
    if (row.size() != t.columns.size()) throw Error(ErrorCode::IoFailure, "ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  if (!header) throw Error(ErrorCode::IoFailure, path.string() + " has no header");
  return t;
}

void write_solution(const DiscreteSolution& sol, const fs::path& stem) {
  const WeightedGrid& g = sol.grid;
  CsvTable t;
  t.comment = "nodal solution: x1 (n=2 only, else 0), x_n, x_np1, w; thin rows also carry obstacle, flux, contact";
  t.columns = {"x1", "x_n", "x_np1", "w", "obstacle", "flux", "contact"};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const HalfPoint p = g.point(k);
    const bool thin = k < g.thin_size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({p.x_tan.empty() ? 0.0 : p.x_tan[0], p.x_n, p.x_np1, sol.values[k],
                      thin && k < sol.obstacle.size() ? sol.obstacle[k] : nan,
                      thin && k < sol.flux.size() ? sol.flux[k] : nan,
                      thin && k < sol.contact_mask.size() ? double(sol.contact_mask[k]) : nan});
  }
  write_csv(with_ext(stem, ".csv"), t);
  json j = {{"kind", "discrete_solution"},
            {"axis_roles", {"x1", "x_n", "x_np1"}},
            {"grid",
             {{"n", g.n},
              {"h", g.h},
              {"s", g.s},
              {"tan_extent", g.tan_extent},
              {"nor_extent", g.nor_extent},
              {"height", g.height}}},
            {"energy", sol.energy},
            {"comp_residual", sol.comp_residual},
            {"iterations", sol.iterations},
            {"omega", sol.omega}};
  write_json(with_ext(stem, ".json"), j);
}

DiscreteSolution read_solution(const fs::path& stem) {
  const json j = read_json(with_ext(stem, ".json"));
  DiscreteSolution sol;
  try {
    const json& g = j.at("grid");
    sol.grid = make_grid(g.at("n").get<int>(), g.at("h").get<double>(), g.at("s").get<double>(),
                         g.at("nor_extent").get<std::array<double, 2>>(), g.at("height").get<double>(),
                         g.at("tan_extent").get<std::array<double, 2>>());
    sol.energy = j.at("energy").get<double>();
    sol.comp_residual = j.at("comp_residual").get<double>();
    sol.iterations = j.at("iterations").get<int>();
    sol.omega = j.at("omega").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("solution metadata: ") + e.what());
  }
  const CsvTable t = read_csv(with_ext(stem, ".csv"));
  if (t.rows.size() != sol.grid.size()) throw Error(ErrorCode::IoFailure, "node count does not match the grid");
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    sol.values.push_back(t.rows[k][3]);
    if (k < sol.grid.thin_size()) {
      sol.obstacle.push_back(t.rows[k][4]);
      sol.flux.push_back(t.rows[k][5]);
      sol.contact_mask.push_back(static_cast<char>(t.rows[k][6] != 0.0));
    }
  }
  return sol;
}

void write_legendre(const LegendreField& f, const fs::path& stem) {
  CsvTable t;
  t.comment = "Legendre field on the quarter grid: y1, y_n, y_np1, v, x_n(y), x_np1(y)";
  t.columns = {"y1", "y_n", "y_np1", "v", "x_n", "x_np1"};
  const double h = f.spacing();
  for (int j = 0; j < f.count; ++j)
    for (int i = 0; i < f.count; ++i)
      for (std::size_t a = 0; a < f.y_tan.size(); ++a) {
        const std::size_t k = f.index(static_cast<int>(a), i, j);
        t.rows.push_back({f.y_tan[a], i * h, j * h, f.v[k], f.x_n[k], f.x_np1[k]});
      }
  write_csv(with_ext(stem, ".csv"), t);
  json j = {{"kind", "legendre_field"}, {"axis_roles", {"y1", "y_n", "y_np1"}}, {"s", f.s}, {"n", f.n},
            {"y_tan", f.y_tan},        {"extent", f.extent},                    {"count", f.count}};
  write_json(with_ext(stem, ".json"), j);
}

LegendreField read_legendre(const fs::path& stem) {
  const json j = read_json(with_ext(stem, ".json"));
  LegendreField f;
  try {
    if (j.at("kind").get<std::string>() != "legendre_field") throw Error(ErrorCode::IoFailure, "not a Legendre field");
    f.s = j.at("s").get<double>();
    f.n = j.at("n").get<int>();
    f.y_tan = j.at("y_tan").get<std::vector<double>>();
    f.extent = j.at("extent").get<double>();
    f.count = j.at("count").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("Legendre metadata: ") + e.what());
  }
  const CsvTable t = read_csv(with_ext(stem, ".csv"));
  if (t.rows.size() != f.size()) throw Error(ErrorCode::IoFailure, "node count does not match the quarter grid");
  f.v.resize(f.size());
  f.x_n.resize(f.size());
  f.x_np1.resize(f.size());
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    f.v[k] = t.rows[k][3];
    f.x_n[k] = t.rows[k][4];
    f.x_np1[k] = t.rows[k][5];
  }
  return f;
}

std::string polynomial_to_json(const GrushinPolynomial& p) {
  json terms = json::array();
  for (const auto& [beta, c] : p.terms()) terms.push_back({{"beta", beta}, {"coeff", c}});
  return json{{"kind", "grushin_polynomial"}, {"n", p.n()}, {"terms", terms}}.dump(2);
}

GrushinPolynomial polynomial_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("kind").get<std::string>() != "grushin_polynomial") throw Error(ErrorCode::IoFailure, "not a polynomial");
    GrushinPolynomial p(j.at("n").get<int>());
    for (const auto& t : j.at("terms")) p.set(t.at("beta").get<GrushinPolynomial::Index>(), t.at("coeff").get<double>());
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("polynomial JSON: ") + e.what());
  }
}

std::string decomposition_to_json(const XYDecomposition& d) {
  json pts = json::array();
  for (const auto& q : d.sample_points) pts.push_back({q.y_tan, q.y_n, q.y_np1});
  return json{{"kind", "xy_decomposition"},
              {"y_tan", d.y_tan},
              {"c0", d.c0},
              {"a0", d.a0},
              {"a1", d.a1},
              {"sample_points", pts},
              {"C0", d.C0},
              {"seminorm_dc0", d.seminorm_dc0},
              {"seminorm_a0", d.seminorm_a0},
              {"seminorm_a1", d.seminorm_a1},
              {"seminorm_C0", d.seminorm_C0},
              {"max_C0", d.max_C0}}
      .dump(2);
}

std::string decomposition_to_json(const YDecomposition& d) {
  return json{{"kind", "y_decomposition"}, {"y_tan", d.y_tan}, {"f0", d.f0}, {"max_f1", d.max_f1}}.dump(2);
}

}  // namespace thinobs
