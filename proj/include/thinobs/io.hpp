#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "thinobs/grushin.hpp"
#include "thinobs/hodograph.hpp"
#include "thinobs/solver.hpp"

namespace thinobs {

// Numeric table with a '#' comment line documenting the columns.
struct CsvTable {
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Shortest round-trip decimal form; identical input gives identical bytes.
std::string format_number(double x);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// <stem>.csv holds nodal data, <stem>.json the grid and run metadata.
void write_solution(const DiscreteSolution& sol, const std::filesystem::path& stem);
DiscreteSolution read_solution(const std::filesystem::path& stem);

void write_legendre(const LegendreField& field, const std::filesystem::path& stem);
LegendreField read_legendre(const std::filesystem::path& stem);

// {"kind": "grushin_polynomial", "n": n, "terms": [{"beta": [...], "coeff": c}, ...]}
std::string polynomial_to_json(const GrushinPolynomial& p);
GrushinPolynomial polynomial_from_json(const std::string& text);

std::string decomposition_to_json(const XYDecomposition& d);
std::string decomposition_to_json(const YDecomposition& d);

}  // namespace thinobs
