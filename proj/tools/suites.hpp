#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace thinobs::cli {

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

// Validated view of one suite's parameters. Unknown keys are rejected up front.
class Params {
 public:
  Params(nlohmann::json j, std::set<std::string> allowed, std::string where);
  double number(const std::string& key, double fallback, double lo, double hi) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback, double lo, double hi) const;
  std::vector<double> s_values(std::vector<double> fallback) const;
  long integer(const std::string& key, long fallback, long lo, long hi) const;
  void require(const std::string& key) const;
  const nlohmann::json& raw() const { return j_; }

 private:
  nlohmann::json j_;
  std::string where_;
};

struct RunContext {
  std::filesystem::path out;
  std::uint64_t seed = 1;
  bool seed_given = false;
};

struct SuiteResult {
  std::string suite;
  nlohmann::json params;
  std::vector<Check> checks;
};

extern const std::vector<std::string> kSuites;

Params suite_params(const std::string& suite, const nlohmann::json& cfg, bool from_file);
SuiteResult run_suite(const std::string& suite, const Params& p, const RunContext& ctx);
void write_summary(const SuiteResult& r, const std::filesystem::path& out);

}  // namespace thinobs::cli
