// Runs verification suites and writes CSV tables plus a JSON summary per suite.
#include <cstdlib>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "suites.hpp"
#include "thinobs/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thinobs;
using namespace thinobs::cli;

namespace {

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigInvalid, "cannot open config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
}

fs::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("THINOBS_OUT_DIR"); env && *env) return env;
  return "thinobs_out";
}

bool report(const SuiteResult& r) {
  bool ok = true;
  for (const auto& c : r.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << r.suite << '/' << c.name << " value=" << c.value
              << " threshold=" << c.threshold << '\n';
    ok = ok && c.pass;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification runner for the thin obstacle problem"};
  std::string suite, config, out;
  std::uint64_t seed = 1;
  int threads = 0;
  std::vector<std::string> choices = kSuites;
  choices.push_back("verify-all");
  app.add_option("suite", suite, "Suite to run")->required()->check(CLI::IsMember(choices));
  app.add_option("--config", config, "JSON parameter file");
  app.add_option("--out", out, "Output directory (else THINOBS_OUT_DIR, else ./thinobs_out)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every randomized suite");
  app.add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    RunContext ctx{resolve_out(out), seed, seed_opt->count() > 0};
    const bool from_file = !config.empty();
    const json cfg = from_file ? load_config(config) : json::object();

    std::vector<std::pair<std::string, Params>> plan;
    if (suite == "verify-all") {
      if (!cfg.is_object()) throw Error(ErrorCode::ConfigInvalid, "config: expected a JSON object");
      for (const auto& [k, v] : cfg.items())
        if (k != "schema_version" && std::find(kSuites.begin(), kSuites.end(), k) == kSuites.end())
          throw Error(ErrorCode::ConfigInvalid, "config: unknown section '" + k + "'");
      for (const auto& name : kSuites) {
        const bool has = cfg.contains(name);
        plan.emplace_back(name, suite_params(name, has ? cfg[name] : json::object(), has));
      }
    } else {
      plan.emplace_back(suite, suite_params(suite, cfg, from_file));
    }

    bool ok = true;
    for (const auto& [name, params] : plan) {
      const SuiteResult r = run_suite(name, params, ctx);
      write_summary(r, ctx.out);
      ok = report(r) && ok;
    }
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigInvalid ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
