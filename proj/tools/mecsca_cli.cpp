// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

// mecsca command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 internal error, 2 usage error, 3 infeasible
// scenario, 4 validation suite failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mecsca/mecsca.h"

namespace {

enum Exit { kSuccess = 0, kInternal = 1, kUsage = 2, kInfeasible = 3, kSuiteFailure = 4 };

// Thrown to unwind with a specific exit code after printing a diagnostic.
struct Failure {
  int code;
  std::string message;
};

int exit_for(mecsca_status status) {
  return status == MECSCA_ERR_INVALID_ARGUMENT ? kUsage : kInternal;
}

void check(mecsca_status status, const std::string& context) {
  if (status != MECSCA_OK) throw Failure{exit_for(status), context + ": " + mecsca_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using ConfigPtr = std::unique_ptr<mecsca_config, Deleter<mecsca_config, mecsca_config_free>>;
using ProblemPtr = std::unique_ptr<mecsca_problem, Deleter<mecsca_problem, mecsca_problem_free>>;
using SolutionPtr =
    std::unique_ptr<mecsca_solution, Deleter<mecsca_solution, mecsca_solution_free>>;
using SweepPtr = std::unique_ptr<mecsca_sweep, Deleter<mecsca_sweep, mecsca_sweep_free>>;
using OraclePtr = std::unique_ptr<mecsca_oracle, Deleter<mecsca_oracle, mecsca_oracle_free>>;
using ValidationPtr =
    std::unique_ptr<mecsca_validation, Deleter<mecsca_validation, mecsca_validation_free>>;

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s == nullptr ? "" : s;
  mecsca_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Flags {
  std::string config_path;
  std::string problem_path;
  // Setting name -> raw flag text, applied over the file.
  std::vector<std::pair<std::string, std::optional<std::string>>> overrides = {
      {"seed", {}}, {"drops", {}}, {"eta", {}},   {"tmax", {}},     {"mode", {}},
      {"out", {}},  {"jobs", {}},  {"users", {}}, {"drop_index", {}}, {"suite", {}},
      {"mutation", {}}};

  std::optional<std::string>& operator[](const std::string& key) {
    for (auto& [k, v] : overrides)
      if (k == key) return v;
    throw std::logic_error("unknown flag " + key);
  }
};

class Run {
 public:
  Run(const Flags& flags, const std::string& command) {
    mecsca_config* raw = nullptr;
    const std::string text = flags.config_path.empty() ? "" : read_file(flags.config_path);
    check(mecsca_config_from_json(text.c_str(), &raw), "config");
    config_.reset(raw);
    if (!flags.problem_path.empty())
      check(mecsca_config_set(config_.get(), "problem", read_file(flags.problem_path).c_str()),
            "--problem");
    for (const auto& [key, value] : flags.overrides)
      if (value) check(mecsca_config_set(config_.get(), key.c_str(), value->c_str()), "--" + key);
    check(mecsca_config_resolve(config_.get(), command.c_str()), command);
    char* h = nullptr;
    check(mecsca_config_hash(config_.get(), &h), "config hash");
    hash_ = take(h);
    out_dir_ = mecsca_config_out_dir(config_.get());
    std::error_code ec;
    std::filesystem::create_directories(out_dir_, ec);
    if (ec) throw Failure{kUsage, "cannot create output directory " + out_dir_ + ": " + ec.message()};
    char* js = nullptr;
    check(mecsca_config_to_json(config_.get(), &js), "config dump");
    write("config.json", take(js));
  }

  mecsca_config* config() const { return config_.get(); }

  void write(const std::string& name, const std::string& body) const {
    const std::filesystem::path path = std::filesystem::path(out_dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kUsage, "cannot write " + path.string()};
    out << body;
  }

  void write_csv(const std::string& name, const std::string& body) const {
    std::ostringstream os;
    os << "# config_hash=" << hash_ << " seed=" << mecsca_config_seed(config_.get()) << '\n'
       << body;
    write(name, os.str());
  }

  ProblemPtr problem() const {
    mecsca_problem* p = nullptr;
    check(mecsca_problem_from_config(config_.get(), &p), "problem");
    return ProblemPtr(p);
  }

 private:
  ConfigPtr config_;
  std::string hash_;
  std::string out_dir_;
};

bool infeasible(const mecsca_solve_summary& s) {
  return !s.feasible || std::string(s.status) == "infeasible_scenario" ||
         std::string(s.status) == "inner_failure";
}

int cmd_solve(const Flags& flags) {
  const Run run(flags, "solve");
  const ProblemPtr problem = run.problem();
  mecsca_solution* raw = nullptr;
  check(mecsca_solve(problem.get(), run.config(), &raw), "solve");
  const SolutionPtr sol(raw);
  mecsca_solve_summary s{};
  check(mecsca_solution_summary(sol.get(), &s), "summary");
  char* text = nullptr;
  check(mecsca_solution_trace_csv(sol.get(), &text), "trace");
  run.write_csv("trace.csv", take(text));
  check(mecsca_solution_allocation_json(sol.get(), &text), "allocation");
  run.write("allocation.json", take(text));
  std::printf(
      "status=%s feasible=%d iterations=%d objective_J=%.12g initial_J=%.12g residual=%.3g "
      "max_iterate_violation=%.3g\n",
      s.status, s.feasible, s.iterations, s.objective, s.initial_objective, s.final_residual,
      s.max_iterate_violation);
  if (infeasible(s)) {
    std::fprintf(stderr, "error: the scenario admits no feasible allocation (%s)\n", s.status);
    return kInfeasible;
  }
  return kSuccess;
}

int cmd_sweep(const Flags& flags) {
  const Run run(flags, "sweep");
  mecsca_sweep* raw = nullptr;
  check(mecsca_sweep_run(run.config(), &raw), "sweep");
  const SweepPtr sweep(raw);
  char* text = nullptr;
  check(mecsca_sweep_records_csv(sweep.get(), &text), "records");
  run.write_csv("records.csv", take(text));
  check(mecsca_sweep_aggregate_csv(sweep.get(), &text), "aggregate");
  run.write_csv("aggregate.csv", take(text));
  check(mecsca_sweep_summary(sweep.get(), &text), "summary");
  std::fputs(take(text).c_str(), stdout);
  return kSuccess;
}

int cmd_oracle(const Flags& flags) {
  const Run run(flags, "oracle");
  const ProblemPtr problem = run.problem();
  mecsca_oracle* raw = nullptr;
  check(mecsca_oracle_run(problem.get(), run.config(), &raw), "oracle");
  const OraclePtr oracle(raw);
  mecsca_oracle_summary o{};
  check(mecsca_oracle_summary_get(oracle.get(), &o), "oracle summary");
  char* text = nullptr;
  check(mecsca_oracle_leaders_csv(oracle.get(), &text), "leaders");
  run.write_csv("oracle_leaders.csv", take(text));

  mecsca_solution* sraw = nullptr;
  check(mecsca_solve(problem.get(), run.config(), &sraw), "solve");
  const SolutionPtr sol(sraw);
  mecsca_solve_summary s{};
  check(mecsca_solution_summary(sol.get(), &s), "summary");
  std::printf("grid_found=%d grid_objective_J=%.12g evaluated=%llu verified=%llu\n", o.found,
              o.objective, static_cast<unsigned long long>(o.evaluated),
              static_cast<unsigned long long>(o.verified));
  std::printf("sca_status=%s sca_feasible=%d sca_objective_J=%.12g iterations=%d\n", s.status,
              s.feasible, s.objective, s.iterations);
  if (o.found && !infeasible(s)) std::printf("ratio_sca_over_grid=%.6f\n", s.objective / o.objective);
  if (!o.found) {
    std::fprintf(stderr, "error: no grid point is feasible\n");
    return kInfeasible;
  }
  return kSuccess;
}

int cmd_validate(const Flags& flags) {
  const Run run(flags, "validate");
  mecsca_validation* raw = nullptr;
  check(mecsca_validate_run(run.config(), &raw), "validate");
  const ValidationPtr v(raw);
  for (std::size_t i = 0; i < mecsca_validation_count(v.get()); ++i) {
    mecsca_suite_report r{};
    check(mecsca_validation_report(v.get(), i, &r), "report");
    std::printf("%s %s checks=%ld failures=%ld worst=%.3g %s\n", r.passed ? "PASS" : "FAIL",
                r.suite, r.checks, r.failures, r.worst, r.detail);
  }
  return mecsca_validation_passed(v.get()) ? kSuccess : kSuiteFailure;
}

void add_shared_flags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config_path, "JSON run configuration");
  sub->add_option("--seed", flags["seed"], "master seed (u64)");
  sub->add_option("--drops", flags["drops"], "number of random drops");
  sub->add_option("--eta", flags["eta"], "sharing fraction(s), comma-separated");
  sub->add_option("--tmax", flags["tmax"], "latency budget in seconds");
  sub->add_option("--mode", flags["mode"],
                  "sharing mode(s): full_shared, shared_uplink_only, "
                  "shared_processing_downlink, separate");
  sub->add_option("--out", flags["out"], "output directory");
  sub->add_option("--jobs", flags["jobs"], "worker threads");
  sub->add_option("--users", flags["users"], "users per drop");
  sub->add_option("--drop-index", flags["drop_index"], "seeded drop used by solve/oracle");
  sub->add_option("--problem", flags.problem_path, "explicit problem JSON instead of a drop");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-minimizing resource allocation for collaborative MEC offloading"};
  app.set_version_flag("--version", std::string(mecsca_version()));
  app.require_subcommand(1);
  Flags flags;
  CLI::App* solve = app.add_subcommand("solve", "solve one drop and write its iteration trace");
  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over eta and sharing modes");
  CLI::App* oracle = app.add_subcommand("oracle", "grid-search cross-check of one drop");
  CLI::App* validate = app.add_subcommand("validate", "run the built-in property suites");
  for (CLI::App* sub : {solve, sweep, oracle, validate}) add_shared_flags(sub, flags);
  validate->add_option("--suite", flags["suite"], "surrogate, gradient, oracle (comma list)");
  validate->add_option("--mutation", flags["mutation"], "none or flip_power_linear_term");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(flags);
    if (sweep->parsed()) return cmd_sweep(flags);
    if (oracle->parsed()) return cmd_oracle(flags);
    return cmd_validate(flags);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}
