// Copyright 2026 The mecsca Authors
// SPDX-License-Identifier: Apache-2.0

#include "mecsca/mecsca.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mecsca/config.hpp"
#include "mecsca/json_io.hpp"
#include "mecsca/oracle.hpp"
#include "mecsca/sca.hpp"
#include "mecsca/scenario.hpp"
#include "mecsca/validate.hpp"

struct mecsca_config {
  mecsca::RunConfig config;
};
struct mecsca_problem {
  mecsca::Problem problem;
};
struct mecsca_solution {
  mecsca::SolveResult result;
  std::string status;
  double max_iterate_violation = 0.0;
};
struct mecsca_sweep {
  mecsca::MonteCarloResult result;
};
struct mecsca_oracle {
  mecsca::OracleResult result;
};
struct mecsca_validation {
  std::vector<mecsca::SuiteReport> reports;
  std::vector<std::string> names;
};

namespace {

thread_local std::string g_last_error;

mecsca_status record(mecsca_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs fn, mapping exceptions onto status codes.
template <class Fn>
mecsca_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::invalid_argument& e) {
    return record(MECSCA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return record(MECSCA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return record(MECSCA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(MECSCA_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(MECSCA_ERR_INTERNAL, "unknown error");
  }
}

mecsca_status null_argument(const char* name) {
  return record(MECSCA_ERR_INVALID_ARGUMENT, (std::string(name) + " is NULL").c_str());
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Handle, class Fn>
mecsca_status emit_string(const Handle* handle, char** out, Fn&& fn) {
  if (handle == nullptr) return null_argument("handle");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = copy_string(fn(*handle));
    return MECSCA_OK;
  });
}

}  // namespace

extern "C" {

const char* mecsca_version(void) { return "0.1.0"; }

const char* mecsca_last_error(void) { return g_last_error.c_str(); }

void mecsca_string_free(char* s) { std::free(s); }

mecsca_status mecsca_config_from_json(const char* json, mecsca_config** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto* c = new mecsca_config{mecsca::config_from_json(json == nullptr ? "" : json)};
    *out = c;
    return MECSCA_OK;
  });
}

void mecsca_config_free(mecsca_config* config) { delete config; }

mecsca_status mecsca_config_set(mecsca_config* config, const char* key, const char* value) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr || value == nullptr) return null_argument("key/value");
  return guarded([&] {
    mecsca::RunConfig updated = config->config;
    mecsca::apply_override(updated, key, value);
    config->config = std::move(updated);
    return MECSCA_OK;
  });
}

mecsca_status mecsca_config_resolve(mecsca_config* config, const char* command) {
  if (config == nullptr) return null_argument("config");
  if (command == nullptr) return null_argument("command");
  return guarded([&] {
    const auto cmd = mecsca::parse_command(command);
    if (!cmd) throw std::invalid_argument(std::string("unknown command '") + command + "'");
    config->config = mecsca::resolve(config->config, *cmd);
    return MECSCA_OK;
  });
}

mecsca_status mecsca_config_to_json(const mecsca_config* config, char** out) {
  return emit_string(config, out, [](const mecsca_config& c) {
    return mecsca::config_to_json(c.config, 2);
  });
}

mecsca_status mecsca_config_hash(const mecsca_config* config, char** out) {
  return emit_string(config, out, [](const mecsca_config& c) {
    return mecsca::hash_hex(mecsca::config_hash(c.config));
  });
}

uint64_t mecsca_config_seed(const mecsca_config* config) {
  return config == nullptr ? 0 : config->config.seed;
}

const char* mecsca_config_out_dir(const mecsca_config* config) {
  return config == nullptr ? "" : config->config.out.c_str();
}

mecsca_status mecsca_problem_from_json(const char* json, mecsca_problem** out) {
  if (json == nullptr) return null_argument("json");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new mecsca_problem{mecsca::problem_from_json(json)};
    return MECSCA_OK;
  });
}

mecsca_status mecsca_problem_from_config(const mecsca_config* config, mecsca_problem** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new mecsca_problem{mecsca::scenario_problem(config->config)};
    return MECSCA_OK;
  });
}

mecsca_status mecsca_problem_to_json(const mecsca_problem* problem, char** out) {
  return emit_string(problem, out, [](const mecsca_problem& p) {
    return mecsca::problem_to_json(p.problem);
  });
}

size_t mecsca_problem_num_users(const mecsca_problem* problem) {
  return problem == nullptr ? 0 : problem->problem.scenario.num_users();
}

void mecsca_problem_free(mecsca_problem* problem) { delete problem; }

mecsca_status mecsca_solve(const mecsca_problem* problem, const mecsca_config* config,
                           mecsca_solution** out) {
  if (problem == nullptr) return null_argument("problem");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const mecsca::ScaConfig sca = config == nullptr ? mecsca::ScaConfig{} : config->config.sca;
    auto* s = new mecsca_solution;
    try {
      s->result = mecsca::sca_solve(problem->problem.scenario, problem->problem.profile, sca);
    } catch (...) {
      delete s;
      throw;
    }
    s->status = mecsca::to_string(s->result.status);
    for (const auto& it : s->result.history)
      s->max_iterate_violation = std::max(s->max_iterate_violation, it.worst_violation);
    *out = s;
    return MECSCA_OK;
  });
}

mecsca_status mecsca_solution_summary(const mecsca_solution* solution, mecsca_solve_summary* out) {
  if (solution == nullptr) return null_argument("solution");
  if (out == nullptr) return null_argument("out");
  const mecsca::SolveResult& r = solution->result;
  out->status = solution->status.c_str();
  out->feasible = r.feasibility.feasible ? 1 : 0;
  out->iterations = r.iterations;
  out->initial_objective = r.initial_objective;
  out->objective = r.objective;
  out->final_residual = r.final_residual();
  out->max_iterate_violation = solution->max_iterate_violation;
  return MECSCA_OK;
}

mecsca_status mecsca_solution_trace_csv(const mecsca_solution* solution, char** out) {
  return emit_string(solution, out, [](const mecsca_solution& s) {
    return mecsca::trace_csv(s.result);
  });
}

mecsca_status mecsca_solution_allocation_json(const mecsca_solution* solution, char** out) {
  return emit_string(solution, out, [](const mecsca_solution& s) {
    return mecsca::allocation_to_json(s.result.allocation);
  });
}

void mecsca_solution_free(mecsca_solution* solution) { delete solution; }

mecsca_status mecsca_sweep_run(const mecsca_config* config, mecsca_sweep** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new mecsca_sweep{mecsca::monte_carlo(mecsca::monte_carlo_config(config->config))};
    return MECSCA_OK;
  });
}

mecsca_status mecsca_sweep_records_csv(const mecsca_sweep* sweep, char** out) {
  return emit_string(sweep, out, [](const mecsca_sweep& s) {
    return mecsca::records_csv(s.result);
  });
}

mecsca_status mecsca_sweep_aggregate_csv(const mecsca_sweep* sweep, char** out) {
  return emit_string(sweep, out, [](const mecsca_sweep& s) {
    return mecsca::aggregate_csv(s.result);
  });
}

mecsca_status mecsca_sweep_saving(const mecsca_sweep* sweep, double eta, const char* mode,
                                  double* saving, int* available) {
  if (sweep == nullptr) return null_argument("sweep");
  if (mode == nullptr || saving == nullptr || available == nullptr) return null_argument("argument");
  return guarded([&] {
    const auto m = mecsca::parse_sharing_mode(mode);
    if (!m) throw std::invalid_argument(std::string("unknown sharing mode '") + mode + "'");
    const auto s = sweep->result.saving_vs_separate(eta, *m);
    *available = s ? 1 : 0;
    *saving = s.value_or(std::numeric_limits<double>::quiet_NaN());
    return MECSCA_OK;
  });
}

mecsca_status mecsca_sweep_summary(const mecsca_sweep* sweep, char** out) {
  return emit_string(sweep, out, [](const mecsca_sweep& s) {
    const mecsca::MonteCarloResult& r = s.result;
    std::ostringstream os;
    char line[256];
    for (double eta : r.config.etas) {
      for (const mecsca::AggregateRow& row : r.aggregates) {
        if (row.eta != eta) continue;
        const auto saving = r.saving_vs_separate(eta, row.mode);
        // Means over the drops every mode solved, so rows are comparable.
        const auto paired = r.paired_mean(eta, row.mode);
        std::snprintf(line, sizeof line, "eta=%.3g %-26s paired_mean=%.6g J feasible=%d/%d", eta,
                      mecsca::to_string(row.mode).c_str(),
                      paired.value_or(std::numeric_limits<double>::quiet_NaN()), row.n_feasible,
                      row.n_feasible + row.n_infeasible);
        os << line;
        if (row.mode != mecsca::SharingMode::separate) {
          if (saving) {
            std::snprintf(line, sizeof line, " saving_vs_separate=%.2f%%", 100.0 * *saving);
            os << line;
          } else {
            os << " saving_vs_separate=n/a";
          }
        }
        os << '\n';
      }
    }
    return os.str();
  });
}

void mecsca_sweep_free(mecsca_sweep* sweep) { delete sweep; }

mecsca_status mecsca_oracle_run(const mecsca_problem* problem, const mecsca_config* config,
                                mecsca_oracle** out) {
  if (problem == nullptr) return null_argument("problem");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const std::size_t k = problem->problem.scenario.num_users();
    mecsca::RunConfig rc = config == nullptr ? mecsca::RunConfig{} : config->config;
    const mecsca::GridSpec spec = mecsca::grid_spec(rc, k);
    *out = new mecsca_oracle{
        mecsca::grid_search(problem->problem.scenario, problem->problem.profile, spec)};
    return MECSCA_OK;
  });
}

mecsca_status mecsca_oracle_summary_get(const mecsca_oracle* oracle, mecsca_oracle_summary* out) {
  if (oracle == nullptr) return null_argument("oracle");
  if (out == nullptr) return null_argument("out");
  const mecsca::OracleResult& r = oracle->result;
  out->found = r.status == mecsca::OracleStatus::found ? 1 : 0;
  out->objective = r.objective;
  out->evaluated = r.evaluated;
  out->verified = r.verified;
  return MECSCA_OK;
}

mecsca_status mecsca_oracle_leaders_csv(const mecsca_oracle* oracle, char** out) {
  return emit_string(oracle, out, [](const mecsca_oracle& o) {
    return mecsca::leaders_csv(o.result);
  });
}

void mecsca_oracle_free(mecsca_oracle* oracle) { delete oracle; }

mecsca_status mecsca_validate_run(const mecsca_config* config, mecsca_validation** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const mecsca::ValidationConfig vc = config == nullptr
                                            ? mecsca::ValidationConfig{}
                                            : mecsca::validation_config(config->config);
    auto* v = new mecsca_validation;
    try {
      v->reports = mecsca::run_validation(vc);
    } catch (...) {
      delete v;
      throw;
    }
    for (const auto& r : v->reports) v->names.push_back(mecsca::to_string(r.suite));
    *out = v;
    return MECSCA_OK;
  });
}

size_t mecsca_validation_count(const mecsca_validation* validation) {
  return validation == nullptr ? 0 : validation->reports.size();
}

mecsca_status mecsca_validation_report(const mecsca_validation* validation, size_t index,
                                       mecsca_suite_report* out) {
  if (validation == nullptr) return null_argument("validation");
  if (out == nullptr) return null_argument("out");
  if (index >= validation->reports.size())
    return record(MECSCA_ERR_INVALID_ARGUMENT, "suite index out of range");
  const mecsca::SuiteReport& r = validation->reports[index];
  out->suite = validation->names[index].c_str();
  out->passed = r.passed ? 1 : 0;
  out->checks = r.checks;
  out->failures = r.failures;
  out->worst = r.worst;
  out->detail = r.detail.c_str();
  return MECSCA_OK;
}

int mecsca_validation_passed(const mecsca_validation* validation) {
  if (validation == nullptr || validation->reports.empty()) return 0;
  for (const auto& r : validation->reports)
    if (!r.passed) return 0;
  return 1;
}

void mecsca_validation_free(mecsca_validation* validation) { delete validation; }

}  // extern "C"
