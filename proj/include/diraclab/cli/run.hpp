#pragma once

#include <map>
#include <string>

#include "diraclab/cli/config.hpp"
#include "diraclab/cli/report.hpp"

namespace diraclab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitConvergence = 3,
  kExitVerdict = 4,
  kExitIo = 5,
};

struct RunOptions {
  std::string out_dir;
  std::string format;
  bool verify = false;
  bool dump_operator = false;
  bool plot = false;
  int threads = 1;
};

/// Operator assembled for an experiment together with its solver settings.
struct BuiltOperator {
  OperatorMatrix op;
  SolverOptions solver;
};

/// Assembles the operator that `config` describes over `base` with `conn`
/// and derives solver options (backend defaults, config overrides, and the
/// closed-form zero threshold for the lattice).
BuiltOperator build_operator(const ExperimentConfig& config, const ModelManifold& base, const ConnectionSpec& conn);

struct RunResult {
  RunReport report;
  std::map<std::string, double> timings;
  std::map<std::string, nlohmann::json> dumps;
};

/// Executes the experiment. Verdicts are evaluated always and recorded in
/// the report; `options.verify` only marks them as binding.
RunResult run(const ExperimentConfig& config, const RunOptions& options, const std::string& version);

/// Writes report.json and/or the CSV tables, timings.json, operator dumps
/// and the flow plot into options.out_dir.
void emit(const RunResult& result, const RunOptions& options);

/// Log verbosity from DIRACLAB_LOG (error, warn, info, debug); default warn.
void log(const char* level, const std::string& message);

}  // namespace diraclab::cli
