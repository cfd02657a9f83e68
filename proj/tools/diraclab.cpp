// Command-line runner for diraclab experiments.
//
//   diraclab <spectrum|bounds|index|flow|product> --config exp.json [--out dir]
//            [--format json|csv|both] [--verify] [--dump-operator] [--plot]
//            [--threads n]
//
// Exit status: 0 success, 2 config error, 3 convergence failure, 4 verdict
// failure under --verify, 5 I/O error, 1 anything else. DIRACLAB_LOG sets the
// log level (error, warn, info, debug).

#include <iostream>

#include <CLI11.hpp>

#include "diraclab/cli/run.hpp"
#include "diraclab/errors.hpp"

#ifndef DIRACLAB_VERSION
#define DIRACLAB_VERSION "unknown"
#endif

using namespace diraclab;

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for twisted Dirac operators on model spin manifolds"};
  app.set_version_flag("--version", DIRACLAB_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  cli::RunOptions opt;
  std::string out_dir;
  std::string format;
  for (const char* name : {"spectrum", "bounds", "index", "flow", "product"}) {
    auto* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--format", format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_flag("--verify", opt.verify, "fail with exit status 4 when a verdict fails");
    sub->add_flag("--dump-operator", opt.dump_operator, "write the assembled matrix as sparse triplets");
    sub->add_flag("--plot", opt.plot, "write an SVG line plot (flow experiments)");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 256));
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto config = cli::load_config(config_path);
    if (command != cli::to_string(config.experiment)) {
      throw ConfigError("config describes a " + std::string(cli::to_string(config.experiment)) +
                        " experiment, not " + command);
    }
    opt.out_dir = out_dir.empty() ? config.output.directory : out_dir;
    opt.format = format.empty() ? config.output.format : format;
    opt.plot = opt.plot || config.output.plot;
    const auto result = cli::run(config, opt, DIRACLAB_VERSION);
    cli::emit(result, opt);
    const auto& v = result.report.verdict;
    for (const auto& f : v.failures) cli::log(opt.verify ? "error" : "warn", f);
    if (opt.verify && !v.passed) return cli::kExitVerdict;
    return cli::kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << " (iterations " << e.iterations() << ", residual "
              << e.max_residual() << ")\n";
    return cli::kExitConvergence;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return cli::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitOther;
  }
}
