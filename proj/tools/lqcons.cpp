#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lqcons/error.hpp"
#include "lqcons/experiments.hpp"

namespace ex = lqcons::experiments;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string config_file;
  std::vector<std::string> overrides;
  bool paper_scale = false;
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--seed", opts.seed, "Master seed for every random draw");
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--config", opts.config_file, "File of key=value parameters");
  cmd->add_option("--set", opts.overrides, "Override one parameter, key=value (repeatable)");
  cmd->add_flag("--paper-scale", opts.paper_scale, "Use the full problem-size lists instead of the desk defaults");
  cmd->add_flag("--svg", opts.svg, "Also write an SVG chart per plot table");
}

ex::ExperimentConfig build_config(ex::ExperimentKind kind, const CommonOptions& opts) {
  ex::ExperimentConfig config(kind);
  if (!opts.config_file.empty()) config.load_file(opts.config_file);
  for (const auto& assignment : opts.overrides) config.set_assignment(assignment);
  if (opts.seed) config.set("seed", std::to_string(*opts.seed));
  if (opts.threads) config.set("threads", std::to_string(*opts.threads));
  if (opts.paper_scale && config.has("paper_scale")) config.set("paper_scale", "true");
  config.validate();
  return config;
}

std::string output_dir(const CommonOptions& opts, ex::ExperimentKind kind) {
  return opts.out.empty() ? "out/" + std::string(ex::to_string(kind)) : opts.out;
}

int run_sweep(ex::ExperimentKind kind, const CommonOptions& opts) {
  auto config = build_config(kind, opts);
  ex::ExperimentOutput output;
  switch (kind) {
    case ex::ExperimentKind::EpsilonSweep: output = ex::run_epsilon_sweep(config); break;
    case ex::ExperimentKind::Cayley: output = ex::run_cayley_sweep(config); break;
    default: output = ex::run_geometric_sweep(config); break;
  }
  const std::string dir = output_dir(opts, kind);
  ex::write_outputs(output, config, dir, opts.svg);

  int violations = 0;
  for (const auto& row : output.rows)
    if (row.worst_upper_violation() > 1e-9) ++violations;
  std::cout << "wrote " << output.rows.size() << " rows to " << dir << "/results.csv\n";
  if (violations > 0) {
    std::cerr << violations << " rows have J above an emitted upper bound\n";
    return kExitValidation;
  }
  return kExitOk;
}

int run_analyze(const CommonOptions& opts, const std::string& matrix_path) {
  auto config = build_config(ex::ExperimentKind::Analyze, opts);
  std::string path = matrix_path.empty() ? config.get_string("matrix") : matrix_path;
  if (path.empty()) throw lqcons::Error(lqcons::ErrorKind::ConfigError, "analyze needs a matrix file");
  std::string report = ex::analyze_matrix(path, config.get_double("tol"));
  std::cout << report;
  if (!opts.out.empty()) {
    std::filesystem::create_directories(opts.out);
    std::ofstream(std::filesystem::path(opts.out) / "analysis.txt") << report;
  }
  return kExitOk;
}

int run_validate(const CommonOptions& opts) {
  auto config = build_config(ex::ExperimentKind::Validate, opts);
  auto summary = ex::run_validation_suite(config);
  std::cout << summary.to_text();
  if (!opts.out.empty()) {
    std::filesystem::create_directories(opts.out);
    std::ofstream(std::filesystem::path(opts.out) / "validation.txt") << summary.to_text();
  }
  return summary.passed() ? kExitOk : kExitValidation;
}

bool is_input_error(lqcons::ErrorKind kind) {
  return kind == lqcons::ErrorKind::ConfigError || kind == lqcons::ErrorKind::ParseError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LQ cost of consensus dynamics: experiments and analysis"};
  app.require_subcommand(1);

  CommonOptions eps_opts, cayley_opts, geo_opts, analyze_opts, validate_opts;
  std::string matrix_path;
  auto* eps = app.add_subcommand("epsilon-sweep", "J and both bound families along the P_eps family");
  auto* cayley = app.add_subcommand("cayley", "J and corollary bounds on Cayley tori");
  auto* geo = app.add_subcommand("geometric", "J on random geometric consensus matrices");
  auto* analyze = app.add_subcommand("analyze", "Full report for one matrix CSV file");
  auto* validate = app.add_subcommand("validate", "Cross-module property suites");
  add_common(eps, eps_opts);
  add_common(cayley, cayley_opts);
  add_common(geo, geo_opts);
  add_common(analyze, analyze_opts);
  add_common(validate, validate_opts);
  analyze->add_option("matrix", matrix_path, "Row-stochastic matrix as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*eps) return run_sweep(ex::ExperimentKind::EpsilonSweep, eps_opts);
    if (*cayley) return run_sweep(ex::ExperimentKind::Cayley, cayley_opts);
    if (*geo) return run_sweep(ex::ExperimentKind::Geometric, geo_opts);
    if (*analyze) return run_analyze(analyze_opts, matrix_path);
    if (*validate) return run_validate(validate_opts);
  } catch (const lqcons::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kExitConfig : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
