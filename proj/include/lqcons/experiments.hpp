#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lqcons/bounds.hpp"
#include "lqcons/lqcost.hpp"
#include "lqcons/stochastic_core.hpp"

namespace lqcons::experiments {

enum class ExperimentKind { EpsilonSweep, Cayley, Geometric, Analyze, Validate };

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown tag.
ExperimentKind parse_kind(std::string_view tag);

/// Flat key=value parameters for one experiment. Every experiment starts from a
/// table of known keys with defaults; setting any other key throws ConfigError.
class ExperimentConfig {
 public:
  explicit ExperimentConfig(ExperimentKind kind);

  ExperimentKind kind() const { return kind_; }

  /// Throws ConfigError for an unknown key.
  void set(const std::string& key, const std::string& value);
  /// Parses "key=value" (surrounding blanks trimmed).
  void set_assignment(const std::string& assignment);
  /// Reads a file of key=value lines; '#' starts a comment. Throws ConfigError.
  void load_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_seed() const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;

  /// Range checks against the preconditions of the generators the experiment drives.
  void validate() const;

  /// One key=value line per parameter, sorted by key.
  std::string to_key_value() const;

 private:
  ExperimentKind kind_;
  std::map<std::string, std::string> values_;
};

/// Seed for instance `index` of a stream tagged `tag`, derived from `master`
/// through std::seed_seq so instances are independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Exceptions are rethrown on the calling thread, lowest index first.
void parallel_for(int count, unsigned threads, const std::function<void(int)>& body);

/// One output row. Optional cells are written empty.
struct ResultRow {
  std::string experiment;
  int n = 0;
  int d = 0;
  int instance = 0;
  std::uint64_t seed = 0;
  std::optional<double> param;  // epsilon, or the Cayley case
  double j = 0.0;
  double j_weighted = 0.0;
  LqMethod j_method = LqMethod::Exact;
  std::optional<double> res_j_upper, res_j_lower, res_jw_upper, res_jw_lower;
  std::optional<double> top_j_upper, top_j_lower, top_jw_upper, top_jw_lower;
  std::optional<double> normal_j_upper, normal_j_lower;
  bool lower_applicable = false;
  std::optional<double> rbar_reversiblization;
  std::optional<double> rbar_support;
  std::optional<double> j_exact;
  std::optional<double> j_discrepancy;  // |J_truncated - J_exact| / J_exact
  std::optional<double> j_over_log;     // J / log n, or J / log(n^d) on tori
  double wall_seconds = 0.0;            // written to timing.csv only

  static std::string csv_header();
  std::string csv_row() const;

  /// Largest relative violation of J <= upper over the emitted upper bounds (<= 0 when all hold).
  double worst_upper_violation() const;
};

/// A numeric table for one figure panel: two or three columns.
struct PlotSeries {
  std::string file;  // e.g. "fig2_resistance.dat"
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool log_x = false;
  bool log_y = false;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<PlotSeries> plots;
  std::vector<std::string> audit;  // free-form key=value lines
  std::uint64_t master_seed = 0;
};

ExperimentOutput run_epsilon_sweep(const ExperimentConfig& config);
ExperimentOutput run_cayley_sweep(const ExperimentConfig& config);
/// Instance failures are recorded in the audit and skipped.
ExperimentOutput run_geometric_sweep(const ExperimentConfig& config);

/// Classification, measure, LQ costs, Green trace, bounds and sandwich margins as key=value lines.
std::string analyze_matrix(const ConsensusMatrix& p);
/// Parses with the file support threshold, validates and analyzes. Throws ParseError or a validation error.
std::string analyze_matrix(const std::string& path, double tol = kDefaultTol);

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  double worst_slack = 0.0;  // minimum over checks of (allowed - observed); negative on failure
};

struct ValidationSummary {
  std::vector<SuiteResult> suites;
  bool perturbed = false;
  std::uint64_t master_seed = 0;

  bool passed() const;
  std::string to_text() const;
};

/// Cross-module property suites. With `perturb=true` every compared quantity is
/// distorted before the check so that each suite must report failures.
ValidationSummary run_validation_suite(const ExperimentConfig& config);

/// Writes results.csv (master seed on a leading comment line), timing.csv,
/// audit.txt and one .dat file per plot; with `svg`, also one figure per plot.
void write_outputs(const ExperimentOutput& output, const ExperimentConfig& config, const std::string& dir, bool svg);

/// Minimal SVG line chart of the plot's second (and third) column against the first.
std::string render_svg(const PlotSeries& plot);

}  // namespace lqcons::experiments
