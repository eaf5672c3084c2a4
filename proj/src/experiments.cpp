#include "lqcons/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "lqcons/graph_gen.hpp"
#include "lqcons/io.hpp"
#include "lqcons/random_matrices.hpp"
#include "lqcons/resistance.hpp"

namespace lqcons::experiments {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorKind::ConfigError, message); }

const std::map<std::string, std::string>& common_defaults() {
  static const std::map<std::string, std::string> table = {{"seed", "1"}, {"threads", "0"}};
  return table;
}

std::map<std::string, std::string> defaults_for(ExperimentKind kind) {
  std::map<std::string, std::string> table = common_defaults();
  switch (kind) {
    case ExperimentKind::EpsilonSweep:
      table.insert({{"eps_min", "0.001"}, {"eps_max", "0.5"}, {"points", "100"}, {"spacing", "log"}});
      break;
    case ExperimentKind::Cayley:
      table.insert({{"case", "2"},
                    {"d", "2"},
                    {"n_list", "8,12,16,20,24"},
                    {"instances", "20"},
                    {"p_min", "-1"},
                    {"p_max", "-1"},
                    {"max_attempts", "1000000"}});
      break;
    case ExperimentKind::Geometric: {
      GeometricParams p;
      auto num = [](double x) {
        std::ostringstream out;
        out.precision(17);
        out << x;
        return out.str();
      };
      table.insert({{"d", "2"},
                    {"n_list", ""},
                    {"scale", "1"},
                    {"instances", "15"},
                    {"paper_scale", "false"},
                    {"s", num(p.s)},
                    {"r", num(p.r)},
                    {"gamma", num(p.gamma)},
                    {"rho", num(p.rho)},
                    {"p_e", num(p.p_e)},
                    {"p_d", num(p.p_d)},
                    {"c", num(p.c)},
                    {"b", num(p.b)},
                    {"pi_bar_min", num(p.pi_bar_min)},
                    {"pi_bar_max", num(p.pi_bar_max)},
                    {"gamma_divisions", std::to_string(p.gamma_divisions)},
                    {"max_attempts", std::to_string(p.max_attempts)},
                    {"max_node_attempts", std::to_string(p.max_node_attempts)},
                    {"paper_literal_pi_check", "false"},
                    {"t_max", "10000"},
                    {"delta", "1e-5"},
                    {"window", "10"},
                    {"exact_check_max_n", "200"}});
      break;
    }
    case ExperimentKind::Analyze:
      table.insert({{"matrix", ""}, {"tol", "1e-9"}});
      break;
    case ExperimentKind::Validate:
      table.insert({{"instances", "100"}, {"perturb", "false"}});
      break;
  }
  return table;
}

// Table of node counts per dimension for the geometric experiment.
const std::vector<int>& table_n(int d) {
  static const std::vector<int> d2 = {25, 50, 75, 100, 125, 150, 175, 200, 225, 250, 275, 300};
  static const std::vector<int> d3 = {50, 150, 250, 350, 450, 550, 600, 650, 700, 750, 800};
  return d == 2 ? d2 : d3;
}

constexpr int kDeskCapD3 = 343;

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

std::string format_opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void fill_bounds(ResultRow& row, const BoundsReport& res, const BoundsReport& top) {
  row.res_j_upper = res.j_upper;
  row.res_j_lower = res.j_lower;
  row.res_jw_upper = res.jw_upper;
  row.res_jw_lower = res.jw_lower;
  row.top_j_upper = top.j_upper;
  row.top_j_lower = top.j_lower;
  row.top_jw_upper = top.jw_upper;
  row.top_jw_lower = top.jw_lower;
  row.lower_applicable = res.lower_applicable;
  row.rbar_reversiblization = res.constants.rbar;
  row.rbar_support = top.constants.rbar;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::EpsilonSweep: return "epsilon-sweep";
    case ExperimentKind::Cayley: return "cayley";
    case ExperimentKind::Geometric: return "geometric";
    case ExperimentKind::Analyze: return "analyze";
    case ExperimentKind::Validate: return "validate";
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view tag) {
  for (auto kind : {ExperimentKind::EpsilonSweep, ExperimentKind::Cayley, ExperimentKind::Geometric,
                    ExperimentKind::Analyze, ExperimentKind::Validate})
    if (to_string(kind) == tag) return kind;
  config_error("unknown experiment '" + std::string(tag) + "'");
}

ExperimentConfig::ExperimentConfig(ExperimentKind kind) : kind_(kind), values_(defaults_for(kind)) {}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end())
    config_error("unknown key '" + key + "' for experiment " + std::string(to_string(kind_)));
  it->second = value;
}

void ExperimentConfig::set_assignment(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) config_error("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    try {
      set_assignment(t);
    } catch (const Error& e) {
      config_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) config_error("unknown key '" + key + "'");
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
  std::string v = get_string(key);
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
    config_error("key '" + key + "' needs a finite number, got '" + v + "'");
  return x;
}

long long ExperimentConfig::get_int(const std::string& key) const {
  std::string v = get_string(key);
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    config_error("key '" + key + "' needs an integer, got '" + v + "'");
  return x;
}

std::uint64_t ExperimentConfig::get_seed() const {
  std::string v = get_string("seed");
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    config_error("seed needs an unsigned 64-bit integer, got '" + v + "'");
  return x;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error("key '" + key + "' needs true/false, got '" + v + "'");
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key) const {
  std::string v = get_string(key);
  std::vector<int> out;
  std::stringstream items(v);
  std::string item;
  while (std::getline(items, item, ',')) {
    std::string t = trim(item);
    int x = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
      config_error("key '" + key + "' needs a comma-separated integer list, got '" + v + "'");
    out.push_back(x);
  }
  return out;
}

void ExperimentConfig::validate() const {
  get_seed();
  if (get_int("threads") < 0) config_error("threads must be >= 0");
  switch (kind_) {
    case ExperimentKind::EpsilonSweep: {
      double lo = get_double("eps_min"), hi = get_double("eps_max");
      if (!(lo > 0.0 && lo <= hi && hi <= 0.5)) config_error("need 0 < eps_min <= eps_max <= 0.5");
      if (get_int("points") < 1) config_error("points must be >= 1");
      std::string spacing = get_string("spacing");
      if (spacing != "log" && spacing != "linear") config_error("spacing must be log or linear");
      break;
    }
    case ExperimentKind::Cayley: {
      long long c = get_int("case"), d = get_int("d");
      if (c != 1 && c != 2) config_error("case must be 1 or 2");
      if (c == 1 && d != 2 && d != 3) config_error("case 1 needs d in {2, 3}");
      if (c == 2 && (d < 1 || d > 3)) config_error("case 2 needs d in {1, 2, 3}");
      auto ns = get_int_list("n_list");
      if (ns.empty()) config_error("n_list is empty");
      for (int n : ns)
        if (n < 3) config_error("every n must be >= 3");
      if (get_int("instances") < 1) config_error("instances must be >= 1");
      if (get_int("max_attempts") < 1) config_error("max_attempts must be >= 1");
      double pmin = get_double("p_min"), pmax = get_double("p_max");
      if ((pmin >= 0.0 || pmax >= 0.0) && !(pmin >= 0.0 && pmin < pmax && pmax <= 1.0))
        config_error("need 0 <= p_min < p_max <= 1 (or both negative for defaults)");
      break;
    }
    case ExperimentKind::Geometric: {
      long long d = get_int("d");
      if (d != 2 && d != 3) config_error("d must be 2 or 3");
      if (get_int("instances") < 1) config_error("instances must be >= 1");
      if (!(get_double("scale") > 0.0)) config_error("scale must be positive");
      get_bool("paper_scale");
      get_bool("paper_literal_pi_check");
      for (int n : get_int_list("n_list"))
        if (n < 2) config_error("every n must be >= 2");
      if (get_int("t_max") < 1 || get_int("window") < 1 || !(get_double("delta") > 0.0))
        config_error("need t_max >= 1, window >= 1, delta > 0");
      get_int("exact_check_max_n");
      GeometricParams p;
      p.s = get_double("s");
      p.r = get_double("r");
      p.gamma = get_double("gamma");
      p.rho = get_double("rho");
      p.p_e = get_double("p_e");
      p.p_d = get_double("p_d");
      p.c = get_double("c");
      p.b = get_double("b");
      p.pi_bar_min = get_double("pi_bar_min");
      p.pi_bar_max = get_double("pi_bar_max");
      p.gamma_divisions = static_cast<int>(get_int("gamma_divisions"));
      p.max_attempts = static_cast<int>(get_int("max_attempts"));
      p.max_node_attempts = static_cast<int>(get_int("max_node_attempts"));
      try {
        p.validate();
      } catch (const Error& e) {
        config_error(e.what());
      }
      break;
    }
    case ExperimentKind::Analyze:
      if (!(get_double("tol") > 0.0)) config_error("tol must be positive");
      break;
    case ExperimentKind::Validate:
      if (get_int("instances") < 1) config_error("instances must be >= 1");
      get_bool("perturb");
      break;
  }
}

std::string ExperimentConfig::to_key_value() const {
  std::ostringstream out;
  out << "experiment=" << to_string(kind_) << "\n";
  for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
  return out.str();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(master), hi(master), lo(tag), hi(tag), lo(index), hi(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

void parallel_for(int count, unsigned threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string ResultRow::csv_header() {
  return "experiment,n,d,instance,seed,param,j,j_weighted,j_method,res_j_upper,res_j_lower,res_jw_upper,"
         "res_jw_lower,top_j_upper,top_j_lower,top_jw_upper,top_jw_lower,normal_j_upper,normal_j_lower,"
         "lower_applicable,rbar_reversiblization,rbar_support,j_exact,j_discrepancy,j_over_log";
}

std::string ResultRow::csv_row() const {
  std::ostringstream out;
  out << experiment << "," << n << "," << d << "," << instance << "," << seed << "," << format_opt(param) << ","
      << format_double(j) << "," << format_double(j_weighted) << "," << to_string(j_method);
  for (const auto* cell : {&res_j_upper, &res_j_lower, &res_jw_upper, &res_jw_lower, &top_j_upper, &top_j_lower,
                           &top_jw_upper, &top_jw_lower, &normal_j_upper, &normal_j_lower})
    out << "," << format_opt(*cell);
  out << "," << (lower_applicable ? 1 : 0);
  for (const auto* cell : {&rbar_reversiblization, &rbar_support, &j_exact, &j_discrepancy, &j_over_log})
    out << "," << format_opt(*cell);
  return out.str();
}

double ResultRow::worst_upper_violation() const {
  double worst = -std::numeric_limits<double>::infinity();
  auto check = [&](const std::optional<double>& upper, double value) {
    if (upper) worst = std::max(worst, (value - *upper) / std::max(std::abs(value), 1e-300));
  };
  check(res_j_upper, j);
  check(top_j_upper, j);
  check(normal_j_upper, j);
  check(res_jw_upper, j_weighted);
  check(top_jw_upper, j_weighted);
  return worst;
}

ExperimentOutput run_epsilon_sweep(const ExperimentConfig& config) {
  config.validate();
  const double lo = config.get_double("eps_min"), hi = config.get_double("eps_max");
  const int points = static_cast<int>(config.get_int("points"));
  const bool log_spacing = config.get_string("spacing") == "log";
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    double f = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    grid[static_cast<std::size_t>(i)] = log_spacing ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                                                    : lo + f * (hi - lo);
  }
  // Pin the endpoints against rounding in exp/log.
  grid.front() = points == 1 ? hi : lo;
  grid.back() = hi;

  ExperimentOutput output;
  output.master_seed = config.get_seed();
  output.rows.resize(grid.size());
  parallel_for(points, static_cast<unsigned>(config.get_int("threads")), [&](int i) {
    auto start = Clock::now();
    const double eps = grid[static_cast<std::size_t>(i)];
    auto p = p_epsilon(eps);
    auto cost = lq_cost_exact(p);
    ResultRow row;
    row.experiment = "epsilon-sweep";
    row.n = 3;
    row.instance = i;
    row.seed = output.master_seed;
    row.param = eps;
    row.j = cost.j;
    row.j_weighted = cost.j_weighted;
    row.j_method = LqMethod::Exact;
    fill_bounds(row, theorem_resistance_bounds(p), theorem_topology_bounds(p));
    row.wall_seconds = seconds_since(start);
    output.rows[static_cast<std::size_t>(i)] = std::move(row);
  });

  PlotSeries j{"fig2_j.dat", "J(P_eps)", {"epsilon", "J"}, {}, true, true};
  PlotSeries res{"fig2_resistance.dat", "resistance bounds", {"epsilon", "lower", "upper"}, {}, true, true};
  PlotSeries top{"fig2_topology.dat", "topology bounds", {"epsilon", "lower", "upper"}, {}, true, true};
  for (const auto& row : output.rows) {
    j.rows.push_back({*row.param, row.j});
    res.rows.push_back({*row.param, *row.res_j_lower, *row.res_j_upper});
    top.rows.push_back({*row.param, *row.top_j_lower, *row.top_j_upper});
  }
  output.plots = {j, res, top};
  output.audit.push_back("points=" + std::to_string(points));
  output.audit.push_back(std::string("spacing=") + (log_spacing ? "log" : "linear"));
  return output;
}

ExperimentOutput run_cayley_sweep(const ExperimentConfig& config) {
  config.validate();
  const int cayley_case = static_cast<int>(config.get_int("case"));
  const int d = static_cast<int>(config.get_int("d"));
  const auto ns = config.get_int_list("n_list");
  // Case 2 has a fixed generator, so one instance per n says everything.
  const int instances = cayley_case == 1 ? static_cast<int>(config.get_int("instances")) : 1;
  CayleyCase1Options options;
  options.p_min = config.get_double("p_min");
  options.p_max = config.get_double("p_max");
  options.max_attempts = static_cast<int>(config.get_int("max_attempts"));

  ExperimentOutput output;
  output.master_seed = config.get_seed();
  const int total = static_cast<int>(ns.size()) * instances;
  output.rows.resize(static_cast<std::size_t>(total));
  parallel_for(total, static_cast<unsigned>(config.get_int("threads")), [&](int k) {
    auto start = Clock::now();
    const int n = ns[static_cast<std::size_t>(k / instances)];
    const int instance = k % instances;
    const std::uint64_t seed = derive_seed(output.master_seed, static_cast<std::uint64_t>(d * 100000 + n),
                                           static_cast<std::uint64_t>(instance));
    ConsensusMatrix p = cayley_case == 1 ? cayley_case1(n, d, seed, options).second : cayley_case2(n, d);
    auto cost = lq_cost_exact(p);
    auto normal = corollary_normal_bounds(p);
    ResultRow row;
    row.experiment = "cayley";
    row.n = n;
    row.d = d;
    row.instance = instance;
    row.seed = cayley_case == 1 ? seed : 0;
    row.param = cayley_case;
    row.j = cost.j;
    row.j_weighted = cost.j_weighted;
    row.j_method = LqMethod::Exact;
    row.normal_j_upper = normal.j_upper;
    row.normal_j_lower = normal.j_lower;
    row.lower_applicable = true;
    row.rbar_support = normal.constants.rbar;
    row.j_over_log = cost.j / (d * std::log(static_cast<double>(n)));
    row.wall_seconds = seconds_since(start);
    output.rows[static_cast<std::size_t>(k)] = std::move(row);
  });

  const int figure = cayley_case == 2 ? 7 : (d == 2 ? 5 : 6);
  const std::string stem = "fig" + std::to_string(figure) + "_d" + std::to_string(d);
  PlotSeries all{stem + "_j.dat", "J(P) per instance", {"n", "J"}, {}, false, false};
  PlotSeries means{stem + "_mean.dat", "mean J(P) and J/log(n^d)", {"n", "mean_j", "mean_j_over_log"}, {}, false, false};
  PlotSeries bounds{stem + "_bounds.dat", "mean corollary bounds", {"n", "mean_lower", "mean_upper"}, {}, false, true};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> js, ratios, lowers, uppers;
    for (int k = 0; k < instances; ++k) {
      const auto& row = output.rows[i * static_cast<std::size_t>(instances) + static_cast<std::size_t>(k)];
      all.rows.push_back({static_cast<double>(row.n), row.j});
      js.push_back(row.j);
      ratios.push_back(*row.j_over_log);
      lowers.push_back(*row.normal_j_lower);
      uppers.push_back(*row.normal_j_upper);
    }
    const double n = ns[i];
    means.rows.push_back({n, mean(js), mean(ratios)});
    bounds.rows.push_back({n, mean(lowers), mean(uppers)});
  }
  output.plots = {all, means, bounds};
  output.audit.push_back("case=" + std::to_string(cayley_case));
  output.audit.push_back("instances_per_n=" + std::to_string(instances));
  return output;
}

ExperimentOutput run_geometric_sweep(const ExperimentConfig& config) {
  config.validate();
  const int d = static_cast<int>(config.get_int("d"));
  const bool paper_scale = config.get_bool("paper_scale");
  const double scale = config.get_double("scale");
  std::vector<int> ns = config.get_int_list("n_list");
  if (ns.empty()) {
    for (int n : table_n(d)) {
      if (!paper_scale && d == 3 && n > kDeskCapD3) continue;
      ns.push_back(n);
    }
    if (!paper_scale && d == 3) ns.push_back(kDeskCapD3);
  }
  if (scale != 1.0) {
    std::vector<int> scaled;
    for (int n : ns) {
      int m = std::max(2, static_cast<int>(std::lround(n * scale)));
      if (scaled.empty() || scaled.back() != m) scaled.push_back(m);
    }
    ns = scaled;
  }
  const int instances = static_cast<int>(config.get_int("instances"));

  GeometricParams params;
  params.s = config.get_double("s");
  params.r = config.get_double("r");
  params.gamma = config.get_double("gamma");
  params.rho = config.get_double("rho");
  params.p_e = config.get_double("p_e");
  params.p_d = config.get_double("p_d");
  params.c = config.get_double("c");
  params.b = config.get_double("b");
  params.pi_bar_min = config.get_double("pi_bar_min");
  params.pi_bar_max = config.get_double("pi_bar_max");
  params.gamma_divisions = static_cast<int>(config.get_int("gamma_divisions"));
  params.max_attempts = static_cast<int>(config.get_int("max_attempts"));
  params.max_node_attempts = static_cast<int>(config.get_int("max_node_attempts"));
  params.paper_literal_pi_check = config.get_bool("paper_literal_pi_check");
  TruncationRule rule;
  rule.t_max = static_cast<int>(config.get_int("t_max"));
  rule.delta = config.get_double("delta");
  rule.window = static_cast<int>(config.get_int("window"));
  const long long exact_max_n = config.get_int("exact_check_max_n");

  ExperimentOutput output;
  output.master_seed = config.get_seed();
  const int total = static_cast<int>(ns.size()) * instances;
  std::vector<std::optional<ResultRow>> rows(static_cast<std::size_t>(total));
  std::vector<std::string> audits(static_cast<std::size_t>(total));
  parallel_for(total, static_cast<unsigned>(config.get_int("threads")), [&](int k) {
    auto start = Clock::now();
    const int n = ns[static_cast<std::size_t>(k / instances)];
    const int instance = k % instances;
    const std::uint64_t seed = derive_seed(output.master_seed, static_cast<std::uint64_t>(d * 100000 + n),
                                           static_cast<std::uint64_t>(instance));
    std::ostringstream audit;
    audit << "[instance n=" << n << " d=" << d << " index=" << instance << " seed=" << seed << "]\n";
    try {
      GeometricInstance inst = sample_geometric(params, n, d, seed);
      audit << inst.audit.to_key_value();
      audit << "s_n=" << format_double(inst.measured.s_n) << "\nr_n=" << format_double(inst.measured.r_n)
            << "\nrho_n=" << format_double(inst.measured.rho_n) << "\n";
      const auto& p = inst.matrix;
      auto cost = lq_cost_truncated(p, rule);
      ResultRow row;
      row.experiment = "geometric";
      row.n = n;
      row.d = d;
      row.instance = instance;
      row.seed = seed;
      row.j = cost.j;
      row.j_weighted = cost.j_weighted;
      row.j_method = LqMethod::Truncated;
      fill_bounds(row, theorem_resistance_bounds(p), theorem_topology_bounds(p));
      if (n <= exact_max_n) {
        auto exact = lq_cost_exact(p);
        row.j_exact = exact.j;
        row.j_discrepancy = relative_gap(cost.j, exact.j);
      }
      if (d == 2) row.j_over_log = cost.j / std::log(static_cast<double>(n));
      row.wall_seconds = seconds_since(start);
      audit << "status=accepted\nsteps_used=" << cost.steps_used << "\n";
      rows[static_cast<std::size_t>(k)] = std::move(row);
    } catch (const Error& e) {
      audit << "status=skipped\nerror=" << to_string(e.kind()) << "\nmessage=" << e.what() << "\n";
    }
    audits[static_cast<std::size_t>(k)] = audit.str();
  });

  int skipped = 0;
  for (int k = 0; k < total; ++k) {
    if (rows[static_cast<std::size_t>(k)]) output.rows.push_back(std::move(*rows[static_cast<std::size_t>(k)]));
    else ++skipped;
    output.audit.push_back(audits[static_cast<std::size_t>(k)]);
  }
  output.audit.insert(output.audit.begin(), "skipped_instances=" + std::to_string(skipped));
  output.audit.insert(output.audit.begin(), std::string("pi_check=") +
                                                (params.paper_literal_pi_check ? "literal" : "symmetric"));

  const std::string stem = "fig8_d" + std::to_string(d);
  const std::string metric = d == 2 ? "J_over_log_n" : "J";
  PlotSeries all{stem + ".dat", d == 2 ? "J(P)/log n" : "J(P)", {"n", metric}, {}, false, false};
  PlotSeries means{stem + "_mean.dat", d == 2 ? "mean J(P)/log n" : "mean J(P)", {"n", "mean_" + metric}, {}, false, false};
  for (int n : ns) {
    std::vector<double> values;
    for (const auto& row : output.rows) {
      if (row.n != n) continue;
      double v = d == 2 ? *row.j_over_log : row.j;
      values.push_back(v);
      all.rows.push_back({static_cast<double>(n), v});
    }
    if (!values.empty()) means.rows.push_back({static_cast<double>(n), mean(values)});
  }
  output.plots = {all, means};
  return output;
}

std::string analyze_matrix(const ConsensusMatrix& p) {
  std::ostringstream out;
  out.precision(17);
  const auto cls = classify(p);
  out << "n=" << p.size() << "\n"
      << "reversible=" << cls.reversible << "\nnormal=" << cls.normal << "\ncommuting=" << cls.commuting
      << "\ndoubly_stochastic=" << cls.doubly_stochastic << "\n"
      << "reversible_residual=" << cls.reversible_residual << "\nnormal_residual=" << cls.normal_residual
      << "\ncommuting_residual=" << cls.commuting_residual << "\ncolumn_sum_residual=" << cls.column_sum_residual
      << "\n";
  out << "pi=";
  for (Index i = 0; i < p.size(); ++i) out << (i ? " " : "") << p.pi()(i);
  out << "\npi_min=" << p.measure().min() << "\npi_max=" << p.measure().max()
      << "\npi_residual=" << p.measure().residual << "\n";
  auto cost = lq_cost_exact(p);
  out << "j=" << cost.j << "\nj_weighted=" << cost.j_weighted << "\nstein_residual=" << cost.stein_residual << "\n";
  out << "green_trace=" << green_matrix(p).trace() << "\n";

  auto emit = [&](const BoundsReport& b) {
    const std::string prefix = std::string(to_string(b.theorem)) + ".";
    auto opt = [&](const char* name, const std::optional<double>& v) {
      if (v) out << prefix << name << "=" << *v << "\n";
    };
    opt("j_upper", b.j_upper);
    opt("j_lower", b.j_lower);
    opt("jw_upper", b.jw_upper);
    opt("jw_lower", b.jw_lower);
    out << prefix << "lower_applicable=" << b.lower_applicable << "\n" << prefix << "rbar=" << b.constants.rbar << "\n";
  };
  emit(theorem_resistance_bounds(p));
  emit(theorem_topology_bounds(p));
  if (cls.normal) emit(corollary_normal_bounds(p));

  auto s = support_graphs(p);
  out << "delta_in=" << s.delta_in << "\ndelta_out=" << s.delta_out << "\np_min=" << s.p_min << "\np_max=" << s.p_max
      << "\n";
  auto m = resistance_sandwich_check(p);
  out << "sandwich.delta=" << m.delta << "\nsandwich.degree=" << (m.used_in_degree ? "in" : "out")
      << "\nsandwich.min_lower_slack=" << m.min_lower_slack << "\nsandwich.min_upper_slack=" << m.min_upper_slack
      << "\n";
  return out.str();
}

std::string analyze_matrix(const std::string& path, double tol) { return analyze_matrix(io::load_consensus(path, tol)); }

bool ValidationSummary::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.failures == 0; });
}

std::string ValidationSummary::to_text() const {
  std::ostringstream out;
  out.precision(6);
  out << "master_seed=" << master_seed << "\nperturbed=" << (perturbed ? "true" : "false") << "\n";
  for (const auto& s : suites)
    out << s.name << ": " << (s.failures == 0 ? "PASS" : "FAIL") << " checks=" << s.checks
        << " failures=" << s.failures << " worst_slack=" << s.worst_slack << "\n";
  out << "overall=" << (passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

namespace {

class SuiteRecorder {
 public:
  explicit SuiteRecorder(std::string name) { result_.name = std::move(name); }

  // Records allowed - observed; the check fails when the slack is negative.
  void record(double slack) {
    ++result_.checks;
    if (!(slack >= 0.0)) ++result_.failures;
    if (result_.checks == 1 || !(slack >= result_.worst_slack)) result_.worst_slack = slack;
  }

  SuiteResult result() const { return result_; }

 private:
  SuiteResult result_;
};

int random_size(Rng& rng) { return std::uniform_int_distribution<int>(3, 12)(rng); }

}  // namespace

ValidationSummary run_validation_suite(const ExperimentConfig& config) {
  config.validate();
  const int count = static_cast<int>(config.get_int("instances"));
  const bool perturb = config.get_bool("perturb");
  ValidationSummary summary;
  summary.perturbed = perturb;
  summary.master_seed = config.get_seed();
  // Negative control: push the side that must stay small past the side that bounds it.
  const double grow = perturb ? 1e3 : 1.0;
  const double skew = perturb ? 1e-3 : 0.0;
  auto rng_for = [&](std::uint64_t tag) { return Rng(derive_seed(summary.master_seed, tag, 0)); };

  {
    SuiteRecorder suite("trace_inequality");
    Rng rng = rng_for(1);
    for (int i = 0; i < 2 * count; ++i) {
      auto p = random_consensus(random_size(rng), rng);
      for (int t = 0; t <= 8; ++t) {
        auto [lhs, rhs] = trace_pair(p, t);
        suite.record(rhs + 1e-9 - grow * lhs);
      }
    }
    for (int i = 0; i < count / 2 + 1; ++i) {
      auto p = random_reversible(random_size(rng), rng);
      for (int t = 0; t <= 8; ++t) {
        auto [lhs, rhs] = trace_pair(p, t);
        suite.record(1e-9 - std::abs(lhs * (1.0 + skew) - rhs));
      }
    }
    summary.suites.push_back(suite.result());
  }
  {
    SuiteRecorder suite("green_resistance_identity");
    Rng rng = rng_for(2);
    for (int i = 0; i < count; ++i) {
      auto p = random_reversible(random_size(rng), rng);
      double rw = weighted_average_resistance(effective_resistance(phi_map(p)), p.measure());
      double tr = green_matrix(p).trace() / static_cast<double>(p.size());
      suite.record(1e-8 - std::abs(rw * (1.0 + skew) - tr));
    }
    summary.suites.push_back(suite.result());
  }
  {
    SuiteRecorder suite("upper_bounds");
    Rng rng = rng_for(3);
    for (int i = 0; i < 2 * count; ++i) {
      auto p = random_consensus(random_size(rng), rng);
      auto cost = lq_cost_exact(p);
      auto res = theorem_resistance_bounds(p);
      auto top = theorem_topology_bounds(p);
      const double j = grow * cost.j, jw = grow * cost.j_weighted;
      suite.record((*res.j_upper - j) / j + 1e-9);
      suite.record((*res.jw_upper - jw) / jw + 1e-9);
      suite.record((*top.j_upper - j) / j + 1e-9);
      suite.record((*top.jw_upper - jw) / jw + 1e-9);
    }
    summary.suites.push_back(suite.result());
  }
  {
    SuiteRecorder suite("lower_bounds_commuting");
    Rng rng = rng_for(4);
    for (int i = 0; i < count; ++i) {
      auto p = commuting_family_member(i, rng);
      auto cost = lq_cost_exact(p);
      auto res = theorem_resistance_bounds(p);
      auto top = theorem_topology_bounds(p);
      suite.record(res.lower_applicable ? 0.0 : -1.0);
      for (auto [lower, value] : {std::pair{*res.j_lower, cost.j}, std::pair{*res.jw_lower, cost.j_weighted},
                                  std::pair{*top.j_lower, cost.j}, std::pair{*top.jw_lower, cost.j_weighted}})
        suite.record((value - grow * lower) / value + 1e-9);
    }
    summary.suites.push_back(suite.result());
  }
  {
    SuiteRecorder suite("resistance_sandwich");
    Rng rng = rng_for(5);
    for (int i = 0; i < count; ++i) {
      auto p = i % 2 == 0 ? random_consensus(random_size(rng), rng) : commuting_family_member(i, rng);
      auto m = resistance_sandwich_check(p);
      // Perturbation shifts both slacks by a full resistance unit.
      suite.record(m.min_lower_slack - (perturb ? 1.0 : 0.0) + 1e-9);
      suite.record(m.min_upper_slack - (perturb ? 1.0 : 0.0) + 1e-9);
    }
    summary.suites.push_back(suite.result());
  }
  {
    SuiteRecorder suite("reversiblization_support");
    Rng rng = rng_for(6);
    for (int i = 0; i < count; ++i) {
      auto p = random_consensus(random_size(rng), rng);
      auto fuzz = reversiblization_support(p);
      auto numeric = multiplicative_reversiblization(p);
      const auto edges = fuzz.edges.edges();
      std::set<std::pair<int, int>> a(edges.begin(), edges.end()), b;
      for (int u = 0; u < p.size(); ++u)
        for (int v = u + 1; v < p.size(); ++v)
          if (numeric(u, v) > 0.0) b.emplace(u, v);
      if (perturb && !a.empty()) a.erase(a.begin());
      suite.record(a == b ? 0.0 : -1.0);
    }
    summary.suites.push_back(suite.result());
  }
  {
    SuiteRecorder suite("exact_vs_truncated");
    Rng rng = rng_for(7);
    for (int i = 0; i < count; ++i) {
      auto p = random_consensus(random_size(rng), rng);
      double exact = lq_cost_exact(p).j;
      double truncated = lq_cost_truncated(p).j;
      suite.record(1e-5 - relative_gap(truncated * (1.0 + skew), exact));
    }
    summary.suites.push_back(suite.result());
  }
  return summary;
}

std::string render_svg(const PlotSeries& plot) {
  const double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
  auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return plot.log_y ? std::log10(y) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& row : plot.rows) {
    if (plot.log_x && !(row[0] > 0.0)) continue;
    x0 = std::min(x0, tx(row[0]));
    x1 = std::max(x1, tx(row[0]));
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (plot.log_y && !(row[c] > 0.0)) continue;
      y0 = std::min(y0, ty(row[c]));
      y1 = std::max(y1, ty(row[c]));
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (ty(y) - y0) / (y1 - y0) * (height - top - bottom); };
  auto label = [](double v, bool log) {
    std::ostringstream out;
    out.precision(4);
    out << (log ? std::pow(10.0, v) : v);
    return out.str();
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << plot.title
      << "</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << left << "\" y=\"" << height - bottom + 18 << "\" font-size=\"11\">" << label(x0, plot.log_x)
      << "</text>\n"
      << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 18 << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(x1, plot.log_x) << "</text>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << height - bottom << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(y0, plot.log_y) << "</text>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" font-size=\"11\" text-anchor=\"end\">"
      << label(y1, plot.log_y) << "</text>\n"
      << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << plot.columns.front() << (plot.log_x ? " (log)" : "") << "</text>\n";
  for (std::size_t c = 1; c < plot.columns.size(); ++c) {
    const char* color = colors[(c - 1) % 3];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& row : plot.rows)
      if ((!plot.log_x || row[0] > 0.0) && (!plot.log_y || row[c] > 0.0)) svg << px(row[0]) << "," << py(row[c]) << " ";
    svg << "\"/>\n";
    svg << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 14 * static_cast<double>(c)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << plot.columns[c]
        << (plot.log_y ? " (log)" : "") << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_outputs(const ExperimentOutput& output, const ExperimentConfig& config, const std::string& dir, bool svg) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + (fs::path(dir) / name).string());
    return out;
  };
  const std::string kind(to_string(config.kind()));

  {
    auto out = open("results.csv");
    out << "# experiment=" << kind << " master_seed=" << output.master_seed << "\n";
    out << ResultRow::csv_header() << "\n";
    for (const auto& row : output.rows) out << row.csv_row() << "\n";
  }
  {
    auto out = open("timing.csv");
    out << "# experiment=" << kind << " master_seed=" << output.master_seed << "\n";
    out << "n,d,instance,wall_seconds\n";
    for (const auto& row : output.rows)
      out << row.n << "," << row.d << "," << row.instance << "," << format_double(row.wall_seconds) << "\n";
  }
  {
    auto out = open("audit.txt");
    out << "master_seed=" << output.master_seed << "\n" << config.to_key_value();
    for (const auto& line : output.audit) {
      out << line;
      if (line.empty() || line.back() != '\n') out << "\n";
    }
  }
  for (const auto& plot : output.plots) {
    auto out = open(plot.file);
    out << "#";
    for (const auto& c : plot.columns) out << " " << c;
    out << "\n";
    for (const auto& row : plot.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << format_double(row[c]);
      out << "\n";
    }
    if (svg) {
      auto stem = fs::path(plot.file).stem().string();
      open(stem + ".svg") << render_svg(plot);
    }
  }
}

}  // namespace lqcons::experiments
