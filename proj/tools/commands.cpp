#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "stratsel/config_io.hpp"
#include "stratsel/dynamics.hpp"
#include "stratsel/equilibrium.hpp"
#include "stratsel/errors.hpp"
#include "stratsel/math.hpp"
#include "stratsel/mc_oracle.hpp"
#include "stratsel/metrics.hpp"
#include "stratsel/parallel.hpp"

namespace stratsel::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

// Writes to --out when given, to `out` otherwise.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidConfig("cannot write '" + path + "'");
  file << text;
}

GameConfig checked_config(const Json& j) {
  GameConfig config = config_from_json(j);
  require_valid(config);
  return config;
}

bool subcritical(const GameConfig& config) {
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    if (!(config.reward < critical_reward(contestant_of(config, g)))) return false;
  }
  return true;
}

struct Solvers {
  bool unconstrained = true;
  bool parity = true;
};

Solvers parse_solvers(const Json& j) {
  Solvers s;
  if (!j.contains("solvers")) return s;
  if (!j.at("solvers").is_array()) throw InvalidConfig("solvers: expected an array");
  s = {false, false};
  for (const auto& name : j.at("solvers")) {
    if (name == "unconstrained") {
      s.unconstrained = true;
    } else if (name == "demographic_parity") {
      s.parity = true;
    } else {
      throw InvalidConfig("solvers: unknown solver " + name.dump());
    }
  }
  return s;
}

// --- solve -----------------------------------------------------------------

int cmd_solve(const std::string& config_path, const std::string& out_path, std::ostream& out) {
  const Json doc = load_json(config_path);
  const GameConfig config = checked_config(doc);
  const Solvers solvers = parse_solvers(doc);

  Json result;
  result["config_hash"] = config_hash(config);
  if (solvers.unconstrained) result["unconstrained"] = report_to_json(solve_unconstrained(config), config);
  if (solvers.parity)
    result["demographic_parity"] = report_to_json(solve_demographic_parity(config), config);
  if (config.groups.size() == 2) {
    try {
      result["asymptotic_predictions"] = predictions_to_json(asymptotic_predictions(config), config);
    } catch (const AmbiguousRegime& e) {
      result["asymptotic_predictions"] = nullptr;
    }
    if (subcritical(config)) {
      try {
        result["small_s_crossings"] = crossings_to_json(small_s_crossings(config));
      } catch (const DegenerateVariance&) {
        result["small_s_crossings"] = nullptr;
      }
    }
  }
  emit(result.dump(2) + "\n", out_path, out);
  return kOk;
}

// --- sweep -----------------------------------------------------------------

std::vector<double> grid_from_json(const Json& g) {
  if (g.is_array()) {
    std::vector<double> v;
    for (const auto& x : g) {
      if (!x.is_number()) throw InvalidConfig("grid: expected numbers");
      v.push_back(x.get<double>());
    }
    if (v.size() < 2) throw InvalidConfig("grid: need at least 2 points");
    return v;
  }
  if (!g.is_object()) throw InvalidConfig("grid: expected a list or {lo, hi, count, scale}");
  std::string text = fmt(g.at("lo").get<double>()) + ":" + fmt(g.at("hi").get<double>()) + ":" +
                     std::to_string(g.at("count").get<long>());
  if (g.value("scale", std::string("linear")) == "log") text += ":log";
  return parse_grid(text);
}

struct SweepRow {
  std::vector<std::string> cells;
  std::vector<std::string> warnings;
};

int cmd_sweep(const std::string& spec_path, const std::string& out_path,
              const std::string& grid_override, std::ostream& out, std::ostream& err) {
  const Json spec = load_json(spec_path);
  if (!spec.contains("axis") || !spec.contains("base_config"))
    throw InvalidConfig("sweep spec needs axis, grid and base_config");
  const std::string axis = spec.at("axis").get<std::string>();
  if (axis != "alpha" && axis != "reward") throw InvalidConfig("axis: expected alpha or reward");
  const GameConfig base = checked_config(spec.at("base_config"));
  const Solvers solvers = parse_solvers(spec);
  std::vector<double> grid;
  if (!grid_override.empty()) {
    grid = parse_grid(grid_override);
  } else if (spec.contains("grid")) {
    grid = grid_from_json(spec.at("grid"));
  } else {
    throw InvalidConfig("grid: missing");
  }

  std::vector<GameConfig> points;
  for (double v : grid) {
    GameConfig c = base;
    (axis == "alpha" ? c.alpha : c.reward) = v;
    const auto violations = validate(c);
    if (!violations.empty())
      throw InvalidConfig("grid value " + fmt(v) + ": " + violations.front().message);
    points.push_back(std::move(c));
  }

  const std::size_t n = base.groups.size();
  // Ratio orientation: disadvantaged over advantaged for two groups.
  std::size_t num = n > 1 ? 1 : 0;
  std::size_t den = 0;
  if (n == 2) {
    try {
      const auto pred = asymptotic_predictions(base);
      num = pred.disadvantaged;
      den = pred.advantaged;
    } catch (const AmbiguousRegime&) {
    }
  }

  std::vector<std::string> header{"axis_value", "theta_un"};
  for (const auto& g : base.groups) header.push_back("theta_dp_" + g.label);
  for (const auto& g : base.groups) header.push_back("effort_" + g.label + "_un");
  for (const auto& g : base.groups) header.push_back("rate_" + g.label + "_un");
  for (const auto* name : {"rate_ratio", "quality_un", "quality_dp", "quality_ratio"})
    header.push_back(name);

  const auto rows = parallel_map<SweepRow>(points.size(), [&](std::size_t i) {
    SweepRow row;
    const auto& c = points[i];
    std::optional<EquilibriumReport> un;
    std::optional<EquilibriumReport> dp;
    if (solvers.unconstrained) {
      try {
        un = solve_unconstrained(c);
      } catch (const Error& e) {
        row.warnings.push_back("unconstrained solve failed at " + fmt(grid[i]) + ": " + e.what());
      }
    }
    if (solvers.parity) {
      try {
        dp = solve_demographic_parity(c);
      } catch (const Error& e) {
        row.warnings.push_back("parity solve failed at " + fmt(grid[i]) + ": " + e.what());
      }
    }
    auto cell = [](bool ok, double v) { return ok ? fmt(v) : std::string(); };
    row.cells.push_back(fmt(grid[i]));
    row.cells.push_back(cell(un.has_value(), un ? un->thresholds[0] : 0.0));
    for (std::size_t g = 0; g < n; ++g) row.cells.push_back(cell(dp.has_value(), dp ? dp->thresholds[g] : 0.0));
    for (std::size_t g = 0; g < n; ++g) row.cells.push_back(cell(un.has_value(), un ? un->avg_effort[g] : 0.0));
    for (std::size_t g = 0; g < n; ++g)
      row.cells.push_back(cell(un.has_value(), un ? un->selection_rate[g] : 0.0));
    const bool ratio_ok = un && n > 1 && un->selection_rate[den] > 0.0;
    row.cells.push_back(cell(ratio_ok, ratio_ok ? un->selection_rate[num] / un->selection_rate[den] : 0.0));
    row.cells.push_back(cell(un.has_value(), un ? un->quality : 0.0));
    row.cells.push_back(cell(dp.has_value(), dp ? dp->quality : 0.0));
    const bool q_ok = un && dp && dp->quality != 0.0;
    row.cells.push_back(cell(q_ok, q_ok ? un->quality / dp->quality : 0.0));
    return row;
  });

  std::string text = "# config_hash=" + content_hash(spec) + "\n" + join(header) + "\n";
  for (const auto& row : rows) {
    for (const auto& w : row.warnings) err << "warning: " << w << "\n";
    text += join(row.cells) + "\n";
  }
  emit(text, out_path, out);
  return kOk;
}

// --- dropout ---------------------------------------------------------------

int cmd_dropout(const std::string& config_path, const std::string& out_path,
                const std::string& grid_text, std::ostream& out, std::ostream& err) {
  const GameConfig config = checked_config(load_json(config_path));
  const auto grid = parse_grid(grid_text.empty() ? "100:100000:4:log" : grid_text);
  for (double s : grid) {
    if (!(s > 0.0)) throw InvalidConfig("reward grid values must be positive, got " + fmt(s));
  }
  std::vector<std::string> header{"S"};
  for (const auto& g : config.groups) {
    for (const auto* col : {"theta_d_", "br_min_", "br_max_", "normalized_"})
      header.push_back(col + g.label);
  }
  std::string text = "# config_hash=" + config_hash(config) + "\n" + join(header) + "\n";
  for (double s : grid) {
    std::vector<std::string> cells{fmt(s)};
    for (std::size_t g = 0; g < config.groups.size(); ++g) {
      const Contestant c = contestant_of(config, g);
      try {
        const auto d = dropout_threshold(c, s);
        cells.insert(cells.end(), {fmt(d.theta), fmt(d.br_min), fmt(d.br_max),
                                   fmt(d.theta * std::sqrt(c.cost / (2.0 * s)))});
      } catch (const SubcriticalReward& e) {
        err << "warning: S=" << fmt(s) << " group " << config.groups[g].label << ": " << e.what()
            << "\n";
        cells.insert(cells.end(), 4, std::string());
      }
    }
    text += join(cells) + "\n";
  }
  emit(text, out_path, out);
  return kOk;
}

// --- dynamics --------------------------------------------------------------

int cmd_dynamics(const std::string& config_path, const std::string& out_path,
                 const std::string& mode, std::size_t steps, std::ostream& out,
                 std::ostream& err) {
  const GameConfig config = checked_config(load_json(config_path));
  if (steps < 1) throw InvalidConfig("steps must be at least 1");
  DynamicsOptions options;
  options.mode = mode == "fp" ? DynamicsMode::fp : DynamicsMode::br;
  options.max_steps = steps;
  const auto trace = run_dynamics(config, options);

  std::vector<std::string> header{"t", "theta"};
  for (const auto& g : config.groups) header.push_back("avg_effort_" + g.label);
  for (const auto& g : config.groups) header.push_back("selection_rate_" + g.label);
  std::string text = "# config_hash=" + config_hash(config) + "\n" + join(header) + "\n";
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    std::vector<std::string> cells{std::to_string(trace.states[k].t), fmt(trace.tracked_theta(k))};
    for (double v : trace.avg_effort[k]) cells.push_back(fmt(v));
    for (double v : trace.selection_rate[k]) cells.push_back(fmt(v));
    text += join(cells) + "\n";
  }
  emit(text, out_path, out);

  err << "status=" << to_string(trace.status);
  if (trace.status == DynamicsStatus::cycle) err << " period=" << trace.period;
  if (trace.theta_star) err << " theta=" << fmt(*trace.theta_star);
  err << " window_avg_effort=";
  for (std::size_t g = 0; g < trace.window_avg_effort.size(); ++g)
    err << (g ? ";" : "") << config.groups[g].label << ":" << fmt(trace.window_avg_effort[g]);
  err << "\n";
  return kOk;
}

// --- verify ----------------------------------------------------------------

GameConfig builtin(double reward, double alpha, double cost_h, double sigma_h, double sigma_l) {
  GameConfig c;
  c.reward = reward;
  c.alpha = alpha;
  c.groups = {{"H", 0.5, cost_h, 0.0, std::nullopt, sigma_h},
              {"L", 0.5, 1.0, 0.0, std::nullopt, sigma_l}};
  return c;
}

std::vector<GameConfig> default_suite() {
  GameConfig noisy;
  noisy.reward = 20.0;
  noisy.alpha = 0.3;
  noisy.eta_sq = 1.0;
  noisy.groups = {{"A", 0.3, 1.0, 0.5, std::nullopt, std::nullopt},
                  {"B", 0.7, 1.4, 2.0, std::nullopt, std::nullopt}};
  GameConfig oblivious = noisy;
  oblivious.dm_mode = DmMode::oblivious;
  return {builtin(10.0, 0.1, 1.0, 0.1, 1.0), builtin(10.0, 0.1, 5.0, 0.1, 1.0),
          builtin(1.0, 0.4, 1.0, 0.6, 1.0), noisy, oblivious};
}

int cmd_verify(const std::string& config_path, std::size_t samples, std::uint64_t seed,
               std::ostream& out) {
  std::vector<GameConfig> suite;
  if (config_path.empty()) {
    suite = default_suite();
  } else {
    suite.push_back(checked_config(load_json(config_path)));
  }
  if (samples < kMinSamples) throw InvalidConfig("samples must be at least 1000");

  std::vector<OracleCheck> checks;
  std::uint64_t stream = seed;
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const auto& c = suite[k];
    const std::size_t first = checks.size();
    const auto un = solve_unconstrained(c);
    const auto dp = solve_demographic_parity(c);
    for (std::size_t g = 0; g < c.groups.size(); ++g) {
      for (const auto& atom : un.strategies[g].support)
        checks.push_back(check_selection_probability(atom.effort, un.thresholds[0], c, g, samples, stream++));
      checks.push_back(check_best_response(un.thresholds[0], c, g, 10000));
    }
    checks.push_back(check_selection_quality(un, c, samples, stream++));
    checks.push_back(check_selection_quality(dp, c, samples, stream++));
    checks.push_back(check_nash_gap(un, c, 10000));
    checks.push_back(check_nash_gap(dp, c, 10000));
    for (std::size_t i = first; i < checks.size(); ++i)
      checks[i].name = "config" + std::to_string(k) + " " + checks[i].name;
  }

  bool all = true;
  char line[256];
  std::snprintf(line, sizeof line, "%-44s %16s %16s %12s  %s\n", "check", "analytic", "oracle",
                "tolerance", "result");
  out << line;
  for (const auto& ch : checks) {
    std::snprintf(line, sizeof line, "%-44s %16.9g %16.9g %12.3g  %s\n", ch.name.c_str(),
                  ch.analytic, ch.oracle, ch.tolerance, ch.pass ? "PASS" : "FAIL");
    out << line;
    all = all && ch.pass;
  }
  if (!all) {
    out << "failing:";
    for (const auto& ch : checks) {
      if (!ch.pass) out << " " << ch.name;
    }
    out << "\n";
  }
  return all ? kOk : kComputeError;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3 && parts.size() != 4)
    throw InvalidConfig("--grid: expected lo:hi:count[:log], got '" + text + "'");
  double lo = 0.0;
  double hi = 0.0;
  long count = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    count = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw InvalidConfig("--grid: cannot parse '" + text + "'");
  }
  const bool log = parts.size() == 4;
  if (log && parts[3] != "log") throw InvalidConfig("--grid: scale must be 'log'");
  if (count < 2) throw InvalidConfig("--grid: count must be at least 2");
  if (log && !(lo > 0.0 && hi > 0.0)) throw InvalidConfig("--grid: log scale needs positive ends");
  std::vector<double> grid;
  for (long i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                       : lo + t * (hi - lo));
  }
  grid.back() = hi;
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria of a strategic selection contest"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string mode = "br";
  std::string grid;
  std::size_t steps = 1000;
  std::size_t samples = 200000;
  std::uint64_t seed = 1;

  auto* solve = app.add_subcommand("solve", "equilibrium reports as JSON");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep as CSV (--config is a sweep spec)");
  auto* dropout = app.add_subcommand("dropout", "dropout thresholds over a reward grid");
  auto* dynamics = app.add_subcommand("dynamics", "best-response or fictitious-play trace");
  auto* verify = app.add_subcommand("verify", "analytic formulas against Monte Carlo oracles");

  for (auto* sub : {solve, sweep, dropout, dynamics})
    sub->add_option("--config", config_path, "input file")->required();
  verify->add_option("--config", config_path, "config to check; built-in suite when omitted");
  for (auto* sub : {solve, sweep, dropout, dynamics}) sub->add_option("--out", out_path, "output file");
  for (auto* sub : {sweep, dropout}) sub->add_option("--grid", grid, "lo:hi:count[:log]");
  dynamics->add_option("--mode", mode, "br or fp")->check(CLI::IsMember({"br", "fp"}));
  dynamics->add_option("--steps", steps, "maximum number of steps");
  verify->add_option("--samples", samples, "Monte Carlo samples per check");
  verify->add_option("--seed", seed, "base seed");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(config_path, out_path, out);
    if (*sweep) return cmd_sweep(config_path, out_path, grid, out, err);
    if (*dropout) return cmd_dropout(config_path, out_path, grid, out, err);
    if (*dynamics) return cmd_dynamics(config_path, out_path, mode, steps, out, err);
    return cmd_verify(config_path, samples, seed, out);
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kComputeError;
  }
}

}  // namespace stratsel::cli
