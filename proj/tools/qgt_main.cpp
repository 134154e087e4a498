// qgt: optimal nested test plans for quantitative group testing, an
// independent DP verifier, and a Monte Carlo heavy-hitter detection
// simulator with CSV output.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qgt/qgt.hpp"

namespace {

using std::int64_t;

double parse_number(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": '" + token + "' is not a number");
  }
  if (used != token.size())
    throw std::invalid_argument(what + ": trailing characters in '" + token + "'");
  return value;
}

// "a:b:step" (endpoints inclusive within half a step) or a comma list.
std::vector<double> parse_eta_values(const std::string& spec) {
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ':')) parts.push_back(token);
    if (parts.size() != 3)
      throw std::invalid_argument("eta grid must look like start:stop:step (got '" + spec + "')");
    const double start = parse_number(parts[0], "eta grid start");
    const double stop = parse_number(parts[1], "eta grid stop");
    const double step = parse_number(parts[2], "eta grid step");
    if (!(step > 0.0)) throw std::invalid_argument("eta grid step must be positive");
    if (stop < start) throw std::invalid_argument("eta grid stop must be >= start");
    for (int64_t i = 0;; ++i) {
      const double raw = start + static_cast<double>(i) * step;
      if (raw > stop + step / 2.0) break;
      values.push_back(std::round(raw * 1e12) / 1e12);  // snap accumulated fp error off the grid
    }
  } else {
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ',')) {
      if (token.empty()) continue;
      values.push_back(parse_number(token, "eta value"));
    }
  }
  if (values.empty()) throw std::invalid_argument("eta grid '" + spec + "' is empty");
  return values;
}

// CSV goes to stdout unless --output names a file; the manifest follows the
// CSV (file: <output>.manifest, stdout: printed to stderr).
void emit_csv(const std::string& csv, const qgt::RunManifest& manifest,
              const std::string& output) {
  if (output.empty()) {
    std::cout << csv;
    std::cerr << manifest.to_string();
    return;
  }
  std::ofstream csv_file(output, std::ios::binary);
  if (!csv_file) throw std::runtime_error("cannot open output file '" + output + "'");
  csv_file << csv;
  const std::string manifest_path = output + ".manifest";
  std::ofstream manifest_file(manifest_path, std::ios::binary);
  if (!manifest_file) throw std::runtime_error("cannot open manifest file '" + manifest_path + "'");
  manifest_file << manifest.to_string();
}

void print_trace(const qgt::ExecutionResult& run, int64_t n, int64_t d) {
  std::map<int64_t, qgt::Segment> segments;  // running decomposition, keyed by start
  segments[0] = {0, n, d};
  int64_t index = 0;
  for (const qgt::TraceStep& step : run.trace.steps) {
    ++index;
    const qgt::Segment parent = segments.at(step.parent_start);
    segments.erase(step.parent_start);
    segments[step.group_start] = {step.group_start, step.group_len, step.count};
    if (step.group_len < parent.len)
      segments[step.group_start + step.group_len] = {step.group_start + step.group_len,
                                                     parent.len - step.group_len,
                                                     parent.defectives - step.count};
    std::cout << "test " << index << ": group [" << step.group_start << ","
              << step.group_start + step.group_len << ") count=" << step.count;
    if (step.clamped) std::cout << " (reported " << step.reported << ", clamped)";
    std::cout << " | segments:";
    for (const auto& [start, seg] : segments) {
      std::cout << " [" << seg.start << "," << seg.start + seg.len << ")=" << seg.defectives;
      if (seg.resolved()) std::cout << "*";
    }
    std::cout << "\n";
  }
}

int run_plan(int64_t n, int64_t d, const std::vector<int64_t>& defectives, bool have_defectives) {
  const qgt::ProblemInstance inst{n, d};
  if (!inst.valid())
    throw std::invalid_argument("plan: requires n >= 1 and 0 <= d <= n");

  if (!inst.nontrivial()) {
    std::cout << "n=" << n << " d=" << d << " N=0 (trivial instance: no tests needed)\n";
    return 0;
  }

  const int64_t reduced = std::min(d, n - d);
  const qgt::FrameCoords fc = qgt::frame_coords({n, reduced});
  std::cout << "n=" << n << " d=" << d << " N=" << qgt::optimal_test_count(inst)
            << " M=" << qgt::optimal_first_group(inst) << " l=" << fc.l << " k=" << fc.k << "\n";

  if (have_defectives) {
    if (static_cast<int64_t>(defectives.size()) != d)
      throw std::invalid_argument("plan: --defectives must list exactly d indices");
    const qgt::TruthfulOracle oracle(n, defectives);
    const qgt::ExecutionResult run = qgt::execute_plan(n, d, oracle);
    print_trace(run, n, d);
    std::cout << "tests used: " << run.trace.total_tests()
              << " (worst case N=" << qgt::optimal_test_count(inst) << ")\n";
  }
  return 0;
}

int run_table(int64_t d, int64_t n_max, std::uint64_t seed, const std::string& output) {
  const std::string csv = qgt::table_csv(qgt::sequence_table(d, n_max));
  qgt::RunManifest manifest;
  manifest.command = "table";
  manifest.seed = seed;
  manifest.parameters = {{"d", std::to_string(d)}, {"n_max", std::to_string(n_max)}};
  if (!output.empty()) manifest.parameters.emplace_back("output", output);
  emit_csv(csv, manifest, output);
  return 0;
}

int run_verify(int64_t n_max, int64_t exhaustive_cap) {
  if (n_max < 2) throw std::invalid_argument("verify: --n-max must be >= 2");
  if (exhaustive_cap > n_max)
    throw std::invalid_argument("verify: --exhaustive-cap cannot exceed --n-max");

  const qgt::DpTable table = qgt::dp_solve(n_max);
  int64_t checked = 0;
  for (int64_t n = 2; n <= n_max; ++n) {
    for (int64_t d = 1; d <= n - 1; ++d) {
      const int64_t closed_tests = qgt::optimal_test_count({n, d});
      const int64_t closed_group = qgt::optimal_first_group({n, d});
      if (closed_tests != table.tests(n, d) || closed_group != table.first_group(n, d)) {
        std::cout << "MISMATCH at (n=" << n << ", d=" << d << "): closed form N=" << closed_tests
                  << " M=" << closed_group << ", DP N=" << table.tests(n, d)
                  << " M=" << table.first_group(n, d) << "\n";
        return 1;
      }
      ++checked;
    }
  }
  std::cout << "closed form vs DP recursion: " << checked << " instances up to n=" << n_max
            << ", all match\n";

  for (int64_t n = 2; n <= exhaustive_cap; ++n) {
    for (int64_t d = 1; d <= n - 1; ++d) {
      const qgt::WorstCaseReport report = qgt::verify_executor_worst_case(n, d, exhaustive_cap);
      if (!report.all_correct) {
        std::cout << "MISMATCH at (n=" << n << ", d=" << d << "): executor mislabeled a set\n";
        return 1;
      }
      if (report.max_tests != table.tests(n, d)) {
        std::cout << "MISMATCH at (n=" << n << ", d=" << d
                  << "): executor worst case " << report.max_tests << " != DP N="
                  << table.tests(n, d) << "\n";
        return 1;
      }
    }
  }
  if (exhaustive_cap >= 2)
    std::cout << "executor exhaustive check: all defective sets labeled correctly, worst case"
                 " equals N(n,d) for n <= " << exhaustive_cap << "\n";
  std::cout << "verify: OK\n";
  return 0;
}

struct SimOptions {
  qgt::TrafficKind model = qgt::TrafficKind::Poisson;
  qgt::EstimatorKind estimator = qgt::EstimatorKind::MaximumLikelihood;
  int64_t n = 100;
  int64_t d = 0;
  double rho = 0.0;
  bool have_d = false;
  bool have_rho = false;
  std::string eta_spec;
  int64_t measurements = 1;
  int64_t trials = 1000;
  double mu0 = 1.0;
  double sigma = 0.5;
  bool unknown_d = false;
  bool noiseless = false;
};

int run_sweep(const char* command, const SimOptions& opt, std::uint64_t seed,
              const std::string& output, bool single_point) {
  int64_t d = opt.d;
  if (!opt.have_d) {
    if (!opt.have_rho) throw std::invalid_argument(std::string(command) + ": give --d or --rho");
    const double scaled = opt.rho * static_cast<double>(opt.n);
    d = std::llround(scaled);
    if (std::abs(scaled - static_cast<double>(d)) > 1e-9)
      throw std::invalid_argument(std::string(command) + ": rho*n must be an integer (rho=d/n)");
  }

  qgt::PopulationConfig pop{opt.n, d, 0.0};
  qgt::TrafficModel model{opt.model, opt.mu0, opt.mu0 * 2.0, opt.sigma};
  qgt::MeasurementConfig meas;
  meas.measurements_per_test = opt.measurements;
  meas.estimator = opt.noiseless ? qgt::EstimatorKind::ExactCount : opt.estimator;
  meas.seed = seed;
  meas.trials = opt.trials;
  meas.unknown_d = opt.unknown_d;

  const std::vector<double> etas = parse_eta_values(opt.eta_spec);
  if (single_point && etas.size() != 1)
    throw std::invalid_argument("simulate takes a single --eta value; use sweep for grids");
  const std::vector<qgt::SweepPoint> points = qgt::eta_sweep(pop, model, meas, etas);
  const std::string csv = qgt::sweep_csv(pop, model, meas, points);

  qgt::RunManifest manifest;
  manifest.command = command;
  manifest.seed = seed;
  std::string eta_list;
  for (const qgt::SweepPoint& point : points) {
    if (!eta_list.empty()) eta_list += ',';
    eta_list += qgt::format_double(point.eta);
  }
  manifest.parameters = {
      {"model", std::string(qgt::model_name(model.kind))},
      {"estimator", std::string(qgt::estimator_name(meas.estimator))},
      {"n", std::to_string(pop.n)},
      {"d", std::to_string(pop.d)},
      {"rho", qgt::format_double(pop.rho())},
      {"mu0", qgt::format_double(model.mu0)},
      {"T", std::to_string(meas.measurements_per_test)},
      {"trials", std::to_string(meas.trials)},
      {"unknown_d", meas.unknown_d ? "true" : "false"},
      {"eta_values", eta_list},
  };
  if (model.kind == qgt::TrafficKind::LogNormal)
    manifest.parameters.emplace_back("sigma", qgt::format_double(model.sigma));
  if (!output.empty()) manifest.parameters.emplace_back("output", output);

  emit_csv(csv, manifest, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal nested test plans for quantitative group testing and heavy hitter"
               " detection simulation"};
  app.set_version_flag("--version", std::string(qgt::tool_version));
  app.set_config("--config", "", "Read options from an INI file (command-line flags win)");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string output;
  app.add_option("--seed", seed, "Master random seed")->capture_default_str();
  app.add_option("--output", output,
                 "Write CSV to this file plus a .manifest next to it (default: stdout)");

  const std::map<std::string, qgt::TrafficKind> model_names{
      {"poisson", qgt::TrafficKind::Poisson}, {"lognormal", qgt::TrafficKind::LogNormal}};
  const std::map<std::string, qgt::EstimatorKind> estimator_names{
      {"ml", qgt::EstimatorKind::MaximumLikelihood},
      {"mean", qgt::EstimatorKind::SampleMean},
      {"exact", qgt::EstimatorKind::ExactCount}};

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Closed-form N, M, l, k for one instance;"
                                              " optionally trace a truthful-oracle run");
  plan_cmd->fallthrough();
  int64_t plan_n = 0, plan_d = 0;
  std::vector<int64_t> defectives;
  plan_cmd->add_option("--n", plan_n, "Population size")->required();
  plan_cmd->add_option("--d", plan_d, "Defective count")->required();
  CLI::Option* defectives_opt =
      plan_cmd->add_option("--defectives", defectives,
                           "Comma-separated defective indices (exactly d of them)")
          ->delimiter(',');

  // table
  auto* table_cmd = app.add_subcommand("table", "CSV of (n, N, M, l, k) for n = 2d..n_max");
  table_cmd->fallthrough();
  int64_t table_d = 1, table_n_max = 0;
  table_cmd->add_option("--d", table_d, "Defective count")->required();
  table_cmd->add_option("--n-max", table_n_max, "Largest population size")->required();

  // verify
  auto* verify_cmd = app.add_subcommand(
      "verify", "Check the closed forms against the DP recursion and the executor exhaustively");
  verify_cmd->fallthrough();
  int64_t verify_n_max = 128, verify_cap = 10;
  verify_cmd->add_option("--n-max", verify_n_max, "Check all instances up to this n")
      ->capture_default_str();
  verify_cmd->add_option("--exhaustive-cap", verify_cap,
                         "Enumerate every defective set for n up to this cap")
      ->capture_default_str();

  // simulate / sweep share their options
  SimOptions sim_opt, sweep_opt;
  auto add_sim_options = [&](CLI::App* cmd, SimOptions& opt, bool grid) {
    cmd->fallthrough();
    cmd->add_option("--model", opt.model, "Traffic model")
        ->transform(CLI::CheckedTransformer(model_names, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--estimator", opt.estimator, "Group-count estimator")
        ->transform(CLI::CheckedTransformer(estimator_names, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--n", opt.n, "Flow count")->capture_default_str();
    CLI::Option* d_opt = cmd->add_option("--d", opt.d, "Heavy-hitter count");
    CLI::Option* rho_opt =
        cmd->add_option("--rho", opt.rho, "Heavy-hitter fraction d/n (alternative to --d)");
    d_opt->excludes(rho_opt);
    cmd->add_option("--eta", opt.eta_spec,
                    grid ? "Traffic-volume fraction grid: start:stop:step or comma list"
                         : "Traffic-volume fraction of heavy hitters")
        ->required();
    cmd->add_option("--T", opt.measurements, "Measurements per group test")
        ->capture_default_str();
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials")->capture_default_str();
    cmd->add_option("--mu0", opt.mu0, "Mean rate of a normal flow")->capture_default_str();
    cmd->add_option("--sigma", opt.sigma, "Log-normal shape parameter")->capture_default_str();
    cmd->add_flag("--unknown-d", opt.unknown_d,
                  "Start with a whole-population test instead of assuming d known");
    cmd->add_flag("--noiseless", opt.noiseless,
                  "Replace the estimator with exact counts (sanity mode)");
    return std::pair{d_opt, rho_opt};
  };

  auto* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo FN/FP rates at a single eta point");
  auto [sim_d_opt, sim_rho_opt] = add_sim_options(simulate_cmd, sim_opt, false);

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo FN/FP rates over an eta grid");
  auto [sweep_d_opt, sweep_rho_opt] = add_sim_options(sweep_cmd, sweep_opt, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed())
      return run_plan(plan_n, plan_d, defectives, defectives_opt->count() > 0);
    if (table_cmd->parsed()) return run_table(table_d, table_n_max, seed, output);
    if (verify_cmd->parsed()) return run_verify(verify_n_max, verify_cap);
    if (simulate_cmd->parsed()) {
      sim_opt.have_d = sim_d_opt->count() > 0;
      sim_opt.have_rho = sim_rho_opt->count() > 0;
      return run_sweep("simulate", sim_opt, seed, output, true);
    }
    if (sweep_cmd->parsed()) {
      sweep_opt.have_d = sweep_d_opt->count() > 0;
      sweep_opt.have_rho = sweep_rho_opt->count() > 0;
      return run_sweep("sweep", sweep_opt, seed, output, false);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
