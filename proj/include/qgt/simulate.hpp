#pragma once

/*
 * Monte Carlo evaluation of the nested plan on heavy hitter detection. Each
 * trial draws a uniformly random heavy-hitter set, runs the plan executor
 * against a noisy count oracle (aggregate measurements fed through the
 * configured estimator) and scores false negatives and false positives
 * against the ground truth. Trials own private random streams derived from
 * the master seed by a fixed splitting rule, so results are reproducible.
 */

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgt/executor.hpp"
#include "qgt/traffic.hpp"

namespace qgt {

enum class EstimatorKind {
  MaximumLikelihood,  // Poisson model only
  SampleMean,
  ExactCount,  // bypasses measurement noise; reduces the run to the bare plan
};

struct PopulationConfig {
  std::int64_t n = 0;  // flow count
  std::int64_t d = 0;  // heavy-hitter count, 1 <= d <= n/2
  double eta = 0.0;    // heavy-hitter share of total traffic volume

  double rho() const { return static_cast<double>(d) / static_cast<double>(n); }
};

struct MeasurementConfig {
  std::int64_t measurements_per_test = 1;  // T
  EstimatorKind estimator = EstimatorKind::MaximumLikelihood;
  std::uint64_t seed = 0;
  std::int64_t trials = 1000;
  bool unknown_d = false;  // prepend the whole-population test with an estimated total
};

struct SimResult {
  double fn_rate = 0.0;    // heavy hitters labeled normal, per trial / d, averaged
  double fn_stderr = 0.0;
  double fp_rate = 0.0;    // normal flows labeled heavy, per trial / (n-d), averaged
  double fp_stderr = 0.0;
  double mean_tests = 0.0;
  std::int64_t trials = 0;
};

struct TrialResult {
  std::vector<bool> truth;  // flow -> is a heavy hitter
  ExecutionResult outcome;
};

// SplitMix64 finalizer over golden-ratio spaced stream indices: a fixed
// splitting rule, so trial streams never depend on scheduling.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

inline void validate_sim_configs(const PopulationConfig& pop, const TrafficModel& model,
                                 const MeasurementConfig& meas) {
  if (pop.n < 2 || pop.d < 1 || 2 * pop.d > pop.n)
    throw std::invalid_argument("simulation: requires n >= 2 and 1 <= d <= n/2 (got n=" +
                                std::to_string(pop.n) + ", d=" + std::to_string(pop.d) + ")");
  if (meas.measurements_per_test < 1)
    throw std::invalid_argument("simulation: requires T >= 1");
  if (meas.estimator == EstimatorKind::MaximumLikelihood && model.kind != TrafficKind::Poisson)
    throw std::invalid_argument(
        "simulation: the maximum-likelihood estimator applies only to the Poisson model");
  if (meas.estimator != EstimatorKind::ExactCount) validate_model(model);
}

// Uniformly random size-d subset of [0, n): partial Fisher-Yates.
inline std::vector<bool> sample_truth(std::int64_t n, std::int64_t d, std::mt19937_64& rng) {
  std::vector<std::int64_t> items(static_cast<std::size_t>(n));
  std::iota(items.begin(), items.end(), 0);
  for (std::int64_t i = 0; i < d; ++i) {
    std::uniform_int_distribution<std::int64_t> pick(i, n - 1);
    std::swap(items[static_cast<std::size_t>(i)], items[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<bool> truth(static_cast<std::size_t>(n), false);
  for (std::int64_t i = 0; i < d; ++i) truth[static_cast<std::size_t>(items[static_cast<std::size_t>(i)])] = true;
  return truth;
}

}  // namespace detail

// One simulated detection run. The oracle counts the true heavy hitters in
// the queried range, synthesizes T aggregate measurements and feeds them to
// the configured estimator; the estimate becomes the test outcome.
inline TrialResult run_trial(const PopulationConfig& pop, const TrafficModel& model,
                             const MeasurementConfig& meas, std::mt19937_64& rng) {
  detail::validate_sim_configs(pop, model, meas);

  TrialResult trial;
  trial.truth = detail::sample_truth(pop.n, pop.d, rng);

  std::vector<std::int64_t> prefix(static_cast<std::size_t>(pop.n) + 1, 0);
  for (std::int64_t i = 0; i < pop.n; ++i)
    prefix[static_cast<std::size_t>(i) + 1] =
        prefix[static_cast<std::size_t>(i)] + (trial.truth[static_cast<std::size_t>(i)] ? 1 : 0);

  auto oracle = [&](std::int64_t start, std::int64_t len) -> std::int64_t {
    const std::int64_t actual =
        prefix[static_cast<std::size_t>(start + len)] - prefix[static_cast<std::size_t>(start)];
    if (meas.estimator == EstimatorKind::ExactCount) return actual;
    const std::vector<double> readings =
        sample_aggregate(model, len, actual, meas.measurements_per_test, rng);
    return meas.estimator == EstimatorKind::MaximumLikelihood
               ? ml_estimate(readings, len, model.mu0, model.mu1)
               : sample_mean_estimate(readings, len, model.mu0, model.mu1);
  };

  trial.outcome = meas.unknown_d ? execute_unknown_d(pop.n, oracle)
                                 : execute_plan(pop.n, pop.d, oracle);
  return trial;
}

// Aggregates `trials` independent trials. Per-trial rates are macro-averaged:
// false negatives normalized by d and false positives by n-d within each
// trial, then averaged across trials with the standard error of that mean.
inline SimResult run_monte_carlo(const PopulationConfig& pop, const TrafficModel& model,
                                 const MeasurementConfig& meas) {
  detail::validate_sim_configs(pop, model, meas);
  if (meas.trials < 1) throw std::invalid_argument("run_monte_carlo: requires trials >= 1");

  double fn_sum = 0.0, fn_sumsq = 0.0;
  double fp_sum = 0.0, fp_sumsq = 0.0;
  double tests_sum = 0.0;
  for (std::int64_t t = 0; t < meas.trials; ++t) {
    std::mt19937_64 rng(derive_stream_seed(meas.seed, static_cast<std::uint64_t>(t)));
    const TrialResult trial = run_trial(pop, model, meas, rng);

    std::int64_t missed = 0, alarms = 0;
    for (std::int64_t i = 0; i < pop.n; ++i) {
      const bool truth = trial.truth[static_cast<std::size_t>(i)];
      const bool labeled = trial.outcome.defective[static_cast<std::size_t>(i)];
      if (truth && !labeled) ++missed;
      if (!truth && labeled) ++alarms;
    }
    const double fn = static_cast<double>(missed) / static_cast<double>(pop.d);
    const double fp = static_cast<double>(alarms) / static_cast<double>(pop.n - pop.d);
    fn_sum += fn;
    fn_sumsq += fn * fn;
    fp_sum += fp;
    fp_sumsq += fp * fp;
    tests_sum += static_cast<double>(trial.outcome.trace.total_tests());
  }

  const double count = static_cast<double>(meas.trials);
  auto stderr_of_mean = [count](double sum, double sumsq) {
    if (count < 2.0) return 0.0;
    const double mean = sum / count;
    const double var = std::max(0.0, (sumsq - count * mean * mean) / (count - 1.0));
    return std::sqrt(var / count);
  };

  SimResult result;
  result.trials = meas.trials;
  result.fn_rate = fn_sum / count;
  result.fp_rate = fp_sum / count;
  result.fn_stderr = stderr_of_mean(fn_sum, fn_sumsq);
  result.fp_stderr = stderr_of_mean(fp_sum, fp_sumsq);
  result.mean_tests = tests_sum / count;
  return result;
}

struct SweepPoint {
  double eta = 0.0;
  SimResult result;
};

// One Monte Carlo run per eta value, holding mu0 fixed and recomputing mu1
// from (rho, eta) at every point. Invalid points (mu1 <= mu0) throw.
inline std::vector<SweepPoint> eta_sweep(PopulationConfig pop, TrafficModel model,
                                         const MeasurementConfig& meas,
                                         const std::vector<double>& eta_values) {
  std::vector<SweepPoint> points;
  points.reserve(eta_values.size());
  for (double eta : eta_values) {
    if (meas.estimator != EstimatorKind::ExactCount)
      model.mu1 = mu1_from_rho_eta(model.mu0, pop.n, pop.d, eta);
    pop.eta = eta;
    points.push_back({eta, run_monte_carlo(pop, model, meas)});
  }
  return points;
}

}  // namespace qgt
