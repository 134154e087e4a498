#pragma once

/*
 * Traffic models and group-count estimators for heavy hitter detection.
 * Flows are independent with mean rate mu0 (normal) or mu1 (heavy hitter);
 * a group test aggregates the traffic of m flows and estimates how many of
 * them are heavy from T measurements of the aggregate.
 */

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgt {

enum class TrafficKind { Poisson, LogNormal };

struct TrafficModel {
  TrafficKind kind = TrafficKind::Poisson;
  double mu0 = 1.0;    // mean rate of a normal flow
  double mu1 = 2.0;    // mean rate of a heavy hitter
  double sigma = 0.5;  // log-scale shape, log-normal only
};

inline void validate_model(const TrafficModel& model) {
  if (!(model.mu0 > 0.0) || !(model.mu1 > model.mu0))
    throw std::invalid_argument("TrafficModel: requires mu1 > mu0 > 0 (mu0=" +
                                std::to_string(model.mu0) + ", mu1=" + std::to_string(model.mu1) +
                                ")");
  if (model.kind == TrafficKind::LogNormal && !(model.sigma > 0.0))
    throw std::invalid_argument("TrafficModel: log-normal sigma must be positive");
}

// Heavy-hitter mean rate from the traffic-volume fraction eta:
// inverts eta = d*mu1 / (d*mu1 + (n-d)*mu0).
inline double mu1_from_rho_eta(double mu0, std::int64_t n, std::int64_t d, double eta) {
  if (!(mu0 > 0.0)) throw std::invalid_argument("mu1_from_rho_eta: mu0 must be positive");
  if (d < 1 || d >= n)
    throw std::invalid_argument("mu1_from_rho_eta: requires 1 <= d < n");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("mu1_from_rho_eta: eta must lie in (0, 1)");
  const double mu1 =
      eta * static_cast<double>(n - d) * mu0 / (static_cast<double>(d) * (1.0 - eta));
  if (!(mu1 > mu0))
    throw std::invalid_argument(
        "mu1_from_rho_eta: eta=" + std::to_string(eta) + " with rho=d/n=" +
        std::to_string(static_cast<double>(d) / static_cast<double>(n)) +
        " gives mu1=" + std::to_string(mu1) +
        " <= mu0; heavy hitters must carry more traffic than normal flows (eta > rho)");
  return mu1;
}

namespace detail {

// Location parameter of a log-normal with the given mean and shape.
inline double log_location(double mean, double sigma) {
  return std::log(mean) - 0.5 * sigma * sigma;
}

inline double mean_of(std::span<const double> readings) {
  if (readings.empty()) throw std::invalid_argument("estimator: readings must be nonempty");
  double sum = 0.0;
  for (double z : readings) sum += z;
  return sum / static_cast<double>(readings.size());
}

}  // namespace detail

// T measurements of the aggregate traffic of a group with heavy_count heavy
// hitters among group_size flows. Poisson flows aggregate to a single Poisson
// with the summed rate; log-normal flows have no closed-form aggregate, so
// each reading sums per-flow draws.
inline std::vector<double> sample_aggregate(const TrafficModel& model, std::int64_t group_size,
                                            std::int64_t heavy_count, std::int64_t measurements,
                                            std::mt19937_64& rng) {
  validate_model(model);
  if (group_size < 1 || heavy_count < 0 || heavy_count > group_size)
    throw std::invalid_argument("sample_aggregate: requires 0 <= heavy_count <= group_size");
  if (measurements < 1)
    throw std::invalid_argument("sample_aggregate: requires at least one measurement");

  std::vector<double> readings(static_cast<std::size_t>(measurements));
  if (model.kind == TrafficKind::Poisson) {
    const double rate = static_cast<double>(heavy_count) * model.mu1 +
                        static_cast<double>(group_size - heavy_count) * model.mu0;
    std::poisson_distribution<std::int64_t> aggregate(rate);
    for (double& z : readings) z = static_cast<double>(aggregate(rng));
  } else {
    std::lognormal_distribution<double> heavy(detail::log_location(model.mu1, model.sigma),
                                              model.sigma);
    std::lognormal_distribution<double> normal(detail::log_location(model.mu0, model.sigma),
                                               model.sigma);
    for (double& z : readings) {
      double sum = 0.0;
      for (std::int64_t i = 0; i < heavy_count; ++i) sum += heavy(rng);
      for (std::int64_t i = 0; i < group_size - heavy_count; ++i) sum += normal(rng);
      z = sum;
    }
  }
  return readings;
}

// Maximum-likelihood count of heavy hitters among m Poisson flows given
// aggregate readings: maximizes zbar*log(rate) - rate over the m+1 candidate
// rates d1*mu1 + (m-d1)*mu0. Ties break toward the smaller count.
inline std::int64_t ml_estimate(std::span<const double> readings, std::int64_t m, double mu0,
                                double mu1) {
  if (m < 1) throw std::invalid_argument("ml_estimate: group must be nonempty");
  const double zbar = detail::mean_of(readings);
  std::int64_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::int64_t d1 = 0; d1 <= m; ++d1) {
    const double rate =
        static_cast<double>(d1) * mu1 + static_cast<double>(m - d1) * mu0;
    const double value = zbar * std::log(rate) - rate;
    if (value > best_value) {
      best_value = value;
      best = d1;
    }
  }
  return best;
}

// Sample-mean count estimate: nearest integer to (zbar - m*mu0)/(mu1 - mu0),
// half-integers rounding away from zero, clamped into [0, m].
inline std::int64_t sample_mean_estimate(std::span<const double> readings, std::int64_t m,
                                         double mu0, double mu1) {
  if (m < 1) throw std::invalid_argument("sample_mean_estimate: group must be nonempty");
  if (!(mu1 > mu0))
    throw std::invalid_argument("sample_mean_estimate: requires mu1 > mu0");
  const double zbar = detail::mean_of(readings);
  const double raw = (zbar - static_cast<double>(m) * mu0) / (mu1 - mu0);
  if (raw <= 0.0) return 0;
  if (raw >= static_cast<double>(m)) return m;
  return std::llround(raw);
}

}  // namespace qgt
