#pragma once

/*
 * CSV and run-manifest emission. Numeric fields use shortest round-trip
 * decimal form via std::to_chars: locale-free and byte-stable, so identical
 * runs produce identical CSV bodies.
 */

#include <charconv>
#include <cstdint>
#include <ctime>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qgt/plan.hpp"
#include "qgt/simulate.hpp"
#include "qgt/version.hpp"

namespace qgt {

inline std::string format_double(double value) {
  char buf[64];
  const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

inline std::string_view model_name(TrafficKind kind) {
  return kind == TrafficKind::Poisson ? "poisson" : "lognormal";
}

inline std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MaximumLikelihood: return "ml";
    case EstimatorKind::SampleMean: return "mean";
    case EstimatorKind::ExactCount: return "exact";
  }
  return "unknown";
}

inline constexpr std::string_view table_csv_header = "n,N,M,l,k";

inline std::string table_csv(const std::vector<SequenceRow>& rows) {
  std::string out{table_csv_header};
  out += '\n';
  for (const SequenceRow& row : rows) {
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.tests);
    out += ',';
    out += std::to_string(row.first_group);
    out += ',';
    out += std::to_string(row.l);
    out += ',';
    out += std::to_string(row.k);
    out += '\n';
  }
  return out;
}

inline constexpr std::string_view sweep_csv_header =
    "eta,rho,n,d,T,model,estimator,trials,fn_rate,fn_stderr,fp_rate,fp_stderr,mean_tests";

inline std::string sweep_csv_row(const PopulationConfig& pop, const TrafficModel& model,
                                 const MeasurementConfig& meas, double eta,
                                 const SimResult& result) {
  std::string out;
  out += format_double(eta);
  out += ',';
  out += format_double(pop.rho());
  out += ',';
  out += std::to_string(pop.n);
  out += ',';
  out += std::to_string(pop.d);
  out += ',';
  out += std::to_string(meas.measurements_per_test);
  out += ',';
  out += model_name(model.kind);
  out += ',';
  out += estimator_name(meas.estimator);
  out += ',';
  out += std::to_string(result.trials);
  out += ',';
  out += format_double(result.fn_rate);
  out += ',';
  out += format_double(result.fn_stderr);
  out += ',';
  out += format_double(result.fp_rate);
  out += ',';
  out += format_double(result.fp_stderr);
  out += ',';
  out += format_double(result.mean_tests);
  out += '\n';
  return out;
}

inline std::string sweep_csv(const PopulationConfig& pop, const TrafficModel& model,
                             const MeasurementConfig& meas,
                             const std::vector<SweepPoint>& points) {
  std::string out{sweep_csv_header};
  out += '\n';
  for (const SweepPoint& point : points)
    out += sweep_csv_row(pop, model, meas, point.eta, point.result);
  return out;
}

inline std::string now_iso8601() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// Flat key=value record emitted alongside CSV files; re-running the command
// with the recorded parameters reproduces the CSV byte-exactly (the timestamp
// is informational only).
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string version{tool_version};
  std::string timestamp{now_iso8601()};

  std::string to_string() const {
    std::string out;
    out += "command=" + command + '\n';
    out += "tool_version=" + version + '\n';
    out += "timestamp=" + timestamp + '\n';
    out += "seed=" + std::to_string(seed) + '\n';
    for (const auto& [key, value] : parameters) out += key + '=' + value + '\n';
    return out;
  }
};

}  // namespace qgt
