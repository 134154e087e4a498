#pragma once

/*
 * Adaptive executor for the optimal nested plan. It maintains a work list of
 * segments (contiguous index ranges with a known defective count) and
 * repeatedly queries the optimal-size prefix of the active segment through a
 * caller-supplied count oracle. Oracle answers are clamped into the feasible
 * window implied by the segment, so execution terminates and stays within the
 * worst-case test bound even when the oracle is a noisy estimator.
 */

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qgt/plan.hpp"

namespace qgt {

// Contiguous range of item indices with a known defective count.
struct Segment {
  std::int64_t start = 0;
  std::int64_t len = 0;
  std::int64_t defectives = 0;

  bool resolved() const { return defectives == 0 || defectives == len; }
};

// One executed test. The queried group is always a prefix of the parent
// segment it refines, and strictly smaller than it.
struct TraceStep {
  std::int64_t group_start = 0;
  std::int64_t group_len = 0;
  std::int64_t parent_start = 0;
  std::int64_t parent_len = 0;
  std::int64_t reported = 0;  // raw oracle answer
  std::int64_t count = 0;     // answer after clamping into the feasible window
  bool clamped = false;       // reported landed outside the window
};

struct PlanTrace {
  std::vector<TraceStep> steps;

  std::int64_t total_tests() const { return static_cast<std::int64_t>(steps.size()); }
};

struct ExecutionResult {
  std::vector<bool> defective;  // one label per item
  PlanTrace trace;
};

// Truthful count oracle over an explicit defective set, for verification runs.
class TruthfulOracle {
 public:
  TruthfulOracle(std::int64_t n, const std::vector<std::int64_t>& defective_items)
      : prefix_(static_cast<std::size_t>(n) + 1, 0) {
    std::vector<bool> member(static_cast<std::size_t>(n), false);
    for (std::int64_t item : defective_items) {
      if (item < 0 || item >= n)
        throw std::invalid_argument("TruthfulOracle: defective index out of range");
      if (member[static_cast<std::size_t>(item)])
        throw std::invalid_argument("TruthfulOracle: duplicate defective index");
      member[static_cast<std::size_t>(item)] = true;
    }
    for (std::int64_t i = 0; i < n; ++i)
      prefix_[static_cast<std::size_t>(i) + 1] =
          prefix_[static_cast<std::size_t>(i)] + (member[static_cast<std::size_t>(i)] ? 1 : 0);
  }

  std::int64_t operator()(std::int64_t start, std::int64_t len) const {
    return prefix_[static_cast<std::size_t>(start + len)] - prefix_[static_cast<std::size_t>(start)];
  }

  std::int64_t total() const { return prefix_.back(); }

 private:
  std::vector<std::int64_t> prefix_;  // prefix_[i] = defectives in [0, i)
};

// Identifies all defectives in a population of n items, d of them defective,
// by querying `oracle(start, len)` for the defective count of index ranges.
// The tested prefix is refined before the remainder, which keeps every query
// a proper subset of the segment it refines. With a truthful oracle the trace
// never exceeds optimal_test_count({n, d}).
template <typename CountOracle>
ExecutionResult execute_plan(std::int64_t n, std::int64_t d, CountOracle&& oracle) {
  if (n < 1 || d < 0 || d > n)
    throw std::invalid_argument("execute_plan: requires n >= 1 and 0 <= d <= n");

  ExecutionResult result;
  result.defective.assign(static_cast<std::size_t>(n), false);

  std::vector<Segment> work;
  work.push_back({0, n, d});
  while (!work.empty()) {
    const Segment seg = work.back();
    work.pop_back();
    if (seg.resolved()) {
      if (seg.defectives == seg.len)
        for (std::int64_t i = seg.start; i < seg.start + seg.len; ++i)
          result.defective[static_cast<std::size_t>(i)] = true;
      continue;
    }

    const std::int64_t m = optimal_first_group({seg.len, seg.defectives});
    if (m < 1 || m >= seg.len)
      throw std::logic_error("execute_plan: first group must be a proper nonempty prefix");

    const std::int64_t reported = oracle(seg.start, m);
    const std::int64_t lo = std::max<std::int64_t>(0, seg.defectives + m - seg.len);
    const std::int64_t hi = std::min(m, seg.defectives);
    const std::int64_t count = std::clamp(reported, lo, hi);
    result.trace.steps.push_back(
        {seg.start, m, seg.start, seg.len, reported, count, count != reported});

    work.push_back({seg.start + m, seg.len - m, seg.defectives - count});
    work.push_back({seg.start, m, count});  // tested prefix resolves first
  }
  return result;
}

// Plan execution without prior knowledge of d: the first test covers the
// whole population and reveals the total, then the standard plan runs.
// Uses 1 + optimal_test_count({n, d}) tests in the worst case, and exactly
// one test when the first answer is 0 or n.
template <typename CountOracle>
ExecutionResult execute_unknown_d(std::int64_t n, CountOracle&& oracle) {
  if (n < 1) throw std::invalid_argument("execute_unknown_d: requires n >= 1");
  const std::int64_t reported = oracle(0, n);
  const std::int64_t d = std::clamp<std::int64_t>(reported, 0, n);
  ExecutionResult result = execute_plan(n, d, oracle);
  const TraceStep first{0, n, 0, n, reported, d, d != reported};
  result.trace.steps.insert(result.trace.steps.begin(), first);
  return result;
}

}  // namespace qgt
