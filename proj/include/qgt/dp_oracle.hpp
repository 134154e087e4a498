#pragma once

/*
 * Independent ground truth for the closed forms in plan.hpp. dp_solve fills
 * the minimax recursion bottom-up:
 *
 *   N(n,d) = min_{m=1..n-1} max_{d1=max(0,d+m-n)..min(m,d)}
 *              1 + N(m,d1) + N(n-m,d-d1),     N(n,0) = N(n,n) = 0,
 *
 * and records the smallest minimizing m as M(n,d). m = n is excluded: that
 * test can only repeat the already-known total and nested plans require
 * proper subsets (the exclusion is asserted lossless in the test suite).
 *
 * Nothing in this header touches the closed forms; the cross-validation of
 * the two routes lives in the tests and in the `verify` CLI command.
 */

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgt/executor.hpp"

namespace qgt {

class DpTable {
 public:
  std::int64_t n_max() const { return n_max_; }

  // N(n,d): optimal worst-case number of tests.
  std::int64_t tests(std::int64_t n, std::int64_t d) const {
    check_range(n, d);
    return tests_[index(n, d)];
  }

  // M(n,d): smallest optimal first group size; defined for 1 <= d <= n-1.
  std::int64_t first_group(std::int64_t n, std::int64_t d) const {
    check_range(n, d);
    if (d == 0 || d == n)
      throw std::invalid_argument("DpTable::first_group: undefined for d = 0 or d = n");
    return first_[index(n, d)];
  }

 private:
  friend DpTable dp_solve(std::int64_t n_max);

  // Triangular layout over n = 0..n_max, d = 0..n.
  static std::size_t index(std::int64_t n, std::int64_t d) {
    return static_cast<std::size_t>(n * (n + 1) / 2 + d);
  }

  void check_range(std::int64_t n, std::int64_t d) const {
    if (n < 1 || n > n_max_ || d < 0 || d > n)
      throw std::out_of_range("DpTable: (n=" + std::to_string(n) + ", d=" + std::to_string(d) +
                              ") outside the solved table (n_max=" + std::to_string(n_max_) + ")");
  }

  std::int64_t n_max_ = 0;
  std::vector<std::int32_t> tests_;
  std::vector<std::int32_t> first_;
};

// Bottom-up fill of the full table for 1 <= n <= n_max. Deterministic and
// idempotent; n_max = 256 completes in seconds.
inline DpTable dp_solve(std::int64_t n_max) {
  if (n_max < 2) throw std::invalid_argument("dp_solve: n_max must be >= 2");

  DpTable table;
  table.n_max_ = n_max;
  const std::size_t total = DpTable::index(n_max, n_max) + 1;
  table.tests_.assign(total, 0);
  table.first_.assign(total, 0);

  for (std::int64_t n = 2; n <= n_max; ++n) {
    for (std::int64_t d = 1; d <= n - 1; ++d) {
      std::int32_t best = std::numeric_limits<std::int32_t>::max();
      std::int32_t best_m = 0;
      for (std::int64_t m = 1; m <= n - 1; ++m) {
        const std::int64_t lo = std::max<std::int64_t>(0, d + m - n);
        const std::int64_t hi = std::min(m, d);
        std::int32_t worst = 0;
        for (std::int64_t d1 = lo; d1 <= hi; ++d1) {
          const std::int32_t v = 1 + table.tests_[DpTable::index(m, d1)] +
                                 table.tests_[DpTable::index(n - m, d - d1)];
          if (v > worst) worst = v;
          if (worst >= best) break;  // cannot beat the incumbent
        }
        if (worst < best) {  // ascending m scan keeps the smallest minimizer
          best = worst;
          best_m = static_cast<std::int32_t>(m);
        }
      }
      table.tests_[DpTable::index(n, d)] = best;
      table.first_[DpTable::index(n, d)] = best_m;
    }
  }
  return table;
}

namespace detail {

// Lexicographic successor of a size-|c| combination drawn from [0, n).
inline bool next_combination(std::vector<std::int64_t>& c, std::int64_t n) {
  const std::int64_t size = static_cast<std::int64_t>(c.size());
  std::int64_t i = size - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == n - size + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (std::int64_t j = i + 1; j < size; ++j)
    c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace detail

struct WorstCaseReport {
  std::int64_t max_tests = 0;
  std::vector<std::int64_t> worst_set;  // one defective set attaining max_tests
  bool all_correct = true;
};

// Runs the executor with a truthful oracle for every size-d defective set and
// reports the worst trace length. C(n,d) grows fast, hence the cap.
inline WorstCaseReport verify_executor_worst_case(std::int64_t n, std::int64_t d,
                                                  std::int64_t enumeration_cap = 14) {
  if (d < 1 || d > n - 1)
    throw std::invalid_argument("verify_executor_worst_case: requires 1 <= d <= n-1");
  if (n > enumeration_cap)
    throw std::invalid_argument("verify_executor_worst_case: n=" + std::to_string(n) +
                                " exceeds the enumeration cap " + std::to_string(enumeration_cap));

  WorstCaseReport report;
  std::vector<std::int64_t> set(static_cast<std::size_t>(d));
  std::iota(set.begin(), set.end(), 0);
  do {
    const TruthfulOracle oracle(n, set);
    const ExecutionResult run = execute_plan(n, d, oracle);
    for (std::int64_t i = 0; i < n; ++i) {
      const bool truth = oracle(i, 1) == 1;
      if (run.defective[static_cast<std::size_t>(i)] != truth) report.all_correct = false;
    }
    if (run.trace.total_tests() > report.max_tests) {
      report.max_tests = run.trace.total_tests();
      report.worst_set = set;
    }
  } while (detail::next_combination(set, n));
  return report;
}

}  // namespace qgt
