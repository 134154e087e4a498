#pragma once

/*
 * Closed-form optimal nested test plans for quantitative group testing.
 *
 * A test on a group of items reports the exact number of defectives in the
 * group. Among nested plans (each refinement queries a proper subset of the
 * group it refines), the minimum worst-case number of tests N(n,d) and the
 * optimal first group size M(n,d) have closed forms in the frame/segment
 * coordinates (l,k) of the instance:
 *
 *   l = ceil(log2(n/d)) - 1          (frame index)
 *   k = ceil(n / 2^l) - d            (segment index, 1 <= k <= d)
 *   N(n,d) = (l+1)*d + k - 1
 *   M(n,d) = n - 2^l * (d + k - 1)
 *
 * valid for 1 <= d <= n/2; d > n/2 reduces by the symmetry
 * N(n,d) = N(n,n-d). All arithmetic is exact integer arithmetic; in
 * particular ceil(log2(n/d)) is the smallest j with d*2^j >= n, never a
 * floating-point logarithm.
 */

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgt {

// A quantitative group testing instance: n items of which d are defective.
struct ProblemInstance {
  std::int64_t n = 0;
  std::int64_t d = 0;

  bool valid() const { return n >= 1 && d >= 0 && d <= n; }
  // Closed-form queries require 1 <= d <= n-1.
  bool nontrivial() const { return valid() && d >= 1 && d <= n - 1; }
};

// Frame/segment coordinates of an instance with d <= n/2.
struct FrameCoords {
  std::int64_t l = 0;
  std::int64_t k = 0;
};

namespace detail {

// Smallest j >= 0 with d * 2^j >= n.
inline std::int64_t ceil_log2_ratio(std::int64_t n, std::int64_t d) {
  std::int64_t j = 0;
  std::int64_t reach = d;
  while (reach < n) {
    reach *= 2;
    ++j;
  }
  return j;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

[[noreturn]] inline void throw_invalid(const std::string& where, const ProblemInstance& inst,
                                       const std::string& why) {
  throw std::invalid_argument(where + ": (n=" + std::to_string(inst.n) +
                              ", d=" + std::to_string(inst.d) + ") " + why);
}

}  // namespace detail

inline FrameCoords frame_coords(const ProblemInstance& inst) {
  if (!inst.nontrivial())
    detail::throw_invalid("frame_coords", inst, "requires 1 <= d <= n-1");
  if (2 * inst.d > inst.n)
    detail::throw_invalid("frame_coords", inst, "requires d <= n/2");
  const std::int64_t l = detail::ceil_log2_ratio(inst.n, inst.d) - 1;
  const std::int64_t k = detail::ceil_div(inst.n, std::int64_t{1} << l) - inst.d;
  return {l, k};
}

// Minimum worst-case number of tests over nested plans. 0 for the trivial
// instances d = 0 and d = n; symmetric in d <-> n-d.
inline std::int64_t optimal_test_count(const ProblemInstance& inst) {
  if (!inst.valid())
    detail::throw_invalid("optimal_test_count", inst, "requires n >= 1 and 0 <= d <= n");
  if (inst.d == 0 || inst.d == inst.n) return 0;
  const std::int64_t dr = std::min(inst.d, inst.n - inst.d);
  const FrameCoords fc = frame_coords({inst.n, dr});
  return (fc.l + 1) * dr + fc.k - 1;
}

// Size of the first group tested under the optimal nested plan. Identifying
// the d defectives is the same task as identifying the n-d normal items, so
// d > n/2 uses the plan for (n, n-d). Always in [1, n-1].
inline std::int64_t optimal_first_group(const ProblemInstance& inst) {
  if (!inst.nontrivial())
    detail::throw_invalid("optimal_first_group", inst,
                          "no first group for trivial instances (d = 0 or d = n)");
  const std::int64_t dr = std::min(inst.d, inst.n - inst.d);
  const FrameCoords fc = frame_coords({inst.n, dr});
  const std::int64_t m = inst.n - (std::int64_t{1} << fc.l) * (dr + fc.k - 1);
  if (m < 1 || m > inst.n - 1)
    detail::throw_invalid("optimal_first_group", inst,
                          "computed group size " + std::to_string(m) + " out of [1, n-1]");
  return m;
}

// One row of the N/M sequence in n for fixed d.
struct SequenceRow {
  std::int64_t n = 0;
  std::int64_t tests = 0;        // N(n,d)
  std::int64_t first_group = 0;  // M(n,d)
  std::int64_t l = 0;
  std::int64_t k = 0;
};

// The per-n table for n = 2d .. n_max. Scanning it shows the frame/segment
// pattern: within frame l, N is constant on runs of 2^l consecutive n and
// steps by one between runs, while M cycles 1..2^l.
inline std::vector<SequenceRow> sequence_table(std::int64_t d, std::int64_t n_max) {
  if (d < 1) throw std::invalid_argument("sequence_table: d must be >= 1");
  if (n_max < 2 * d)
    throw std::invalid_argument("sequence_table: n_max must be >= 2d (got n_max=" +
                                std::to_string(n_max) + ", d=" + std::to_string(d) + ")");
  std::vector<SequenceRow> rows;
  rows.reserve(static_cast<std::size_t>(n_max - 2 * d + 1));
  for (std::int64_t n = 2 * d; n <= n_max; ++n) {
    const FrameCoords fc = frame_coords({n, d});
    rows.push_back({n, optimal_test_count({n, d}), optimal_first_group({n, d}), fc.l, fc.k});
  }
  return rows;
}

// N(n,d) split into a d*log2(n/d) part and a remainder bounded by d-1.
struct ScalingSplit {
  std::int64_t log_part = 0;  // ceil(log2(n/d)) * d
  std::int64_t residual = 0;  // in [0, d-1] for every n
};

inline ScalingSplit scaling_bound(const ProblemInstance& inst) {
  const FrameCoords fc = frame_coords(inst);
  return {(fc.l + 1) * inst.d, fc.k - 1};
}

}  // namespace qgt
