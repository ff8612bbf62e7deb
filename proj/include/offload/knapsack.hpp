#pragma once

#include <span>
#include <vector>

#include "offload/compute.hpp"

namespace offload {

struct KnapsackResult {
  std::vector<bool> selected;     // one flag per task
  double total_value = 0.0;       // sum of selected priorities
  double total_weight = 0.0;      // sum of selected data sizes, bits
};

/// Item weights conservatively rounded up to 1-kilobit buckets; data sizes
/// are continuous draws so rounding up preserves feasibility.
inline constexpr double kKnapsackBucketBits = 1000.0;

/// Objective and tie-break sums are compared on fixed integer grids so the
/// ranking of selections is a total order independent of summation order.
/// Floating-point addition is not associative, so comparing accumulated
/// doubles directly would make the optimum depend on the traversal.
inline constexpr double kKnapsackValueQuantum = 1e-9;   // priority units
inline constexpr double kKnapsackWeightQuantum = 1e-6;  // bits

/// 0/1 knapsack maximizing total priority subject to total data size below
/// capacity, by dynamic programming over bucketed weights. Among value-optimal
/// solutions prefers the smaller total weight, then the lexicographically
/// smallest selection (earlier indices included first).
KnapsackResult select_local_candidates(std::span<const Task> tasks,
                                       double capacity_bits);

}  // namespace offload
