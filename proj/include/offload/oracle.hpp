#pragma once

#include <functional>
#include <span>
#include <vector>

#include "offload/env.hpp"

namespace offload {

struct OracleResult {
  std::vector<int> best_joint_action;
  double best_cost = 0.0;
  long evaluated_count = 0;
  long feasible_count = 0;
};

/// Straight-line re-evaluation of the slot cost (including the penalty
/// accounting) for the given joint action on an environment snapshot. This
/// is an independent code path from Environment::step and the channel /
/// compute modules: it rebuilds every rate and energy directly from the
/// topology and configuration.
double cost_recompute(const Environment& snapshot,
                      const std::vector<int>& actions);

/// Exhaustive minimization of the per-slot cost over all (2^K)^M joint
/// combinations on a cloned snapshot. Feasible = every component unmasked;
/// ties go to the lexicographically smallest joint action. Throws
/// InstanceTooLarge above 10^6 candidates.
OracleResult optimal_joint_action(const Environment& snapshot);

/// Exact subset enumeration for the knapsack module, sharing only the
/// 1-kilobit weight-rounding convention. Throws InstanceTooLarge above 20
/// tasks.
KnapsackResult knapsack_exhaustive(std::span<const Task> tasks,
                                   double capacity_bits);

using SlotPolicy =
    std::function<std::vector<int>(const Environment&)>;

struct GapRow {
  std::uint64_t seed = 0;
  int slot = 0;
  double policy_cost = 0.0;
  double oracle_cost = 0.0;
  double ratio = 1.0;
};

struct GapReport {
  std::vector<GapRow> rows;
  double mean_ratio = 1.0;
};

/// Mean per-slot policy_cost / oracle_cost over the given seeds, with
/// identical task draws on both sides. Slots where both costs are zero count
/// as ratio 1.
GapReport optimality_gap(const SlotPolicy& policy, const EnvConfig& cfg,
                         std::span<const std::uint64_t> seeds, int slots);

}  // namespace offload
