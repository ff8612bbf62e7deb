#include "offload/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace offload {

namespace {

struct Best {
  long long value = 0;   // priority sum on the value grid
  long long weight = 0;  // data size sum on the weight grid, bits
};

// Higher value wins; on equal value the lighter selection wins. Integer
// sums make the comparison exact and order-independent.
bool better(const Best& a, const Best& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.weight < b.weight;
}

}  // namespace

KnapsackResult select_local_candidates(std::span<const Task> tasks,
                                       double capacity_bits) {
  const std::size_t n = tasks.size();
  long cap = capacity_bits > 0.0
                 ? static_cast<long>(std::floor(capacity_bits / kKnapsackBucketBits))
                 : 0;

  std::vector<long> bucket_w(n);
  std::vector<long long> value_q(n), weight_q(n);
  long total_w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bucket_w[i] = static_cast<long>(std::ceil(tasks[i].data_size / kKnapsackBucketBits));
    total_w += bucket_w[i];
    value_q[i] = std::llround(tasks[i].priority / kKnapsackValueQuantum);
    weight_q[i] = std::llround(tasks[i].data_size / kKnapsackWeightQuantum);
  }
  // Budget beyond the total item weight changes nothing; clamping keeps the
  // table small when the capacity is effectively unbounded.
  cap = std::min(cap, total_w);

  // Suffix DP over bucketed weights: dp[i][w] = best (value, weight) pair
  // using items i..n-1 with bucket budget w. The include branch is preferred
  // on full ties so the greedy reconstruction below yields the
  // lexicographically smallest selection.
  std::vector<std::vector<Best>> dp(n + 1, std::vector<Best>(cap + 1));
  for (std::size_t i = n; i-- > 0;) {
    for (long w = 0; w <= cap; ++w) {
      Best skip = dp[i + 1][w];
      Best chosen = skip;
      if (bucket_w[i] <= w) {
        const Best& rest = dp[i + 1][w - bucket_w[i]];
        Best incl{value_q[i] + rest.value, weight_q[i] + rest.weight};
        if (!better(skip, incl)) chosen = incl;
      }
      dp[i][w] = chosen;
    }
  }

  KnapsackResult result;
  result.selected.assign(n, false);
  long w = cap;
  for (std::size_t i = 0; i < n; ++i) {
    if (bucket_w[i] <= w) {
      const Best& rest = dp[i + 1][w - bucket_w[i]];
      const Best incl{value_q[i] + rest.value, weight_q[i] + rest.weight};
      if (incl.value == dp[i][w].value && incl.weight == dp[i][w].weight) {
        result.selected[i] = true;
        w -= bucket_w[i];
      }
    }
  }
  // Reported totals accumulate from the highest index down; reconstruction
  // order must not change the reported floating-point sums.
  for (std::size_t i = n; i-- > 0;) {
    if (result.selected[i]) {
      result.total_value = tasks[i].priority + result.total_value;
      result.total_weight = tasks[i].data_size + result.total_weight;
    }
  }
  return result;
}

}  // namespace offload
