#include <doctest.h>

#include <random>

#include "offload/knapsack.hpp"
#include "offload/oracle.hpp"

using namespace offload;

namespace {

Task item(double mb, double priority) {
  Task t;
  t.data_size = mb * 8e6;
  t.priority = priority;
  t.cpu_cycles = 1.0;
  return t;
}

}  // namespace

TEST_CASE("reference instance") {
  const std::vector<Task> tasks = {item(1.0, 0.9), item(1.1, 0.6),
                                   item(1.2, 0.3), item(0.9, 0.9)};
  const KnapsackResult res = select_local_candidates(tasks, 3.0 * 8e6);
  CHECK(res.selected == std::vector<bool>{true, true, false, true});
  CHECK(res.total_value == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(res.total_weight == doctest::Approx(3.0 * 8e6).epsilon(1e-12));
}

TEST_CASE("zero capacity selects nothing") {
  const std::vector<Task> tasks = {item(1.0, 0.9), item(0.5, 0.3)};
  const KnapsackResult res = select_local_candidates(tasks, 0.0);
  CHECK(res.selected == std::vector<bool>{false, false});
  CHECK(res.total_value == 0.0);
  CHECK(res.total_weight == 0.0);
}

TEST_CASE("fitting singleton is selected") {
  const std::vector<Task> tasks = {item(1.0, 0.3)};
  const KnapsackResult res = select_local_candidates(tasks, 2.0 * 8e6);
  CHECK(res.selected == std::vector<bool>{true});
  CHECK(res.total_value == doctest::Approx(0.3));
}

TEST_CASE("dp equals exhaustive enumeration on random instances") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n_dist(1, 15);
  std::uniform_real_distribution<double> size_mb(0.1, 2.0);
  std::uniform_int_distribution<int> pri(0, 2);
  std::uniform_real_distribution<double> cap_mb(0.0, 8.0);
  const double pri_set[] = {0.3, 0.6, 0.9};

  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Task> tasks(n_dist(rng));
    for (Task& t : tasks) t = item(size_mb(rng), pri_set[pri(rng)]);
    const double cap = cap_mb(rng) * 8e6;

    const KnapsackResult dp = select_local_candidates(tasks, cap);
    const KnapsackResult ex = knapsack_exhaustive(tasks, cap);
    CHECK(dp.total_value == doctest::Approx(ex.total_value).epsilon(1e-12));
    CHECK(dp.selected == ex.selected);
    CHECK(dp.total_weight <= cap);
  }
}

TEST_CASE("capacity monotonicity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> size_mb(0.1, 2.0);
  std::vector<Task> tasks(10);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    tasks[i] = item(size_mb(rng), 0.3 * (1 + i % 3));
  }
  double prev = -1.0;
  for (double cap_mb = 0.0; cap_mb <= 12.0; cap_mb += 0.5) {
    const KnapsackResult res = select_local_candidates(tasks, cap_mb * 8e6);
    CHECK(res.total_value >= prev - 1e-12);
    CHECK(res.total_weight <= cap_mb * 8e6);
    prev = res.total_value;
  }
}

TEST_CASE("value ties prefer smaller weight then earliest index") {
  // Equal priorities, distinct sizes: two items fit either way.
  const std::vector<Task> tasks = {item(1.0, 0.9), item(0.8, 0.9),
                                   item(0.9, 0.9)};
  const KnapsackResult res = select_local_candidates(tasks, 1.8 * 8e6);
  // Best value 1.8 achieved by {1,2} (1.7 MB) which beats {0,1} (1.8 MB).
  CHECK(res.selected == std::vector<bool>{false, true, true});

  // Exact weight tie resolved lexicographically (earlier index included).
  const std::vector<Task> tie = {item(1.0, 0.6), item(1.0, 0.6)};
  const KnapsackResult res2 = select_local_candidates(tie, 1.0 * 8e6);
  CHECK(res2.selected == std::vector<bool>{true, false});
}
