#include <doctest.h>

#include <random>

#include "offload/compute.hpp"

using namespace offload;

TEST_CASE("compute time") {
  CHECK(compute_time(1e8, 1e8) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(compute_time(1e8, 5e8) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(compute_time(0.0, 7e7) == 0.0);
}

TEST_CASE("compute time times frequency recovers cycles") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e6, 1e9);
  for (int i = 0; i < 200; ++i) {
    const double cycles = u(rng), f = u(rng);
    CHECK(compute_time(cycles, f) * f == doctest::Approx(cycles).epsilon(1e-12));
  }
}

TEST_CASE("compute energy") {
  CHECK(compute_energy(1e-16, 1e8, 1e8) == doctest::Approx(1e8).epsilon(1e-12));
  CHECK(compute_energy(1e-22, 5e8, 1e8) == doctest::Approx(2.5e3).epsilon(1e-12));
  CHECK(compute_energy(1e-16, 1e8, 0.0) == 0.0);
  // Quadratic in frequency.
  CHECK(compute_energy(1e-20, 2e8, 5e7) ==
        doctest::Approx(4.0 * compute_energy(1e-20, 1e8, 5e7)).epsilon(1e-12));
}

TEST_CASE("weighted cost") {
  CHECK(weighted_cost(0.9, 2.0, 1.0, 0.5, 0.5) ==
        doctest::Approx(1.35).epsilon(1e-15));
  CHECK(weighted_cost(0.6, 0.0, 0.0, 0.5, 0.5) == 0.0);
  CHECK(weighted_cost(0.3, 1.0, 0.0, 1.0, 0.0) ==
        doctest::Approx(0.3).epsilon(1e-15));
  // Linear in delay/energy, homogeneous degree 1 in priority.
  const double base = weighted_cost(0.3, 1.5, 2.5, 0.5, 0.5);
  CHECK(weighted_cost(0.6, 1.5, 2.5, 0.5, 0.5) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK(weighted_cost(0.3, 3.0, 5.0, 0.5, 0.5) ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("task totals, local route") {
  Task t;
  t.data_size = 8e6;
  t.priority = 0.9;
  t.cpu_cycles = 1e8;
  ComputeParams cp;  // f_loc = 1e8, t_a = 0.01

  HopTimes times;
  times.t_ns = 1.0;
  times.t_a = cp.t_a;
  times.compute_t = 1.0;
  HopEnergies en;
  en.e_ns = 0.0316;
  en.compute_e = 2.0;

  const TaskOutcome out = task_totals(t, true, std::nullopt, times, en, cp);
  CHECK(out.processed_locally);
  CHECK_FALSE(out.target_node.has_value());
  CHECK(out.total_delay == doctest::Approx(2.01).epsilon(1e-15));
  CHECK(out.total_energy == doctest::Approx(2.0316).epsilon(1e-15));
  CHECK(out.weighted_cost ==
        doctest::Approx(0.9 * 0.5 * (2.01 + 2.0316)).epsilon(1e-12));
}

TEST_CASE("task totals, edge route") {
  Task t;
  t.priority = 0.6;
  ComputeParams cp;

  HopTimes times;
  times.t_ns = 1.0;
  times.t_ms = 0.5;
  times.t_a = 0.01;
  times.compute_t = 0.2;
  HopEnergies en;
  en.e_ns = 0.03;
  en.e_ms = 0.1;
  en.compute_e = 0.4;

  SUBCASE("first hop energy excluded by default") {
    const TaskOutcome out = task_totals(t, false, 2, times, en, cp);
    CHECK(out.target_node == 2);
    CHECK(out.total_delay == doctest::Approx(1.71).epsilon(1e-15));
    CHECK(out.total_energy == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("flag charges the first hop too") {
    const TaskOutcome out = task_totals(t, false, 2, times, en, cp, true);
    CHECK(out.total_energy == doctest::Approx(0.53).epsilon(1e-15));
  }
}

TEST_CASE("route conflict") {
  Task t;
  ComputeParams cp;
  CHECK_THROWS_AS(task_totals(t, true, 1, {}, {}, cp), RouteConflict);
  CHECK_THROWS_AS(task_totals(t, false, std::nullopt, {}, {}, cp), RouteConflict);
}

TEST_CASE("task totals match naive recomputation on random routes") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  ComputeParams cp;
  for (int i = 0; i < 500; ++i) {
    Task t;
    t.priority = 0.3 * (1 + i % 3);
    HopTimes times{u(rng), u(rng), cp.t_a, u(rng)};
    HopEnergies en{u(rng), u(rng), u(rng)};
    const bool local = i % 2 == 0;
    const TaskOutcome out =
        task_totals(t, local, local ? std::nullopt : std::optional<int>(0),
                    times, en, cp);
    double delay, energy;
    if (local) {
      delay = times.t_ns + times.t_a + times.compute_t;
      energy = en.e_ns + en.compute_e;
    } else {
      delay = times.t_ns + times.t_ms + times.t_a + times.compute_t;
      energy = en.e_ms + en.compute_e;
    }
    CHECK(out.total_delay == doctest::Approx(delay).epsilon(1e-12));
    CHECK(out.total_energy == doctest::Approx(energy).epsilon(1e-12));
    CHECK(out.weighted_cost ==
          doctest::Approx(t.priority * (cp.alpha * delay + cp.beta * energy))
              .epsilon(1e-12));
  }
}
