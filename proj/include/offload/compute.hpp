#pragma once

#include <optional>

#include "offload/errors.hpp"

namespace offload {

/// One unit of offloadable work.
struct Task {
  int device_index = 0;
  int type_index = 0;        // k in [0, K)
  double data_size = 0.0;    // bits
  double priority = 0.0;     // in the configured priority set
  double cpu_cycles = 0.0;   // cycles
};

struct ComputeParams {
  double f_loc = 100e6;       // UAV CPU frequency, Hz
  double f_edg = 500e6;       // edge CPU frequency, Hz
  double kappa_loc = 1e-16;   // J / (Hz^2 cycle)
  double kappa_edg = 1e-22;
  double t_a = 0.01;          // decision-making time, s
  double alpha = 0.5;         // delay weight
  double beta = 0.5;          // energy weight
};

/// cycles / freq, seconds.
double compute_time(double cycles, double freq);

/// kappa * freq^2 * cycles, joules.
double compute_energy(double kappa, double freq, double cycles);

/// priority * (alpha * delay + beta * energy).
double weighted_cost(double priority, double delay_s, double energy_j,
                     double alpha, double beta);

struct TaskOutcome {
  bool processed_locally = false;
  std::optional<int> target_node;  // q, set iff offloaded
  double total_delay = 0.0;        // seconds
  double total_energy = 0.0;       // joules
  double weighted_cost = 0.0;
};

struct HopTimes {
  double t_ns = 0.0;       // device -> uav secure tx time
  double t_ms = 0.0;       // uav -> target secure tx time (edge route)
  double t_a = 0.0;        // decision time
  double compute_t = 0.0;  // local or edge computation time
};

struct HopEnergies {
  double e_ns = 0.0;       // device transmit energy
  double e_ms = 0.0;       // uav transmit energy (edge route)
  double compute_e = 0.0;  // local or edge computation energy
};

/// Per-task totals. Exactly one of (process_locally, target) must select a
/// route; anything else throws RouteConflict. The edge branch charges
/// e_ms + compute_e as printed; charge_first_hop_on_offload adds e_ns there
/// as well.
TaskOutcome task_totals(const Task& task, bool process_locally,
                        std::optional<int> target, const HopTimes& times,
                        const HopEnergies& energies, const ComputeParams& params,
                        bool charge_first_hop_on_offload = false);

}  // namespace offload
