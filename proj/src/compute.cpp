#include "offload/compute.hpp"

namespace offload {

double compute_time(double cycles, double freq) { return cycles / freq; }

double compute_energy(double kappa, double freq, double cycles) {
  return kappa * freq * freq * cycles;
}

double weighted_cost(double priority, double delay_s, double energy_j,
                     double alpha, double beta) {
  return priority * (alpha * delay_s + beta * energy_j);
}

TaskOutcome task_totals(const Task& task, bool process_locally,
                        std::optional<int> target, const HopTimes& times,
                        const HopEnergies& energies, const ComputeParams& params,
                        bool charge_first_hop_on_offload) {
  if (process_locally == target.has_value()) {
    throw RouteConflict("task_totals: exactly one route must be selected");
  }
  TaskOutcome out;
  out.processed_locally = process_locally;
  out.target_node = target;
  if (process_locally) {
    out.total_delay = times.t_ns + times.t_a + times.compute_t;
    out.total_energy = energies.e_ns + energies.compute_e;
  } else {
    out.total_delay = times.t_ns + times.t_ms + times.t_a + times.compute_t;
    out.total_energy = energies.e_ms + energies.compute_e;
    if (charge_first_hop_on_offload) out.total_energy += energies.e_ns;
  }
  out.weighted_cost = weighted_cost(task.priority, out.total_delay,
                                    out.total_energy, params.alpha, params.beta);
  return out;
}

}  // namespace offload
