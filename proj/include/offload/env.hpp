#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "offload/channel.hpp"
#include "offload/compute.hpp"
#include "offload/knapsack.hpp"
#include "offload/topology.hpp"

namespace offload {

/// Constraint / event ids tracked by the environment.
enum Violation : int {
  kDelayC1 = 0,        // task delay above t_th (penalized)
  kSecrecyN2M_C2,      // device->uav secrecy below R_min (penalized)
  kSecrecyM2Q_C3,      // uav->target secrecy below R_min (penalized)
  kEnergyTxDevC4,      // device transmit energy above bound
  kEnergyTxUavC5,      // uav transmit energy above bound
  kEnergyProcLocC6,    // local processing energy above bound
  kEnergyProcEdgC7,    // edge processing energy above bound
  kCapacityC9,         // local data volume above UAV capacity
  kMaskConversion,     // masked selection converted to fallback (penalized)
  kViolationCount
};

struct GaussianSpec {
  double mean = 0.0;
  double stddev = 0.0;
};

struct EnvConfig {
  ChannelParams channel;
  ComputeParams compute;

  int n_devices = 10;   // N
  int n_uavs = 4;       // M
  int n_task_types = 3; // K
  Bounds3D bounds;

  double battery_init = 3e4;       // joules
  double capacity = 24e6;          // C_m, bits (3 MB)
  double delay_threshold = 5.0;    // t_th, seconds
  double min_secrecy = 1e6;        // R_min, bits/s
  double e_max_trans_device = 5.0;   // joules
  double e_max_trans_uav = 20.0;     // joules
  double e_max_proc_uav = 3e4;       // joules
  double e_max_proc_edge = 3e4;      // joules

  int slots_per_episode = 100;
  GaussianSpec data_size_bits{8e6, 0.8e6};     // N(1, 0.1) MB, 1 MB = 8e6 bits
  GaussianSpec cpu_cycles{1e8, 1e7};           // N(100, 10) Megacycles
  std::vector<double> priority_set{0.3, 0.6, 0.9};
  double violation_penalty = 100.0;

  bool charge_first_hop_on_offload = false;
  bool knapsack_gates_mask = false;
  bool resample_topology_each_episode = true;

  int n_actions() const { return 1 << n_task_types; }
};

/// Per-UAV MDP observation: battery, free capacity, per-type task features,
/// knapsack selection flags and the feasibility mask over all 2^K
/// combinations.
struct UavObservation {
  double battery = 0.0;
  double capacity_free = 0.0;
  std::vector<double> type_data_size;  // per type, bits (0 if absent)
  std::vector<double> type_priority;   // per type (0 if absent)
  std::vector<std::uint8_t> knapsack_flags;  // R_k per type
  std::vector<std::uint8_t> mask;            // 2^K feasibility flags
};

/// Best second-hop target for a UAV: the index in 0..M-1 (other UAVs) or M
/// (the MEC server) maximizing the LoS-only secrecy rate, ties preferring
/// the MEC server then the lowest UAV index. The bandwidth share is M.
/// Throws NoSecureTarget when every candidate sits below min_secrecy.
int select_offload_target(int uav, const NetworkTopology& topo,
                          const ChannelParams& ch, double min_secrecy);

/// Fixed-length network input of size 2 + 3K:
/// [battery/battery_init, capacity_free/capacity,
///  then per type: D_k / (3 mean_D), p_k, R_k].
std::vector<double> encode_state(const UavObservation& obs, const EnvConfig& cfg);

struct StepOutcome {
  double global_reward = 0.0;
  std::vector<double> per_uav_cost;
  double total_delay = 0.0;
  double total_energy = 0.0;
  std::array<long, kViolationCount> violations{};
  bool done = false;

  long penalized_violations() const {
    return violations[kDelayC1] + violations[kSecrecyN2M_C2] +
           violations[kSecrecyM2Q_C3] + violations[kMaskConversion];
  }
};

/// The multi-agent MDP. Value semantics: copying an Environment clones the
/// full episode state, which is how the oracle evaluates candidate actions
/// on a snapshot. A single instance must be stepped from one thread only.
class Environment {
 public:
  explicit Environment(const EnvConfig& cfg);

  /// Fresh episode: topology (re)sampled, batteries full, first slot's tasks
  /// drawn, knapsack flags and masks built. Deterministic under seed.
  std::vector<UavObservation> reset(std::uint64_t seed);

  /// Advance one slot. actions[m] is UAV m's combination index; bit k = 1
  /// means type-k tasks are processed locally. With enforce_mask a masked
  /// index throws MaskViolation; otherwise it is converted to the all-offload
  /// fallback and penalized.
  StepOutcome step(const std::vector<int>& actions, bool enforce_mask = true);

  const std::vector<UavObservation>& observations() const { return obs_; }
  const EnvConfig& config() const { return cfg_; }
  const NetworkTopology& topology() const { return topo_; }
  const std::vector<Task>& current_tasks() const { return tasks_; }
  double battery(int uav) const { return batteries_[uav]; }
  int slot() const { return slot_; }
  bool done() const { return done_; }

  /// Offload target chosen for UAV m this episode (index in 0..M-1 for UAVs,
  /// M for the MEC server), and its M2Q secrecy rate.
  int offload_target(int uav) const { return targets_[uav]; }
  double target_secrecy(int uav) const { return target_secrecy_[uav]; }
  double device_secrecy(int device) const { return device_secrecy_[device]; }

  /// Count of masked actions that were actually executed; stays zero by
  /// construction and is asserted by the acceptance suite.
  long executed_masked_actions() const { return executed_masked_; }

 private:
  void sample_tasks();
  void precompute_links();
  void rebuild_observations();
  std::vector<std::uint8_t> build_mask(int uav) const;

  EnvConfig cfg_;
  NetworkTopology topo_;
  std::vector<double> batteries_;
  std::vector<Task> tasks_;             // one per device, current slot
  std::vector<double> device_secrecy_;  // R_ns per device, bits/s
  std::vector<int> targets_;            // per uav, chosen q
  std::vector<double> target_secrecy_;  // R_ms per uav, bits/s
  std::vector<UavObservation> obs_;
  std::mt19937_64 rng_;
  std::uint64_t episode_seed_ = 0;
  int slot_ = 0;
  bool done_ = true;
  long executed_masked_ = 0;
};

}  // namespace offload
