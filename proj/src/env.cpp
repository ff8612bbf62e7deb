#include "offload/env.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "offload/rng.hpp"

namespace offload {

namespace {

double clamp_gaussian(std::mt19937_64& rng, const GaussianSpec& spec) {
  std::normal_distribution<double> dist(spec.mean, spec.stddev);
  double x = dist(rng);
  x = std::clamp(x, spec.mean - 3.0 * spec.stddev, spec.mean + 3.0 * spec.stddev);
  return std::max(x, 1.0);
}

// Second hop: LoS-only propagation, bandwidth shared across M nodes. Returns
// {target index (M = MEC), secrecy rate}; ties prefer MEC then lowest index.
std::pair<int, double> best_second_hop(int m, const NetworkTopology& topo,
                                       const ChannelParams& ch) {
  const int m_count = static_cast<int>(topo.uav_positions.size());
  const Position3D& from = topo.uav_positions[m];
  const double g_eve =
      channel_gain(0.0, distance(from, topo.eve_position), ch, /*los_only=*/true);
  const double r_eve =
      link_rate(ch.bandwidth, m_count, ch.p_uav, g_eve, ch.noise_power);

  auto secrecy_to = [&](const Position3D& to) {
    const double g = channel_gain(0.0, distance(from, to), ch, true);
    const double r = link_rate(ch.bandwidth, m_count, ch.p_uav, g, ch.noise_power);
    return secrecy_rate(r, r_eve);
  };

  int best_q = m_count;
  double best = secrecy_to(topo.mec_position);
  for (int q = 0; q < m_count; ++q) {
    if (q == m) continue;
    const double s = secrecy_to(topo.uav_positions[q]);
    if (s > best) {
      best = s;
      best_q = q;
    }
  }
  return {best_q, best};
}

}  // namespace

int select_offload_target(int uav, const NetworkTopology& topo,
                          const ChannelParams& ch, double min_secrecy) {
  const auto [q, s] = best_second_hop(uav, topo, ch);
  if (s < min_secrecy) {
    throw NoSecureTarget("select_offload_target: no candidate meets the "
                         "minimum secrecy rate");
  }
  return q;
}

std::vector<double> encode_state(const UavObservation& obs, const EnvConfig& cfg) {
  std::vector<double> feat;
  feat.reserve(2 + 3 * cfg.n_task_types);
  feat.push_back(obs.battery / cfg.battery_init);
  feat.push_back(cfg.capacity > 0.0 ? obs.capacity_free / cfg.capacity : 0.0);
  for (int k = 0; k < cfg.n_task_types; ++k) {
    feat.push_back(obs.type_data_size[k] / (3.0 * cfg.data_size_bits.mean));
    feat.push_back(obs.type_priority[k]);
    feat.push_back(static_cast<double>(obs.knapsack_flags[k]));
  }
  return feat;
}

Environment::Environment(const EnvConfig& cfg) : cfg_(cfg) {}

std::vector<UavObservation> Environment::reset(std::uint64_t seed) {
  episode_seed_ = seed;
  if (topo_.device_positions.empty() || cfg_.resample_topology_each_episode) {
    topo_ = generate_topology(mix_seed(seed, 0x7075617674ULL), cfg_.n_devices,
                              cfg_.n_uavs, cfg_.bounds);
  }
  rng_.seed(mix_seed(seed, 0x7461736b73ULL));
  batteries_.assign(cfg_.n_uavs, cfg_.battery_init);
  slot_ = 0;
  done_ = false;
  executed_masked_ = 0;
  precompute_links();
  sample_tasks();
  rebuild_observations();
  return obs_;
}

void Environment::precompute_links() {
  const ChannelParams& ch = cfg_.channel;
  const int m_count = cfg_.n_uavs;

  device_secrecy_.assign(cfg_.n_devices, 0.0);
  for (int n = 0; n < cfg_.n_devices; ++n) {
    const int m = topo_.association[n];
    const int share = std::max(topo_.devices_per_uav[m], 1);
    const Position3D& dev = topo_.device_positions[n];

    const Position3D& uav = topo_.uav_positions[m];
    const double g_m =
        channel_gain(los_probability(elevation_angle_deg(dev, uav), ch),
                     distance(dev, uav), ch);
    const double r_legit =
        link_rate(ch.bandwidth, share, ch.p_device, g_m, ch.noise_power);

    const Position3D& eve = topo_.eve_position;
    const double g_e =
        channel_gain(los_probability(elevation_angle_deg(dev, eve), ch),
                     distance(dev, eve), ch);
    const double r_eve =
        link_rate(ch.bandwidth, share, ch.p_device, g_e, ch.noise_power);

    device_secrecy_[n] = secrecy_rate(r_legit, r_eve);
  }

  targets_.assign(m_count, m_count);
  target_secrecy_.assign(m_count, 0.0);
  for (int m = 0; m < m_count; ++m) {
    const auto [q, s] = best_second_hop(m, topo_, ch);
    targets_[m] = q;
    target_secrecy_[m] = s;
  }
}

void Environment::sample_tasks() {
  tasks_.assign(cfg_.n_devices, Task{});
  std::uniform_int_distribution<int> type_dist(0, cfg_.n_task_types - 1);
  std::uniform_int_distribution<std::size_t> pri_dist(0, cfg_.priority_set.size() - 1);
  for (int n = 0; n < cfg_.n_devices; ++n) {
    Task& t = tasks_[n];
    t.device_index = n;
    t.type_index = type_dist(rng_);
    t.data_size = clamp_gaussian(rng_, cfg_.data_size_bits);
    t.priority = cfg_.priority_set[pri_dist(rng_)];
    t.cpu_cycles = clamp_gaussian(rng_, cfg_.cpu_cycles);
  }
}

std::vector<std::uint8_t> Environment::build_mask(int uav) const {
  const int n_actions = cfg_.n_actions();
  const ComputeParams& cp = cfg_.compute;
  std::vector<std::uint8_t> mask(n_actions, 0);

  const UavObservation& obs = obs_[uav];
  bool any_feasible = false;
  for (int c = 0; c < n_actions; ++c) {
    bool ok = true;

    // C9: local data volume within capacity.
    double local_bits = 0.0;
    for (int k = 0; k < cfg_.n_task_types; ++k) {
      if (c >> k & 1) local_bits += obs.type_data_size[k];
    }
    if (local_bits > obs.capacity_free) ok = false;

    if (ok && cfg_.knapsack_gates_mask) {
      for (int k = 0; k < cfg_.n_task_types && ok; ++k) {
        if ((c >> k & 1) && obs.type_data_size[k] > 0.0 && !obs.knapsack_flags[k]) {
          ok = false;
        }
      }
    }

    double combo_energy = 0.0;
    for (int n = 0; n < cfg_.n_devices && ok; ++n) {
      if (topo_.association[n] != uav) continue;
      const Task& t = tasks_[n];
      // C2: the first hop is used by every combination.
      if (device_secrecy_[n] < cfg_.min_secrecy || device_secrecy_[n] <= 0.0) {
        ok = false;
        break;
      }
      if (c >> t.type_index & 1) {
        const double e_loc = compute_energy(cp.kappa_loc, cp.f_loc, t.cpu_cycles);
        if (e_loc > cfg_.e_max_proc_uav) ok = false;  // C6
        combo_energy += e_loc;
      } else {
        const double sec = target_secrecy_[uav];
        if (sec <= 0.0 || sec < cfg_.min_secrecy) {  // C3
          ok = false;
          break;
        }
        const double e_ms = tx_energy(cfg_.channel.p_uav, t.data_size / sec);
        if (e_ms > cfg_.e_max_trans_uav) ok = false;  // C5
        combo_energy += e_ms;
      }
    }
    if (ok && combo_energy > batteries_[uav]) ok = false;

    mask[c] = ok ? 1 : 0;
    any_feasible = any_feasible || ok;
  }

  // The MDP must always offer an action: force the all-offload combination.
  if (!any_feasible) mask[0] = 1;
  return mask;
}

void Environment::rebuild_observations() {
  const int K = cfg_.n_task_types;
  obs_.assign(cfg_.n_uavs, UavObservation{});
  for (int m = 0; m < cfg_.n_uavs; ++m) {
    UavObservation& o = obs_[m];
    o.battery = batteries_[m];
    o.capacity_free = cfg_.capacity;
    o.type_data_size.assign(K, 0.0);
    o.type_priority.assign(K, 0.0);
    o.knapsack_flags.assign(K, 0);
  }
  std::vector<std::vector<double>> pri_sum(cfg_.n_uavs, std::vector<double>(K, 0.0));
  for (const Task& t : tasks_) {
    const int m = topo_.association[t.device_index];
    UavObservation& o = obs_[m];
    o.type_data_size[t.type_index] += t.data_size;
    o.type_priority[t.type_index] = std::max(o.type_priority[t.type_index], t.priority);
    pri_sum[m][t.type_index] += t.priority;
  }
  for (int m = 0; m < cfg_.n_uavs; ++m) {
    UavObservation& o = obs_[m];
    std::vector<Task> items(K);
    for (int k = 0; k < K; ++k) {
      items[k].type_index = k;
      items[k].data_size = o.type_data_size[k];
      items[k].priority = pri_sum[m][k];
      items[k].cpu_cycles = 1.0;
    }
    const KnapsackResult ks = select_local_candidates(items, o.capacity_free);
    for (int k = 0; k < K; ++k) {
      o.knapsack_flags[k] = ks.selected[k] && o.type_data_size[k] > 0.0 ? 1 : 0;
    }
  }
  for (int m = 0; m < cfg_.n_uavs; ++m) {
    obs_[m].mask = build_mask(m);
  }
}

StepOutcome Environment::step(const std::vector<int>& actions, bool enforce_mask) {
  if (done_) throw std::logic_error("Environment::step: episode finished");
  if (static_cast<int>(actions.size()) != cfg_.n_uavs) {
    throw DimensionMismatch("Environment::step: one action per UAV required");
  }

  StepOutcome out;
  out.per_uav_cost.assign(cfg_.n_uavs, 0.0);

  std::vector<int> resolved(actions);
  for (int m = 0; m < cfg_.n_uavs; ++m) {
    const int a = resolved[m];
    if (a < 0 || a >= cfg_.n_actions()) {
      throw MaskViolation("Environment::step: action index out of range");
    }
    if (!obs_[m].mask[a]) {
      if (enforce_mask) {
        throw MaskViolation("Environment::step: masked action submitted");
      }
      resolved[m] = 0;  // all-offload fallback
      ++out.violations[kMaskConversion];
      // The fallback itself may be infeasible; executing it then counts as a
      // genuinely executed masked action (only reachable with enforcement off).
      if (!obs_[m].mask[0]) ++executed_masked_;
    }
  }

  const ComputeParams& cp = cfg_.compute;
  std::vector<double> uav_energy_draw(cfg_.n_uavs, 0.0);
  std::vector<double> uav_local_bits(cfg_.n_uavs, 0.0);
  double total_cost = 0.0;

  for (const Task& t : tasks_) {
    const int m = topo_.association[t.device_index];
    const bool local = resolved[m] >> t.type_index & 1;

    const double r_ns = device_secrecy_[t.device_index];
    if (r_ns <= 0.0) {
      // The first hop cannot carry the task securely at all.
      ++out.violations[kSecrecyN2M_C2];
      continue;
    }
    if (r_ns < cfg_.min_secrecy) ++out.violations[kSecrecyN2M_C2];

    HopTimes times;
    HopEnergies energies;
    times.t_ns = secure_tx_time(t.data_size, r_ns);
    times.t_a = cp.t_a;
    energies.e_ns = tx_energy(cfg_.channel.p_device, times.t_ns);
    if (energies.e_ns > cfg_.e_max_trans_device) ++out.violations[kEnergyTxDevC4];

    TaskOutcome result;
    if (local) {
      times.compute_t = compute_time(t.cpu_cycles, cp.f_loc);
      energies.compute_e = compute_energy(cp.kappa_loc, cp.f_loc, t.cpu_cycles);
      if (energies.compute_e > cfg_.e_max_proc_uav) ++out.violations[kEnergyProcLocC6];
      result = task_totals(t, true, std::nullopt, times, energies, cp,
                           cfg_.charge_first_hop_on_offload);
      uav_energy_draw[m] += energies.compute_e;
      uav_local_bits[m] += t.data_size;
    } else {
      const double r_ms = target_secrecy_[m];
      if (r_ms <= 0.0) {
        ++out.violations[kSecrecyM2Q_C3];
        continue;
      }
      if (r_ms < cfg_.min_secrecy) ++out.violations[kSecrecyM2Q_C3];
      const int q = targets_[m];
      const bool to_mec = q == cfg_.n_uavs;
      times.t_ms = secure_tx_time(t.data_size, r_ms);
      energies.e_ms = tx_energy(cfg_.channel.p_uav, times.t_ms);
      if (energies.e_ms > cfg_.e_max_trans_uav) ++out.violations[kEnergyTxUavC5];
      const double f = to_mec ? cp.f_edg : cp.f_loc;
      const double kappa = to_mec ? cp.kappa_edg : cp.kappa_loc;
      times.compute_t = compute_time(t.cpu_cycles, f);
      energies.compute_e = compute_energy(kappa, f, t.cpu_cycles);
      const double proc_bound = to_mec ? cfg_.e_max_proc_edge : cfg_.e_max_proc_uav;
      if (energies.compute_e > proc_bound) ++out.violations[kEnergyProcEdgC7];
      result = task_totals(t, false, q, times, energies, cp,
                           cfg_.charge_first_hop_on_offload);
      uav_energy_draw[m] += energies.e_ms;
    }

    if (result.total_delay > cfg_.delay_threshold) ++out.violations[kDelayC1];
    out.total_delay += result.total_delay;
    out.total_energy += result.total_energy;
    out.per_uav_cost[m] += result.weighted_cost;
    total_cost += result.weighted_cost;
  }

  for (int m = 0; m < cfg_.n_uavs; ++m) {
    if (uav_local_bits[m] > cfg_.capacity) ++out.violations[kCapacityC9];
    batteries_[m] -= uav_energy_draw[m];
  }

  out.global_reward =
      -total_cost - cfg_.violation_penalty * out.penalized_violations();

  ++slot_;
  done_ = slot_ >= cfg_.slots_per_episode ||
          std::any_of(batteries_.begin(), batteries_.end(),
                      [](double b) { return b <= 0.0; });
  out.done = done_;

  sample_tasks();
  rebuild_observations();
  return out;
}

}  // namespace offload
