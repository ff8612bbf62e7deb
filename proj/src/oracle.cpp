#include "offload/oracle.hpp"

#include <cmath>
#include <limits>

#include "offload/rng.hpp"

namespace offload {

namespace {

// Straight-line physics, kept deliberately separate from the channel /
// compute module functions.
struct LinkModel {
  const EnvConfig& cfg;
  const NetworkTopology& topo;
  double k0;

  explicit LinkModel(const Environment& env)
      : cfg(env.config()), topo(env.topology()) {
    k0 = 4.0 * M_PI * cfg.channel.carrier_freq / kSpeedOfLight;
  }

  static double dist(const Position3D& a, const Position3D& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
  }

  double mixture_gain(const Position3D& ground, const Position3D& air) const {
    const double d = dist(ground, air);
    const double theta =
        std::asin((air.z - ground.z) / d) * 180.0 / M_PI;
    const double p_los =
        1.0 / (1.0 + cfg.channel.a *
                         std::exp(-cfg.channel.b * (theta - cfg.channel.a)));
    const double loss =
        (cfg.channel.eta_los * p_los + cfg.channel.eta_nlos * (1.0 - p_los)) *
        std::pow(k0 * d, cfg.channel.path_loss_exp);
    return 1.0 / loss;
  }

  double los_gain(const Position3D& a, const Position3D& b) const {
    const double loss =
        cfg.channel.eta_los * std::pow(k0 * dist(a, b), cfg.channel.path_loss_exp);
    return 1.0 / loss;
  }

  double rate(int share, double power, double gain) const {
    return cfg.channel.bandwidth / share *
           std::log2(1.0 + power * gain / cfg.channel.noise_power);
  }

  double device_secrecy(int n) const {
    const int m = topo.association[n];
    const int share = std::max(topo.devices_per_uav[m], 1);
    const double legit = rate(share, cfg.channel.p_device,
                              mixture_gain(topo.device_positions[n],
                                           topo.uav_positions[m]));
    const double eve = rate(share, cfg.channel.p_device,
                            mixture_gain(topo.device_positions[n],
                                         topo.eve_position));
    return std::max(legit - eve, 0.0);
  }

  // Returns {target index (M for MEC), secrecy}.
  std::pair<int, double> uav_secrecy(int m) const {
    const int m_count = static_cast<int>(topo.uav_positions.size());
    const double eve_rate = rate(m_count, cfg.channel.p_uav,
                                 los_gain(topo.uav_positions[m], topo.eve_position));
    int best_q = m_count;
    double best = std::max(
        rate(m_count, cfg.channel.p_uav,
             los_gain(topo.uav_positions[m], topo.mec_position)) -
            eve_rate,
        0.0);
    for (int q = 0; q < m_count; ++q) {
      if (q == m) continue;
      const double s = std::max(
          rate(m_count, cfg.channel.p_uav,
               los_gain(topo.uav_positions[m], topo.uav_positions[q])) -
              eve_rate,
          0.0);
      if (s > best) {
        best = s;
        best_q = q;
      }
    }
    return {best_q, best};
  }
};

}  // namespace

double cost_recompute(const Environment& snapshot,
                      const std::vector<int>& actions) {
  const EnvConfig& cfg = snapshot.config();
  if (static_cast<int>(actions.size()) != cfg.n_uavs) {
    throw RouteConflict("cost_recompute: one action per UAV required");
  }
  const LinkModel model(snapshot);

  std::vector<double> r_ms(cfg.n_uavs);
  std::vector<int> target(cfg.n_uavs);
  for (int m = 0; m < cfg.n_uavs; ++m) {
    const auto [q, s] = model.uav_secrecy(m);
    target[m] = q;
    r_ms[m] = s;
  }

  double cost = 0.0;
  long penalized = 0;
  for (const Task& t : snapshot.current_tasks()) {
    const int m = snapshot.topology().association[t.device_index];
    const bool local = actions[m] >> t.type_index & 1;

    const double r_ns = model.device_secrecy(t.device_index);
    if (r_ns <= 0.0) {
      ++penalized;  // C2, undeliverable
      continue;
    }
    if (r_ns < cfg.min_secrecy) ++penalized;  // C2

    const double t_ns = t.data_size / r_ns;
    const double e_ns = cfg.channel.p_device * t_ns;

    double delay = 0.0;
    double energy = 0.0;
    if (local) {
      delay = t_ns + cfg.compute.t_a + t.cpu_cycles / cfg.compute.f_loc;
      energy = e_ns + cfg.compute.kappa_loc * cfg.compute.f_loc *
                          cfg.compute.f_loc * t.cpu_cycles;
    } else {
      if (r_ms[m] <= 0.0) {
        ++penalized;  // C3, undeliverable
        continue;
      }
      if (r_ms[m] < cfg.min_secrecy) ++penalized;  // C3
      const bool to_mec = target[m] == cfg.n_uavs;
      const double f = to_mec ? cfg.compute.f_edg : cfg.compute.f_loc;
      const double kappa = to_mec ? cfg.compute.kappa_edg : cfg.compute.kappa_loc;
      const double t_ms = t.data_size / r_ms[m];
      delay = t_ns + t_ms + cfg.compute.t_a + t.cpu_cycles / f;
      energy = cfg.channel.p_uav * t_ms + kappa * f * f * t.cpu_cycles;
      if (cfg.charge_first_hop_on_offload) energy += e_ns;
    }
    if (delay > cfg.delay_threshold) ++penalized;  // C1
    cost += t.priority *
            (cfg.compute.alpha * delay + cfg.compute.beta * energy);
  }
  return cost + cfg.violation_penalty * penalized;
}

OracleResult optimal_joint_action(const Environment& snapshot) {
  const EnvConfig& cfg = snapshot.config();
  const int n_actions = cfg.n_actions();
  double total = std::pow(static_cast<double>(n_actions), cfg.n_uavs);
  if (total > 1e6) {
    throw InstanceTooLarge("optimal_joint_action: joint space above 10^6");
  }

  OracleResult res;
  res.best_cost = std::numeric_limits<double>::infinity();
  std::vector<int> joint(cfg.n_uavs, 0);
  const auto& obs = snapshot.observations();

  bool done = false;
  while (!done) {
    ++res.evaluated_count;
    bool feasible = true;
    for (int m = 0; m < cfg.n_uavs && feasible; ++m) {
      feasible = obs[m].mask[joint[m]] != 0;
    }
    if (feasible) {
      ++res.feasible_count;
      const double c = cost_recompute(snapshot, joint);
      if (c < res.best_cost) {  // lexicographic enumeration order breaks ties
        res.best_cost = c;
        res.best_joint_action = joint;
      }
    }
    // Odometer in lexicographic order (last UAV fastest).
    done = true;
    for (int m = cfg.n_uavs - 1; m >= 0; --m) {
      if (++joint[m] < n_actions) {
        done = false;
        break;
      }
      joint[m] = 0;
    }
  }
  return res;
}

KnapsackResult knapsack_exhaustive(std::span<const Task> tasks,
                                   double capacity_bits) {
  const std::size_t n = tasks.size();
  if (n > 20) throw InstanceTooLarge("knapsack_exhaustive: above 20 tasks");

  const long cap = capacity_bits > 0.0
                       ? static_cast<long>(std::floor(capacity_bits / kKnapsackBucketBits))
                       : 0;
  std::vector<long> bucket_w(n);
  std::vector<long long> value_q(n), weight_q(n);
  for (std::size_t i = 0; i < n; ++i) {
    bucket_w[i] = static_cast<long>(std::ceil(tasks[i].data_size / kKnapsackBucketBits));
    value_q[i] = std::llround(tasks[i].priority / kKnapsackValueQuantum);
    weight_q[i] = std::llround(tasks[i].data_size / kKnapsackWeightQuantum);
  }

  // Prefers the subset that includes the earliest differing index.
  auto lex_prefer = [](std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    if (diff == 0) return false;
    const std::uint32_t low = diff & (~diff + 1);
    return (a & low) != 0;
  };

  bool found = false;
  std::uint32_t best_mask = 0;
  long long best_value = -1;
  long long best_weight = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    long w = 0;
    // Sums are ranked on the shared integer grids so that the optimum is a
    // property of the selected set, not of the summation order.
    long long value = 0;
    long long weight = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        w += bucket_w[i];
        value += value_q[i];
        weight += weight_q[i];
      }
    }
    if (w > cap) continue;
    const bool better =
        !found || value > best_value ||
        (value == best_value &&
         (weight < best_weight ||
          (weight == best_weight && lex_prefer(mask, best_mask))));
    if (better) {
      found = true;
      best_mask = mask;
      best_value = value;
      best_weight = weight;
    }
  }

  KnapsackResult res;
  res.selected.assign(n, false);
  if (found) {
    // Reported totals accumulate from the highest index down, matching the
    // dynamic-programming selector's reporting convention.
    for (std::size_t i = n; i-- > 0;) {
      if (best_mask >> i & 1) {
        res.selected[i] = true;
        res.total_value = tasks[i].priority + res.total_value;
        res.total_weight = tasks[i].data_size + res.total_weight;
      }
    }
  }
  return res;
}

GapReport optimality_gap(const SlotPolicy& policy, const EnvConfig& cfg,
                         std::span<const std::uint64_t> seeds, int slots) {
  GapReport report;
  double sum = 0.0;
  for (std::uint64_t seed : seeds) {
    Environment env(cfg);
    int episode = 0;
    env.reset(mix_seed(seed, 0xF0000ULL + episode));
    for (int slot = 0; slot < slots; ++slot) {
      if (env.done()) {
        ++episode;
        env.reset(mix_seed(seed, 0xF0000ULL + episode));
      }
      const Environment snap = env;
      const std::vector<int> actions = policy(env);
      const OracleResult best = optimal_joint_action(snap);
      const double policy_cost = cost_recompute(snap, actions);

      GapRow row;
      row.seed = seed;
      row.slot = slot;
      row.policy_cost = policy_cost;
      row.oracle_cost = best.best_cost;
      row.ratio = best.best_cost > 0.0
                      ? policy_cost / best.best_cost
                      : (policy_cost == 0.0
                             ? 1.0
                             : std::numeric_limits<double>::infinity());
      report.rows.push_back(row);
      sum += row.ratio;

      env.step(actions, /*enforce_mask=*/true);
    }
  }
  report.mean_ratio = report.rows.empty() ? 1.0 : sum / report.rows.size();
  return report;
}

}  // namespace offload
