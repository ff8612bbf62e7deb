#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "offload/env.hpp"
#include "offload/nn.hpp"

namespace offload {

/// One transition of one UAV. The feasibility masks of both the current and
/// the next step are stored so TD targets can be restricted to feasible
/// next actions.
struct Experience {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;  // global R_t, shared across the slot's group
  std::vector<double> next_state;
  std::vector<std::uint8_t> mask;
  std::vector<std::uint8_t> next_mask;
  bool terminal = false;
};

/// Ring of per-timestep groups, one Experience per UAV per group. Groups are
/// stored and sampled whole so coordination mini-batches stay synchronized.
class ReplayBuffer {
 public:
  using Group = std::vector<Experience>;

  ReplayBuffer(std::size_t capacity, int group_size);

  /// Appends one slot's experiences; throws GroupSizeMismatch unless the
  /// group holds exactly one entry per UAV. Oldest group evicted at capacity.
  void store(Group group);

  /// Uniform sample of whole groups without replacement; throws
  /// InsufficientData when fewer than batch_size groups are stored.
  std::vector<const Group*> sample_com(std::size_t batch_size,
                                       std::mt19937_64& rng) const;

  std::size_t size() const { return groups_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Group& group(std::size_t i) const { return groups_[i]; }

 private:
  std::size_t capacity_;
  int group_size_;
  std::vector<Group> groups_;  // ring
  std::size_t next_ = 0;
  bool full_ = false;
};

enum class TargetMode { kDouble, kPaperEq24 };

/// Masked epsilon-greedy selection: with probability epsilon uniform over
/// unmasked indices, otherwise the unmasked argmax of Q, ties to the lowest
/// index. Throws EmptyMask if nothing is feasible.
int select_action(const QNetwork& net, const Eigen::VectorXd& features,
                  std::span<const std::uint8_t> mask, double epsilon,
                  std::mt19937_64& rng);

/// TD targets for one UAV's experiences of a coordination batch.
/// kDouble: a* = argmax over feasible next actions of online Q(s',.),
///          y = R + gamma * targetQ(s', a*).
/// kPaperEq24: y = R + gamma * max over feasible next actions of targetQ.
/// Terminal transitions give y = R.
std::vector<double> compute_targets(std::span<const Experience* const> batch,
                                    const QNetwork& online,
                                    const QNetwork& target, double gamma,
                                    TargetMode mode);

struct TrainConfig {
  int episodes = 1000;
  int batch_size = 300;
  double gamma = 0.9;
  AdamParams adam{};  // lr 1e-4
  std::size_t replay_capacity = 10000;
  int target_sync_interval = 100;  // gradient updates between syncs
  double eps_start = 1.0;
  double eps_floor = 0.05;
  double eps_decay_fraction = 0.5;  // fraction of episodes to reach the floor
  bool masking = true;              // AM on/off
  TargetMode target_mode = TargetMode::kDouble;
  std::vector<int> hidden_dims{32, 64, 128};
  int moving_avg_window = 100;
  bool updates_enabled = true;
};

/// Linear eps_start -> eps_floor over the first eps_decay_fraction of
/// episodes, constant afterwards.
double epsilon_for_episode(const TrainConfig& cfg, int episode);

struct EpisodeMetrics {
  int episode = 0;
  double cumulative_reward = 0.0;
  double moving_avg_reward = 0.0;
  double total_delay = 0.0;
  double total_energy = 0.0;
  long violations = 0;
  double epsilon = 0.0;
};

struct TrainResult {
  std::vector<QNetwork> networks;  // one per UAV
  std::vector<EpisodeMetrics> metrics;
  long executed_masked_actions = 0;
};

/// Centralized training loop: per slot every UAV selects under its mask,
/// the environment steps, the slot's experiences are stored as one group,
/// and once the buffer holds a full batch one gradient update per UAV runs
/// each slot. Deterministic under (configs, seed).
TrainResult train(const EnvConfig& env_cfg, const TrainConfig& cfg,
                  std::uint64_t seed);

struct EvalResult {
  double mean_reward = 0.0;
  double mean_total_delay = 0.0;   // per episode
  double mean_total_energy = 0.0;  // per episode
  long violations = 0;
  long executed_masked_actions = 0;
};

/// Greedy masked execution on local observations only; no buffer writes, no
/// updates. With masking off the greedy argmax runs over all actions and the
/// environment converts infeasible picks to the penalized fallback.
EvalResult run_distributed(const std::vector<QNetwork>& networks,
                           const EnvConfig& env_cfg, int episodes,
                           std::uint64_t seed, bool masking = true);

/// Uniform-random policy through the same evaluation path. respect_mask
/// draws over unmasked actions; otherwise over all actions with infeasible
/// picks falling back with penalty.
EvalResult run_random_policy(const EnvConfig& env_cfg, int episodes,
                             std::uint64_t seed, bool respect_mask = true);

}  // namespace offload
