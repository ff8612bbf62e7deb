#include "offload/agent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "offload/rng.hpp"

namespace offload {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int group_size)
    : capacity_(capacity), group_size_(group_size) {
  if (capacity_ == 0) throw ValidationError("ReplayBuffer: zero capacity");
  groups_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::store(Group group) {
  if (static_cast<int>(group.size()) != group_size_) {
    throw GroupSizeMismatch("ReplayBuffer::store: one experience per UAV required");
  }
  if (groups_.size() < capacity_) {
    groups_.push_back(std::move(group));
  } else {
    groups_[next_] = std::move(group);
    full_ = true;
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const ReplayBuffer::Group*> ReplayBuffer::sample_com(
    std::size_t batch_size, std::mt19937_64& rng) const {
  if (groups_.size() < batch_size) {
    throw InsufficientData("ReplayBuffer::sample_com: not enough groups");
  }
  // Partial Fisher-Yates over group indices: uniform without replacement.
  std::vector<std::size_t> idx(groups_.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<const Group*> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    out.push_back(&groups_[idx[i]]);
  }
  return out;
}

int select_action(const QNetwork& net, const Eigen::VectorXd& features,
                  std::span<const std::uint8_t> mask, double epsilon,
                  std::mt19937_64& rng) {
  std::vector<int> feasible;
  feasible.reserve(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) feasible.push_back(static_cast<int>(i));
  }
  if (feasible.empty()) throw EmptyMask("select_action: no feasible action");

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
    return feasible[pick(rng)];
  }
  const Eigen::VectorXd q = net.forward(features);
  int best = feasible.front();
  for (int a : feasible) {
    if (q(a) > q(best)) best = a;
  }
  return best;
}

std::vector<double> compute_targets(std::span<const Experience* const> batch,
                                    const QNetwork& online,
                                    const QNetwork& target, double gamma,
                                    TargetMode mode) {
  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) return {};
  const int in_dim = online.input_dim();
  Eigen::MatrixXd next_x(in_dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < in_dim; ++j) next_x(j, i) = batch[i]->next_state[j];
  }
  const Eigen::MatrixXd tq = target.forward_batch(next_x);
  Eigen::MatrixXd oq;
  if (mode == TargetMode::kDouble) oq = online.forward_batch(next_x);

  std::vector<double> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Experience& e = *batch[i];
    if (e.terminal) {
      y[i] = e.reward;
      continue;
    }
    int best = -1;
    const Eigen::MatrixXd& score = mode == TargetMode::kDouble ? oq : tq;
    for (std::size_t a = 0; a < e.next_mask.size(); ++a) {
      if (!e.next_mask[a]) continue;
      if (best < 0 || score(a, i) > score(best, i)) best = static_cast<int>(a);
    }
    // A fallback entry is always unmasked, so best is set.
    y[i] = e.reward + gamma * tq(best, i);
  }
  return y;
}

double epsilon_for_episode(const TrainConfig& cfg, int episode) {
  const int decay = std::max(
      1, static_cast<int>(std::lround(cfg.episodes * cfg.eps_decay_fraction)));
  if (episode >= decay) return cfg.eps_floor;
  return cfg.eps_start +
         (cfg.eps_floor - cfg.eps_start) * static_cast<double>(episode) / decay;
}

namespace {

std::vector<int> make_dims(const EnvConfig& env_cfg, const TrainConfig& cfg) {
  std::vector<int> dims;
  dims.push_back(2 + 3 * env_cfg.n_task_types);
  dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  dims.push_back(env_cfg.n_actions());
  return dims;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double moving_average(const std::vector<EpisodeMetrics>& metrics, int window) {
  const int n = static_cast<int>(metrics.size());
  const int take = std::min(window, n);
  double s = 0.0;
  for (int i = n - take; i < n; ++i) s += metrics[i].cumulative_reward;
  return s / take;
}

}  // namespace

TrainResult train(const EnvConfig& env_cfg, const TrainConfig& cfg,
                  std::uint64_t seed) {
  const int m_count = env_cfg.n_uavs;
  const auto dims = make_dims(env_cfg, cfg);

  TrainResult result;
  std::vector<QNetwork> targets;
  for (int m = 0; m < m_count; ++m) {
    result.networks.emplace_back(dims, mix_seed(seed, 0x100 + m));
    targets.emplace_back(dims, mix_seed(seed, 0x100 + m));
  }

  Environment env(env_cfg);
  ReplayBuffer buffer(cfg.replay_capacity, m_count);
  std::mt19937_64 rng_act(mix_seed(seed, 0x616374ULL));
  std::mt19937_64 rng_sample(mix_seed(seed, 0x73616dULL));

  const std::vector<std::uint8_t> all_ones(env_cfg.n_actions(), 1);
  long update_rounds = 0;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const double eps = epsilon_for_episode(cfg, ep);
    auto obs = env.reset(mix_seed(seed, 0xE0000ULL + ep));

    EpisodeMetrics row;
    row.episode = ep;
    row.epsilon = eps;

    while (!env.done()) {
      std::vector<std::vector<double>> states(m_count);
      std::vector<std::vector<std::uint8_t>> masks(m_count);
      std::vector<int> actions(m_count);
      for (int m = 0; m < m_count; ++m) {
        states[m] = encode_state(obs[m], env_cfg);
        masks[m] = cfg.masking ? obs[m].mask : all_ones;
        actions[m] =
            select_action(result.networks[m], to_vec(states[m]), masks[m], eps, rng_act);
      }

      const StepOutcome out = env.step(actions, /*enforce_mask=*/cfg.masking);
      const auto& next_obs = env.observations();

      ReplayBuffer::Group group;
      group.reserve(m_count);
      for (int m = 0; m < m_count; ++m) {
        Experience e;
        e.state = std::move(states[m]);
        e.action = actions[m];
        e.reward = out.global_reward;
        e.next_state = encode_state(next_obs[m], env_cfg);
        e.mask = std::move(masks[m]);
        e.next_mask = cfg.masking ? next_obs[m].mask : all_ones;
        e.terminal = out.done;
        group.push_back(std::move(e));
      }
      buffer.store(std::move(group));

      row.cumulative_reward += out.global_reward;
      row.total_delay += out.total_delay;
      row.total_energy += out.total_energy;
      for (long v : out.violations) row.violations += v;
      obs = next_obs;

      if (cfg.updates_enabled &&
          buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        const auto groups = buffer.sample_com(cfg.batch_size, rng_sample);
        for (int m = 0; m < m_count; ++m) {
          std::vector<const Experience*> batch;
          batch.reserve(groups.size());
          for (const auto* g : groups) batch.push_back(&(*g)[m]);

          const auto y = compute_targets(batch, result.networks[m], targets[m],
                                         cfg.gamma, cfg.target_mode);
          const int in_dim = result.networks[m].input_dim();
          Eigen::MatrixXd x(in_dim, static_cast<Eigen::Index>(batch.size()));
          std::vector<int> acts(batch.size());
          Eigen::VectorXd yv(static_cast<Eigen::Index>(batch.size()));
          for (std::size_t i = 0; i < batch.size(); ++i) {
            for (int j = 0; j < in_dim; ++j) {
              x(j, static_cast<Eigen::Index>(i)) = batch[i]->state[j];
            }
            acts[i] = batch[i]->action;
            yv(static_cast<Eigen::Index>(i)) = y[i];
          }
          result.networks[m].train_step(x, acts, yv, cfg.adam);
        }
        ++update_rounds;
        if (update_rounds % cfg.target_sync_interval == 0) {
          for (int m = 0; m < m_count; ++m) {
            targets[m].copy_parameters_from(result.networks[m]);
          }
        }
      }
    }

    row.moving_avg_reward = 0.0;  // filled below, needs the row in place
    result.metrics.push_back(row);
    result.metrics.back().moving_avg_reward =
        moving_average(result.metrics, cfg.moving_avg_window);
    result.executed_masked_actions += env.executed_masked_actions();
  }
  return result;
}

namespace {

EvalResult run_policy(const EnvConfig& env_cfg, int episodes, std::uint64_t seed,
                      bool respect_mask,
                      const std::function<int(const QNetwork*, const UavObservation&,
                                              std::span<const std::uint8_t>,
                                              std::mt19937_64&)>& pick,
                      const std::vector<QNetwork>* networks) {
  Environment env(env_cfg);
  std::mt19937_64 rng(mix_seed(seed, 0x6576616cULL));
  const std::vector<std::uint8_t> all_ones(env_cfg.n_actions(), 1);

  EvalResult res;
  for (int ep = 0; ep < episodes; ++ep) {
    auto obs = env.reset(mix_seed(seed, 0xF0000ULL + ep));
    while (!env.done()) {
      std::vector<int> actions(env_cfg.n_uavs);
      for (int m = 0; m < env_cfg.n_uavs; ++m) {
        std::span<const std::uint8_t> mask = respect_mask ? obs[m].mask : all_ones;
        const QNetwork* net = networks ? &(*networks)[m] : nullptr;
        actions[m] = pick(net, obs[m], mask, rng);
      }
      const StepOutcome out = env.step(actions, /*enforce_mask=*/respect_mask);
      res.mean_reward += out.global_reward;
      res.mean_total_delay += out.total_delay;
      res.mean_total_energy += out.total_energy;
      for (long v : out.violations) res.violations += v;
      obs = env.observations();
    }
    res.executed_masked_actions += env.executed_masked_actions();
  }
  res.mean_reward /= episodes;
  res.mean_total_delay /= episodes;
  res.mean_total_energy /= episodes;
  return res;
}

}  // namespace

EvalResult run_distributed(const std::vector<QNetwork>& networks,
                           const EnvConfig& env_cfg, int episodes,
                           std::uint64_t seed, bool masking) {
  return run_policy(
      env_cfg, episodes, seed, masking,
      [&env_cfg](const QNetwork* net, const UavObservation& obs,
                 std::span<const std::uint8_t> mask, std::mt19937_64& rng) {
        return select_action(*net, to_vec(encode_state(obs, env_cfg)), mask, 0.0,
                             rng);
      },
      &networks);
}

EvalResult run_random_policy(const EnvConfig& env_cfg, int episodes,
                             std::uint64_t seed, bool respect_mask) {
  return run_policy(
      env_cfg, episodes, seed, respect_mask,
      [](const QNetwork*, const UavObservation& obs,
         std::span<const std::uint8_t> mask, std::mt19937_64& rng) {
        std::vector<int> feasible;
        for (std::size_t i = 0; i < mask.size(); ++i) {
          if (mask[i]) feasible.push_back(static_cast<int>(i));
        }
        if (feasible.empty()) throw EmptyMask("random policy: no feasible action");
        std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
        return feasible[pick(rng)];
      },
      nullptr);
}

}  // namespace offload
