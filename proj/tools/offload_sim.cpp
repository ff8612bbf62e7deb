// Command-line front end: train / eval / sweep / oracle-gap experiment
// orchestration with CSV emission and provenance manifests.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "offload/agent.hpp"
#include "offload/config.hpp"
#include "offload/oracle.hpp"

namespace fs = std::filesystem;
using namespace offload;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string metrics_csv(const ExperimentConfig& cfg,
                        const std::vector<EpisodeMetrics>& metrics) {
  std::ostringstream out;
  out << "# config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  out << "episode,cumulative_reward,moving_avg_reward,total_delay_s,"
         "total_energy_J,violations,epsilon\n";
  for (const auto& m : metrics) {
    out << m.episode << ',' << fmt(m.cumulative_reward) << ','
        << fmt(m.moving_avg_reward) << ',' << fmt(m.total_delay) << ','
        << fmt(m.total_energy) << ',' << m.violations << ',' << fmt(m.epsilon)
        << "\n";
  }
  return out.str();
}

void save_checkpoints(const ExperimentConfig& cfg, std::uint64_t seed,
                      const std::vector<QNetwork>& nets) {
  for (std::size_t m = 0; m < nets.size(); ++m) {
    fs::path path = fs::path(cfg.out_dir) /
                    ("qnet_seed" + std::to_string(seed) + "_uav" +
                     std::to_string(m) + ".txt");
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    nets[m].save(out);
  }
}

std::vector<QNetwork> load_checkpoints(const ExperimentConfig& cfg,
                                       std::uint64_t seed) {
  std::vector<QNetwork> nets;
  for (int m = 0; m < cfg.env.n_uavs; ++m) {
    fs::path path = fs::path(cfg.out_dir) /
                    ("qnet_seed" + std::to_string(seed) + "_uav" +
                     std::to_string(m) + ".txt");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing checkpoint " + path.string());
    nets.push_back(QNetwork::load(in));
  }
  return nets;
}

int cmd_train(const ExperimentConfig& cfg) {
  for (std::uint64_t seed : cfg.seeds) {
    const TrainResult result = train(cfg.env, cfg.train, seed);
    write_file(fs::path(cfg.out_dir) /
                   ("metrics_seed" + std::to_string(seed) + ".csv"),
               metrics_csv(cfg, result.metrics));
    save_checkpoints(cfg, seed, result.networks);
    std::cout << "seed " << seed << ": final reward "
              << fmt(result.metrics.back().cumulative_reward)
              << ", executed masked actions "
              << result.executed_masked_actions << "\n";
    if (cfg.train.masking && result.executed_masked_actions != 0) {
      std::cerr << "mask safety assertion failed\n";
      return 1;
    }
  }
  write_file(fs::path(cfg.out_dir) / "manifest.txt", manifest_text(cfg));
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  out << "seed,mean_reward,mean_total_delay_s,mean_total_energy_J,violations\n";
  for (std::uint64_t seed : cfg.seeds) {
    const auto nets = load_checkpoints(cfg, seed);
    const EvalResult res = run_distributed(nets, cfg.env, cfg.eval_episodes,
                                           seed, cfg.train.masking);
    out << seed << ',' << fmt(res.mean_reward) << ','
        << fmt(res.mean_total_delay) << ',' << fmt(res.mean_total_energy) << ','
        << res.violations << "\n";
    std::cout << "seed " << seed << ": mean reward " << fmt(res.mean_reward)
              << ", delay " << fmt(res.mean_total_delay) << " s, energy "
              << fmt(res.mean_total_energy) << " J\n";
  }
  write_file(fs::path(cfg.out_dir) / "eval.csv", out.str());
  write_file(fs::path(cfg.out_dir) / "manifest.txt", manifest_text(cfg));
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::vector<int>& n_list) {
  const char* policies[] = {"random", "ddqn_no_mask", "ddqn_with_mask"};
  std::ostringstream out;
  out << "# config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  out << "n_devices,policy,mean_reward,mean_total_delay_s,mean_total_energy_J\n";
  for (int n : n_list) {
    ExperimentConfig cell = cfg;
    cell.env.n_devices = n;
    for (const char* policy : policies) {
      double reward = 0.0, delay = 0.0, energy = 0.0;
      for (std::uint64_t seed : cfg.seeds) {
        EvalResult res;
        if (std::string(policy) == "random") {
          res = run_random_policy(cell.env, cfg.eval_episodes, seed);
        } else {
          TrainConfig tc = cell.train;
          tc.masking = std::string(policy) == "ddqn_with_mask";
          const TrainResult tr = train(cell.env, tc, seed);
          res = run_distributed(tr.networks, cell.env, cfg.eval_episodes, seed,
                                tc.masking);
        }
        reward += res.mean_reward;
        delay += res.mean_total_delay;
        energy += res.mean_total_energy;
      }
      const double k = static_cast<double>(cfg.seeds.size());
      out << n << ',' << policy << ',' << fmt(reward / k) << ','
          << fmt(delay / k) << ',' << fmt(energy / k) << "\n";
      std::cout << "N=" << n << ' ' << policy << ": delay " << fmt(delay / k)
                << " s, energy " << fmt(energy / k) << " J\n";
    }
  }
  write_file(fs::path(cfg.out_dir) / "sweep.csv", out.str());
  write_file(fs::path(cfg.out_dir) / "manifest.txt", manifest_text(cfg));
  return 0;
}

int cmd_oracle_gap(const ExperimentConfig& cfg) {
  const double joint = std::pow(2.0, cfg.env.n_task_types * cfg.env.n_uavs);
  if (joint > 1e6) {
    std::cerr << "oracle-gap: instance too large for enumeration\n";
    return 1;
  }
  std::ostringstream out;
  out << "# config_hash=" << std::hex << config_hash(cfg) << std::dec << "\n";
  out << "seed,slot,policy_cost,oracle_cost,ratio\n";
  double mean = 0.0;
  for (std::uint64_t seed : cfg.seeds) {
    TrainConfig tc = cfg.train;
    tc.episodes = cfg.gap_train_episodes;
    const TrainResult tr = train(cfg.env, tc, seed);
    const auto& nets = tr.networks;

    SlotPolicy policy = [&nets, &cfg](const Environment& env) {
      std::vector<int> actions(cfg.env.n_uavs);
      std::mt19937_64 rng(0);  // greedy path, rng unused
      const auto& obs = env.observations();
      for (int m = 0; m < cfg.env.n_uavs; ++m) {
        const auto feat = encode_state(obs[m], cfg.env);
        actions[m] = select_action(
            nets[m],
            Eigen::Map<const Eigen::VectorXd>(feat.data(), feat.size()),
            obs[m].mask, 0.0, rng);
      }
      return actions;
    };

    const std::uint64_t seeds_one[] = {seed};
    const GapReport report = optimality_gap(policy, cfg.env, seeds_one,
                                            cfg.gap_slots);
    for (const auto& row : report.rows) {
      out << row.seed << ',' << row.slot << ',' << fmt(row.policy_cost) << ','
          << fmt(row.oracle_cost) << ',' << fmt(row.ratio) << "\n";
    }
    mean += report.mean_ratio;
    std::cout << "seed " << seed << ": mean gap " << fmt(report.mean_ratio)
              << "\n";
  }
  mean /= static_cast<double>(cfg.seeds.size());
  out << "# mean_ratio=" << fmt(mean) << "\n";
  std::cout << "overall mean gap " << fmt(mean) << "\n";
  write_file(fs::path(cfg.out_dir) / "gap.csv", out.str());
  write_file(fs::path(cfg.out_dir) / "manifest.txt", manifest_text(cfg));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-assisted secure task offloading simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, mode, mask, preset;
  std::vector<std::uint64_t> seeds;
  std::vector<int> n_list{3, 7, 10};

  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--seed", seeds, "seed list override")->delimiter(',');
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--mode", mode, "TD target mode: double | paper_eq24");
  app.add_option("--mask", mask, "action masking: on | off");
  app.add_option("--preset", preset, "kappa preset: table1 | consistent");

  auto* train_cmd = app.add_subcommand("train", "train per-UAV Q-networks");
  auto* eval_cmd = app.add_subcommand("eval", "evaluate saved checkpoints");
  auto* sweep_cmd =
      app.add_subcommand("sweep", "device-count x policy comparison");
  sweep_cmd->add_option("--n-list", n_list, "device counts")->delimiter(',');
  auto* gap_cmd =
      app.add_subcommand("oracle-gap", "small-instance optimality gap study");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!preset.empty()) apply_preset(cfg, preset);
    if (!mode.empty()) {
      if (mode == "double") cfg.train.target_mode = TargetMode::kDouble;
      else if (mode == "paper_eq24") cfg.train.target_mode = TargetMode::kPaperEq24;
      else throw ValidationError("--mode must be double or paper_eq24");
    }
    if (!mask.empty()) {
      if (mask == "on") cfg.train.masking = true;
      else if (mask == "off") cfg.train.masking = false;
      else throw ValidationError("--mask must be on or off");
    }

    if (train_cmd->parsed()) return cmd_train(cfg);
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg, n_list);
    if (gap_cmd->parsed()) return cmd_oracle_gap(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
