#include "offload/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "offload/build_info.hpp"
#include "offload/channel.hpp"

namespace offload {

namespace {

constexpr double kBitsPerMb = 8e6;       // 1 MB = 8e6 bits (decimal)
constexpr double kCyclesPerMc = 1e6;     // 1 Megacycle

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: bad numeric value for '" + key + "': " + value);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config: bad integer value for '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ParseError("config: bad boolean value for '" + key + "': " + value);
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& key, const std::string& value, Fn f) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(f(key, item));
  }
  if (out.empty()) throw ParseError("config: empty list for '" + key + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ValidationError("config: field '" + field + "' " + why);
}

void validate(const ExperimentConfig& cfg) {
  const EnvConfig& e = cfg.env;
  require(e.channel.a > 0.0 && e.channel.b > 0.0, "a/b", "must be positive");
  require(e.channel.eta_los > 0.0, "eta_los", "must be positive");
  require(e.channel.eta_nlos >= e.channel.eta_los, "eta_nlos",
          "must be at least eta_los");
  require(e.channel.carrier_freq > 0.0, "carrier_freq_hz", "must be positive");
  require(e.channel.path_loss_exp >= 2.0, "path_loss_exp", "must be at least 2");
  require(e.channel.bandwidth > 0.0, "bandwidth", "must be positive");
  require(e.channel.noise_power > 0.0, "noise_dbm", "must convert to positive watts");
  require(e.channel.p_device > 0.0 && e.channel.p_uav > 0.0, "p_device_dbm/p_uav_dbm",
          "must convert to positive watts");
  require(e.compute.f_loc > 0.0 && e.compute.f_edg > 0.0, "f_loc_hz/f_edg_hz",
          "must be positive");
  require(e.compute.kappa_loc >= 0.0 && e.compute.kappa_edg >= 0.0,
          "kappa_loc/kappa_edg", "must be nonnegative");
  require(e.compute.t_a >= 0.0, "t_a_s", "must be nonnegative");
  require(e.compute.alpha >= 0.0 && e.compute.beta >= 0.0 &&
              e.compute.alpha + e.compute.beta > 0.0,
          "alpha/beta", "must be nonnegative with positive sum");
  require(e.n_devices >= 1, "n_devices", "must be at least 1");
  require(e.n_uavs >= 1, "n_uavs", "must be at least 1");
  require(e.n_task_types >= 1 && e.n_task_types <= 16, "n_task_types",
          "must be in [1, 16]");
  require(e.bounds.x > 0.0 && e.bounds.y > 0.0 && e.bounds.z > 0.0, "space",
          "must be positive");
  require(e.battery_init > 0.0, "battery_init_j", "must be positive");
  require(e.capacity >= 0.0, "capacity_mb", "must be nonnegative");
  require(e.delay_threshold > 0.0, "delay_threshold_s", "must be positive");
  require(e.min_secrecy >= 0.0, "min_secrecy_bps", "must be nonnegative");
  require(e.e_max_trans_device > 0.0 && e.e_max_trans_uav > 0.0 &&
              e.e_max_proc_uav > 0.0 && e.e_max_proc_edge > 0.0,
          "energy bounds", "must be positive");
  require(e.slots_per_episode >= 1, "slots_per_episode", "must be at least 1");
  require(e.data_size_bits.mean > 0.0 && e.data_size_bits.stddev >= 0.0,
          "data_size", "mean must be positive, std nonnegative");
  require(e.cpu_cycles.mean > 0.0 && e.cpu_cycles.stddev >= 0.0, "cycles",
          "mean must be positive, std nonnegative");
  for (double p : e.priority_set) {
    require(p > 0.0, "priority_set", "entries must be positive");
  }
  require(e.violation_penalty >= 0.0, "violation_penalty", "must be nonnegative");

  const TrainConfig& t = cfg.train;
  require(t.episodes >= 1, "episodes", "must be at least 1");
  require(t.batch_size >= 1, "batch_size", "must be at least 1");
  require(t.gamma >= 0.0 && t.gamma < 1.0, "gamma", "must be in [0, 1)");
  require(t.adam.lr > 0.0, "learning_rate", "must be positive");
  require(t.replay_capacity >= 1, "replay_capacity", "must be at least 1");
  require(t.target_sync_interval >= 1, "target_sync_interval", "must be at least 1");
  require(t.eps_start >= 0.0 && t.eps_start <= 1.0 && t.eps_floor >= 0.0 &&
              t.eps_floor <= t.eps_start,
          "eps_start/eps_floor", "must satisfy 0 <= floor <= start <= 1");
  require(t.eps_decay_fraction > 0.0 && t.eps_decay_fraction <= 1.0,
          "eps_decay_fraction", "must be in (0, 1]");
  for (int h : t.hidden_dims) require(h >= 1, "hidden_dims", "must be positive");
  require(t.moving_avg_window >= 1, "moving_avg_window", "must be at least 1");

  require(cfg.preset == "table1" || cfg.preset == "consistent", "preset",
          "must be table1 or consistent");
  require(!cfg.seeds.empty(), "seeds", "must list at least one seed");
  require(cfg.eval_episodes >= 1, "eval_episodes", "must be at least 1");
  require(cfg.gap_slots >= 1, "gap_slots", "must be at least 1");
  require(cfg.gap_train_episodes >= 1, "gap_train_episodes", "must be at least 1");
}

}  // namespace

void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
  if (preset == "table1") {
    cfg.env.compute.kappa_loc = 1e-16;
    cfg.env.compute.kappa_edg = 1e-22;
  } else if (preset == "consistent") {
    cfg.env.compute.kappa_loc = 1e-27;
    cfg.env.compute.kappa_edg = 1e-28;
  } else {
    throw ValidationError("config: field 'preset' must be table1 or consistent");
  }
  cfg.preset = preset;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  // dBm-valued inputs are tracked so the SI conversion happens exactly once.
  double noise_dbm = -96.0, p_device_dbm = 15.0, p_uav_dbm = 23.0;
  std::string preset = "table1";
  bool kappa_loc_set = false, kappa_edg_set = false;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"a", [&](auto& k, auto& v) { cfg.env.channel.a = parse_double(k, v); }},
      {"b", [&](auto& k, auto& v) { cfg.env.channel.b = parse_double(k, v); }},
      {"eta_los", [&](auto& k, auto& v) { cfg.env.channel.eta_los = parse_double(k, v); }},
      {"eta_nlos", [&](auto& k, auto& v) { cfg.env.channel.eta_nlos = parse_double(k, v); }},
      {"carrier_freq_hz", [&](auto& k, auto& v) { cfg.env.channel.carrier_freq = parse_double(k, v); }},
      {"path_loss_exp", [&](auto& k, auto& v) { cfg.env.channel.path_loss_exp = parse_double(k, v); }},
      {"bandwidth", [&](auto& k, auto& v) { cfg.env.channel.bandwidth = parse_double(k, v); }},
      {"noise_dbm", [&](auto& k, auto& v) { noise_dbm = parse_double(k, v); }},
      {"p_device_dbm", [&](auto& k, auto& v) { p_device_dbm = parse_double(k, v); }},
      {"p_uav_dbm", [&](auto& k, auto& v) { p_uav_dbm = parse_double(k, v); }},
      {"f_loc_hz", [&](auto& k, auto& v) { cfg.env.compute.f_loc = parse_double(k, v); }},
      {"f_edg_hz", [&](auto& k, auto& v) { cfg.env.compute.f_edg = parse_double(k, v); }},
      {"kappa_loc", [&](auto& k, auto& v) { cfg.env.compute.kappa_loc = parse_double(k, v); kappa_loc_set = true; }},
      {"kappa_edg", [&](auto& k, auto& v) { cfg.env.compute.kappa_edg = parse_double(k, v); kappa_edg_set = true; }},
      {"t_a_s", [&](auto& k, auto& v) { cfg.env.compute.t_a = parse_double(k, v); }},
      {"alpha", [&](auto& k, auto& v) { cfg.env.compute.alpha = parse_double(k, v); }},
      {"beta", [&](auto& k, auto& v) { cfg.env.compute.beta = parse_double(k, v); }},
      {"n_devices", [&](auto& k, auto& v) { cfg.env.n_devices = static_cast<int>(parse_long(k, v)); }},
      {"n_uavs", [&](auto& k, auto& v) { cfg.env.n_uavs = static_cast<int>(parse_long(k, v)); }},
      {"n_task_types", [&](auto& k, auto& v) { cfg.env.n_task_types = static_cast<int>(parse_long(k, v)); }},
      {"space_x_m", [&](auto& k, auto& v) { cfg.env.bounds.x = parse_double(k, v); }},
      {"space_y_m", [&](auto& k, auto& v) { cfg.env.bounds.y = parse_double(k, v); }},
      {"space_z_m", [&](auto& k, auto& v) { cfg.env.bounds.z = parse_double(k, v); }},
      {"battery_init_j", [&](auto& k, auto& v) { cfg.env.battery_init = parse_double(k, v); }},
      {"capacity_mb", [&](auto& k, auto& v) { cfg.env.capacity = parse_double(k, v) * kBitsPerMb; }},
      {"delay_threshold_s", [&](auto& k, auto& v) { cfg.env.delay_threshold = parse_double(k, v); }},
      {"min_secrecy_bps", [&](auto& k, auto& v) { cfg.env.min_secrecy = parse_double(k, v); }},
      {"e_max_trans_device_j", [&](auto& k, auto& v) { cfg.env.e_max_trans_device = parse_double(k, v); }},
      {"e_max_trans_uav_j", [&](auto& k, auto& v) { cfg.env.e_max_trans_uav = parse_double(k, v); }},
      {"e_max_proc_uav_j", [&](auto& k, auto& v) { cfg.env.e_max_proc_uav = parse_double(k, v); }},
      {"e_max_proc_edge_j", [&](auto& k, auto& v) { cfg.env.e_max_proc_edge = parse_double(k, v); }},
      {"slots_per_episode", [&](auto& k, auto& v) { cfg.env.slots_per_episode = static_cast<int>(parse_long(k, v)); }},
      {"data_size_mean_mb", [&](auto& k, auto& v) { cfg.env.data_size_bits.mean = parse_double(k, v) * kBitsPerMb; }},
      {"data_size_std_mb", [&](auto& k, auto& v) { cfg.env.data_size_bits.stddev = parse_double(k, v) * kBitsPerMb; }},
      {"cycles_mean_mc", [&](auto& k, auto& v) { cfg.env.cpu_cycles.mean = parse_double(k, v) * kCyclesPerMc; }},
      {"cycles_std_mc", [&](auto& k, auto& v) { cfg.env.cpu_cycles.stddev = parse_double(k, v) * kCyclesPerMc; }},
      {"priority_set", [&](auto& k, auto& v) { cfg.env.priority_set = parse_list<double>(k, v, parse_double); }},
      {"violation_penalty", [&](auto& k, auto& v) { cfg.env.violation_penalty = parse_double(k, v); }},
      {"charge_first_hop_on_offload", [&](auto& k, auto& v) { cfg.env.charge_first_hop_on_offload = parse_bool(k, v); }},
      {"knapsack_gates_mask", [&](auto& k, auto& v) { cfg.env.knapsack_gates_mask = parse_bool(k, v); }},
      {"resample_topology_each_episode", [&](auto& k, auto& v) { cfg.env.resample_topology_each_episode = parse_bool(k, v); }},
      {"episodes", [&](auto& k, auto& v) { cfg.train.episodes = static_cast<int>(parse_long(k, v)); }},
      {"batch_size", [&](auto& k, auto& v) { cfg.train.batch_size = static_cast<int>(parse_long(k, v)); }},
      {"gamma", [&](auto& k, auto& v) { cfg.train.gamma = parse_double(k, v); }},
      {"learning_rate", [&](auto& k, auto& v) { cfg.train.adam.lr = parse_double(k, v); }},
      {"replay_capacity", [&](auto& k, auto& v) { cfg.train.replay_capacity = static_cast<std::size_t>(parse_long(k, v)); }},
      {"target_sync_interval", [&](auto& k, auto& v) { cfg.train.target_sync_interval = static_cast<int>(parse_long(k, v)); }},
      {"eps_start", [&](auto& k, auto& v) { cfg.train.eps_start = parse_double(k, v); }},
      {"eps_floor", [&](auto& k, auto& v) { cfg.train.eps_floor = parse_double(k, v); }},
      {"eps_decay_fraction", [&](auto& k, auto& v) { cfg.train.eps_decay_fraction = parse_double(k, v); }},
      {"masking", [&](auto& k, auto& v) { cfg.train.masking = parse_bool(k, v); }},
      {"target_mode",
       [&](auto& k, auto& v) {
         if (v == "double") cfg.train.target_mode = TargetMode::kDouble;
         else if (v == "paper_eq24") cfg.train.target_mode = TargetMode::kPaperEq24;
         else throw ParseError("config: bad value for '" + k + "': " + v);
       }},
      {"hidden_dims",
       [&](auto& k, auto& v) {
         cfg.train.hidden_dims = parse_list<int>(k, v, [](auto& kk, auto& vv) {
           return static_cast<int>(parse_long(kk, vv));
         });
       }},
      {"moving_avg_window", [&](auto& k, auto& v) { cfg.train.moving_avg_window = static_cast<int>(parse_long(k, v)); }},
      {"seeds",
       [&](auto& k, auto& v) {
         cfg.seeds = parse_list<std::uint64_t>(k, v, [](auto& kk, auto& vv) {
           return static_cast<std::uint64_t>(parse_long(kk, vv));
         });
       }},
      {"out_dir", [&](auto&, auto& v) { cfg.out_dir = v; }},
      {"preset", [&](auto&, auto& v) { preset = v; }},
      {"eval_episodes", [&](auto& k, auto& v) { cfg.eval_episodes = static_cast<int>(parse_long(k, v)); }},
      {"gap_slots", [&](auto& k, auto& v) { cfg.gap_slots = static_cast<int>(parse_long(k, v)); }},
      {"gap_train_episodes", [&](auto& k, auto& v) { cfg.gap_train_episodes = static_cast<int>(parse_long(k, v)); }},
  };

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ParseError("config: unknown key '" + key + "'");
    }
    it->second(key, value);
  }

  // Explicit kappa values override the preset.
  const double explicit_kloc = cfg.env.compute.kappa_loc;
  const double explicit_kedg = cfg.env.compute.kappa_edg;
  apply_preset(cfg, preset);
  if (kappa_loc_set) cfg.env.compute.kappa_loc = explicit_kloc;
  if (kappa_edg_set) cfg.env.compute.kappa_edg = explicit_kedg;

  cfg.env.channel.noise_power = dbm_to_watt(noise_dbm);
  cfg.env.channel.p_device = dbm_to_watt(p_device_dbm);
  cfg.env.channel.p_uav = dbm_to_watt(p_uav_dbm);

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const EnvConfig& e = cfg.env;
  const TrainConfig& t = cfg.train;
  out << "[channel]\n"
      << "a = " << fmt(e.channel.a) << "\n"
      << "b = " << fmt(e.channel.b) << "\n"
      << "eta_los = " << fmt(e.channel.eta_los) << "\n"
      << "eta_nlos = " << fmt(e.channel.eta_nlos) << "\n"
      << "carrier_freq_hz = " << fmt(e.channel.carrier_freq) << "\n"
      << "path_loss_exp = " << fmt(e.channel.path_loss_exp) << "\n"
      << "bandwidth = " << fmt(e.channel.bandwidth) << "\n"
      << "noise_w = " << fmt(e.channel.noise_power) << "\n"
      << "p_device_w = " << fmt(e.channel.p_device) << "\n"
      << "p_uav_w = " << fmt(e.channel.p_uav) << "\n"
      << "[compute]\n"
      << "f_loc_hz = " << fmt(e.compute.f_loc) << "\n"
      << "f_edg_hz = " << fmt(e.compute.f_edg) << "\n"
      << "kappa_loc = " << fmt(e.compute.kappa_loc) << "\n"
      << "kappa_edg = " << fmt(e.compute.kappa_edg) << "\n"
      << "t_a_s = " << fmt(e.compute.t_a) << "\n"
      << "alpha = " << fmt(e.compute.alpha) << "\n"
      << "beta = " << fmt(e.compute.beta) << "\n"
      << "[env]\n"
      << "n_devices = " << e.n_devices << "\n"
      << "n_uavs = " << e.n_uavs << "\n"
      << "n_task_types = " << e.n_task_types << "\n"
      << "space = " << fmt(e.bounds.x) << ' ' << fmt(e.bounds.y) << ' '
      << fmt(e.bounds.z) << "\n"
      << "battery_init_j = " << fmt(e.battery_init) << "\n"
      << "capacity_bits = " << fmt(e.capacity) << "\n"
      << "delay_threshold_s = " << fmt(e.delay_threshold) << "\n"
      << "min_secrecy_bps = " << fmt(e.min_secrecy) << "\n"
      << "e_max_trans_device_j = " << fmt(e.e_max_trans_device) << "\n"
      << "e_max_trans_uav_j = " << fmt(e.e_max_trans_uav) << "\n"
      << "e_max_proc_uav_j = " << fmt(e.e_max_proc_uav) << "\n"
      << "e_max_proc_edge_j = " << fmt(e.e_max_proc_edge) << "\n"
      << "slots_per_episode = " << e.slots_per_episode << "\n"
      << "data_size_bits = " << fmt(e.data_size_bits.mean) << ' '
      << fmt(e.data_size_bits.stddev) << "\n"
      << "cpu_cycles = " << fmt(e.cpu_cycles.mean) << ' '
      << fmt(e.cpu_cycles.stddev) << "\n";
  out << "priority_set =";
  for (double p : e.priority_set) out << ' ' << fmt(p);
  out << "\n"
      << "violation_penalty = " << fmt(e.violation_penalty) << "\n"
      << "charge_first_hop_on_offload = " << e.charge_first_hop_on_offload << "\n"
      << "knapsack_gates_mask = " << e.knapsack_gates_mask << "\n"
      << "resample_topology_each_episode = " << e.resample_topology_each_episode
      << "\n"
      << "[train]\n"
      << "episodes = " << t.episodes << "\n"
      << "batch_size = " << t.batch_size << "\n"
      << "gamma = " << fmt(t.gamma) << "\n"
      << "learning_rate = " << fmt(t.adam.lr) << "\n"
      << "replay_capacity = " << t.replay_capacity << "\n"
      << "target_sync_interval = " << t.target_sync_interval << "\n"
      << "eps_start = " << fmt(t.eps_start) << "\n"
      << "eps_floor = " << fmt(t.eps_floor) << "\n"
      << "eps_decay_fraction = " << fmt(t.eps_decay_fraction) << "\n"
      << "masking = " << t.masking << "\n"
      << "target_mode = "
      << (t.target_mode == TargetMode::kDouble ? "double" : "paper_eq24") << "\n";
  out << "hidden_dims =";
  for (int h : t.hidden_dims) out << ' ' << h;
  out << "\n"
      << "moving_avg_window = " << t.moving_avg_window << "\n"
      << "[run]\n"
      << "preset = " << cfg.preset << "\n";
  out << "seeds =";
  for (auto s : cfg.seeds) out << ' ' << s;
  out << "\n"
      << "eval_episodes = " << cfg.eval_episodes << "\n"
      << "gap_slots = " << cfg.gap_slots << "\n"
      << "gap_train_episodes = " << cfg.gap_train_episodes << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "config_hash = " << std::hex << config_hash(cfg) << std::dec << "\n";
  out << "seeds =";
  for (auto s : cfg.seeds) out << ' ' << s;
  out << "\ncommit = " << kBuildCommit << "\n";
  return out.str();
}

}  // namespace offload
