#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "offload/agent.hpp"
#include "offload/env.hpp"

namespace offload {

/// Full experiment description: environment, agent hyperparameters, mode
/// flags, seeds and output location. Defaults follow the reference system
/// and model parameter tables; everything is overridable from the config
/// file.
struct ExperimentConfig {
  EnvConfig env;
  TrainConfig train;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
  std::string preset = "table1";  // table1 | consistent
  int eval_episodes = 20;

  // oracle-gap study
  int gap_slots = 100;
  int gap_train_episodes = 300;
};

/// Applies a named kappa preset. "table1" keeps the published coefficients;
/// "consistent" rescales them so per-task processing energy sits on the
/// battery scale (kappa_loc 1e-27, kappa_edg 1e-28).
void apply_preset(ExperimentConfig& cfg, const std::string& preset);

/// Flat key=value text with optional [section] headers. Values with units:
/// powers are given in dBm (p_device_dbm, ...), sizes in MB, cycles in
/// Megacycles; everything is converted to SI on load. Unknown keys are
/// rejected with a ParseError; invariant breaches raise a ValidationError
/// naming the field.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

/// Canonical serialization used for hashing and the provenance manifest.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64-bit over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Manifest text: config hash, seeds, build commit id.
std::string manifest_text(const ExperimentConfig& cfg);

}  // namespace offload
