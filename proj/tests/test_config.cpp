#include <doctest.h>

#include <sstream>

#include "offload/config.hpp"
#include "offload/errors.hpp"

using namespace offload;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("empty config yields the documented defaults") {
  const ExperimentConfig cfg = parse("");
  CHECK(cfg.env.n_devices == 10);
  CHECK(cfg.env.n_uavs == 4);
  CHECK(cfg.env.n_task_types == 3);
  CHECK(cfg.env.channel.bandwidth == 20e6);
  CHECK(cfg.env.channel.carrier_freq == 2.4e9);
  CHECK(cfg.env.channel.path_loss_exp == 3.0);
  CHECK(cfg.env.channel.noise_power == doctest::Approx(2.5118864315e-13).epsilon(1e-9));
  CHECK(cfg.env.channel.p_device == doctest::Approx(0.0316227766).epsilon(1e-9));
  CHECK(cfg.env.channel.p_uav == doctest::Approx(0.1995262315).epsilon(1e-9));
  CHECK(cfg.env.battery_init == 3e4);
  CHECK(cfg.env.capacity == 24e6);  // 3 MB
  CHECK(cfg.env.compute.f_loc == 100e6);
  CHECK(cfg.env.compute.f_edg == 500e6);
  CHECK(cfg.env.compute.kappa_loc == 1e-16);
  CHECK(cfg.env.compute.kappa_edg == 1e-22);
  CHECK(cfg.env.data_size_bits.mean == 8e6);
  CHECK(cfg.env.data_size_bits.stddev == 0.8e6);
  CHECK(cfg.env.cpu_cycles.mean == 1e8);
  CHECK(cfg.env.cpu_cycles.stddev == 1e7);
  CHECK(cfg.env.priority_set == std::vector<double>{0.3, 0.6, 0.9});
  CHECK(cfg.train.episodes == 1000);
  CHECK(cfg.train.batch_size == 300);
  CHECK(cfg.train.gamma == 0.9);
  CHECK(cfg.train.adam.lr == 1e-4);
  CHECK(cfg.train.replay_capacity == 10000);
  CHECK(cfg.train.hidden_dims == std::vector<int>{32, 64, 128});
  CHECK(cfg.train.masking);
  CHECK(cfg.train.target_mode == TargetMode::kDouble);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
}

TEST_CASE("unit conversions and overrides") {
  const ExperimentConfig cfg = parse(
      "# comment line\n"
      "[system]\n"
      "n_devices = 7\n"
      "capacity_mb = 2.5\n"
      "data_size_mean_mb = 2\n"
      "cycles_mean_mc = 50\n"
      "p_device_dbm = 20  # trailing comment\n"
      "seeds = 3, 5, 8\n"
      "hidden_dims = 16,32\n"
      "target_mode = paper_eq24\n"
      "masking = off\n");
  CHECK(cfg.env.n_devices == 7);
  CHECK(cfg.env.capacity == 2.5 * 8e6);
  CHECK(cfg.env.data_size_bits.mean == 16e6);
  CHECK(cfg.env.cpu_cycles.mean == 5e7);
  CHECK(cfg.env.channel.p_device == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 5, 8});
  CHECK(cfg.train.hidden_dims == std::vector<int>{16, 32});
  CHECK(cfg.train.target_mode == TargetMode::kPaperEq24);
  CHECK_FALSE(cfg.train.masking);
}

TEST_CASE("kappa presets") {
  const ExperimentConfig consistent = parse("preset = consistent\n");
  CHECK(consistent.env.compute.kappa_loc == 1e-27);
  CHECK(consistent.env.compute.kappa_edg == 1e-28);

  // An explicit kappa wins over the preset regardless of key order.
  const ExperimentConfig mixed =
      parse("kappa_loc = 5e-20\npreset = consistent\n");
  CHECK(mixed.env.compute.kappa_loc == 5e-20);
  CHECK(mixed.env.compute.kappa_edg == 1e-28);

  ExperimentConfig cfg;
  CHECK_THROWS_AS(apply_preset(cfg, "bogus"), ValidationError);
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse("warp_speed = 9\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("warp_speed") != std::string::npos);
  }
}

TEST_CASE("validation names the offending field") {
  try {
    parse("bandwidth = -5\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("bandwidth") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("gamma = 1.5\n"), ValidationError);
  CHECK_THROWS_AS(parse("n_devices = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse("episodes = abc\n"), ParseError);
  CHECK_THROWS_AS(parse("just a line without equals\n"), ParseError);
}

TEST_CASE("hash and manifest") {
  const ExperimentConfig a = parse("");
  const ExperimentConfig b = parse("");
  CHECK(config_hash(a) == config_hash(b));

  const ExperimentConfig c = parse("n_devices = 3\n");
  CHECK(config_hash(a) != config_hash(c));

  CHECK(serialize_config(a) == serialize_config(b));
  CHECK(serialize_config(a) != serialize_config(c));

  const std::string manifest = manifest_text(a);
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("seeds = 1") != std::string::npos);
  CHECK(manifest.find("commit") != std::string::npos);
}
