#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <tbresnet/robustness.hpp>
#include <tbresnet/serialization.hpp>
#include <tbresnet/surface.hpp>
#include <tbresnet/synthetic.hpp>
#include <tbresnet/train.hpp>

namespace tbresnet::app {

enum class ExitCode : int { ok = 0, numerical = 1, config = 2 };

struct DataConfig {
  std::optional<std::filesystem::path> path;  // split by train_fraction
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> test;
  double train_fraction = 0.75;
};

struct GeneratorConfig {
  Eigen::Index n = 4000;
  Noise noise = Noise::gumbel;
  double nonlinear_strength = 0.0;
  std::optional<std::vector<double>> true_params;
};

struct PerturbConfig {
  std::vector<Attack> attacks{Attack::fgsm, Attack::tgsm, Attack::gaussian};
  std::vector<double> epsilons = default_epsilon_grid();
  bool perturb_covariates = true;
  TargetRule target;
};

struct SurfaceConfig {
  int alternative = 0;
  AxisSpec a;
  AxisSpec b;
  bool a_range_given = false;
  bool b_range_given = false;
};

/// Fully resolved run configuration; every field has an explicit default.
struct RunConfig {
  Scenario scenario = Scenario::mnl;
  std::optional<DataConfig> data;
  GeneratorConfig generator;
  std::optional<DcmSpec> dcm_spec;
  double delta = 0.5;
  DeltaGrid delta_grid = DeltaGrid::standard();
  Trainer trainer = Trainer::sequential;
  TrainConfig train;
  std::optional<std::filesystem::path> model;
  PerturbConfig perturb;
  std::vector<std::string> elasticity_attributes;  // empty: every alternative-specific column
  std::optional<SurfaceConfig> surface;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  int workers = 1;
};

/// Parses and validates a config document. Relative paths resolve against `base_dir`.
RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir);

/// The resolved configuration as JSON, defaults included.
Json config_to_json(const RunConfig& config);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> workers;
};

/// Runs one subcommand; returns the process exit code. Messages go to `err`,
/// summaries to `out`.
int run(const std::string& command, const std::optional<std::filesystem::path>& config_path,
        const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace tbresnet::app
