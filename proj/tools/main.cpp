#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"TB-ResNet: theory-based residual choice models"};
  cli.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  int workers = 1;

  const char* commands[][2] = {
      {"generate", "simulate a synthetic choice dataset"},
      {"fit", "train one model at the configured delta"},
      {"sweep", "train and evaluate across the delta grid"},
      {"eval", "score a saved model"},
      {"perturb", "accuracy under adversarial and random input noise"},
      {"elasticity", "aggregate choice elasticities of a saved model"},
      {"surface", "utility surface over two attributes"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = cli.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--workers", workers, "worker threads (overrides config)")->check(CLI::PositiveNumber);
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : static_cast<int>(tbresnet::app::ExitCode::config);
  }

  CLI::App* sub = cli.get_subcommands().front();
  tbresnet::app::Overrides overrides;
  if (sub->count("--seed") > 0) overrides.seed = seed;
  if (sub->count("--out") > 0) overrides.out = out;
  if (sub->count("--workers") > 0) overrides.workers = workers;
  std::optional<std::filesystem::path> config_path;
  if (sub->count("--config") > 0) config_path = config;

  return tbresnet::app::run(sub->get_name(), config_path, overrides, std::cout, std::cerr);
}
