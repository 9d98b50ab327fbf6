#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tbresnet/metrics.hpp"
#include "tbresnet/model.hpp"

namespace tbresnet {

enum class Attack { fgsm, tgsm, gaussian };

std::string_view to_string(Attack a);
Attack parse_attack(std::string_view name);

/// TGSM target: the least likely class per row, or one fixed alternative.
struct TargetRule {
  bool least_likely = true;
  int fixed_class = 0;

  std::string describe() const;
};

struct PerturbationOptions {
  bool perturb_covariates = true;
  TargetRule target;
};

/// x + eps * sign(grad_x L(y)), in standardized space; sign(0) = 0.
StandardizedInputs fgsm(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> choices,
                        double epsilon, const PerturbationOptions& options = {});

/// x - eps * sign(grad_x L(target)).
StandardizedInputs tgsm(const TbResNetModel& model, const StandardizedInputs& inputs, double epsilon,
                        const PerturbationOptions& options = {});

/// Standard normal directions from the "attack" stream. The same draw is
/// reused for every epsilon of a given seed.
StandardizedInputs gaussian_directions(const StandardizedInputs& inputs, std::uint64_t seed);
StandardizedInputs gaussian_noise(const StandardizedInputs& inputs, double epsilon, std::uint64_t seed,
                                  const PerturbationOptions& options = {});

std::vector<int> tgsm_targets(const TbResNetModel& model, const StandardizedInputs& inputs, const TargetRule& rule);

struct PerturbationRow {
  double epsilon = 0.0;
  double accuracy = 0.0;
  double cross_entropy = 0.0;
  double f1 = 0.0;
};

struct PerturbationReport {
  Attack attack = Attack::fgsm;
  std::string target_rule;  // tgsm only
  std::vector<PerturbationRow> rows;
};

/// Default grid: 0, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2.
std::vector<double> default_epsilon_grid();

/// Evaluates the fixed model on perturbed copies of `test` (raw units).
PerturbationReport robustness_curve(const TbResNetModel& model, const ChoiceDataset& test, Attack attack,
                                    const std::vector<double>& epsilons, std::uint64_t seed,
                                    const PerturbationOptions& options = {});

}  // namespace tbresnet
