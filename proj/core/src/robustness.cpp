#include "tbresnet/robustness.hpp"

#include <algorithm>

#include "tbresnet/error.hpp"
#include "tbresnet/random.hpp"

namespace tbresnet {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

StandardizedInputs step(const StandardizedInputs& in, const InputGradients& g, double signed_eps, bool covariates) {
  StandardizedInputs out = in;
  if (signed_eps == 0.0) return out;
  out.x += signed_eps * g.x.unaryExpr(&sign);
  if (covariates) out.z += signed_eps * g.z.unaryExpr(&sign);
  return out;
}

void check_epsilon(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("epsilon must be a non-negative number");
}

}  // namespace

std::string_view to_string(Attack a) {
  switch (a) {
    case Attack::fgsm: return "fgsm";
    case Attack::tgsm: return "tgsm";
    case Attack::gaussian: return "gaussian";
  }
  return "?";
}

Attack parse_attack(std::string_view name) {
  if (name == "fgsm") return Attack::fgsm;
  if (name == "tgsm") return Attack::tgsm;
  if (name == "gaussian") return Attack::gaussian;
  throw ConfigError("unknown attack '" + std::string(name) + "' (expected fgsm, tgsm or gaussian)");
}

std::string TargetRule::describe() const {
  return least_likely ? "least_likely" : "fixed:" + std::to_string(fixed_class);
}

StandardizedInputs fgsm(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> choices,
                        double epsilon, const PerturbationOptions& options) {
  check_epsilon(epsilon);
  if (epsilon == 0.0) return inputs;
  return step(inputs, input_gradients(model, inputs, choices), epsilon, options.perturb_covariates);
}

std::vector<int> tgsm_targets(const TbResNetModel& model, const StandardizedInputs& inputs, const TargetRule& rule) {
  if (!rule.least_likely) {
    if (rule.fixed_class < 0 || rule.fixed_class >= model.schema.n_alternatives) {
      throw ConfigError("TGSM target class out of range");
    }
    return std::vector<int>(static_cast<std::size_t>(inputs.size()), rule.fixed_class);
  }
  const Eigen::MatrixXd p = predict_probabilities(model, inputs);
  std::vector<int> t(static_cast<std::size_t>(inputs.size()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index k = 0;
    p.row(i).minCoeff(&k);
    t[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  return t;
}

StandardizedInputs tgsm(const TbResNetModel& model, const StandardizedInputs& inputs, double epsilon,
                        const PerturbationOptions& options) {
  check_epsilon(epsilon);
  if (epsilon == 0.0) return inputs;
  const auto targets = tgsm_targets(model, inputs, options.target);
  return step(inputs, input_gradients(model, inputs, targets), -epsilon, options.perturb_covariates);
}

StandardizedInputs gaussian_directions(const StandardizedInputs& inputs, std::uint64_t seed) {
  Rng rng = make_rng(seed, "attack");
  StandardizedInputs d{Eigen::MatrixXd(inputs.x.rows(), inputs.x.cols()), Eigen::MatrixXd(inputs.z.rows(), inputs.z.cols())};
  // Row-major draw order: x then z for each observation.
  for (Eigen::Index i = 0; i < inputs.size(); ++i) {
    for (Eigen::Index c = 0; c < d.x.cols(); ++c) d.x(i, c) = standard_normal(rng);
    for (Eigen::Index c = 0; c < d.z.cols(); ++c) d.z(i, c) = standard_normal(rng);
  }
  return d;
}

StandardizedInputs gaussian_noise(const StandardizedInputs& inputs, double epsilon, std::uint64_t seed,
                                  const PerturbationOptions& options) {
  check_epsilon(epsilon);
  if (epsilon == 0.0) return inputs;
  const StandardizedInputs d = gaussian_directions(inputs, seed);
  StandardizedInputs out = inputs;
  out.x += epsilon * d.x;
  if (options.perturb_covariates) out.z += epsilon * d.z;
  return out;
}

std::vector<double> default_epsilon_grid() { return {0.0, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2}; }

PerturbationReport robustness_curve(const TbResNetModel& model, const ChoiceDataset& test, Attack attack,
                                    const std::vector<double>& epsilons, std::uint64_t seed,
                                    const PerturbationOptions& options) {
  if (epsilons.empty()) throw ConfigError("epsilon grid is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    check_epsilon(epsilons[i]);
    if (i > 0 && !(epsilons[i] > epsilons[i - 1])) throw ConfigError("epsilon grid must be sorted and unique");
  }
  if (std::find(epsilons.begin(), epsilons.end(), 0.0) == epsilons.end()) {
    throw ConfigError("epsilon grid must contain 0");
  }
  const StandardizedInputs clean = model.encode(test);
  const auto& y = test.choices();
  PerturbationReport report;
  report.attack = attack;
  if (attack == Attack::tgsm) report.target_rule = options.target.describe();

  // Gradients and directions do not depend on epsilon; compute them once.
  InputGradients grads;
  StandardizedInputs directions;
  double direction_sign = 1.0;
  switch (attack) {
    case Attack::fgsm: grads = input_gradients(model, clean, y); break;
    case Attack::tgsm:
      grads = input_gradients(model, clean, tgsm_targets(model, clean, options.target));
      direction_sign = -1.0;
      break;
    case Attack::gaussian: directions = gaussian_directions(clean, seed); break;
  }

  for (double eps : epsilons) {
    StandardizedInputs in;
    if (attack == Attack::gaussian) {
      in = clean;
      if (eps != 0.0) {
        in.x += eps * directions.x;
        if (options.perturb_covariates) in.z += eps * directions.z;
      }
    } else {
      in = step(clean, grads, direction_sign * eps, options.perturb_covariates);
    }
    const MetricReport r = evaluate(predict_probabilities(model, in), y);
    report.rows.push_back({eps, r.accuracy, r.cross_entropy, r.f1});
  }
  return report;
}

}  // namespace tbresnet
