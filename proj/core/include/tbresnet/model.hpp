#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tbresnet/dataset.hpp"
#include "tbresnet/dcm.hpp"
#include "tbresnet/nn.hpp"

namespace tbresnet {

inline constexpr double kProbabilityFloor = 1e-300;

enum class Trainer { sequential, simultaneous, dcm_only, dnn_only };

std::string_view to_string(Trainer t);
Trainer parse_trainer(std::string_view name);

struct TrainingLog {
  Trainer trainer = Trainer::sequential;
  std::uint64_t seed = 0;
  std::vector<double> dcm_loss;  // stage 1: one entry per optimizer iteration
  std::vector<double> dnn_loss;  // stage 2 / joint SGD: mini-batch loss per iteration
  int dcm_iterations = 0;
  bool dcm_converged = false;
  double dcm_gradient_norm = 0.0;
  ClampDiagnostics clamps;
};

/// Utilities v = (1 - delta) * V_theory + delta * V_network fed to a softmax.
///
/// The model consumes StandardizedInputs (see `encode`). The network and the
/// MNL utility read standardized values directly; PT and HD payoff,
/// probability and delay columns are mapped back to their original units
/// with the stored statistics before the theory formulas are applied.
struct TbResNetModel {
  double delta = 0.0;
  DatasetSchema schema;
  DcmSpec dcm_spec;
  DcmLayout layout;
  Eigen::VectorXd dcm_params;
  MlpParams mlp;
  StandardizationStats stats;
  TrainingLog log;

  /// Throws if delta is outside [0, 1], layouts disagree, or parameters are non-finite.
  void validate() const;

  StandardizedInputs encode(const ChoiceDataset& raw) const { return stats.encode(raw); }

  /// Standardized x row -> the row the theory formulas read.
  Eigen::VectorXd theory_x(const Eigen::VectorXd& standardized_x) const;
  /// d(theory x)/d(standardized x) per column (the std for raw-unit columns, 1 otherwise).
  Eigen::VectorXd theory_x_scale() const;
};

/// Input matrix for the network: (|x| + |z|) x N, one column per observation.
Eigen::MatrixXd network_inputs(const StandardizedInputs& inputs);

Eigen::MatrixXd theory_utilities(const TbResNetModel& model, const StandardizedInputs& inputs,
                                 ClampDiagnostics* diagnostics = nullptr);
Eigen::MatrixXd network_utilities(const TbResNetModel& model, const StandardizedInputs& inputs);

/// N x K combined utilities.
Eigen::MatrixXd combined_utilities(const TbResNetModel& model, const StandardizedInputs& inputs);
Eigen::VectorXd combined_utility(const TbResNetModel& model, const Eigen::VectorXd& x_row,
                                 const Eigen::VectorXd& z_row);

/// Softmax with max-subtraction.
Eigen::VectorXd choice_probabilities(const Eigen::VectorXd& utilities);
/// Row-wise softmax of an N x K utility matrix.
Eigen::MatrixXd choice_probabilities(const Eigen::MatrixXd& utilities);

/// -log softmax(utilities)[choice] via log-sum-exp; exact however extreme the utilities are.
double choice_nll(const Eigen::VectorXd& utilities, int choice);

Eigen::MatrixXd predict_probabilities(const TbResNetModel& model, const StandardizedInputs& inputs);

/// Mean negative log probability of the chosen alternatives (floored at 1e-300).
double nll(const Eigen::MatrixXd& probabilities, std::span<const int> choices);
/// Model overloads work from utilities, so no floor applies.
double nll(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> choices);
double nll(const TbResNetModel& model, const ChoiceDataset& raw);

struct LossGradients {
  double loss = 0.0;
  Eigen::VectorXd dcm;   // d loss / d theory parameters
  MlpGradients mlp;      // d loss / d network parameters (mlp.input unused)
  Eigen::MatrixXd x;     // N x |x|, d loss / d standardized x
  Eigen::MatrixXd z;     // N x |z|
};

/// Gradient of the mean negative log-likelihood over all rows with respect to
/// every trainable parameter and every standardized input.
LossGradients loss_gradients(const TbResNetModel& model, const StandardizedInputs& inputs,
                             std::span<const int> choices);

struct InputGradients {
  Eigen::MatrixXd x;  // N x |x|
  Eigen::MatrixXd z;  // N x |z|
};

/// Per-row gradient of -ln P(target_i | inputs_i) with respect to that row's
/// standardized inputs. Used by the gradient-sign perturbations.
InputGradients input_gradients(const TbResNetModel& model, const StandardizedInputs& inputs,
                               std::span<const int> targets);

/// Per-row gradient of sum_k weights(i, k) * v_ik with respect to the
/// standardized inputs, where v are the combined utilities.
InputGradients utility_input_gradients(const TbResNetModel& model, const StandardizedInputs& inputs,
                                       const Eigen::MatrixXd& weights);

}  // namespace tbresnet
