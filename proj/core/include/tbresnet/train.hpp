#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tbresnet/metrics.hpp"
#include "tbresnet/model.hpp"

namespace tbresnet {

/// Theory-parameter estimation settings. Sequential stage 1 runs damped
/// Fisher scoring until the gradient norm drops below the tolerance or the
/// iteration cap is hit. Simultaneous training takes Fisher-preconditioned
/// mini-batch steps of size `learning_rate` on the theory block.
struct DcmOptimizerConfig {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;
  // Also stop once the relative loss change stays at rounding level for 5
  // iterations: clamped individual parameters can leave a kink at the optimum,
  // and scoring converges only linearly when utilities are nonlinear in theta.
  double loss_tolerance = 1e-15;
  double learning_rate = 0.05;

  void validate() const;
};

struct TrainConfig {
  int depth = 3;
  int width = 100;
  OptimizerConfig sgd;
  DcmOptimizerConfig dcm;

  void validate() const;
};

/// Untrained model: standardization fitted on `train`, theory parameters at
/// their starting point and Glorot network weights from the "init" stream.
TbResNetModel initial_model(const DcmSpec& spec, double delta, const ChoiceDataset& train, const TrainConfig& config,
                            std::uint64_t seed);

struct DcmFit {
  Eigen::VectorXd theta;
  std::vector<double> losses;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  ClampDiagnostics clamps;
};

/// Maximizes the likelihood of softmax(scale * V_theory) over the theory parameters.
DcmFit fit_theory(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> choices,
                  double scale, const DcmOptimizerConfig& config);

/// Stage 1 fits the theory with utilities scaled by (1 - delta) (skipped at
/// delta = 1, parameters left at zero); stage 2 freezes it and fits the
/// network by mini-batch SGD on the combined utilities (skipped at delta = 0).
TbResNetModel train_sequential(const DcmSpec& spec, double delta, const ChoiceDataset& train,
                               const TrainConfig& config, std::uint64_t seed);

/// Both parameter blocks updated at every mini-batch step.
TbResNetModel train_simultaneous(const DcmSpec& spec, double delta, const ChoiceDataset& train,
                                 const TrainConfig& config, std::uint64_t seed);

TbResNetModel train(Trainer trainer, const DcmSpec& spec, double delta, const ChoiceDataset& train,
                    const TrainConfig& config, std::uint64_t seed);

/// The theory model alone (delta = 0).
TbResNetModel fit_pure_dcm(const DcmSpec& spec, const ChoiceDataset& train, const TrainConfig& config,
                           std::uint64_t seed);

/// A plain softmax network on the standardized inputs (delta = 1), trained
/// by its own loop with the same "init" and "batch" streams.
TbResNetModel fit_standalone_dnn(const DcmSpec& spec, const ChoiceDataset& train, const TrainConfig& config,
                                 std::uint64_t seed);

/// Sorted, unique values in [0, 1].
struct DeltaGrid {
  std::vector<double> values;

  void validate() const;
  /// 27 values from 1e-10 to 1 on a roughly logarithmic scale.
  static DeltaGrid standard();
  /// Nine-point subset of the standard grid.
  static DeltaGrid reduced();
};

struct SweepRow {
  double delta = 0.0;
  bool ok = false;
  std::string error;
  double accuracy = 0.0;
  double cross_entropy = 0.0;
  double f1 = 0.0;
};

struct SweepResult {
  Trainer trainer = Trainer::sequential;
  std::vector<SweepRow> rows;
  /// Test accuracy of always predicting the most frequent training choice.
  double baseline_accuracy = 0.0;
  std::optional<double> best_accuracy_delta;  // ties go to the smallest delta
  std::optional<double> best_loss_delta;
};

/// One independent fit per delta with the same seed; up to `workers` fits
/// run concurrently. A failing delta is recorded and the sweep continues.
SweepResult sweep(const DcmSpec& spec, const DeltaGrid& grid, const ChoiceDataset& train, const ChoiceDataset& test,
                  const TrainConfig& config, Trainer trainer, std::uint64_t seed, int workers = 1,
                  std::vector<std::optional<TbResNetModel>>* models = nullptr);

}  // namespace tbresnet
