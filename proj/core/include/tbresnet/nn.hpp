#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tbresnet/random.hpp"

namespace tbresnet {

/// Dense ReLU network. Layer l maps dims[l] -> dims[l+1] as W_l t + b_l with
/// W_l stored dims[l+1] x dims[l]; every layer but the last applies ReLU, the
/// last is affine and yields the K per-alternative utilities.
struct MlpParams {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpParams zeros(std::vector<int> dims);
  /// Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)); zero biases.
  static MlpParams glorot(std::vector<int> dims, Rng& rng);

  /// dims = [input, width x (depth - 1), outputs]
  static std::vector<int> architecture(int input_dim, int depth, int width, int outputs);

  std::size_t n_layers() const { return weights.size(); }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  Eigen::Index n_params() const;

  /// Throws DimensionError unless the dims chain and every entry is finite.
  void validate() const;
};

/// Same shapes as MlpParams; `input` holds d(upstream . output)/d(input) with
/// one column per sample.
struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd input;

  static MlpGradients zeros_like(const MlpParams& p);
};

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& input);

/// Columns are samples: inputs is d_in x B, result is K x B.
Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs);

/// Gradients of sum_b upstream(:, b) . output(:, b) with respect to every
/// parameter (summed over the batch) and every input column. ReLU'(0) = 0.
MlpGradients mlp_backward(const MlpParams& params, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& upstream,
                          bool want_input_gradient = true);

MlpGradients mlp_backward(const MlpParams& params, const Eigen::VectorXd& input, const Eigen::VectorXd& upstream);

struct OptimizerConfig {
  double learning_rate = 0.01;
  int iterations = 5000;
  int batch_size = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// theta <- theta - lr * g. Throws NumericalError("non-finite gradient at
/// iteration t") if any gradient entry is NaN or infinite; theta is left untouched.
void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate, long iteration);
void sgd_step(MlpParams& params, const MlpGradients& grads, double learning_rate, long iteration);

/// Mini-batches from per-epoch shuffles of 0..n-1. A final partial batch is
/// dropped and the next epoch starts. The batch size is clamped to n.
class BatchSampler {
 public:
  BatchSampler(Eigen::Index n, int batch_size, Rng rng);

  std::span<const Eigen::Index> next();
  long epoch() const { return epoch_; }
  Eigen::Index batch_size() const { return batch_; }

 private:
  void reshuffle();

  std::vector<Eigen::Index> order_;
  Eigen::Index batch_;
  Eigen::Index cursor_ = 0;
  long epoch_ = 0;
  Rng rng_;
};

}  // namespace tbresnet
