#include "tbresnet/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tbresnet/error.hpp"

namespace tbresnet {

MlpParams MlpParams::zeros(std::vector<int> dims) {
  if (dims.size() < 2) throw DimensionError("an MLP needs at least input and output dimensions");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] <= 0 || dims[l + 1] <= 0) throw DimensionError("layer dimensions must be positive");
    p.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    p.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  p.layer_dims = std::move(dims);
  return p;
}

MlpParams MlpParams::glorot(std::vector<int> dims, Rng& rng) {
  MlpParams p = zeros(std::move(dims));
  for (auto& w : p.weights) {
    const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // Row-major fill order keeps the draw sequence independent of storage order.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = a * (2.0 * uniform_open01(rng) - 1.0);
    }
  }
  return p;
}

std::vector<int> MlpParams::architecture(int input_dim, int depth, int width, int outputs) {
  if (depth < 1 || width < 1 || input_dim < 1 || outputs < 1) {
    throw ConfigError("network depth, width and dimensions must be positive");
  }
  std::vector<int> dims{input_dim};
  for (int l = 0; l + 1 < depth; ++l) dims.push_back(width);
  dims.push_back(outputs);
  return dims;
}

Eigen::Index MlpParams::n_params() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

void MlpParams::validate() const {
  if (layer_dims.size() < 2 || weights.size() + 1 != layer_dims.size() || biases.size() != weights.size()) {
    throw DimensionError("MLP layer count does not match layer_dims");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
        biases[l].size() != layer_dims[l + 1]) {
      throw DimensionError("MLP layer " + std::to_string(l) + " does not chain with layer_dims");
    }
    if (!weights[l].allFinite() || !biases[l].allFinite()) {
      throw DimensionError("MLP layer " + std::to_string(l) + " has non-finite entries");
    }
  }
}

MlpGradients MlpGradients::zeros_like(const MlpParams& p) {
  MlpGradients g;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(p.biases[l].size()));
  }
  return g;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != params.input_dim()) throw DimensionError("MLP input has the wrong dimension");
  Eigen::MatrixXd a = inputs;
  const std::size_t L = params.n_layers();
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd next = params.weights[l] * a;
    next.colwise() += params.biases[l];
    if (l + 1 < L) next = next.cwiseMax(0.0);
    a = std::move(next);
  }
  return a;
}

Eigen::VectorXd mlp_forward(const MlpParams& params, const Eigen::VectorXd& input) {
  return mlp_forward_batch(params, Eigen::MatrixXd(input));
}

MlpGradients mlp_backward(const MlpParams& params, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& upstream,
                          bool want_input_gradient) {
  if (inputs.rows() != params.input_dim()) throw DimensionError("MLP input has the wrong dimension");
  if (upstream.rows() != params.output_dim() || upstream.cols() != inputs.cols()) {
    throw DimensionError("upstream gradient does not match the MLP output");
  }
  const std::size_t L = params.n_layers();
  std::vector<Eigen::MatrixXd> acts;  // acts[l] is the input of layer l
  acts.reserve(L);
  acts.push_back(inputs);
  for (std::size_t l = 0; l + 1 < L; ++l) {
    Eigen::MatrixXd z = params.weights[l] * acts.back();
    z.colwise() += params.biases[l];
    acts.push_back(z.cwiseMax(0.0));
  }

  MlpGradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l].noalias() = delta * acts[l].transpose();
    g.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = params.weights[l].transpose() * delta;
      delta = (acts[l].array() > 0.0).select(back, 0.0);
    } else if (want_input_gradient) {
      g.input = params.weights[0].transpose() * delta;
    }
  }
  return g;
}

MlpGradients mlp_backward(const MlpParams& params, const Eigen::VectorXd& input, const Eigen::VectorXd& upstream) {
  return mlp_backward(params, Eigen::MatrixXd(input), Eigen::MatrixXd(upstream), true);
}

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (iterations <= 0) throw ConfigError("iterations must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
}

void sgd_step(std::span<double> params, std::span<const double> grads, double learning_rate, long iteration) {
  if (params.size() != grads.size()) throw DimensionError("parameter and gradient sizes differ");
  for (double g : grads) {
    if (!std::isfinite(g)) throw NumericalError("non-finite gradient at iteration " + std::to_string(iteration));
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grads[i];
}

void sgd_step(MlpParams& params, const MlpGradients& grads, double learning_rate, long iteration) {
  if (grads.weights.size() != params.weights.size() || grads.biases.size() != params.biases.size()) {
    throw DimensionError("gradient layers do not match the network");
  }
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite()) {
      throw NumericalError("non-finite gradient at iteration " + std::to_string(iteration));
    }
  }
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    auto& w = params.weights[l];
    auto& b = params.biases[l];
    if (grads.weights[l].rows() != w.rows() || grads.weights[l].cols() != w.cols() ||
        grads.biases[l].size() != b.size()) {
      throw DimensionError("gradient shapes do not match the network");
    }
    sgd_step({w.data(), static_cast<std::size_t>(w.size())},
             {grads.weights[l].data(), static_cast<std::size_t>(w.size())}, learning_rate, iteration);
    sgd_step({b.data(), static_cast<std::size_t>(b.size())},
             {grads.biases[l].data(), static_cast<std::size_t>(b.size())}, learning_rate, iteration);
  }
}

BatchSampler::BatchSampler(Eigen::Index n, int batch_size, Rng rng)
    : order_(static_cast<std::size_t>(n)), batch_(std::min<Eigen::Index>(batch_size, n)), rng_(std::move(rng)) {
  if (n <= 0 || batch_size <= 0) throw ConfigError("batch sampler needs n > 0 and batch_size > 0");
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  reshuffle();
}

void BatchSampler::reshuffle() {
  shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
  ++epoch_;
}

std::span<const Eigen::Index> BatchSampler::next() {
  if (cursor_ + batch_ > static_cast<Eigen::Index>(order_.size())) reshuffle();
  std::span<const Eigen::Index> batch(order_.data() + cursor_, static_cast<std::size_t>(batch_));
  cursor_ += batch_;
  return batch;
}

}  // namespace tbresnet
