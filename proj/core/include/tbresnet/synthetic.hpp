#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tbresnet/dataset.hpp"
#include "tbresnet/dcm.hpp"
#include "tbresnet/random.hpp"

namespace tbresnet {

enum class Distribution { bernoulli, normal, lognormal, beta, complement, constant };

/// Marginal law of one generated column, parameterized by its target mean
/// and standard deviation. `complement` columns are 1 - source.
struct ColumnDesign {
  std::string column;  // full column name, e.g. "alt0__prob1" or "z__age"
  Distribution distribution = Distribution::normal;
  double mean = 0.0;
  double std = 1.0;
  std::string source;  // complement only
};

enum class Noise { gumbel, none };

Noise parse_noise(std::string_view name);
std::string_view to_string(Noise n);

/// Everything needed to simulate one choice scenario. Columns are drawn
/// independently. The true utility is the theory utility evaluated the way
/// the model evaluates it (standardized inputs, with payoff/probability/delay
/// columns in original units) using the design moments as standardization
/// statistics, plus an optional interaction gamma * s_a * s_b on alternative 0.
struct SyntheticDesign {
  DatasetSchema schema;
  DcmSpec spec;
  std::vector<ColumnDesign> columns;  // one per schema column, in x-then-z order
  Eigen::VectorXd true_params;        // flat layout of resolve(spec, schema)
  double nonlinear_strength = 0.0;
  std::string interaction_a;
  std::string interaction_b;

  StandardizationStats design_stats() const;
  void validate() const;
};

/// Designs matched to survey summary statistics: a five-mode travel survey
/// (mnl), two-outcome lotteries (pt) and immediate-versus-delayed payments (hd).
/// Monetary amounts for pt and hd are in thousand dong.
SyntheticDesign default_design(Scenario scenario);

/// N x K true utilities of raw observations under the design.
Eigen::MatrixXd true_utilities(const SyntheticDesign& design, const Eigen::MatrixXd& x, const Eigen::MatrixXd& z);

/// Gumbel-max choices (softmax-distributed) or argmax with lowest-index ties.
std::vector<int> sample_choices(const Eigen::MatrixXd& utilities, Noise noise, Rng& rng);

/// Draws n observations. Attributes come from the "generate" stream and the
/// utility noise from "noise", so gumbel and none runs share attributes.
ChoiceDataset generate_synthetic(const SyntheticDesign& design, Eigen::Index n, Noise noise, std::uint64_t seed);

}  // namespace tbresnet
