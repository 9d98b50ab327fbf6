#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tbresnet/model.hpp"

namespace tbresnet {

/// Row-wise argmax; ties go to the lowest alternative index.
std::vector<int> predicted_choices(const Eigen::MatrixXd& probabilities);

/// K x K counts, rows are true labels and columns are predictions.
Eigen::MatrixXi confusion_matrix(std::span<const int> predicted, std::span<const int> truth, int n_classes);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// -(1/N) sum ln P(chosen). Throws DataError when a row does not sum to 1 within 1e-9.
double cross_entropy(const Eigen::MatrixXd& probabilities, std::span<const int> truth);

/// Class-share weighted F1; classes with an undefined F1 contribute 0.
double f1_weighted(std::span<const int> predicted, std::span<const int> truth, int n_classes);

struct MetricReport {
  double accuracy = 0.0;
  double cross_entropy = 0.0;
  double f1 = 0.0;
  Eigen::VectorXd precision;
  Eigen::VectorXd recall;
  Eigen::MatrixXi confusion;
};

MetricReport evaluate(const Eigen::MatrixXd& probabilities, std::span<const int> truth);
MetricReport evaluate(const TbResNetModel& model, const ChoiceDataset& raw);

/// Aggregate point elasticity of P_{k1} with respect to one raw input column:
/// sum_i dP_{i,k1}/dx_i * x_i / P_{i,k1}. Rows with x_i == 0 are skipped.
struct Elasticity {
  std::string column;  // x or z column name
  int output_alternative = 0;
  double sum = 0.0;
  double mean = 0.0;
  Eigen::Index rows_used = 0;
  Eigen::Index rows_skipped = 0;
};

/// Per-row derivatives dP_{i,k1} / d(raw column). `column` indexes x when
/// `is_x`, z otherwise.
Eigen::VectorXd probability_derivatives(const TbResNetModel& model, const ChoiceDataset& raw, int k1,
                                        Eigen::Index column, bool is_x);

Elasticity elasticity(const TbResNetModel& model, const ChoiceDataset& raw, int k1, const std::string& column);

/// Every x column against every output alternative, column-major in the
/// order (column, k1).
std::vector<Elasticity> elasticity_table(const TbResNetModel& model, const ChoiceDataset& raw);

struct RademacherEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo estimate of E_sigma max_m (1/N) sum_i sigma_i f_m(x_i) for a
/// finite class given as an M x N matrix of function values.
RademacherEstimate empirical_rademacher(const Eigen::MatrixXd& function_values, int n_draws, std::uint64_t seed);

}  // namespace tbresnet
