#include "tbresnet/metrics.hpp"

#include <cmath>

#include "tbresnet/error.hpp"
#include "tbresnet/random.hpp"

namespace tbresnet {
namespace {

void check_labels(std::span<const int> predicted, std::span<const int> truth) {
  if (truth.empty()) throw DataError("metrics need at least one observation");
  if (predicted.size() != truth.size()) throw DimensionError("predicted and true labels differ in length");
}

}  // namespace

std::vector<int> predicted_choices(const Eigen::MatrixXd& probabilities) {
  std::vector<int> out(static_cast<std::size_t>(probabilities.rows()));
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probabilities.cols(); ++k) {
      if (probabilities(i, k) > probabilities(i, best)) best = k;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Eigen::MatrixXi confusion_matrix(std::span<const int> predicted, std::span<const int> truth, int n_classes) {
  check_labels(predicted, truth);
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || predicted[i] < 0 || predicted[i] >= n_classes) {
      throw DataError("label out of range at row " + std::to_string(i));
    }
    ++m(truth[i], predicted[i]);
  }
  return m;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  check_labels(predicted, truth);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

double cross_entropy(const Eigen::MatrixXd& probabilities, std::span<const int> truth) {
  if (truth.empty()) throw DataError("metrics need at least one observation");
  if (static_cast<Eigen::Index>(truth.size()) != probabilities.rows()) {
    throw DimensionError("one label per probability row is required");
  }
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    if (std::abs(probabilities.row(i).sum() - 1.0) > 1e-9) {
      throw DataError("probability row " + std::to_string(i) + " is not normalized");
    }
  }
  return nll(probabilities, truth);
}

double f1_weighted(std::span<const int> predicted, std::span<const int> truth, int n_classes) {
  const Eigen::MatrixXi m = confusion_matrix(predicted, truth, n_classes);
  const double n = static_cast<double>(truth.size());
  double f1 = 0.0;
  for (int k = 0; k < n_classes; ++k) {
    const double tp = m(k, k);
    const double pred = m.col(k).sum();
    const double actual = m.row(k).sum();
    if (pred == 0.0 || actual == 0.0 || tp == 0.0) continue;
    const double prec = tp / pred;
    const double rec = tp / actual;
    f1 += (actual / n) * 2.0 * prec * rec / (prec + rec);
  }
  return f1;
}

MetricReport evaluate(const Eigen::MatrixXd& probabilities, std::span<const int> truth) {
  const int K = static_cast<int>(probabilities.cols());
  const auto pred = predicted_choices(probabilities);
  MetricReport r;
  r.accuracy = accuracy(pred, truth);
  r.cross_entropy = cross_entropy(probabilities, truth);
  r.f1 = f1_weighted(pred, truth, K);
  r.confusion = confusion_matrix(pred, truth, K);
  r.precision = Eigen::VectorXd::Zero(K);
  r.recall = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k) {
    const int col = r.confusion.col(k).sum();
    const int row = r.confusion.row(k).sum();
    if (col > 0) r.precision[k] = static_cast<double>(r.confusion(k, k)) / col;
    if (row > 0) r.recall[k] = static_cast<double>(r.confusion(k, k)) / row;
  }
  return r;
}

MetricReport evaluate(const TbResNetModel& model, const ChoiceDataset& raw) {
  return evaluate(predict_probabilities(model, model.encode(raw)), raw.choices());
}

Eigen::VectorXd probability_derivatives(const TbResNetModel& model, const ChoiceDataset& raw, int k1,
                                        Eigen::Index column, bool is_x) {
  if (k1 < 0 || k1 >= model.schema.n_alternatives) throw ConfigError("output alternative out of range");
  const StandardizedInputs in = model.encode(raw);
  const Eigen::MatrixXd p = predict_probabilities(model, in);
  // dP_k1/dv = P_k1 (e_k1 - P)
  Eigen::MatrixXd w = -p;
  w.col(k1).array() += 1.0;
  w.array().colwise() *= p.col(k1).array();
  const InputGradients g = utility_input_gradients(model, in, w);
  if (is_x) return g.x.col(column) / model.stats.x_std[column];
  return g.z.col(column) / model.stats.z_std[column];
}

Elasticity elasticity(const TbResNetModel& model, const ChoiceDataset& raw, int k1, const std::string& column) {
  bool is_x = true;
  Eigen::Index c = 0;
  if (auto xi = model.schema.x_column(column)) {
    c = *xi;
  } else if (auto zi = model.schema.z_column(column)) {
    c = *zi;
    is_x = false;
  } else {
    throw ConfigError("unknown attribute '" + column + "'");
  }
  const Eigen::VectorXd dp = probability_derivatives(model, raw, k1, c, is_x);
  const Eigen::MatrixXd p = predict_probabilities(model, model.encode(raw));
  const Eigen::VectorXd values = is_x ? Eigen::VectorXd(raw.x().col(c)) : Eigen::VectorXd(raw.z().col(c));

  Elasticity e;
  e.column = column;
  e.output_alternative = k1;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (values[i] == 0.0) {
      ++e.rows_skipped;
      continue;
    }
    e.sum += dp[i] * values[i] / std::max(p(i, k1), kProbabilityFloor);
    ++e.rows_used;
  }
  e.mean = e.rows_used > 0 ? e.sum / static_cast<double>(e.rows_used) : 0.0;
  return e;
}

std::vector<Elasticity> elasticity_table(const TbResNetModel& model, const ChoiceDataset& raw) {
  std::vector<Elasticity> out;
  for (const auto& a : model.schema.alt_attributes) {
    for (int k = 0; k < model.schema.n_alternatives; ++k) out.push_back(elasticity(model, raw, k, a.column_name()));
  }
  return out;
}

RademacherEstimate empirical_rademacher(const Eigen::MatrixXd& function_values, int n_draws, std::uint64_t seed) {
  if (function_values.rows() < 1 || function_values.cols() < 1) {
    throw DimensionError("Rademacher estimate needs at least one function and one sample");
  }
  if (n_draws < 1) throw ConfigError("n_draws must be positive");
  const Eigen::Index N = function_values.cols();
  Rng rng = make_rng(seed, "rademacher");
  Eigen::VectorXd sigma(N);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int d = 0; d < n_draws; ++d) {
    for (Eigen::Index i = 0; i < N; ++i) sigma[i] = rademacher_sign(rng);
    const double sup = (function_values * sigma).maxCoeff() / static_cast<double>(N);
    sum += sup;
    sum_sq += sup * sup;
  }
  const double mean = sum / n_draws;
  const double var = n_draws > 1 ? std::max(0.0, (sum_sq - n_draws * mean * mean) / (n_draws - 1)) : 0.0;
  return {mean, std::sqrt(var / n_draws)};
}

}  // namespace tbresnet
