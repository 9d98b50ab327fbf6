#include "tbresnet/model.hpp"

#include <cmath>

#include "tbresnet/error.hpp"

namespace tbresnet {
namespace {

void check_inputs(const TbResNetModel& model, const StandardizedInputs& inputs) {
  if (inputs.x.cols() != model.schema.n_x() || inputs.z.cols() != model.schema.n_z() ||
      inputs.x.rows() != inputs.z.rows()) {
    throw DimensionError("inputs do not match the model schema");
  }
}

void check_targets(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> targets) {
  if (static_cast<Eigen::Index>(targets.size()) != inputs.size()) {
    throw DimensionError("one target per observation is required");
  }
  for (int t : targets) {
    if (t < 0 || t >= model.schema.n_alternatives) throw DimensionError("target alternative out of range");
  }
}

// Accumulates sum_k w_ik dv_ik/d(inputs) for every row, and optionally the
// parameter gradients sum_i sum_k w_ik dv_ik/d(theta).
struct Backprop {
  Eigen::VectorXd dcm;
  MlpGradients mlp;
  Eigen::MatrixXd x;
  Eigen::MatrixXd z;
};

Backprop backprop_utilities(const TbResNetModel& model, const StandardizedInputs& inputs,
                            const Eigen::MatrixXd& weights, bool want_params) {
  const Eigen::Index N = inputs.size();
  const double delta = model.delta;
  Backprop out;
  out.x = Eigen::MatrixXd::Zero(N, inputs.x.cols());
  out.z = Eigen::MatrixXd::Zero(N, inputs.z.cols());
  out.dcm = Eigen::VectorXd::Zero(model.dcm_params.size());

  if (delta < 1.0) {
    const double s = 1.0 - delta;
    const Eigen::VectorXd scale = model.theory_x_scale();
    for (Eigen::Index i = 0; i < N; ++i) {
      const Eigen::VectorXd xt = model.theory_x(inputs.x.row(i).transpose());
      const DcmGradients g = dcm_gradients(model.layout, model.dcm_params, xt, inputs.z.row(i).transpose());
      const Eigen::VectorXd w = weights.row(i).transpose();
      out.x.row(i) = s * (g.d_x.transpose() * w).cwiseProduct(scale).transpose();
      out.z.row(i) = s * (g.d_z.transpose() * w).transpose();
      if (want_params) out.dcm.noalias() += s * (g.d_params.transpose() * w);
    }
  }
  if (delta > 0.0) {
    const Eigen::MatrixXd net_in = network_inputs(inputs);
    const Eigen::MatrixXd upstream = delta * weights.transpose();
    MlpGradients g = mlp_backward(model.mlp, net_in, upstream, true);
    out.x += g.input.topRows(inputs.x.cols()).transpose();
    out.z += g.input.bottomRows(inputs.z.cols()).transpose();
    if (want_params) {
      g.input.resize(0, 0);
      out.mlp = std::move(g);
    }
  }
  if (want_params && delta <= 0.0) out.mlp = MlpGradients::zeros_like(model.mlp);
  return out;
}

}  // namespace

std::string_view to_string(Trainer t) {
  switch (t) {
    case Trainer::sequential: return "sequential";
    case Trainer::simultaneous: return "simultaneous";
    case Trainer::dcm_only: return "dcm_only";
    case Trainer::dnn_only: return "dnn_only";
  }
  return "?";
}

Trainer parse_trainer(std::string_view name) {
  if (name == "sequential") return Trainer::sequential;
  if (name == "simultaneous") return Trainer::simultaneous;
  if (name == "dcm_only") return Trainer::dcm_only;
  if (name == "dnn_only") return Trainer::dnn_only;
  throw ConfigError("unknown trainer '" + std::string(name) + "' (expected sequential or simultaneous)");
}

void TbResNetModel::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0, 1]");
  if (layout.n_x != schema.n_x() || layout.n_z != schema.n_z() ||
      layout.n_alternatives != schema.n_alternatives) {
    throw DimensionError("DCM layout does not match the dataset schema");
  }
  if (dcm_params.size() != layout.n_params() || !dcm_params.allFinite()) {
    throw DimensionError("DCM parameters are missing or non-finite");
  }
  mlp.validate();
  if (mlp.input_dim() != schema.n_x() + schema.n_z() || mlp.output_dim() != schema.n_alternatives) {
    throw DimensionError("network dimensions do not match the dataset schema");
  }
  if (stats.x_mean.size() != schema.n_x() || stats.x_std.size() != schema.n_x() ||
      stats.z_mean.size() != schema.n_z() || stats.z_std.size() != schema.n_z()) {
    throw DimensionError("standardization statistics do not match the dataset schema");
  }
}

Eigen::VectorXd TbResNetModel::theory_x(const Eigen::VectorXd& standardized_x) const {
  Eigen::VectorXd xt = standardized_x;
  for (Eigen::Index c : layout.raw_unit_columns()) xt[c] = stats.decode_x(c, standardized_x[c]);
  return xt;
}

Eigen::VectorXd TbResNetModel::theory_x_scale() const {
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(schema.n_x());
  for (Eigen::Index c : layout.raw_unit_columns()) scale[c] = stats.x_std[c];
  return scale;
}

Eigen::MatrixXd network_inputs(const StandardizedInputs& inputs) {
  Eigen::MatrixXd m(inputs.x.cols() + inputs.z.cols(), inputs.size());
  m.topRows(inputs.x.cols()) = inputs.x.transpose();
  m.bottomRows(inputs.z.cols()) = inputs.z.transpose();
  return m;
}

Eigen::MatrixXd theory_utilities(const TbResNetModel& model, const StandardizedInputs& inputs,
                                 ClampDiagnostics* diagnostics) {
  check_inputs(model, inputs);
  Eigen::MatrixXd v(inputs.size(), model.schema.n_alternatives);
  for (Eigen::Index i = 0; i < inputs.size(); ++i) {
    v.row(i) = dcm_utility(model.layout, model.dcm_params, model.theory_x(inputs.x.row(i).transpose()),
                           inputs.z.row(i).transpose(), diagnostics)
                   .transpose();
  }
  return v;
}

Eigen::MatrixXd network_utilities(const TbResNetModel& model, const StandardizedInputs& inputs) {
  check_inputs(model, inputs);
  return mlp_forward_batch(model.mlp, network_inputs(inputs)).transpose();
}

Eigen::MatrixXd combined_utilities(const TbResNetModel& model, const StandardizedInputs& inputs) {
  check_inputs(model, inputs);
  const double d = model.delta;
  if (d <= 0.0) return theory_utilities(model, inputs);
  if (d >= 1.0) return network_utilities(model, inputs);
  return (1.0 - d) * theory_utilities(model, inputs) + d * network_utilities(model, inputs);
}

Eigen::VectorXd combined_utility(const TbResNetModel& model, const Eigen::VectorXd& x_row,
                                 const Eigen::VectorXd& z_row) {
  StandardizedInputs one{x_row.transpose(), z_row.transpose()};
  return combined_utilities(model, one).row(0).transpose();
}

Eigen::VectorXd choice_probabilities(const Eigen::VectorXd& utilities) {
  const double m = utilities.maxCoeff();
  Eigen::VectorXd e = (utilities.array() - m).exp().matrix();
  return e / e.sum();
}

Eigen::MatrixXd choice_probabilities(const Eigen::MatrixXd& utilities) {
  Eigen::MatrixXd p(utilities.rows(), utilities.cols());
  for (Eigen::Index i = 0; i < utilities.rows(); ++i) {
    p.row(i) = choice_probabilities(Eigen::VectorXd(utilities.row(i).transpose())).transpose();
  }
  return p;
}

double choice_nll(const Eigen::VectorXd& utilities, int choice) {
  const double m = utilities.maxCoeff();
  return m + std::log((utilities.array() - m).exp().sum()) - utilities[choice];
}

Eigen::MatrixXd predict_probabilities(const TbResNetModel& model, const StandardizedInputs& inputs) {
  return choice_probabilities(combined_utilities(model, inputs));
}

double nll(const Eigen::MatrixXd& probabilities, std::span<const int> choices) {
  if (static_cast<Eigen::Index>(choices.size()) != probabilities.rows() || choices.empty()) {
    throw DimensionError("one choice per probability row is required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    total -= std::log(std::max(probabilities(static_cast<Eigen::Index>(i), choices[i]), kProbabilityFloor));
  }
  return total / static_cast<double>(choices.size());
}

namespace {

double utility_nll(const Eigen::MatrixXd& utilities, std::span<const int> choices) {
  if (static_cast<Eigen::Index>(choices.size()) != utilities.rows() || choices.empty()) {
    throw DimensionError("one choice per utility row is required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    total += choice_nll(utilities.row(static_cast<Eigen::Index>(i)).transpose(), choices[i]);
  }
  return total / static_cast<double>(choices.size());
}

}  // namespace

double nll(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> choices) {
  return utility_nll(combined_utilities(model, inputs), choices);
}

double nll(const TbResNetModel& model, const ChoiceDataset& raw) {
  return nll(model, model.encode(raw), raw.choices());
}

LossGradients loss_gradients(const TbResNetModel& model, const StandardizedInputs& inputs,
                             std::span<const int> choices) {
  check_inputs(model, inputs);
  check_targets(model, inputs, choices);
  const Eigen::MatrixXd v = combined_utilities(model, inputs);
  const Eigen::MatrixXd p = choice_probabilities(v);
  const auto N = static_cast<double>(inputs.size());
  Eigen::MatrixXd w = p;
  for (Eigen::Index i = 0; i < inputs.size(); ++i) w(i, choices[static_cast<std::size_t>(i)]) -= 1.0;
  w /= N;
  Backprop b = backprop_utilities(model, inputs, w, true);
  return {utility_nll(v, choices), std::move(b.dcm), std::move(b.mlp), std::move(b.x), std::move(b.z)};
}

InputGradients input_gradients(const TbResNetModel& model, const StandardizedInputs& inputs,
                               std::span<const int> targets) {
  check_inputs(model, inputs);
  check_targets(model, inputs, targets);
  Eigen::MatrixXd w = predict_probabilities(model, inputs);
  for (Eigen::Index i = 0; i < inputs.size(); ++i) w(i, targets[static_cast<std::size_t>(i)]) -= 1.0;
  Backprop b = backprop_utilities(model, inputs, w, false);
  return {std::move(b.x), std::move(b.z)};
}

InputGradients utility_input_gradients(const TbResNetModel& model, const StandardizedInputs& inputs,
                                       const Eigen::MatrixXd& weights) {
  check_inputs(model, inputs);
  if (weights.rows() != inputs.size() || weights.cols() != model.schema.n_alternatives) {
    throw DimensionError("utility weights must be N x K");
  }
  Backprop b = backprop_utilities(model, inputs, weights, false);
  return {std::move(b.x), std::move(b.z)};
}

}  // namespace tbresnet
