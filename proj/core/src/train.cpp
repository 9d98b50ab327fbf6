#include "tbresnet/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "tbresnet/error.hpp"

namespace tbresnet {
namespace {

constexpr double kMaxScoringStep = 0.25;

// Theory inputs per row, decoded once.
struct TheoryRows {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> z;
};

TheoryRows theory_rows(const TbResNetModel& model, const StandardizedInputs& in) {
  TheoryRows rows;
  rows.x.reserve(static_cast<std::size_t>(in.size()));
  rows.z.reserve(static_cast<std::size_t>(in.size()));
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    rows.x.push_back(model.theory_x(in.x.row(i).transpose()));
    rows.z.push_back(in.z.row(i).transpose());
  }
  return rows;
}

// Column-wise softmax of a K x B logit matrix.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) p.col(b) = choice_probabilities(Eigen::VectorXd(logits.col(b)));
  return p;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, std::span<const Eigen::Index> idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t b = 0; b < idx.size(); ++b) out.col(static_cast<Eigen::Index>(b)) = m.col(idx[b]);
  return out;
}

// Mean batch NLL and (P - Y) / B for the chosen rows.
double batch_residual(const Eigen::MatrixXd& logits, std::span<const Eigen::Index> idx, std::span<const int> choices,
                      Eigen::MatrixXd& residual) {
  residual = softmax_columns(logits);
  const double B = static_cast<double>(idx.size());
  double loss = 0.0;
  for (std::size_t b = 0; b < idx.size(); ++b) {
    const auto col = static_cast<Eigen::Index>(b);
    const int y = choices[static_cast<std::size_t>(idx[b])];
    loss += choice_nll(logits.col(col), y);
    residual(y, col) -= 1.0;
  }
  residual /= B;
  return loss / B;
}

void check_loss(double loss, long iteration) {
  if (!std::isfinite(loss)) throw NumericalError("non-finite loss at iteration " + std::to_string(iteration));
}

struct TheoryEval {
  double loss = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd fisher;
  ClampDiagnostics clamps;
};

// Mean NLL of softmax(scale * V(theta) + offset) and, if asked, its gradient
// and Fisher information with respect to theta.
TheoryEval evaluate_theory(const DcmLayout& layout, const Eigen::VectorXd& theta, const TheoryRows& rows,
                           std::span<const int> choices, double scale, const Eigen::MatrixXd* offsets,
                           bool derivatives) {
  const auto N = static_cast<Eigen::Index>(rows.x.size());
  const Eigen::Index P = theta.size();
  TheoryEval e;
  if (derivatives) {
    e.gradient = Eigen::VectorXd::Zero(P);
    e.fisher = Eigen::MatrixXd::Zero(P, P);
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto si = static_cast<std::size_t>(i);
    Eigen::VectorXd v;
    Eigen::MatrixXd J;
    if (derivatives) {
      DcmGradients g = dcm_gradients(layout, theta, rows.x[si], rows.z[si]);
      e.clamps += g.clamps;
      v = std::move(g.utilities);
      J = std::move(g.d_params);
    } else {
      v = dcm_utility(layout, theta, rows.x[si], rows.z[si], &e.clamps);
    }
    Eigen::VectorXd u = scale * v;
    if (offsets) u += offsets->col(i);
    const Eigen::VectorXd p = choice_probabilities(u);
    e.loss += choice_nll(u, choices[si]);
    if (derivatives) {
      Eigen::VectorXd r = p;
      r[choices[si]] -= 1.0;
      e.gradient.noalias() += J.transpose() * r;
      const Eigen::MatrixXd Jp = J.transpose() * p;  // P x 1
      Eigen::MatrixXd W = J.transpose() * p.asDiagonal() * J;
      W.noalias() -= Jp * Jp.transpose();
      e.fisher += W;
    }
  }
  const double n = static_cast<double>(N);
  e.loss /= n;
  if (derivatives) {
    e.gradient *= scale / n;
    e.fisher *= scale * scale / n;
  }
  return e;
}

Eigen::LDLT<Eigen::MatrixXd> damped_factor(const Eigen::MatrixXd& fisher, double& damping) {
  const Eigen::Index P = fisher.rows();
  const double base = std::max(1.0, fisher.diagonal().cwiseAbs().maxCoeff());
  damping = std::max(damping, 1e-10 * base);
  for (int attempt = 0; attempt < 20; ++attempt) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(fisher + damping * Eigen::MatrixXd::Identity(P, P));
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) return ldlt;
    damping *= 10.0;
  }
  throw NumericalError("Fisher information could not be regularized");
}

void check_inputs(const DcmSpec& spec, double delta, const ChoiceDataset& train, const TrainConfig& config) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0, 1]");
  if (train.size() < 1) throw DataError("training data is empty");
  if (spec.n_alternatives != train.n_alternatives()) throw ConfigError("DCM spec and data disagree on K");
  config.validate();
}

Eigen::MatrixXd one_hot_columns(std::span<const int> choices, std::span<const Eigen::Index> idx, int K) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(K, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t b = 0; b < idx.size(); ++b) y(choices[static_cast<std::size_t>(idx[b])], static_cast<Eigen::Index>(b)) = 1.0;
  return y;
}

// Stage-2 loop: SGD on the network with frozen theory offsets (K x N,
// already multiplied by 1 - delta).
void fit_network(TbResNetModel& model, const StandardizedInputs& in, std::span<const int> choices,
                 const OptimizerConfig& sgd, std::uint64_t seed, const Eigen::MatrixXd& offsets) {
  const Eigen::MatrixXd net_in = network_inputs(in);
  BatchSampler sampler(in.size(), sgd.batch_size, make_rng(seed, "batch"));
  const double delta = model.delta;
  Eigen::MatrixXd residual;
  model.log.dnn_loss.reserve(static_cast<std::size_t>(sgd.iterations));
  for (long t = 0; t < sgd.iterations; ++t) {
    const auto idx = sampler.next();
    const Eigen::MatrixXd xb = gather_columns(net_in, idx);
    const Eigen::MatrixXd out = mlp_forward_batch(model.mlp, xb);
    const Eigen::MatrixXd logits = gather_columns(offsets, idx) + delta * out;
    const double loss = batch_residual(logits, idx, choices, residual);
    check_loss(loss, t);
    const MlpGradients g = mlp_backward(model.mlp, xb, delta * residual, false);
    sgd_step(model.mlp, g, sgd.learning_rate, t);
    model.log.dnn_loss.push_back(loss);
  }
}

}  // namespace

void DcmOptimizerConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("dcm max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) throw ConfigError("dcm gradient_tolerance must be positive");
  if (!(loss_tolerance >= 0.0)) throw ConfigError("dcm loss_tolerance must be non-negative");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("dcm learning_rate must be positive");
}

void TrainConfig::validate() const {
  if (depth < 1) throw ConfigError("network depth must be at least 1");
  if (width < 1) throw ConfigError("network width must be at least 1");
  sgd.validate();
  dcm.validate();
}

TbResNetModel initial_model(const DcmSpec& spec, double delta, const ChoiceDataset& train, const TrainConfig& config,
                            std::uint64_t seed) {
  TbResNetModel m;
  m.delta = delta;
  m.schema = train.schema();
  m.dcm_spec = spec;
  m.layout = resolve(spec, m.schema);
  m.dcm_params = initial_parameters(m.layout);
  m.stats = StandardizationStats::fit(train);
  Rng init = make_rng(seed, "init");
  m.mlp = MlpParams::glorot(MlpParams::architecture(static_cast<int>(m.schema.n_x() + m.schema.n_z()), config.depth,
                                                    config.width, m.schema.n_alternatives),
                            init);
  m.log.seed = seed;
  return m;
}

DcmFit fit_theory(const TbResNetModel& model, const StandardizedInputs& inputs, std::span<const int> choices,
                  double scale, const DcmOptimizerConfig& config) {
  const TheoryRows rows = theory_rows(model, inputs);
  DcmFit fit;
  fit.theta = model.dcm_params;
  double damping = 0.0;
  int flat = 0;
  for (int it = 0; it < config.max_iterations; ++it) {
    TheoryEval e = evaluate_theory(model.layout, fit.theta, rows, choices, scale, nullptr, true);
    check_loss(e.loss, it);
    if (!e.gradient.allFinite()) throw NumericalError("non-finite gradient at iteration " + std::to_string(it));
    fit.losses.push_back(e.loss);
    fit.gradient_norm = e.gradient.norm();
    fit.clamps = e.clamps;
    fit.iterations = it;
    if (fit.losses.size() > 1) {
      const double prev = fit.losses[fit.losses.size() - 2];
      flat = (prev - e.loss) <= config.loss_tolerance * (1.0 + std::abs(e.loss)) ? flat + 1 : 0;
    }
    if (fit.gradient_norm < config.gradient_tolerance * scale || flat >= 5) {
      fit.converged = true;
      return fit;
    }
    damping *= 0.1;
    bool moved = false;
    for (int attempt = 0; attempt < 8 && !moved; ++attempt) {
      const auto ldlt = damped_factor(e.fisher, damping);
      Eigen::VectorXd dir = ldlt.solve(e.gradient);
      // Bound the largest change of scale * theta so early steps cannot leap into
      // clamped plateaus; measuring it on the scaled utility keeps small scales cheap.
      const double largest = scale * dir.cwiseAbs().maxCoeff();
      if (largest > kMaxScoringStep) dir *= kMaxScoringStep / largest;
      const double slope = e.gradient.dot(dir);
      double step = 1.0;
      for (int half = 0; half < 40; ++half, step *= 0.5) {
        const Eigen::VectorXd cand = fit.theta - step * dir;
        const double f = evaluate_theory(model.layout, cand, rows, choices, scale, nullptr, false).loss;
        if (std::isfinite(f) && f <= e.loss - 1e-4 * step * slope) {
          fit.theta = cand;
          moved = true;
          break;
        }
      }
      if (!moved) damping = std::max(damping * 100.0, 1e-6);
    }
    if (!moved) return fit;  // no representable descent step remains
  }
  fit.iterations = config.max_iterations;
  return fit;
}

TbResNetModel train_sequential(const DcmSpec& spec, double delta, const ChoiceDataset& train,
                               const TrainConfig& config, std::uint64_t seed) {
  check_inputs(spec, delta, train, config);
  TbResNetModel model = initial_model(spec, delta, train, config, seed);
  model.log.trainer = Trainer::sequential;
  const StandardizedInputs in = model.encode(train);
  const auto& y = train.choices();

  if (delta < 1.0) {
    DcmFit fit = fit_theory(model, in, y, 1.0 - delta, config.dcm);
    model.dcm_params = fit.theta;
    model.log.dcm_loss = std::move(fit.losses);
    model.log.dcm_iterations = fit.iterations;
    model.log.dcm_converged = fit.converged;
    model.log.dcm_gradient_norm = fit.gradient_norm;
    model.log.clamps = fit.clamps;
  } else {
    model.dcm_params.setZero();
  }

  if (delta > 0.0) {
    Eigen::MatrixXd offsets = Eigen::MatrixXd::Zero(model.schema.n_alternatives, in.size());
    if (delta < 1.0) offsets = (1.0 - delta) * theory_utilities(model, in).transpose();
    fit_network(model, in, y, config.sgd, seed, offsets);
  }
  return model;
}

TbResNetModel train_simultaneous(const DcmSpec& spec, double delta, const ChoiceDataset& train,
                                 const TrainConfig& config, std::uint64_t seed) {
  check_inputs(spec, delta, train, config);
  TbResNetModel model = initial_model(spec, delta, train, config, seed);
  model.log.trainer = Trainer::simultaneous;
  if (delta >= 1.0) model.dcm_params.setZero();
  const StandardizedInputs in = model.encode(train);
  const auto& y = train.choices();
  const TheoryRows rows = theory_rows(model, in);
  const Eigen::MatrixXd net_in = network_inputs(in);
  const int K = model.schema.n_alternatives;
  const double s = 1.0 - delta;

  BatchSampler sampler(in.size(), config.sgd.batch_size, make_rng(seed, "batch"));
  std::optional<Eigen::LDLT<Eigen::MatrixXd>> precond;
  long fisher_epoch = -1;
  double damping = 0.0;
  Eigen::MatrixXd residual;
  model.log.dnn_loss.reserve(static_cast<std::size_t>(config.sgd.iterations));

  for (long t = 0; t < config.sgd.iterations; ++t) {
    const auto idx = sampler.next();
    const auto B = static_cast<Eigen::Index>(idx.size());
    if (delta < 1.0 && sampler.epoch() != fisher_epoch) {
      // Refresh the theory-block preconditioner once per epoch on the full training set.
      Eigen::MatrixXd offsets = Eigen::MatrixXd::Zero(K, in.size());
      if (delta > 0.0) offsets = delta * mlp_forward_batch(model.mlp, net_in);
      const TheoryEval e = evaluate_theory(model.layout, model.dcm_params, rows, y, s, &offsets, true);
      model.log.dcm_loss.push_back(e.loss);
      model.log.clamps = e.clamps;
      precond = damped_factor(e.fisher, damping);
      fisher_epoch = sampler.epoch();
    }

    const Eigen::MatrixXd xb = gather_columns(net_in, idx);
    Eigen::MatrixXd logits;
    std::vector<Eigen::MatrixXd> jac;
    if (delta < 1.0) {
      Eigen::MatrixXd vt(K, B);
      jac.reserve(static_cast<std::size_t>(B));
      for (Eigen::Index b = 0; b < B; ++b) {
        const auto r = static_cast<std::size_t>(idx[static_cast<std::size_t>(b)]);
        DcmGradients g = dcm_gradients(model.layout, model.dcm_params, rows.x[r], rows.z[r]);
        vt.col(b) = g.utilities;
        jac.push_back(std::move(g.d_params));
      }
      logits = s * vt;
      if (delta > 0.0) logits += delta * mlp_forward_batch(model.mlp, xb);
    } else {
      logits = mlp_forward_batch(model.mlp, xb);
    }
    const double loss = batch_residual(logits, idx, y, residual);
    check_loss(loss, t);

    Eigen::VectorXd theta_grad;
    if (delta < 1.0) {
      theta_grad = Eigen::VectorXd::Zero(model.dcm_params.size());
      for (Eigen::Index b = 0; b < B; ++b) theta_grad.noalias() += jac[static_cast<std::size_t>(b)].transpose() * residual.col(b);
      theta_grad *= s;
      if (!theta_grad.allFinite()) throw NumericalError("non-finite gradient at iteration " + std::to_string(t));
    }
    if (delta > 0.0) {
      const MlpGradients g = delta < 1.0 ? mlp_backward(model.mlp, xb, delta * residual, false)
                                         : mlp_backward(model.mlp, xb, residual, false);
      sgd_step(model.mlp, g, config.sgd.learning_rate, t);
    }
    if (delta < 1.0) {
      Eigen::VectorXd dir = precond->solve(theta_grad);
      const double largest = dir.cwiseAbs().maxCoeff();
      if (largest > kMaxScoringStep) dir *= kMaxScoringStep / largest;
      model.dcm_params -= config.dcm.learning_rate * dir;
    }
    model.log.dnn_loss.push_back(loss);
  }
  model.log.dcm_iterations = delta < 1.0 ? config.sgd.iterations : 0;
  if (delta < 1.0) {
    const TheoryEval e = evaluate_theory(model.layout, model.dcm_params, rows, y, s,
                                         nullptr, true);
    model.log.dcm_gradient_norm = e.gradient.norm();
  }
  return model;
}

TbResNetModel train(Trainer trainer, const DcmSpec& spec, double delta, const ChoiceDataset& data,
                    const TrainConfig& config, std::uint64_t seed) {
  switch (trainer) {
    case Trainer::sequential: return train_sequential(spec, delta, data, config, seed);
    case Trainer::simultaneous: return train_simultaneous(spec, delta, data, config, seed);
    case Trainer::dcm_only: return fit_pure_dcm(spec, data, config, seed);
    case Trainer::dnn_only: return fit_standalone_dnn(spec, data, config, seed);
  }
  throw ConfigError("unknown trainer");
}

TbResNetModel fit_pure_dcm(const DcmSpec& spec, const ChoiceDataset& data, const TrainConfig& config,
                           std::uint64_t seed) {
  TbResNetModel m = train_sequential(spec, 0.0, data, config, seed);
  m.log.trainer = Trainer::dcm_only;
  return m;
}

TbResNetModel fit_standalone_dnn(const DcmSpec& spec, const ChoiceDataset& data, const TrainConfig& config,
                                 std::uint64_t seed) {
  check_inputs(spec, 1.0, data, config);
  TbResNetModel m = initial_model(spec, 1.0, data, config, seed);
  m.log.trainer = Trainer::dnn_only;
  m.dcm_params.setZero();
  const Eigen::MatrixXd net_in = network_inputs(m.encode(data));
  const auto& y = data.choices();
  BatchSampler sampler(data.size(), config.sgd.batch_size, make_rng(seed, "batch"));
  const double B = static_cast<double>(sampler.batch_size());
  for (long t = 0; t < config.sgd.iterations; ++t) {
    const auto idx = sampler.next();
    const Eigen::MatrixXd xb = gather_columns(net_in, idx);
    const Eigen::MatrixXd logits = mlp_forward_batch(m.mlp, xb);
    const Eigen::MatrixXd g = softmax_columns(logits) - one_hot_columns(y, idx, m.schema.n_alternatives);
    double loss = 0.0;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      loss += choice_nll(logits.col(static_cast<Eigen::Index>(b)), y[static_cast<std::size_t>(idx[b])]);
    }
    loss /= B;
    check_loss(loss, t);
    sgd_step(m.mlp, mlp_backward(m.mlp, xb, g / B, false), config.sgd.learning_rate, t);
    m.log.dnn_loss.push_back(loss);
  }
  return m;
}

void DeltaGrid::validate() const {
  if (values.empty()) throw ConfigError("delta grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) throw ConfigError("delta grid values must lie in [0, 1]");
    if (i > 0 && !(values[i] > values[i - 1])) throw ConfigError("delta grid must be sorted and unique");
  }
}

DeltaGrid DeltaGrid::standard() {
  return {{1e-10, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 0.001, 0.002, 0.004, 0.005, 0.006, 0.007, 0.008, 0.009,
           0.01, 0.03, 0.05, 0.1, 0.3, 0.5, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9999, 1.0}};
}

DeltaGrid DeltaGrid::reduced() { return {{1e-10, 1e-4, 0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0}}; }

SweepResult sweep(const DcmSpec& spec, const DeltaGrid& grid, const ChoiceDataset& train, const ChoiceDataset& test,
                  const TrainConfig& config, Trainer trainer, std::uint64_t seed, int workers,
                  std::vector<std::optional<TbResNetModel>>* models) {
  grid.validate();
  config.validate();
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (trainer != Trainer::sequential && trainer != Trainer::simultaneous) {
    throw ConfigError("sweeps use the sequential or simultaneous trainer");
  }
  const std::size_t n = grid.values.size();
  SweepResult result;
  result.trainer = trainer;
  result.rows.resize(n);
  if (models) models->assign(n, std::nullopt);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepRow& row = result.rows[i];
      row.delta = grid.values[i];
      try {
        TbResNetModel m = tbresnet::train(trainer, spec, row.delta, train, config, seed);
        const MetricReport r = evaluate(m, test);
        row.accuracy = r.accuracy;
        row.cross_entropy = r.cross_entropy;
        row.f1 = r.f1;
        row.ok = true;
        if (models) (*models)[i] = std::move(m);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_threads; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& row : result.rows) {
    if (!row.ok) continue;
    if (row.accuracy > best_acc) {
      best_acc = row.accuracy;
      result.best_accuracy_delta = row.delta;
    }
    if (row.cross_entropy < best_loss) {
      best_loss = row.cross_entropy;
      result.best_loss_delta = row.delta;
    }
  }

  const Eigen::VectorXd shares = train.choice_shares();
  Eigen::Index majority = 0;
  for (Eigen::Index k = 1; k < shares.size(); ++k) {
    if (shares[k] > shares[majority]) majority = k;
  }
  const auto& yt = test.choices();
  result.baseline_accuracy =
      static_cast<double>(std::count(yt.begin(), yt.end(), static_cast<int>(majority))) / static_cast<double>(yt.size());
  return result;
}

}  // namespace tbresnet
