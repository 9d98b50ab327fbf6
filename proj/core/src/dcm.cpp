#include "tbresnet/dcm.hpp"

#include <algorithm>
#include <cmath>

#include "tbresnet/error.hpp"

namespace tbresnet {
namespace {

struct Clamped {
  double value;
  bool active;
};

Clamped clamp_positive(double v) {
  if (v < kMinBehavioralParameter) return {kMinBehavioralParameter, true};
  return {v, false};
}

Eigen::VectorXd gather(const Eigen::VectorXd& row, const std::vector<Eigen::Index>& columns) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) out[static_cast<Eigen::Index>(i)] = row[columns[i]];
  return out;
}

void check_row_dims(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                    const Eigen::VectorXd& z_row) {
  if (theta.size() != layout.n_params()) throw DimensionError("DCM parameter vector has the wrong length");
  if (x_row.size() != layout.n_x || z_row.size() != layout.n_z) {
    throw DimensionError("observation does not match the DCM layout");
  }
}

Eigen::Index mnl_coef_offset(const DcmLayout& layout) { return layout.n_alternatives - 1; }

Eigen::Index mnl_covariate_offset(const DcmLayout& layout) {
  Eigen::Index n = mnl_coef_offset(layout);
  for (const auto& cols : layout.generic_columns) n += static_cast<Eigen::Index>(cols.size());
  return n;
}

void mnl_gradients(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                   const Eigen::VectorXd& z_row, DcmGradients& g) {
  const int K = layout.n_alternatives;
  const Eigen::Index Q = layout.n_covariates();
  const Eigen::VectorXd zc = gather(z_row, layout.covariate_columns);
  Eigen::Index coef = mnl_coef_offset(layout);
  const Eigen::Index zoff = mnl_covariate_offset(layout);
  for (int k = 0; k < K; ++k) {
    double u = 0.0;
    if (k < K - 1) {
      u += theta[k];
      g.d_params(k, k) = 1.0;
    }
    for (Eigen::Index col : layout.generic_columns[static_cast<std::size_t>(k)]) {
      u += theta[coef] * x_row[col];
      g.d_params(k, coef) = x_row[col];
      g.d_x(k, col) += theta[coef];
      ++coef;
    }
    if (k < K - 1) {
      const Eigen::Index base = zoff + k * Q;
      u += theta.segment(base, Q).dot(zc);
      g.d_params.row(k).segment(base, Q) = zc.transpose();
      for (Eigen::Index q = 0; q < Q; ++q) {
        g.d_z(k, layout.covariate_columns[static_cast<std::size_t>(q)]) += theta[base + q];
      }
    }
    g.utilities[k] = u;
  }
}

void pt_gradients(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                  const Eigen::VectorXd& z_row, DcmGradients& g) {
  const Eigen::Index Q = layout.n_covariates();
  const Eigen::VectorXd zc = gather(z_row, layout.covariate_columns);
  const auto w_r = theta.segment(3, Q);
  const auto w_a = theta.segment(3 + Q, Q);
  const auto w_l = theta.segment(3 + 2 * Q, Q);
  const Clamped r = clamp_positive(theta[0] + zc.dot(w_r));
  const Clamped alpha = clamp_positive(theta[1] + zc.dot(w_a));
  const Clamped lambda = clamp_positive(theta[2] + zc.dot(w_l));
  g.clamps.parameter_clamps += int(r.active) + int(alpha.active) + int(lambda.active);

  for (const auto& term : layout.terms) {
    const int k = term.alternative;
    const PtValueGrad c = pt_value_grad(x_row[term.payoff_column], r.value, lambda.value);
    const PtWeightGrad w = pt_weight_grad(x_row[term.modifier_column], alpha.value);
    if (w.clamped) ++g.clamps.probability_clamps;

    g.utilities[k] += c.value * w.value;
    g.d_x(k, term.payoff_column) += c.d_x * w.value;
    g.d_x(k, term.modifier_column) += c.value * w.d_p;

    const double du_dr = r.active ? 0.0 : c.d_r * w.value;
    const double du_da = alpha.active ? 0.0 : c.value * w.d_alpha;
    const double du_dl = lambda.active ? 0.0 : c.d_lambda * w.value;
    g.d_params(k, 0) += du_dr;
    g.d_params(k, 1) += du_da;
    g.d_params(k, 2) += du_dl;
    g.d_params.row(k).segment(3, Q) += du_dr * zc.transpose();
    g.d_params.row(k).segment(3 + Q, Q) += du_da * zc.transpose();
    g.d_params.row(k).segment(3 + 2 * Q, Q) += du_dl * zc.transpose();
    for (Eigen::Index q = 0; q < Q; ++q) {
      g.d_z(k, layout.covariate_columns[static_cast<std::size_t>(q)]) +=
          du_dr * w_r[q] + du_da * w_a[q] + du_dl * w_l[q];
    }
  }
}

void hd_gradients(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                  const Eigen::VectorXd& z_row, DcmGradients& g) {
  const Eigen::Index Q = layout.n_covariates();
  const Eigen::VectorXd zc = gather(z_row, layout.covariate_columns);
  const auto w_b = theta.segment(2, Q);
  const auto w_r = theta.segment(2 + Q, Q);
  const Clamped beta = clamp_positive(theta[0] + zc.dot(w_b));
  const double r = theta[1] + zc.dot(w_r);
  g.clamps.parameter_clamps += int(beta.active);

  for (const auto& term : layout.terms) {
    const int k = term.alternative;
    const double x = x_row[term.payoff_column];
    const double t = x_row[term.modifier_column];
    const double discount = std::exp(-r * t);
    const double u = x * beta.value * discount;
    g.utilities[k] += u;
    g.d_x(k, term.payoff_column) += beta.value * discount;
    g.d_x(k, term.modifier_column) += -r * u;

    const double du_db = beta.active ? 0.0 : x * discount;
    const double du_dr = -t * u;
    g.d_params(k, 0) += du_db;
    g.d_params(k, 1) += du_dr;
    g.d_params.row(k).segment(2, Q) += du_db * zc.transpose();
    g.d_params.row(k).segment(2 + Q, Q) += du_dr * zc.transpose();
    for (Eigen::Index q = 0; q < Q; ++q) {
      g.d_z(k, layout.covariate_columns[static_cast<std::size_t>(q)]) += du_db * w_b[q] + du_dr * w_r[q];
    }
  }
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::mnl: return "mnl";
    case Scenario::pt: return "pt";
    case Scenario::hd: return "hd";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "mnl") return Scenario::mnl;
  if (name == "pt") return Scenario::pt;
  if (name == "hd") return Scenario::hd;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected mnl, pt or hd)");
}

double pt_value(double x, double r, double lambda) {
  if (x >= 0.0) return std::pow(x, r);
  return -lambda * std::pow(-x, r);
}

double pt_weight(double p, double alpha) { return pt_weight_grad(p, alpha).value; }

PtValueGrad pt_value_grad(double x, double r, double lambda) {
  if (x > 0.0) {
    const double xr = std::pow(x, r);
    return {xr, r * xr / x, xr * std::log(x), 0.0};
  }
  if (x < 0.0) {
    const double m = -x;
    const double mr = std::pow(m, r);
    return {-lambda * mr, lambda * r * mr / m, -lambda * mr * std::log(m), -mr};
  }
  return {0.0, 0.0, 0.0, 0.0};
}

PtWeightGrad pt_weight_grad(double p, double alpha) {
  bool clamped = false;
  double pc = p;
  if (pc < kMinProbability) {
    pc = kMinProbability;
    clamped = true;
  } else if (pc > 1.0) {
    pc = 1.0;
    clamped = true;
  }
  const double L = -std::log(pc);
  if (L <= 0.0) return {1.0, 0.0, 0.0, clamped};
  const double La = std::pow(L, alpha);
  const double value = std::exp(-La);
  const double d_alpha = -value * La * std::log(L);
  const double d_p = clamped ? 0.0 : value * alpha * (La / L) / pc;
  return {value, d_p, d_alpha, clamped};
}

Eigen::VectorXd mnl_utility(const MnlParams& params, std::span<const Eigen::VectorXd> x_by_alternative,
                            const Eigen::VectorXd& z) {
  const auto K = params.constants.size();
  if (static_cast<Eigen::Index>(x_by_alternative.size()) != K ||
      static_cast<Eigen::Index>(params.attribute_coefs.size()) != K || params.covariate_coefs.rows() != K ||
      params.covariate_coefs.cols() != z.size()) {
    throw DimensionError("MNL parameters do not match the inputs");
  }
  Eigen::VectorXd v(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const auto& xk = x_by_alternative[static_cast<std::size_t>(k)];
    const auto& wk = params.attribute_coefs[static_cast<std::size_t>(k)];
    if (xk.size() != wk.size()) throw DimensionError("MNL attribute count mismatch");
    v[k] = params.constants[k] + wk.dot(xk) + params.covariate_coefs.row(k).dot(z);
  }
  return v;
}

Eigen::VectorXd pt_utility(const PtParams& params, std::span<const Lottery> lotteries, const Eigen::VectorXd& z,
                           ClampDiagnostics* diagnostics) {
  if (params.w_r.size() != z.size() || params.w_alpha.size() != z.size() || params.w_lambda.size() != z.size()) {
    throw DimensionError("PT covariate weights do not match z");
  }
  const Clamped r = clamp_positive(params.r0 + z.dot(params.w_r));
  const Clamped alpha = clamp_positive(params.alpha0 + z.dot(params.w_alpha));
  const Clamped lambda = clamp_positive(params.lambda0 + z.dot(params.w_lambda));
  ClampDiagnostics local;
  local.parameter_clamps = int(r.active) + int(alpha.active) + int(lambda.active);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lotteries.size()));
  for (std::size_t k = 0; k < lotteries.size(); ++k) {
    const auto& lot = lotteries[k];
    if (lot.payoffs.size() != lot.probabilities.size()) {
      throw DimensionError("lottery payoffs and probabilities differ in length");
    }
    for (std::size_t j = 0; j < lot.payoffs.size(); ++j) {
      const PtWeightGrad w = pt_weight_grad(lot.probabilities[j], alpha.value);
      if (w.clamped) ++local.probability_clamps;
      v[static_cast<Eigen::Index>(k)] += pt_value(lot.payoffs[j], r.value, lambda.value) * w.value;
    }
  }
  if (diagnostics) *diagnostics += local;
  return v;
}

Eigen::VectorXd hd_utility(const HdParams& params, std::span<const PaymentStream> streams,
                           const Eigen::VectorXd& z, ClampDiagnostics* diagnostics) {
  if (params.w_beta.size() != z.size() || params.w_r.size() != z.size()) {
    throw DimensionError("HD covariate weights do not match z");
  }
  const Clamped beta = clamp_positive(params.beta0 + z.dot(params.w_beta));
  const double r = params.r0 + z.dot(params.w_r);
  if (diagnostics) diagnostics->parameter_clamps += int(beta.active);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(streams.size()));
  for (std::size_t k = 0; k < streams.size(); ++k) {
    const auto& s = streams[k];
    if (s.payoffs.size() != s.delays.size()) throw DimensionError("payoffs and delays differ in length");
    for (std::size_t j = 0; j < s.payoffs.size(); ++j) {
      v[static_cast<Eigen::Index>(k)] += s.payoffs[j] * beta.value * std::exp(-r * s.delays[j]);
    }
  }
  return v;
}

DcmSpec DcmSpec::mnl_for(const DatasetSchema& schema) {
  DcmSpec spec;
  spec.scenario = Scenario::mnl;
  spec.n_alternatives = schema.n_alternatives;
  for (const auto& a : schema.alt_attributes) spec.generic.push_back({a.alternative, a.name});
  spec.covariates = schema.indiv_attributes;
  return spec;
}

Eigen::Index DcmLayout::n_params() const {
  const Eigen::Index Q = n_covariates();
  switch (scenario) {
    case Scenario::mnl: {
      Eigen::Index n = n_alternatives - 1;
      for (const auto& cols : generic_columns) n += static_cast<Eigen::Index>(cols.size());
      return n + (n_alternatives - 1) * Q;
    }
    case Scenario::pt: return 3 + 3 * Q;
    case Scenario::hd: return 2 + 2 * Q;
  }
  return 0;
}

std::vector<Eigen::Index> DcmLayout::raw_unit_columns() const {
  std::vector<Eigen::Index> cols;
  for (const auto& t : terms) {
    cols.push_back(t.payoff_column);
    cols.push_back(t.modifier_column);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

std::vector<std::string> DcmLayout::parameter_names(const DatasetSchema& schema) const {
  std::vector<std::string> names;
  auto cov = [&](const std::string& prefix) {
    for (Eigen::Index c : covariate_columns) {
      names.push_back(prefix + "[" + schema.indiv_attributes[static_cast<std::size_t>(c)] + "]");
    }
  };
  switch (scenario) {
    case Scenario::mnl:
      for (int k = 0; k + 1 < n_alternatives; ++k) names.push_back("asc_" + std::to_string(k));
      for (const auto& cols : generic_columns) {
        for (Eigen::Index c : cols) names.push_back("w[" + schema.alt_attributes[static_cast<std::size_t>(c)].column_name() + "]");
      }
      for (int k = 0; k + 1 < n_alternatives; ++k) cov("w_z" + std::to_string(k));
      break;
    case Scenario::pt:
      names = {"r0", "alpha0", "lambda0"};
      cov("w_r");
      cov("w_alpha");
      cov("w_lambda");
      break;
    case Scenario::hd:
      names = {"beta0", "r0"};
      cov("w_beta");
      cov("w_r");
      break;
  }
  return names;
}

DcmLayout resolve(const DcmSpec& spec, const DatasetSchema& schema) {
  if (spec.n_alternatives != schema.n_alternatives) {
    throw ConfigError("DCM spec declares " + std::to_string(spec.n_alternatives) +
                      " alternatives but the data has " + std::to_string(schema.n_alternatives));
  }
  DcmLayout layout;
  layout.scenario = spec.scenario;
  layout.n_alternatives = spec.n_alternatives;
  layout.n_x = schema.n_x();
  layout.n_z = schema.n_z();
  layout.generic_columns.resize(static_cast<std::size_t>(spec.n_alternatives));

  auto x_col = [&](int alternative, const std::string& attribute) {
    if (alternative < 0 || alternative >= spec.n_alternatives) {
      throw ConfigError("DCM spec refers to alternative " + std::to_string(alternative));
    }
    const std::string name = AltAttribute{alternative, attribute}.column_name();
    const auto c = schema.x_column(name);
    if (!c) throw ConfigError("DCM spec refers to unknown column '" + name + "'");
    return *c;
  };

  if (spec.scenario == Scenario::mnl) {
    if (!spec.terms.empty()) throw ConfigError("MNL specs take generic attributes, not payoff terms");
    for (const auto& g : spec.generic) {
      layout.generic_columns[static_cast<std::size_t>(g.alternative)].push_back(x_col(g.alternative, g.attribute));
    }
  } else {
    if (!spec.generic.empty()) throw ConfigError("PT/HD specs take payoff terms, not generic attributes");
    if (spec.terms.empty()) throw ConfigError("PT/HD specs need at least one payoff term");
    for (const auto& t : spec.terms) {
      layout.terms.push_back({t.alternative, x_col(t.alternative, t.payoff), x_col(t.alternative, t.modifier)});
    }
  }
  for (const auto& c : spec.covariates) {
    const auto zi = schema.z_column(c);
    if (!zi) throw ConfigError("DCM spec refers to unknown covariate '" + c + "'");
    layout.covariate_columns.push_back(*zi);
  }
  return layout;
}

Eigen::VectorXd initial_parameters(const DcmLayout& layout) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(layout.n_params());
  if (layout.scenario == Scenario::pt) {
    theta[0] = 1.0;
    theta[1] = 1.0;
    theta[2] = 1.0;
  } else if (layout.scenario == Scenario::hd) {
    theta[0] = 1.0;
  }
  return theta;
}

MnlParams unpack_mnl(const DcmLayout& layout, const Eigen::VectorXd& theta) {
  if (layout.scenario != Scenario::mnl || theta.size() != layout.n_params()) {
    throw DimensionError("not an MNL parameter vector for this layout");
  }
  const int K = layout.n_alternatives;
  const Eigen::Index Q = layout.n_covariates();
  MnlParams p;
  p.constants = Eigen::VectorXd::Zero(K);
  p.constants.head(K - 1) = theta.head(K - 1);
  Eigen::Index off = mnl_coef_offset(layout);
  for (const auto& cols : layout.generic_columns) {
    const auto n = static_cast<Eigen::Index>(cols.size());
    p.attribute_coefs.push_back(theta.segment(off, n));
    off += n;
  }
  p.covariate_coefs = Eigen::MatrixXd::Zero(K, Q);
  for (int k = 0; k + 1 < K; ++k) p.covariate_coefs.row(k) = theta.segment(off + k * Q, Q).transpose();
  return p;
}

PtParams unpack_pt(const DcmLayout& layout, const Eigen::VectorXd& theta) {
  if (layout.scenario != Scenario::pt || theta.size() != layout.n_params()) {
    throw DimensionError("not a PT parameter vector for this layout");
  }
  const Eigen::Index Q = layout.n_covariates();
  return {theta[0], theta[1], theta[2], theta.segment(3, Q), theta.segment(3 + Q, Q), theta.segment(3 + 2 * Q, Q)};
}

HdParams unpack_hd(const DcmLayout& layout, const Eigen::VectorXd& theta) {
  if (layout.scenario != Scenario::hd || theta.size() != layout.n_params()) {
    throw DimensionError("not an HD parameter vector for this layout");
  }
  const Eigen::Index Q = layout.n_covariates();
  return {theta[0], theta[1], theta.segment(2, Q), theta.segment(2 + Q, Q)};
}

Eigen::VectorXd pack(const DcmLayout& layout, const MnlParams& p) {
  const int K = layout.n_alternatives;
  const Eigen::Index Q = layout.n_covariates();
  if (layout.scenario != Scenario::mnl || p.constants.size() != K ||
      p.attribute_coefs.size() != layout.generic_columns.size() || p.covariate_coefs.rows() != K ||
      p.covariate_coefs.cols() != Q) {
    throw DimensionError("MNL parameters do not match the layout");
  }
  Eigen::VectorXd theta(layout.n_params());
  theta.head(K - 1) = p.constants.head(K - 1);
  Eigen::Index off = mnl_coef_offset(layout);
  for (std::size_t k = 0; k < layout.generic_columns.size(); ++k) {
    const auto n = static_cast<Eigen::Index>(layout.generic_columns[k].size());
    if (p.attribute_coefs[k].size() != n) throw DimensionError("MNL attribute coefficients mismatch");
    theta.segment(off, n) = p.attribute_coefs[k];
    off += n;
  }
  for (int k = 0; k + 1 < K; ++k) theta.segment(off + k * Q, Q) = p.covariate_coefs.row(k).transpose();
  return theta;
}

Eigen::VectorXd pack(const DcmLayout& layout, const PtParams& p) {
  const Eigen::Index Q = layout.n_covariates();
  if (layout.scenario != Scenario::pt || p.w_r.size() != Q || p.w_alpha.size() != Q || p.w_lambda.size() != Q) {
    throw DimensionError("PT parameters do not match the layout");
  }
  Eigen::VectorXd theta(layout.n_params());
  theta << p.r0, p.alpha0, p.lambda0, p.w_r, p.w_alpha, p.w_lambda;
  return theta;
}

Eigen::VectorXd pack(const DcmLayout& layout, const HdParams& p) {
  const Eigen::Index Q = layout.n_covariates();
  if (layout.scenario != Scenario::hd || p.w_beta.size() != Q || p.w_r.size() != Q) {
    throw DimensionError("HD parameters do not match the layout");
  }
  Eigen::VectorXd theta(layout.n_params());
  theta << p.beta0, p.r0, p.w_beta, p.w_r;
  return theta;
}

void validate_true_parameters(const DcmLayout& layout, const Eigen::VectorXd& theta) {
  if (theta.size() != layout.n_params()) throw ConfigError("parameter vector has the wrong length");
  if (!theta.allFinite()) throw ConfigError("parameters must be finite");
  if (layout.scenario == Scenario::pt && !(theta[0] > 0 && theta[1] > 0 && theta[2] > 0)) {
    throw ConfigError("PT parameters require r > 0, alpha > 0 and lambda > 0");
  }
  if (layout.scenario == Scenario::hd && !(theta[0] > 0)) {
    throw ConfigError("HD parameters require beta > 0");
  }
}

Eigen::VectorXd dcm_utility(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                            const Eigen::VectorXd& z_row, ClampDiagnostics* diagnostics) {
  check_row_dims(layout, theta, x_row, z_row);
  const int K = layout.n_alternatives;
  const Eigen::Index Q = layout.n_covariates();
  const Eigen::VectorXd zc = gather(z_row, layout.covariate_columns);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(K);
  ClampDiagnostics local;

  switch (layout.scenario) {
    case Scenario::mnl: {
      Eigen::Index coef = mnl_coef_offset(layout);
      const Eigen::Index zoff = mnl_covariate_offset(layout);
      for (int k = 0; k < K; ++k) {
        double u = k < K - 1 ? theta[k] + theta.segment(zoff + k * Q, Q).dot(zc) : 0.0;
        for (Eigen::Index col : layout.generic_columns[static_cast<std::size_t>(k)]) u += theta[coef++] * x_row[col];
        v[k] = u;
      }
      break;
    }
    case Scenario::pt: {
      const Clamped r = clamp_positive(theta[0] + zc.dot(theta.segment(3, Q)));
      const Clamped alpha = clamp_positive(theta[1] + zc.dot(theta.segment(3 + Q, Q)));
      const Clamped lambda = clamp_positive(theta[2] + zc.dot(theta.segment(3 + 2 * Q, Q)));
      local.parameter_clamps = int(r.active) + int(alpha.active) + int(lambda.active);
      for (const auto& t : layout.terms) {
        const PtWeightGrad w = pt_weight_grad(x_row[t.modifier_column], alpha.value);
        if (w.clamped) ++local.probability_clamps;
        v[t.alternative] += pt_value(x_row[t.payoff_column], r.value, lambda.value) * w.value;
      }
      break;
    }
    case Scenario::hd: {
      const Clamped beta = clamp_positive(theta[0] + zc.dot(theta.segment(2, Q)));
      const double r = theta[1] + zc.dot(theta.segment(2 + Q, Q));
      local.parameter_clamps = int(beta.active);
      for (const auto& t : layout.terms) {
        v[t.alternative] += x_row[t.payoff_column] * beta.value * std::exp(-r * x_row[t.modifier_column]);
      }
      break;
    }
  }
  if (diagnostics) *diagnostics += local;
  return v;
}

DcmGradients dcm_gradients(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                           const Eigen::VectorXd& z_row) {
  check_row_dims(layout, theta, x_row, z_row);
  const int K = layout.n_alternatives;
  DcmGradients g{Eigen::VectorXd::Zero(K), Eigen::MatrixXd::Zero(K, layout.n_params()),
                 Eigen::MatrixXd::Zero(K, layout.n_x), Eigen::MatrixXd::Zero(K, layout.n_z), {}};
  switch (layout.scenario) {
    case Scenario::mnl: mnl_gradients(layout, theta, x_row, z_row, g); break;
    case Scenario::pt: pt_gradients(layout, theta, x_row, z_row, g); break;
    case Scenario::hd: hd_gradients(layout, theta, x_row, z_row, g); break;
  }
  return g;
}

}  // namespace tbresnet
