#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tbresnet/dataset.hpp"

namespace tbresnet {

enum class Scenario { mnl, pt, hd };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

// Lower bounds applied before the theory formulas are evaluated.
inline constexpr double kMinProbability = 1e-6;
inline constexpr double kMinBehavioralParameter = 1e-4;

/// Counts evaluations that hit a clamp; gradients through an active clamp are zero.
struct ClampDiagnostics {
  std::int64_t parameter_clamps = 0;
  std::int64_t probability_clamps = 0;

  ClampDiagnostics& operator+=(const ClampDiagnostics& o) {
    parameter_clamps += o.parameter_clamps;
    probability_clamps += o.probability_clamps;
    return *this;
  }
};

// ---------------------------------------------------------------------------
// Scalar building blocks

/// Prospect-theory value function: x^r for x >= 0, -lambda (-x)^r otherwise.
double pt_value(double x, double r, double lambda);

/// Probability weighting exp(-(-ln p)^alpha), p clamped to [kMinProbability, 1].
double pt_weight(double p, double alpha);

struct PtValueGrad {
  double value, d_x, d_r, d_lambda;
};
struct PtWeightGrad {
  double value, d_p, d_alpha;
  bool clamped;
};

/// d/dx at x = 0 is reported as 0 (the one-sided derivative is unbounded for r < 1).
PtValueGrad pt_value_grad(double x, double r, double lambda);
PtWeightGrad pt_weight_grad(double p, double alpha);

// ---------------------------------------------------------------------------
// Typed parameter sets

/// Linear-in-parameters logit. The last alternative is the reference: its
/// constant and covariate coefficients are fixed at zero.
struct MnlParams {
  Eigen::VectorXd constants;                    // K, constants[K-1] == 0
  std::vector<Eigen::VectorXd> attribute_coefs;  // per alternative, one per attribute of that alternative
  Eigen::MatrixXd covariate_coefs;              // K x |z|, last row zero
};

/// r(z) = r0 + z'w_r, alpha(z) = alpha0 + z'w_alpha, lambda(z) = lambda0 + z'w_lambda.
struct PtParams {
  double r0 = 1.0;
  double alpha0 = 1.0;
  double lambda0 = 1.0;
  Eigen::VectorXd w_r, w_alpha, w_lambda;
};

/// beta(z) = beta0 + z'w_beta, r(z) = r0 + z'w_r.
struct HdParams {
  double beta0 = 1.0;
  double r0 = 0.0;
  Eigen::VectorXd w_beta, w_r;
};

/// Outcomes of one risky alternative: payoff j paid with probability j.
struct Lottery {
  std::vector<double> payoffs;
  std::vector<double> probabilities;
};

/// Payments of one intertemporal alternative: payoff j paid after delay j (days).
struct PaymentStream {
  std::vector<double> payoffs;
  std::vector<double> delays;
};

Eigen::VectorXd mnl_utility(const MnlParams& params, std::span<const Eigen::VectorXd> x_by_alternative,
                            const Eigen::VectorXd& z);
Eigen::VectorXd pt_utility(const PtParams& params, std::span<const Lottery> lotteries, const Eigen::VectorXd& z,
                           ClampDiagnostics* diagnostics = nullptr);
Eigen::VectorXd hd_utility(const HdParams& params, std::span<const PaymentStream> streams,
                           const Eigen::VectorXd& z, ClampDiagnostics* diagnostics = nullptr);

// ---------------------------------------------------------------------------
// Declarative specification bound to a dataset schema

/// A payoff column paired with its probability (PT) or delay (HD) column.
struct TheoryTerm {
  int alternative = 0;
  std::string payoff;    // attribute name without the alt<k>__ prefix
  std::string modifier;  // probability or delay attribute name

  bool operator==(const TheoryTerm&) const = default;
};

struct GenericAttribute {
  int alternative = 0;
  std::string attribute;

  bool operator==(const GenericAttribute&) const = default;
};

/// Which columns play which role in the theory-driven utility.
struct DcmSpec {
  Scenario scenario = Scenario::mnl;
  int n_alternatives = 2;
  std::vector<GenericAttribute> generic;  // MNL
  std::vector<TheoryTerm> terms;          // PT / HD
  std::vector<std::string> covariates;    // individual attribute names

  /// MNL over every alternative-specific attribute and every covariate of the schema.
  static DcmSpec mnl_for(const DatasetSchema& schema);

  bool operator==(const DcmSpec&) const = default;
};

/// A DcmSpec resolved to column indices of a concrete schema, plus the flat
/// parameter layout:
///   MNL: [constants 0..K-2 | one coefficient per generic column | w_z alt 0 | ... | w_z alt K-2]
///   PT:  [r0, alpha0, lambda0 | w_r | w_alpha | w_lambda]
///   HD:  [beta0, r0 | w_beta | w_r]
struct DcmLayout {
  struct Term {
    int alternative;
    Eigen::Index payoff_column;
    Eigen::Index modifier_column;
  };

  Scenario scenario = Scenario::mnl;
  int n_alternatives = 2;
  Eigen::Index n_x = 0;
  Eigen::Index n_z = 0;
  std::vector<std::vector<Eigen::Index>> generic_columns;  // per alternative
  std::vector<Term> terms;
  std::vector<Eigen::Index> covariate_columns;

  Eigen::Index n_covariates() const { return static_cast<Eigen::Index>(covariate_columns.size()); }
  Eigen::Index n_params() const;
  /// x columns the theory reads in original units (payoffs, probabilities, delays).
  std::vector<Eigen::Index> raw_unit_columns() const;
  std::vector<std::string> parameter_names(const DatasetSchema& schema) const;
};

DcmLayout resolve(const DcmSpec& spec, const DatasetSchema& schema);

/// Starting point for estimation: zeros for MNL, r = alpha = lambda = 1 for
/// PT, beta = 1 and r = 0 for HD (all covariate weights zero).
Eigen::VectorXd initial_parameters(const DcmLayout& layout);

MnlParams unpack_mnl(const DcmLayout& layout, const Eigen::VectorXd& theta);
PtParams unpack_pt(const DcmLayout& layout, const Eigen::VectorXd& theta);
HdParams unpack_hd(const DcmLayout& layout, const Eigen::VectorXd& theta);
Eigen::VectorXd pack(const DcmLayout& layout, const MnlParams& p);
Eigen::VectorXd pack(const DcmLayout& layout, const PtParams& p);
Eigen::VectorXd pack(const DcmLayout& layout, const HdParams& p);

/// Throws ConfigError if the PT base parameters are not positive (r0, alpha0,
/// lambda0) or the HD present bias beta0 is not positive.
void validate_true_parameters(const DcmLayout& layout, const Eigen::VectorXd& theta);

/// K utilities of one observation. `x_row` / `z_row` are full rows of the
/// dataset as the theory sees them.
Eigen::VectorXd dcm_utility(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                            const Eigen::VectorXd& z_row, ClampDiagnostics* diagnostics = nullptr);

struct DcmGradients {
  Eigen::VectorXd utilities;  // K
  Eigen::MatrixXd d_params;   // K x n_params
  Eigen::MatrixXd d_x;        // K x n_x
  Eigen::MatrixXd d_z;        // K x n_z
  ClampDiagnostics clamps;
};

/// Exact partial derivatives of every utility with respect to every
/// parameter and every input attribute.
DcmGradients dcm_gradients(const DcmLayout& layout, const Eigen::VectorXd& theta, const Eigen::VectorXd& x_row,
                           const Eigen::VectorXd& z_row);

}  // namespace tbresnet
