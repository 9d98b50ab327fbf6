#include "tbresnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>

#include "tbresnet/error.hpp"

namespace tbresnet {
namespace {

double draw(const ColumnDesign& c, Rng& rng) {
  switch (c.distribution) {
    case Distribution::bernoulli: return uniform_open01(rng) < c.mean ? 1.0 : 0.0;
    case Distribution::normal: return c.mean + c.std * standard_normal(rng);
    case Distribution::lognormal: {
      const double s2 = std::log1p((c.std * c.std) / (c.mean * c.mean));
      const double mu = std::log(c.mean) - 0.5 * s2;
      return std::exp(mu + std::sqrt(s2) * standard_normal(rng));
    }
    case Distribution::beta: {
      const double nu = c.mean * (1.0 - c.mean) / (c.std * c.std) - 1.0;
      const double a = standard_gamma(c.mean * nu, rng);
      const double b = standard_gamma((1.0 - c.mean) * nu, rng);
      return std::clamp(a / (a + b), 1e-6, 1.0 - 1e-6);
    }
    case Distribution::constant: return c.mean;
    case Distribution::complement: break;
  }
  throw ConfigError("complement columns are derived, not drawn");
}

double design_std(const ColumnDesign& c) {
  switch (c.distribution) {
    case Distribution::bernoulli: return std::sqrt(c.mean * (1.0 - c.mean));
    case Distribution::constant: return 1.0;
    default: return c.std;
  }
}

struct Sg {
  const char* column;
  double mean, std;
};

SyntheticDesign mnl_design() {
  SyntheticDesign d;
  d.spec.scenario = Scenario::mnl;
  const Sg x[] = {
      {"alt0__walk_time", 60.50, 54.88},  {"alt1__cost", 2.070, 1.266},       {"alt1__walk_time", 11.96, 10.78},
      {"alt1__wait_time", 7.732, 5.033},  {"alt1__ivt", 25.06, 18.91},        {"alt2__cost", 14.48, 11.64},
      {"alt2__wait_time", 7.108, 4.803},  {"alt2__ivt", 18.28, 13.39},        {"alt3__cost", 10.49, 10.57},
      {"alt3__walk_time", 3.968, 4.176},  {"alt3__ivt", 17.43, 14.10},        {"alt4__cost", 16.08, 14.60},
      {"alt4__wait_time", 7.249, 5.674},  {"alt4__ivt", 20.11, 16.99},
  };
  const Sg z[] = {
      {"male", 0.383, 0.486},     {"age_below_35", 0.329, 0.470}, {"age_above_60", 0.075, 0.263},
      {"low_education", 0.331, 0.471}, {"high_education", 0.480, 0.500}, {"low_income", 0.035, 0.184},
      {"high_income", 0.606, 0.489}, {"full_job", 0.602, 0.490},
  };
  std::vector<std::string> header{"choice"};
  for (const auto& c : x) {
    header.emplace_back(c.column);
    d.columns.push_back({c.column, Distribution::lognormal, c.mean, c.std, {}});
  }
  for (const auto& c : z) {
    header.push_back(covariate_column_name(c.column));
    d.columns.push_back({covariate_column_name(c.column), Distribution::bernoulli, c.mean, c.std, {}});
  }
  d.schema = DatasetSchema::from_header(header, 5);
  d.spec = DcmSpec::mnl_for(d.schema);

  // Walk, Bus, RideSharing, Drive, AV (reference); coefficients per standardized unit.
  const double constants[] = {-0.3, 0.2, -0.4, 0.9};
  const double coefs[] = {-1.2, -0.4, -0.5, -0.3, -0.6, -0.6, -0.2, -0.5, -0.5, -0.3, -0.6, -0.6, -0.2, -0.5};
  const double wz[4][8] = {
      {0.1, 0.2, -0.2, 0.1, -0.1, 0.2, -0.2, -0.1},
      {-0.1, 0.2, 0.1, 0.2, -0.2, 0.3, -0.3, 0.0},
      {0.0, 0.2, -0.1, -0.1, 0.1, -0.2, 0.2, 0.1},
      {0.3, -0.1, 0.1, -0.2, 0.2, -0.3, 0.4, 0.3},
  };
  std::vector<double> theta(std::begin(constants), std::end(constants));
  theta.insert(theta.end(), std::begin(coefs), std::end(coefs));
  for (const auto& row : wz) theta.insert(theta.end(), std::begin(row), std::end(row));
  d.true_params = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  d.interaction_a = "z__male";
  d.interaction_b = "alt0__walk_time";
  return d;
}

void add_covariates(SyntheticDesign& d, std::vector<std::string>& header, std::span<const ColumnDesign> cov) {
  for (const auto& c : cov) {
    header.push_back(c.column);
    d.columns.push_back(c);
  }
}

SyntheticDesign pt_design() {
  SyntheticDesign d;
  d.columns = {
      {"alt0__reward1", Distribution::lognormal, 32.0, 16.0, {}},
      {"alt0__prob1", Distribution::beta, 0.638, 0.263, {}},
      {"alt0__reward2", Distribution::lognormal, 16.0, 15.0, {}},
      {"alt0__prob2", Distribution::complement, 0.362, 0.263, "alt0__prob1"},
      {"alt1__reward1", Distribution::lognormal, 76.0, 38.0, {}},
      {"alt1__prob1", Distribution::beta, 0.486, 0.252, {}},
      {"alt1__reward2", Distribution::normal, -0.340, 9.640, {}},
      {"alt1__prob2", Distribution::complement, 0.514, 0.252, "alt1__prob1"},
  };
  std::vector<std::string> header{"choice"};
  for (const auto& c : d.columns) header.push_back(c.column);
  const ColumnDesign cov[] = {
      {"z__male", Distribution::bernoulli, 0.619, 0.485, {}},
      {"z__age", Distribution::lognormal, 47.46, 12.89, {}},
      {"z__education_years", Distribution::lognormal, 6.746, 3.821, {}},
      {"z__income", Distribution::lognormal, 20.27, 21.15, {}},
      {"z__chinese", Distribution::bernoulli, 0.055, 0.228, {}},
      {"z__market_distance", Distribution::lognormal, 1.482, 1.840, {}},
      {"z__south", Distribution::bernoulli, 0.541, 0.498, {}},
  };
  add_covariates(d, header, cov);
  d.schema = DatasetSchema::from_header(header, 2);
  d.spec.scenario = Scenario::pt;
  d.spec.n_alternatives = 2;
  for (int k = 0; k < 2; ++k) {
    d.spec.terms.push_back({k, "reward1", "prob1"});
    d.spec.terms.push_back({k, "reward2", "prob2"});
  }
  d.spec.covariates = d.schema.indiv_attributes;
  // r, alpha, lambda, then weights per covariate (male, age, edu, income, chinese, distance, south).
  d.true_params.resize(3 + 3 * 7);
  d.true_params << 0.5, 0.7, 2.5,
      0.0, -0.02, 0.0, 0.03, 0.0, 0.0, 0.0,
      0.0, 0.0, 0.05, 0.0, 0.0, 0.0, -0.03,
      -0.2, 0.1, 0.0, 0.0, 0.0, 0.0, 0.1;
  d.interaction_a = "z__age";
  d.interaction_b = "z__income";
  return d;
}

SyntheticDesign hd_design() {
  SyntheticDesign d;
  d.columns = {
      {"alt0__reward", Distribution::lognormal, 75.0, 78.0, {}},
      {"alt0__delay", Distribution::constant, 0.0, 0.0, {}},
      {"alt1__reward", Distribution::lognormal, 150.0, 104.0, {}},
      {"alt1__delay", Distribution::lognormal, 35.67, 32.33, {}},
  };
  std::vector<std::string> header{"choice"};
  for (const auto& c : d.columns) header.push_back(c.column);
  const ColumnDesign cov[] = {
      {"z__male", Distribution::bernoulli, 0.618, 0.486, {}},
      {"z__age", Distribution::lognormal, 47.51, 12.94, {}},
      {"z__education_years", Distribution::lognormal, 6.764, 3.843, {}},
      {"z__income", Distribution::lognormal, 20.71, 21.23, {}},
      {"z__chinese", Distribution::bernoulli, 0.055, 0.228, {}},
      {"z__market_distance", Distribution::lognormal, 1.506, 1.846, {}},
      {"z__south", Distribution::bernoulli, 0.534, 0.499, {}},
      {"z__trusted_agent", Distribution::bernoulli, 0.028, 0.165, {}},
      {"z__risk_payment", Distribution::lognormal, 20.97, 21.17, {}},
  };
  add_covariates(d, header, cov);
  d.schema = DatasetSchema::from_header(header, 2);
  d.spec.scenario = Scenario::hd;
  d.spec.n_alternatives = 2;
  d.spec.terms = {{0, "reward", "delay"}, {1, "reward", "delay"}};
  d.spec.covariates = d.schema.indiv_attributes;
  // beta, r (per day), then weights per covariate.
  d.true_params.resize(2 + 2 * 9);
  d.true_params << 0.05, 0.02,
      0.0, 0.0, 0.0, 0.005, 0.0, 0.0, 0.0, 0.0, 0.003,
      0.0, 0.002, -0.002, 0.0, 0.0, 0.0, 0.002, 0.0, 0.0;
  d.interaction_a = "z__age";
  d.interaction_b = "z__income";
  return d;
}

// Column value by name from the standardized row pair.
double standardized_value(const DatasetSchema& schema, const std::string& name, const Eigen::VectorXd& xs,
                          const Eigen::VectorXd& zs) {
  if (auto c = schema.x_column(name)) return xs[*c];
  if (auto c = schema.z_column(name)) return zs[*c];
  throw ConfigError("interaction refers to unknown column '" + name + "'");
}

}  // namespace

Noise parse_noise(std::string_view name) {
  if (name == "gumbel") return Noise::gumbel;
  if (name == "none") return Noise::none;
  throw ConfigError("unknown noise '" + std::string(name) + "' (expected gumbel or none)");
}

std::string_view to_string(Noise n) { return n == Noise::gumbel ? "gumbel" : "none"; }

StandardizationStats SyntheticDesign::design_stats() const {
  StandardizationStats s = StandardizationStats::identity(schema.n_x(), schema.n_z());
  for (const auto& c : columns) {
    const double mean = c.mean;
    if (auto i = schema.x_column(c.column)) {
      s.x_mean[*i] = mean;
      s.x_std[*i] = design_std(c);
    } else if (auto j = schema.z_column(c.column)) {
      s.z_mean[*j] = mean;
      s.z_std[*j] = design_std(c);
    }
  }
  return s;
}

void SyntheticDesign::validate() const {
  const auto names = schema.column_names();
  if (columns.size() != names.size()) throw ConfigError("design must describe every schema column");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& c = columns[i];
    if (c.column != names[i]) throw ConfigError("design column '" + c.column + "' is out of schema order");
    switch (c.distribution) {
      case Distribution::bernoulli:
        if (!(c.mean >= 0.0 && c.mean <= 1.0)) throw ConfigError(c.column + ": bernoulli mean must lie in [0, 1]");
        break;
      case Distribution::lognormal:
        if (!(c.mean > 0.0 && c.std > 0.0)) throw ConfigError(c.column + ": lognormal needs mean > 0 and std > 0");
        break;
      case Distribution::beta:
        if (!(c.mean > 0.0 && c.mean < 1.0 && c.std > 0.0 && c.std * c.std < c.mean * (1.0 - c.mean))) {
          throw ConfigError(c.column + ": beta moments are infeasible");
        }
        break;
      case Distribution::normal:
        if (!(c.std >= 0.0)) throw ConfigError(c.column + ": std must be non-negative");
        break;
      case Distribution::complement: {
        auto it = std::find_if(columns.begin(), columns.begin() + static_cast<std::ptrdiff_t>(i),
                               [&](const ColumnDesign& o) { return o.column == c.source; });
        if (it == columns.begin() + static_cast<std::ptrdiff_t>(i)) {
          throw ConfigError(c.column + ": complement source must be an earlier column");
        }
        break;
      }
      case Distribution::constant: break;
    }
  }
  validate_true_parameters(resolve(spec, schema), true_params);
  if (nonlinear_strength != 0.0) {
    for (const auto& n : {interaction_a, interaction_b}) {
      if (!schema.x_column(n) && !schema.z_column(n)) throw ConfigError("interaction refers to unknown column '" + n + "'");
    }
  }
}

SyntheticDesign default_design(Scenario scenario) {
  switch (scenario) {
    case Scenario::mnl: return mnl_design();
    case Scenario::pt: return pt_design();
    case Scenario::hd: return hd_design();
  }
  throw ConfigError("unknown scenario");
}

Eigen::MatrixXd true_utilities(const SyntheticDesign& design, const Eigen::MatrixXd& x, const Eigen::MatrixXd& z) {
  const DcmLayout layout = resolve(design.spec, design.schema);
  const StandardizationStats stats = design.design_stats();
  const auto raw_cols = layout.raw_unit_columns();
  Eigen::MatrixXd v(x.rows(), design.schema.n_alternatives);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd xs = stats.encode_x(x.row(i).transpose());
    const Eigen::VectorXd zs = stats.encode_z(z.row(i).transpose());
    Eigen::VectorXd xt = xs;
    for (Eigen::Index c : raw_cols) xt[c] = x(i, c);
    v.row(i) = dcm_utility(layout, design.true_params, xt, zs).transpose();
    if (design.nonlinear_strength != 0.0) {
      v(i, 0) += design.nonlinear_strength * standardized_value(design.schema, design.interaction_a, xs, zs) *
                 standardized_value(design.schema, design.interaction_b, xs, zs);
    }
  }
  return v;
}

std::vector<int> sample_choices(const Eigen::MatrixXd& utilities, Noise noise, Rng& rng) {
  std::vector<int> choices(static_cast<std::size_t>(utilities.rows()));
  for (Eigen::Index i = 0; i < utilities.rows(); ++i) {
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < utilities.cols(); ++k) {
      const double u = utilities(i, k) + (noise == Noise::gumbel ? standard_gumbel(rng) : 0.0);
      if (u > best_value) {
        best_value = u;
        best = static_cast<int>(k);
      }
    }
    choices[static_cast<std::size_t>(i)] = best;
  }
  return choices;
}

ChoiceDataset generate_synthetic(const SyntheticDesign& design, Eigen::Index n, Noise noise, std::uint64_t seed) {
  if (n < 1) throw ConfigError("n must be at least 1");
  design.validate();
  const DatasetSchema& schema = design.schema;
  Eigen::MatrixXd x(n, schema.n_x());
  Eigen::MatrixXd z(n, schema.n_z());
  std::map<std::string, Eigen::Index> position;
  for (std::size_t c = 0; c < design.columns.size(); ++c) position[design.columns[c].column] = static_cast<Eigen::Index>(c);

  Rng rng = make_rng(seed, "generate");
  Eigen::VectorXd row(static_cast<Eigen::Index>(design.columns.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < design.columns.size(); ++c) {
      const auto& col = design.columns[c];
      row[static_cast<Eigen::Index>(c)] =
          col.distribution == Distribution::complement ? 1.0 - row[position.at(col.source)] : draw(col, rng);
    }
    x.row(i) = row.head(schema.n_x()).transpose();
    z.row(i) = row.tail(schema.n_z()).transpose();
  }
  Rng noise_rng = make_rng(seed, "noise");
  auto choices = sample_choices(true_utilities(design, x, z), noise, noise_rng);
  return ChoiceDataset(schema, std::move(x), std::move(z), std::move(choices));
}

}  // namespace tbresnet
