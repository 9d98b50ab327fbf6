#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tbresnet {

/// An alternative-specific attribute; stored in CSV as `alt<k>__<name>`.
struct AltAttribute {
  int alternative = 0;
  std::string name;

  std::string column_name() const;
  bool operator==(const AltAttribute&) const = default;
};

/// Column layout of a choice dataset: which x columns belong to which
/// alternative and which individual covariates make up z.
struct DatasetSchema {
  int n_alternatives = 0;
  std::vector<AltAttribute> alt_attributes;
  std::vector<std::string> indiv_attributes;

  Eigen::Index n_x() const { return static_cast<Eigen::Index>(alt_attributes.size()); }
  Eigen::Index n_z() const { return static_cast<Eigen::Index>(indiv_attributes.size()); }

  /// Index into x for a column name such as "alt1__cost".
  std::optional<Eigen::Index> x_column(std::string_view column_name) const;
  /// Index into z for a column name such as "z__age" (bare "age" is accepted too).
  std::optional<Eigen::Index> z_column(std::string_view column_name) const;

  /// All x column names followed by all z column names (`z__<name>`).
  std::vector<std::string> column_names() const;

  /// Builds a schema from a CSV header. `n_alternatives == 0` infers K from the
  /// largest alternative index seen.
  static DatasetSchema from_header(std::span<const std::string> header, int n_alternatives = 0);

  bool operator==(const DatasetSchema&) const = default;
};

std::string covariate_column_name(std::string_view name);

/// Observations with alternative-specific attributes x (N x |x|), individual
/// covariates z (N x |z|) and the chosen alternative per row. The one-hot
/// choice matrix y is derived from the choice ids, so every row of y is
/// one-hot by construction. Immutable after construction.
class ChoiceDataset {
 public:
  ChoiceDataset(DatasetSchema schema, Eigen::MatrixXd x, Eigen::MatrixXd z, std::vector<int> choices);

  const DatasetSchema& schema() const { return schema_; }
  int n_alternatives() const { return schema_.n_alternatives; }
  Eigen::Index size() const { return x_.rows(); }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::MatrixXd& z() const { return z_; }
  const std::vector<int>& choices() const { return choices_; }

  /// N x K indicator matrix.
  Eigen::MatrixXd one_hot() const;

  /// Sub-dataset with the given rows, in the given order.
  ChoiceDataset select_rows(std::span<const Eigen::Index> rows) const;

  /// Same schema and choices with replaced attribute matrices.
  ChoiceDataset with_attributes(Eigen::MatrixXd x, Eigen::MatrixXd z) const;

  /// Share of each alternative among the chosen ones.
  Eigen::VectorXd choice_shares() const;

 private:
  DatasetSchema schema_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd z_;
  std::vector<int> choices_;
};

ChoiceDataset read_csv(std::istream& in, const std::optional<DatasetSchema>& schema = std::nullopt);
ChoiceDataset load_csv(const std::filesystem::path& path,
                       const std::optional<DatasetSchema>& schema = std::nullopt);
void write_csv(const ChoiceDataset& data, std::ostream& out);
void save_csv(const ChoiceDataset& data, const std::filesystem::path& path);

/// Random partition into (train, test). Row order inside each part follows
/// the input order. Train size is round(train_fraction * N).
std::pair<ChoiceDataset, ChoiceDataset> split(const ChoiceDataset& data, double train_fraction,
                                              std::uint64_t seed);

/// Standardized model inputs; the space in which the network, the MNL
/// utilities and all perturbations operate.
struct StandardizedInputs {
  Eigen::MatrixXd x;
  Eigen::MatrixXd z;

  Eigen::Index size() const { return x.rows(); }
};

/// Per-column mean and population standard deviation of the training split.
/// Zero-variance columns record std = 1 and therefore map to 0.
struct StandardizationStats {
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_std;
  Eigen::VectorXd z_mean;
  Eigen::VectorXd z_std;

  static StandardizationStats fit(const ChoiceDataset& data);
  /// Zero means and unit deviations.
  static StandardizationStats identity(Eigen::Index n_x, Eigen::Index n_z);

  ChoiceDataset apply(const ChoiceDataset& raw) const;
  ChoiceDataset invert(const ChoiceDataset& standardized) const;
  StandardizedInputs encode(const ChoiceDataset& raw) const;

  Eigen::VectorXd encode_x(const Eigen::VectorXd& raw_row) const;
  Eigen::VectorXd encode_z(const Eigen::VectorXd& raw_row) const;
  double decode_x(Eigen::Index column, double standardized) const {
    return standardized * x_std[column] + x_mean[column];
  }
};

struct StandardizedSplit {
  ChoiceDataset train;
  ChoiceDataset test;
  StandardizationStats stats;
};

StandardizedSplit standardize(const ChoiceDataset& train, const ChoiceDataset& test);

/// Column summary in the layout of a survey summary-statistics table.
struct ColumnSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;
};

std::vector<ColumnSummary> summarize(const ChoiceDataset& data);

}  // namespace tbresnet
