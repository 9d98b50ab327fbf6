#include "tbresnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "tbresnet/csv.hpp"
#include "tbresnet/error.hpp"
#include "tbresnet/random.hpp"

namespace tbresnet {
namespace {

constexpr std::string_view kChoiceColumn = "choice";
constexpr std::string_view kCovariatePrefix = "z__";
constexpr double kDegenerateStd = 1e-12;

// Parses "alt<k>__<name>"; returns false for anything else.
bool parse_alt_column(std::string_view column, AltAttribute& out) {
  if (column.substr(0, 3) != "alt") return false;
  const std::size_t sep = column.find("__");
  if (sep == std::string_view::npos || sep <= 3 || sep + 2 >= column.size()) return false;
  int k = 0;
  for (std::size_t i = 3; i < sep; ++i) {
    const char c = column[i];
    if (c < '0' || c > '9') return false;
    k = k * 10 + (c - '0');
  }
  out.alternative = k;
  out.name = std::string(column.substr(sep + 2));
  return true;
}

std::string row_error(std::size_t row, const std::string& what) {
  std::ostringstream msg;
  msg << "row " << row << ": " << what;
  return msg.str();
}

}  // namespace

std::string AltAttribute::column_name() const {
  return "alt" + std::to_string(alternative) + "__" + name;
}

std::string covariate_column_name(std::string_view name) {
  return std::string(kCovariatePrefix) + std::string(name);
}

std::optional<Eigen::Index> DatasetSchema::x_column(std::string_view column_name) const {
  for (std::size_t i = 0; i < alt_attributes.size(); ++i) {
    if (alt_attributes[i].column_name() == column_name) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

std::optional<Eigen::Index> DatasetSchema::z_column(std::string_view column_name) const {
  if (column_name.substr(0, kCovariatePrefix.size()) == kCovariatePrefix) {
    column_name.remove_prefix(kCovariatePrefix.size());
  }
  for (std::size_t i = 0; i < indiv_attributes.size(); ++i) {
    if (indiv_attributes[i] == column_name) return static_cast<Eigen::Index>(i);
  }
  return std::nullopt;
}

std::vector<std::string> DatasetSchema::column_names() const {
  std::vector<std::string> names;
  names.reserve(alt_attributes.size() + indiv_attributes.size());
  for (const auto& a : alt_attributes) names.push_back(a.column_name());
  for (const auto& z : indiv_attributes) names.push_back(covariate_column_name(z));
  return names;
}

DatasetSchema DatasetSchema::from_header(std::span<const std::string> header, int n_alternatives) {
  DatasetSchema schema;
  bool has_choice = false;
  int max_alt = -1;
  for (const auto& raw : header) {
    std::string_view column = raw;
    if (column == kChoiceColumn) {
      if (has_choice) throw DataError("duplicate column 'choice'");
      has_choice = true;
      continue;
    }
    AltAttribute attr;
    if (parse_alt_column(column, attr)) {
      max_alt = std::max(max_alt, attr.alternative);
      schema.alt_attributes.push_back(std::move(attr));
    } else if (column.substr(0, kCovariatePrefix.size()) == kCovariatePrefix &&
               column.size() > kCovariatePrefix.size()) {
      schema.indiv_attributes.emplace_back(column.substr(kCovariatePrefix.size()));
    } else {
      throw DataError("unknown column '" + std::string(column) + "'");
    }
  }
  if (!has_choice) throw DataError("missing column 'choice'");
  schema.n_alternatives = n_alternatives > 0 ? n_alternatives : std::max(max_alt + 1, 2);
  if (schema.n_alternatives < 2) throw DataError("at least two alternatives are required");
  if (max_alt >= schema.n_alternatives) {
    throw DataError("attribute refers to alternative " + std::to_string(max_alt) + " but K = " +
                    std::to_string(schema.n_alternatives));
  }
  return schema;
}

ChoiceDataset::ChoiceDataset(DatasetSchema schema, Eigen::MatrixXd x, Eigen::MatrixXd z,
                             std::vector<int> choices)
    : schema_(std::move(schema)), x_(std::move(x)), z_(std::move(z)), choices_(std::move(choices)) {
  if (schema_.n_alternatives < 2) throw DataError("a choice dataset needs K >= 2 alternatives");
  const auto n = static_cast<Eigen::Index>(choices_.size());
  if (n == 0) throw DataError("a choice dataset needs at least one observation");
  if (x_.rows() != n || z_.rows() != n) throw DimensionError("attribute rows do not match choice count");
  if (x_.cols() != schema_.n_x() || z_.cols() != schema_.n_z()) {
    throw DimensionError("attribute columns do not match the schema");
  }
  for (const auto& a : schema_.alt_attributes) {
    if (a.alternative < 0 || a.alternative >= schema_.n_alternatives) {
      throw DataError("attribute '" + a.column_name() + "' refers to a missing alternative");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = choices_[static_cast<std::size_t>(i)];
    if (c < 0 || c >= schema_.n_alternatives) {
      throw DataError(row_error(static_cast<std::size_t>(i + 1), "choice id out of range"));
    }
  }
  if (!x_.allFinite() || !z_.allFinite()) throw DataError("attribute values must be finite");
}

Eigen::MatrixXd ChoiceDataset::one_hot() const {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(size(), n_alternatives());
  for (Eigen::Index i = 0; i < size(); ++i) y(i, choices_[static_cast<std::size_t>(i)]) = 1.0;
  return y;
}

ChoiceDataset ChoiceDataset::select_rows(std::span<const Eigen::Index> rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), z_.cols());
  std::vector<int> choices(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    x.row(i) = x_.row(rows[r]);
    z.row(i) = z_.row(rows[r]);
    choices[r] = choices_[static_cast<std::size_t>(rows[r])];
  }
  return ChoiceDataset(schema_, std::move(x), std::move(z), std::move(choices));
}

ChoiceDataset ChoiceDataset::with_attributes(Eigen::MatrixXd x, Eigen::MatrixXd z) const {
  return ChoiceDataset(schema_, std::move(x), std::move(z), choices_);
}

Eigen::VectorXd ChoiceDataset::choice_shares() const {
  Eigen::VectorXd shares = Eigen::VectorXd::Zero(n_alternatives());
  for (int c : choices_) shares[c] += 1.0;
  return shares / static_cast<double>(size());
}

ChoiceDataset read_csv(std::istream& in, const std::optional<DatasetSchema>& schema_hint) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV input: missing header");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  const std::vector<std::string> header = csv::split_line(line);

  DatasetSchema schema;
  if (schema_hint) {
    schema = *schema_hint;
    std::vector<std::string> expected = schema.column_names();
    expected.emplace_back(kChoiceColumn);
    for (const auto& column : header) {
      if (std::find(expected.begin(), expected.end(), column) == expected.end()) {
        throw DataError("unknown column '" + column + "'");
      }
    }
    for (const auto& column : expected) {
      if (std::count(header.begin(), header.end(), column) != 1) {
        throw DataError("column '" + column + "' must appear exactly once in the header");
      }
    }
  } else {
    schema = DatasetSchema::from_header(header);
  }

  // header position -> (kind, index); kind 0 = choice, 1 = x, 2 = z
  std::vector<std::pair<int, Eigen::Index>> slots;
  slots.reserve(header.size());
  for (const auto& column : header) {
    if (column == kChoiceColumn) {
      slots.emplace_back(0, 0);
    } else if (auto xi = schema.x_column(column)) {
      slots.emplace_back(1, *xi);
    } else if (auto zi = schema.z_column(column);
               zi && column.substr(0, kCovariatePrefix.size()) == kCovariatePrefix) {
      slots.emplace_back(2, *zi);
    } else {
      throw DataError("unknown column '" + column + "'");
    }
  }

  std::vector<double> xs;
  std::vector<double> zs;
  std::vector<int> choices;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto fields = csv::split_line(line);
    if (fields.size() != header.size()) {
      throw DataError(row_error(row, "malformed row: expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(fields.size())));
    }
    std::vector<double> xrow(static_cast<std::size_t>(schema.n_x()));
    std::vector<double> zrow(static_cast<std::size_t>(schema.n_z()));
    int choice = -1;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double value = 0.0;
      if (!csv::parse_number(fields[c], value)) {
        throw DataError(row_error(row, "malformed value '" + fields[c] + "' in column '" + header[c] + "'"));
      }
      if (!std::isfinite(value)) {
        throw DataError(row_error(row, "non-finite value in column '" + header[c] + "'"));
      }
      const auto [kind, index] = slots[c];
      if (kind == 0) {
        if (value != std::floor(value) || value < 0 || value >= schema.n_alternatives) {
          throw DataError(row_error(row, "choice id out of range"));
        }
        choice = static_cast<int>(value);
      } else if (kind == 1) {
        xrow[static_cast<std::size_t>(index)] = value;
      } else {
        zrow[static_cast<std::size_t>(index)] = value;
      }
    }
    xs.insert(xs.end(), xrow.begin(), xrow.end());
    zs.insert(zs.end(), zrow.begin(), zrow.end());
    choices.push_back(choice);
  }
  if (choices.empty()) throw DataError("CSV input has no data rows");

  const auto n = static_cast<Eigen::Index>(choices.size());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::MatrixXd x = Eigen::Map<const RowMajor>(xs.data(), n, schema.n_x());
  Eigen::MatrixXd z = Eigen::Map<const RowMajor>(zs.data(), n, schema.n_z());
  return ChoiceDataset(std::move(schema), std::move(x), std::move(z), std::move(choices));
}

ChoiceDataset load_csv(const std::filesystem::path& path, const std::optional<DatasetSchema>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  return read_csv(in, schema);
}

void write_csv(const ChoiceDataset& data, std::ostream& out) {
  std::vector<std::string> fields{std::string(kChoiceColumn)};
  for (auto& name : data.schema().column_names()) fields.push_back(std::move(name));
  csv::write_row(out, fields);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    fields.clear();
    fields.push_back(std::to_string(data.choices()[static_cast<std::size_t>(i)]));
    for (Eigen::Index c = 0; c < data.x().cols(); ++c) fields.push_back(csv::format_number(data.x()(i, c)));
    for (Eigen::Index c = 0; c < data.z().cols(); ++c) fields.push_back(csv::format_number(data.z()(i, c)));
    csv::write_row(out, fields);
  }
}

void save_csv(const ChoiceDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(data, out);
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

std::pair<ChoiceDataset, ChoiceDataset> split(const ChoiceDataset& data, double train_fraction,
                                              std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  const Eigen::Index n = data.size();
  const auto n_train = static_cast<Eigen::Index>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train <= 0 || n_train >= n) throw ConfigError("split would leave an empty train or test set");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = make_rng(seed, "split");
  shuffle(order.begin(), order.end(), rng);

  std::vector<Eigen::Index> train(order.begin(), order.begin() + n_train);
  std::vector<Eigen::Index> test(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.select_rows(train), data.select_rows(test)};
}

StandardizationStats StandardizationStats::fit(const ChoiceDataset& data) {
  auto moments = [](const Eigen::MatrixXd& m, Eigen::VectorXd& mean, Eigen::VectorXd& sd) {
    mean = m.colwise().mean().transpose();
    sd.resize(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double var = (m.col(c).array() - mean[c]).square().mean();
      const double s = std::sqrt(var);
      sd[c] = s > kDegenerateStd ? s : 1.0;
    }
  };
  StandardizationStats stats;
  moments(data.x(), stats.x_mean, stats.x_std);
  moments(data.z(), stats.z_mean, stats.z_std);
  return stats;
}

StandardizationStats StandardizationStats::identity(Eigen::Index n_x, Eigen::Index n_z) {
  return {Eigen::VectorXd::Zero(n_x), Eigen::VectorXd::Ones(n_x), Eigen::VectorXd::Zero(n_z),
          Eigen::VectorXd::Ones(n_z)};
}

StandardizedInputs StandardizationStats::encode(const ChoiceDataset& raw) const {
  if (raw.x().cols() != x_mean.size() || raw.z().cols() != z_mean.size()) {
    throw DimensionError("standardization stats do not match the dataset columns");
  }
  StandardizedInputs out;
  out.x = (raw.x().rowwise() - x_mean.transpose()).array().rowwise() / x_std.transpose().array();
  out.z = (raw.z().rowwise() - z_mean.transpose()).array().rowwise() / z_std.transpose().array();
  return out;
}

ChoiceDataset StandardizationStats::apply(const ChoiceDataset& raw) const {
  StandardizedInputs s = encode(raw);
  return raw.with_attributes(std::move(s.x), std::move(s.z));
}

ChoiceDataset StandardizationStats::invert(const ChoiceDataset& standardized) const {
  Eigen::MatrixXd x = (standardized.x().array().rowwise() * x_std.transpose().array()).matrix().rowwise() +
                      x_mean.transpose();
  Eigen::MatrixXd z = (standardized.z().array().rowwise() * z_std.transpose().array()).matrix().rowwise() +
                      z_mean.transpose();
  return standardized.with_attributes(std::move(x), std::move(z));
}

Eigen::VectorXd StandardizationStats::encode_x(const Eigen::VectorXd& raw_row) const {
  return ((raw_row - x_mean).array() / x_std.array()).matrix();
}

Eigen::VectorXd StandardizationStats::encode_z(const Eigen::VectorXd& raw_row) const {
  return ((raw_row - z_mean).array() / z_std.array()).matrix();
}

StandardizedSplit standardize(const ChoiceDataset& train, const ChoiceDataset& test) {
  if (!(train.schema() == test.schema())) throw DataError("train and test schemas differ");
  StandardizationStats stats = StandardizationStats::fit(train);
  return {stats.apply(train), stats.apply(test), std::move(stats)};
}

std::vector<ColumnSummary> summarize(const ChoiceDataset& data) {
  std::vector<ColumnSummary> out;
  const auto names = data.schema().column_names();
  auto add = [&](const Eigen::MatrixXd& m, Eigen::Index c, const std::string& name) {
    const double mean = m.col(c).mean();
    const double sd = std::sqrt((m.col(c).array() - mean).square().mean());
    out.push_back({name, mean, sd});
  };
  for (Eigen::Index c = 0; c < data.x().cols(); ++c) add(data.x(), c, names[static_cast<std::size_t>(c)]);
  for (Eigen::Index c = 0; c < data.z().cols(); ++c) {
    add(data.z(), c, names[static_cast<std::size_t>(data.x().cols() + c)]);
  }
  return out;
}

}  // namespace tbresnet
