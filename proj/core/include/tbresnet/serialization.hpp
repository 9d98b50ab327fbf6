#pragma once

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbresnet/metrics.hpp"
#include "tbresnet/model.hpp"
#include "tbresnet/robustness.hpp"
#include "tbresnet/surface.hpp"
#include "tbresnet/train.hpp"

namespace tbresnet {

using Json = nlohmann::json;

/// Throws ConfigError naming the first key of `j` that is not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context);

Json to_json(const DatasetSchema& schema);
DatasetSchema schema_from_json(const Json& j);

Json to_json(const DcmSpec& spec);
DcmSpec dcm_spec_from_json(const Json& j);

Json to_json(const MlpParams& mlp);
MlpParams mlp_from_json(const Json& j);

Json to_json(const StandardizationStats& stats);
StandardizationStats stats_from_json(const Json& j);

Json to_json(const TrainingLog& log);
TrainingLog training_log_from_json(const Json& j);

Json to_json(const TbResNetModel& model);
TbResNetModel model_from_json(const Json& j);

void save_model(const TbResNetModel& model, const std::filesystem::path& path);
TbResNetModel load_model(const std::filesystem::path& path);

Json to_json(const MetricReport& report);
Json to_json(const SweepResult& result);
Json to_json(const PerturbationReport& report);
Json to_json(const std::vector<Elasticity>& table);
/// Describes the grid and its reference observation (the values go to CSV).
Json surface_metadata(const SurfaceGrid& grid, const DatasetSchema& schema);

/// delta, accuracy, cross_entropy, f1, baseline_accuracy, error
void write_sweep_csv(const SweepResult& result, std::ostream& out);
/// attack, epsilon, accuracy, cross_entropy, f1
void write_perturbation_csv(const std::vector<PerturbationReport>& reports, std::ostream& out);
/// attribute, alternative, output_alternative, elasticity_mean, elasticity_sum, rows_used, rows_skipped
void write_elasticity_csv(const std::vector<Elasticity>& table, const DatasetSchema& schema, std::ostream& out);
/// attr_a, attr_b, utility in long format
void write_surface_csv(const SurfaceGrid& grid, std::ostream& out);

/// Pretty JSON with a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace tbresnet
