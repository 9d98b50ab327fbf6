#include "tbresnet/serialization.hpp"

#include <fstream>
#include <set>

#include "tbresnet/csv.hpp"
#include "tbresnet/error.hpp"

namespace tbresnet {
namespace {

Json vec(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.begin(), v.end())); }

Eigen::VectorXd to_vec(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json rows(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec(m.row(r).transpose()));
  return out;
}

Eigen::MatrixXd from_rows(const Json& j, Eigen::Index n_rows, Eigen::Index n_cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n_rows) throw ConfigError("matrix has the wrong row count");
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    const Eigen::VectorXd row = to_vec(j[static_cast<std::size_t>(r)]);
    if (row.size() != n_cols) throw ConfigError("matrix row has the wrong length");
    m.row(r) = row.transpose();
  }
  return m;
}

template <typename F>
auto guarded(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + " must be a JSON object");
  const std::set<std::string_view> ok(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
  }
}

Json to_json(const DatasetSchema& schema) {
  Json alt = Json::array();
  for (const auto& a : schema.alt_attributes) alt.push_back({{"alternative", a.alternative}, {"name", a.name}});
  return {{"n_alternatives", schema.n_alternatives}, {"alt_attributes", alt}, {"indiv_attributes", schema.indiv_attributes}};
}

DatasetSchema schema_from_json(const Json& j) {
  return guarded("schema", [&] {
    reject_unknown_keys(j, {"n_alternatives", "alt_attributes", "indiv_attributes"}, "schema");
    DatasetSchema s;
    s.n_alternatives = j.at("n_alternatives").get<int>();
    for (const auto& a : j.at("alt_attributes")) {
      s.alt_attributes.push_back({a.at("alternative").get<int>(), a.at("name").get<std::string>()});
    }
    s.indiv_attributes = j.at("indiv_attributes").get<std::vector<std::string>>();
    return s;
  });
}

Json to_json(const DcmSpec& spec) {
  Json j{{"scenario", std::string(to_string(spec.scenario))}, {"n_alternatives", spec.n_alternatives}};
  if (spec.scenario == Scenario::mnl) {
    Json g = Json::array();
    for (const auto& a : spec.generic) g.push_back({{"alternative", a.alternative}, {"attribute", a.attribute}});
    j["generic"] = g;
  } else {
    const char* modifier = spec.scenario == Scenario::pt ? "probability" : "delay";
    Json t = Json::array();
    for (const auto& term : spec.terms) {
      t.push_back({{"alternative", term.alternative}, {"payoff", term.payoff}, {modifier, term.modifier}});
    }
    j["terms"] = t;
  }
  j["covariates"] = spec.covariates;
  return j;
}

DcmSpec dcm_spec_from_json(const Json& j) {
  return guarded("dcm spec", [&] {
    reject_unknown_keys(j, {"scenario", "n_alternatives", "generic", "terms", "covariates"}, "dcm spec");
    DcmSpec s;
    s.scenario = parse_scenario(j.at("scenario").get<std::string>());
    s.n_alternatives = j.at("n_alternatives").get<int>();
    if (s.n_alternatives < 2) throw ConfigError("dcm spec: n_alternatives must be at least 2");
    if (j.contains("generic")) {
      for (const auto& g : j["generic"]) {
        reject_unknown_keys(g, {"alternative", "attribute"}, "dcm spec generic entry");
        s.generic.push_back({g.at("alternative").get<int>(), g.at("attribute").get<std::string>()});
      }
    }
    if (j.contains("terms")) {
      const char* modifier = s.scenario == Scenario::hd ? "delay" : "probability";
      for (const auto& t : j["terms"]) {
        reject_unknown_keys(t, {"alternative", "payoff", modifier}, "dcm spec term");
        s.terms.push_back({t.at("alternative").get<int>(), t.at("payoff").get<std::string>(),
                           t.at(modifier).get<std::string>()});
      }
    }
    if (j.contains("covariates")) s.covariates = j["covariates"].get<std::vector<std::string>>();
    return s;
  });
}

Json to_json(const MlpParams& mlp) {
  Json w = Json::array();
  Json b = Json::array();
  for (std::size_t l = 0; l < mlp.n_layers(); ++l) {
    w.push_back(rows(mlp.weights[l]));
    b.push_back(vec(mlp.biases[l]));
  }
  return {{"layer_dims", mlp.layer_dims}, {"weights", w}, {"biases", b}};
}

MlpParams mlp_from_json(const Json& j) {
  return guarded("mlp", [&] {
    reject_unknown_keys(j, {"layer_dims", "weights", "biases"}, "mlp");
    MlpParams p = MlpParams::zeros(j.at("layer_dims").get<std::vector<int>>());
    const auto& w = j.at("weights");
    const auto& b = j.at("biases");
    if (w.size() != p.n_layers() || b.size() != p.n_layers()) throw ConfigError("mlp: layer count mismatch");
    for (std::size_t l = 0; l < p.n_layers(); ++l) {
      p.weights[l] = from_rows(w[l], p.weights[l].rows(), p.weights[l].cols());
      p.biases[l] = to_vec(b[l]);
    }
    p.validate();
    return p;
  });
}

Json to_json(const StandardizationStats& s) {
  return {{"x_mean", vec(s.x_mean)}, {"x_std", vec(s.x_std)}, {"z_mean", vec(s.z_mean)}, {"z_std", vec(s.z_std)}};
}

StandardizationStats stats_from_json(const Json& j) {
  return guarded("standardization", [&] {
    reject_unknown_keys(j, {"x_mean", "x_std", "z_mean", "z_std"}, "standardization");
    return StandardizationStats{to_vec(j.at("x_mean")), to_vec(j.at("x_std")), to_vec(j.at("z_mean")),
                                to_vec(j.at("z_std"))};
  });
}

Json to_json(const TrainingLog& log) {
  return {{"trainer", std::string(to_string(log.trainer))},
          {"seed", log.seed},
          {"dcm_iterations", log.dcm_iterations},
          {"dcm_converged", log.dcm_converged},
          {"dcm_gradient_norm", log.dcm_gradient_norm},
          {"parameter_clamps", log.clamps.parameter_clamps},
          {"probability_clamps", log.clamps.probability_clamps},
          {"dcm_loss", log.dcm_loss},
          {"dnn_loss", log.dnn_loss}};
}

TrainingLog training_log_from_json(const Json& j) {
  return guarded("training log", [&] {
    reject_unknown_keys(j, {"trainer", "seed", "dcm_iterations", "dcm_converged", "dcm_gradient_norm",
                            "parameter_clamps", "probability_clamps", "dcm_loss", "dnn_loss"},
                        "training log");
    TrainingLog log;
    log.trainer = parse_trainer(j.at("trainer").get<std::string>());
    log.seed = j.at("seed").get<std::uint64_t>();
    log.dcm_iterations = j.at("dcm_iterations").get<int>();
    log.dcm_converged = j.at("dcm_converged").get<bool>();
    log.dcm_gradient_norm = j.at("dcm_gradient_norm").get<double>();
    log.clamps.parameter_clamps = j.at("parameter_clamps").get<std::int64_t>();
    log.clamps.probability_clamps = j.at("probability_clamps").get<std::int64_t>();
    log.dcm_loss = j.at("dcm_loss").get<std::vector<double>>();
    log.dnn_loss = j.at("dnn_loss").get<std::vector<double>>();
    return log;
  });
}

Json to_json(const TbResNetModel& m) {
  return {{"format", "tbresnet-model"},
          {"version", 1},
          {"delta", m.delta},
          {"schema", to_json(m.schema)},
          {"dcm_spec", to_json(m.dcm_spec)},
          {"dcm_parameter_names", m.layout.parameter_names(m.schema)},
          {"dcm_params", vec(m.dcm_params)},
          {"mlp", to_json(m.mlp)},
          {"standardization", to_json(m.stats)},
          {"training", to_json(m.log)}};
}

TbResNetModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    reject_unknown_keys(j, {"format", "version", "delta", "schema", "dcm_spec", "dcm_parameter_names", "dcm_params",
                            "mlp", "standardization", "training"},
                        "model");
    if (j.at("format") != "tbresnet-model" || j.at("version") != 1) throw ConfigError("not a version-1 model file");
    TbResNetModel m;
    m.delta = j.at("delta").get<double>();
    m.schema = schema_from_json(j.at("schema"));
    m.dcm_spec = dcm_spec_from_json(j.at("dcm_spec"));
    m.layout = resolve(m.dcm_spec, m.schema);
    m.dcm_params = to_vec(j.at("dcm_params"));
    m.mlp = mlp_from_json(j.at("mlp"));
    m.stats = stats_from_json(j.at("standardization"));
    m.log = training_log_from_json(j.at("training"));
    m.validate();
    return m;
  });
}

void save_model(const TbResNetModel& model, const std::filesystem::path& path) { write_json(to_json(model), path); }

TbResNetModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

Json to_json(const MetricReport& r) {
  Json confusion = Json::array();
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> row(r.confusion.cols());
    for (Eigen::Index k = 0; k < r.confusion.cols(); ++k) row[static_cast<std::size_t>(k)] = r.confusion(i, k);
    confusion.push_back(row);
  }
  return {{"accuracy", r.accuracy},   {"cross_entropy", r.cross_entropy}, {"f1", r.f1},
          {"precision", vec(r.precision)}, {"recall", vec(r.recall)},        {"confusion_matrix", confusion}};
}

Json to_json(const SweepResult& r) {
  Json rows_json = Json::array();
  for (const auto& row : r.rows) {
    Json o{{"delta", row.delta}, {"ok", row.ok}};
    if (row.ok) {
      o["accuracy"] = row.accuracy;
      o["cross_entropy"] = row.cross_entropy;
      o["f1"] = row.f1;
    } else {
      o["error"] = row.error;
    }
    rows_json.push_back(o);
  }
  Json j{{"trainer", std::string(to_string(r.trainer))}, {"baseline_accuracy", r.baseline_accuracy}, {"rows", rows_json}};
  j["best_accuracy_delta"] = r.best_accuracy_delta ? Json(*r.best_accuracy_delta) : Json(nullptr);
  j["best_loss_delta"] = r.best_loss_delta ? Json(*r.best_loss_delta) : Json(nullptr);
  return j;
}

Json to_json(const PerturbationReport& r) {
  Json rows_json = Json::array();
  for (const auto& row : r.rows) {
    rows_json.push_back({{"epsilon", row.epsilon}, {"accuracy", row.accuracy}, {"cross_entropy", row.cross_entropy},
                         {"f1", row.f1}});
  }
  Json j{{"attack", std::string(to_string(r.attack))}, {"rows", rows_json}};
  if (!r.target_rule.empty()) j["target_rule"] = r.target_rule;
  return j;
}

Json to_json(const std::vector<Elasticity>& table) {
  Json out = Json::array();
  for (const auto& e : table) {
    out.push_back({{"attribute", e.column}, {"output_alternative", e.output_alternative}, {"mean", e.mean},
                   {"sum", e.sum}, {"rows_used", e.rows_used}, {"rows_skipped", e.rows_skipped}});
  }
  return out;
}

Json surface_metadata(const SurfaceGrid& g, const DatasetSchema& schema) {
  Json ref = Json::object();
  const auto names = schema.column_names();
  for (Eigen::Index c = 0; c < g.reference.x.size(); ++c) ref[names[static_cast<std::size_t>(c)]] = g.reference.x[c];
  for (Eigen::Index c = 0; c < g.reference.z.size(); ++c) {
    ref[names[static_cast<std::size_t>(g.reference.x.size() + c)]] = g.reference.z[c];
  }
  auto axis = [](const AxisSpec& a) {
    return Json{{"attribute", a.attribute}, {"lo", a.lo}, {"hi", a.hi}, {"resolution", a.resolution}};
  };
  return {{"alternative", g.alternative}, {"attr_a", axis(g.a)}, {"attr_b", axis(g.b)}, {"reference", ref}};
}

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
  csv::write_row(out, {"delta", "accuracy", "cross_entropy", "f1", "baseline_accuracy", "error"});
  for (const auto& row : r.rows) {
    if (row.ok) {
      csv::write_row(out, {csv::format_number(row.delta), csv::format_number(row.accuracy),
                           csv::format_number(row.cross_entropy), csv::format_number(row.f1),
                           csv::format_number(r.baseline_accuracy), ""});
    } else {
      std::string msg = row.error;
      for (char& c : msg) {
        if (c == ',' || c == '\n' || c == '\r') c = ' ';
      }
      csv::write_row(out, {csv::format_number(row.delta), "", "", "", csv::format_number(r.baseline_accuracy), msg});
    }
  }
}

void write_perturbation_csv(const std::vector<PerturbationReport>& reports, std::ostream& out) {
  csv::write_row(out, {"attack", "epsilon", "accuracy", "cross_entropy", "f1"});
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      csv::write_row(out, {std::string(to_string(r.attack)), csv::format_number(row.epsilon),
                           csv::format_number(row.accuracy), csv::format_number(row.cross_entropy),
                           csv::format_number(row.f1)});
    }
  }
}

void write_elasticity_csv(const std::vector<Elasticity>& table, const DatasetSchema& schema, std::ostream& out) {
  csv::write_row(out, {"attribute", "alternative", "output_alternative", "elasticity_mean", "elasticity_sum",
                       "rows_used", "rows_skipped"});
  for (const auto& e : table) {
    std::string owner;
    if (auto c = schema.x_column(e.column)) owner = std::to_string(schema.alt_attributes[static_cast<std::size_t>(*c)].alternative);
    csv::write_row(out, {e.column, owner, std::to_string(e.output_alternative), csv::format_number(e.mean),
                         csv::format_number(e.sum), std::to_string(e.rows_used), std::to_string(e.rows_skipped)});
  }
}

void write_surface_csv(const SurfaceGrid& g, std::ostream& out) {
  csv::write_row(out, {g.a.attribute, g.b.attribute, "utility"});
  for (std::size_t i = 0; i < g.a_values.size(); ++i) {
    for (std::size_t j = 0; j < g.b_values.size(); ++j) {
      csv::write_row(out, {csv::format_number(g.a_values[i]), csv::format_number(g.b_values[j]),
                           csv::format_number(g.utilities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))});
    }
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace tbresnet
