#include "app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <tbresnet/csv.hpp>
#include <tbresnet/error.hpp>

namespace tbresnet::app {
namespace fs = std::filesystem;

namespace {

fs::path resolve_path(const Json& j, const fs::path& base) {
  fs::path p = j.get<std::string>();
  return p.is_relative() ? base / p : p;
}

template <typename T>
T positive(const Json& j, const char* name) {
  const T v = j.get<T>();
  if (!(v > 0)) throw ConfigError(std::string(name) + " must be positive");
  return v;
}

AxisSpec parse_axis(const Json& j, bool& range_given) {
  reject_unknown_keys(j, {"attribute", "lo", "hi", "resolution"}, "surface axis");
  AxisSpec a;
  a.attribute = j.at("attribute").get<std::string>();
  a.resolution = j.value("resolution", 50);
  if (a.resolution < 2) throw ConfigError("surface resolution must be at least 2");
  range_given = j.contains("lo") || j.contains("hi");
  if (range_given) {
    a.lo = j.at("lo").get<double>();
    a.hi = j.at("hi").get<double>();
    if (!(a.hi > a.lo)) throw ConfigError("surface axis needs lo < hi");
  }
  return a;
}

Json axis_json(const AxisSpec& a, bool range_given) {
  Json j{{"attribute", a.attribute}, {"resolution", a.resolution}};
  if (range_given) {
    j["lo"] = a.lo;
    j["hi"] = a.hi;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Output bookkeeping

class Outputs {
 public:
  Outputs(fs::path dir, std::string command, std::string config_hash)
      : dir_(std::move(dir)), command_(std::move(command)), config_hash_(std::move(config_hash)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw DataError("cannot create output directory " + dir_.string());
  }

  template <typename Writer>
  void text(const std::string& name, Writer&& write) {
    std::ostringstream buffer;
    write(buffer);
    put(name, buffer.str());
  }

  void json(const std::string& name, const Json& j) { put(name, j.dump(2) + "\n"); }

  void finish() {
    Json files = Json::array();
    for (const auto& [name, digest] : files_) files.push_back({{"path", name}, {"sha256", digest.first}, {"bytes", digest.second}});
    Json manifest{{"tool", "tbresnet"}, {"version", 1}, {"command", command_}, {"config_hash", config_hash_},
                  {"files", files}};
    put_raw("manifest.json", manifest.dump(2) + "\n");
  }

 private:
  void put(const std::string& name, const std::string& bytes) {
    put_raw(name, bytes);
    files_.emplace_back(name, std::make_pair(sha256_hex(bytes), bytes.size()));
  }

  void put_raw(const std::string& name, const std::string& bytes) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << bytes;
    if (!f) throw DataError("cannot write " + (dir_ / name).string());
  }

  fs::path dir_;
  std::string command_;
  std::string config_hash_;
  std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> files_;
};

// ---------------------------------------------------------------------------
// Data plumbing

SyntheticDesign design_for(const RunConfig& c) {
  SyntheticDesign d = default_design(c.scenario);
  d.nonlinear_strength = c.generator.nonlinear_strength;
  if (c.generator.true_params) {
    const auto& v = *c.generator.true_params;
    d.true_params = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return d;
}

struct Datasets {
  ChoiceDataset train;
  std::optional<ChoiceDataset> test;

  const ChoiceDataset& evaluation() const { return test ? *test : train; }
};

Datasets load_data(const RunConfig& c) {
  if (!c.data) {
    const ChoiceDataset all = generate_synthetic(design_for(c), c.generator.n, c.generator.noise, c.seed);
    auto [tr, te] = split(all, 0.75, c.seed);
    return {std::move(tr), std::move(te)};
  }
  const DataConfig& d = *c.data;
  if (d.path) {
    auto [tr, te] = split(load_csv(*d.path), d.train_fraction, c.seed);
    return {std::move(tr), std::move(te)};
  }
  ChoiceDataset train = load_csv(*d.train);
  std::optional<ChoiceDataset> test;
  if (d.test) test = load_csv(*d.test, train.schema());
  return {std::move(train), std::move(test)};
}

DcmSpec spec_for(const RunConfig& c, const DatasetSchema& schema) {
  if (c.dcm_spec) return *c.dcm_spec;
  if (c.scenario == Scenario::mnl) return DcmSpec::mnl_for(schema);
  return default_design(c.scenario).spec;
}

TbResNetModel require_model(const RunConfig& c) {
  if (!c.model) throw ConfigError("this command needs \"model\" in the config");
  return load_model(*c.model);
}

void write_summary_table(const std::vector<ColumnSummary>& s, std::ostream& out) {
  // Two name/mean/std column groups side by side.
  const std::size_t half = (s.size() + 1) / 2;
  out << std::left << std::setw(28) << "Name" << std::right << std::setw(12) << "Mean" << std::setw(12) << "Std."
      << "  | " << std::left << std::setw(28) << "Name" << std::right << std::setw(12) << "Mean" << std::setw(12)
      << "Std." << '\n';
  for (std::size_t i = 0; i < half; ++i) {
    auto cell = [&](std::size_t k) {
      out << std::left << std::setw(28) << s[k].name << std::right << std::fixed << std::setprecision(3)
          << std::setw(12) << s[k].mean << std::setw(12) << s[k].std;
    };
    cell(i);
    out << "  | ";
    if (i + half < s.size()) cell(i + half);
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void write_metrics_line(const std::string& label, const MetricReport& r, std::ostream& out) {
  out << label << ": accuracy " << csv::format_number(r.accuracy) << ", cross-entropy "
      << csv::format_number(r.cross_entropy) << ", f1 " << csv::format_number(r.f1) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

void cmd_generate(const RunConfig& c, Outputs& o, std::ostream& out) {
  const ChoiceDataset data = generate_synthetic(design_for(c), c.generator.n, c.generator.noise, c.seed);
  o.text("data.csv", [&](std::ostream& s) { write_csv(data, s); });
  const auto summary = summarize(data);
  o.text("summary.csv", [&](std::ostream& s) {
    csv::write_row(s, {"column", "mean", "std"});
    for (const auto& col : summary) csv::write_row(s, {col.name, csv::format_number(col.mean), csv::format_number(col.std)});
  });
  write_summary_table(summary, out);
  out << "Number of samples: " << data.size() << '\n';
  const Eigen::VectorXd shares = data.choice_shares();
  out << "Choice shares:";
  for (Eigen::Index k = 0; k < shares.size(); ++k) out << " alt" << k << " " << csv::format_number(shares[k]);
  out << '\n';
}

void cmd_fit(const RunConfig& c, Outputs& o, std::ostream& out) {
  const Datasets d = load_data(c);
  const TbResNetModel m = train(c.trainer, spec_for(c, d.train.schema()), c.delta, d.train, c.train, c.seed);
  o.json("model.json", to_json(m));
  o.text("training_log.csv", [&](std::ostream& s) {
    csv::write_row(s, {"stage", "iteration", "loss"});
    for (std::size_t i = 0; i < m.log.dcm_loss.size(); ++i) {
      csv::write_row(s, {"dcm", std::to_string(i), csv::format_number(m.log.dcm_loss[i])});
    }
    for (std::size_t i = 0; i < m.log.dnn_loss.size(); ++i) {
      csv::write_row(s, {"dnn", std::to_string(i), csv::format_number(m.log.dnn_loss[i])});
    }
  });
  Json metrics{{"train", to_json(evaluate(m, d.train))}};
  write_metrics_line("train", evaluate(m, d.train), out);
  if (d.test) {
    const MetricReport r = evaluate(m, *d.test);
    metrics["test"] = to_json(r);
    write_metrics_line("test", r, out);
  }
  o.json("metrics.json", metrics);
}

void cmd_sweep(const RunConfig& c, Outputs& o, std::ostream& out) {
  const Datasets d = load_data(c);
  if (!d.test) throw ConfigError("sweep needs a test set (data.test or data.path)");
  const SweepResult r = sweep(spec_for(c, d.train.schema()), c.delta_grid, d.train, *d.test, c.train, c.trainer,
                              c.seed, c.workers);
  o.text("sweep.csv", [&](std::ostream& s) { write_sweep_csv(r, s); });
  o.json("sweep.json", to_json(r));
  out << "baseline (largest share) accuracy " << csv::format_number(r.baseline_accuracy) << '\n';
  for (const auto& row : r.rows) {
    out << "delta " << csv::format_number(row.delta) << ": ";
    if (row.ok) {
      out << "accuracy " << csv::format_number(row.accuracy) << ", cross-entropy "
          << csv::format_number(row.cross_entropy) << ", f1 " << csv::format_number(row.f1) << '\n';
    } else {
      out << "failed (" << row.error << ")\n";
    }
  }
  if (r.best_accuracy_delta) out << "best delta by accuracy " << csv::format_number(*r.best_accuracy_delta) << '\n';
  if (r.best_loss_delta) out << "best delta by cross-entropy " << csv::format_number(*r.best_loss_delta) << '\n';
}

void cmd_eval(const RunConfig& c, Outputs& o, std::ostream& out) {
  const TbResNetModel m = require_model(c);
  const Datasets d = load_data(c);
  const ChoiceDataset& data = d.evaluation();
  const Eigen::MatrixXd p = predict_probabilities(m, m.encode(data));
  const MetricReport r = evaluate(p, data.choices());
  o.json("metrics.json", to_json(r));
  o.text("predictions.csv", [&](std::ostream& s) {
    std::vector<std::string> header{"row", "choice", "predicted"};
    for (Eigen::Index k = 0; k < p.cols(); ++k) header.push_back("p" + std::to_string(k));
    csv::write_row(s, header);
    const auto pred = predicted_choices(p);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      std::vector<std::string> row{std::to_string(i), std::to_string(data.choices()[static_cast<std::size_t>(i)]),
                                   std::to_string(pred[static_cast<std::size_t>(i)])};
      for (Eigen::Index k = 0; k < p.cols(); ++k) row.push_back(csv::format_number(p(i, k)));
      csv::write_row(s, row);
    }
  });
  write_metrics_line("evaluation", r, out);
}

void cmd_perturb(const RunConfig& c, Outputs& o, std::ostream& out) {
  const TbResNetModel m = require_model(c);
  const Datasets d = load_data(c);
  PerturbationOptions opt{c.perturb.perturb_covariates, c.perturb.target};
  std::vector<PerturbationReport> reports;
  Json j = Json::array();
  for (Attack a : c.perturb.attacks) {
    reports.push_back(robustness_curve(m, d.evaluation(), a, c.perturb.epsilons, c.seed, opt));
    j.push_back(to_json(reports.back()));
  }
  o.text("perturbation.csv", [&](std::ostream& s) { write_perturbation_csv(reports, s); });
  o.json("perturbation.json", j);
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      out << to_string(r.attack) << " eps " << csv::format_number(row.epsilon) << ": accuracy "
          << csv::format_number(row.accuracy) << '\n';
    }
  }
}

void cmd_elasticity(const RunConfig& c, Outputs& o, std::ostream& out) {
  const TbResNetModel m = require_model(c);
  const Datasets d = load_data(c);
  std::vector<Elasticity> table;
  if (c.elasticity_attributes.empty()) {
    table = elasticity_table(m, d.evaluation());
  } else {
    for (const auto& a : c.elasticity_attributes) {
      for (int k = 0; k < m.schema.n_alternatives; ++k) table.push_back(elasticity(m, d.evaluation(), k, a));
    }
  }
  o.text("elasticity.csv", [&](std::ostream& s) { write_elasticity_csv(table, m.schema, s); });
  o.json("elasticity.json", to_json(table));
  for (const auto& e : table) {
    out << e.column << " -> alt" << e.output_alternative << ": mean " << csv::format_number(e.mean) << '\n';
  }
}

void cmd_surface(const RunConfig& c, Outputs& o, std::ostream& out) {
  if (!c.surface) throw ConfigError("this command needs \"surface\" in the config");
  const TbResNetModel m = require_model(c);
  const Datasets d = load_data(c);
  const ReferenceObservation ref = median_reference(d.train);
  SurfaceConfig s = *c.surface;
  auto fill_range = [&](AxisSpec& a, bool given) {
    if (given) return;
    Eigen::VectorXd col;
    if (auto x = m.schema.x_column(a.attribute)) {
      col = d.train.x().col(*x);
    } else if (auto z = m.schema.z_column(a.attribute)) {
      col = d.train.z().col(*z);
    } else {
      throw ConfigError("unknown attribute '" + a.attribute + "'");
    }
    a.lo = col.minCoeff();
    a.hi = col.maxCoeff();
    if (!(a.hi > a.lo)) throw ConfigError("attribute '" + a.attribute + "' is constant; give lo and hi");
  };
  fill_range(s.a, s.a_range_given);
  fill_range(s.b, s.b_range_given);
  const SurfaceGrid g = utility_grid(m, s.alternative, s.a, s.b, ref);
  o.text("surface.csv", [&](std::ostream& f) { write_surface_csv(g, f); });
  o.json("surface.json", surface_metadata(g, m.schema));
  out << "surface " << g.a.resolution << " x " << g.b.resolution << " for alternative " << g.alternative
      << ", utility range [" << csv::format_number(g.utilities.minCoeff()) << ", "
      << csv::format_number(g.utilities.maxCoeff()) << "]\n";
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig parse_config(const Json& j, const fs::path& base) {
  try {
    reject_unknown_keys(j, {"scenario", "data", "generator", "dcm_spec", "delta", "delta_grid", "trainer", "dnn",
                            "dcm_optimizer", "model", "perturb", "elasticity", "surface", "seed", "out", "workers"},
                        "config");
    RunConfig c;
    if (j.contains("scenario")) c.scenario = parse_scenario(j["scenario"].get<std::string>());
    if (j.contains("data")) {
      const Json& d = j["data"];
      reject_unknown_keys(d, {"path", "train", "test", "train_fraction"}, "data");
      DataConfig dc;
      if (d.contains("path")) dc.path = resolve_path(d["path"], base);
      if (d.contains("train")) dc.train = resolve_path(d["train"], base);
      if (d.contains("test")) dc.test = resolve_path(d["test"], base);
      if (d.contains("train_fraction")) dc.train_fraction = d["train_fraction"].get<double>();
      if (dc.path.has_value() == dc.train.has_value()) throw ConfigError("data needs exactly one of path or train");
      if (dc.path && dc.test) throw ConfigError("data.test cannot be combined with data.path");
      if (!(dc.train_fraction > 0.0 && dc.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
      c.data = dc;
    }
    if (j.contains("generator")) {
      const Json& g = j["generator"];
      reject_unknown_keys(g, {"n", "noise", "nonlinear_strength", "true_params"}, "generator");
      if (g.contains("n")) {
        c.generator.n = g["n"].get<Eigen::Index>();
        if (c.generator.n < 1) throw ConfigError("generator.n must be at least 1");
      }
      if (g.contains("noise")) c.generator.noise = parse_noise(g["noise"].get<std::string>());
      if (g.contains("nonlinear_strength")) c.generator.nonlinear_strength = g["nonlinear_strength"].get<double>();
      if (g.contains("true_params")) c.generator.true_params = g["true_params"].get<std::vector<double>>();
    }
    if (j.contains("dcm_spec")) {
      const Json& s = j["dcm_spec"];
      c.dcm_spec = dcm_spec_from_json(s.is_string() ? read_json(resolve_path(s, base)) : s);
    }
    if (j.contains("delta")) {
      c.delta = j["delta"].get<double>();
      if (!(c.delta >= 0.0 && c.delta <= 1.0)) throw ConfigError("delta must lie in [0, 1]");
    }
    if (j.contains("delta_grid")) {
      const Json& g = j["delta_grid"];
      if (g.is_string()) {
        const auto name = g.get<std::string>();
        if (name == "standard") {
          c.delta_grid = DeltaGrid::standard();
        } else if (name == "reduced") {
          c.delta_grid = DeltaGrid::reduced();
        } else {
          throw ConfigError("delta_grid must be a list, \"standard\" or \"reduced\"");
        }
      } else {
        c.delta_grid.values = g.get<std::vector<double>>();
      }
      c.delta_grid.validate();
    }
    if (j.contains("trainer")) c.trainer = parse_trainer(j["trainer"].get<std::string>());
    if (j.contains("dnn")) {
      const Json& n = j["dnn"];
      reject_unknown_keys(n, {"depth", "width", "iterations", "batch_size", "learning_rate"}, "dnn");
      if (n.contains("depth")) c.train.depth = positive<int>(n["depth"], "dnn.depth");
      if (n.contains("width")) c.train.width = positive<int>(n["width"], "dnn.width");
      if (n.contains("iterations")) c.train.sgd.iterations = positive<int>(n["iterations"], "dnn.iterations");
      if (n.contains("batch_size")) c.train.sgd.batch_size = positive<int>(n["batch_size"], "dnn.batch_size");
      if (n.contains("learning_rate")) c.train.sgd.learning_rate = positive<double>(n["learning_rate"], "dnn.learning_rate");
    }
    if (j.contains("dcm_optimizer")) {
      const Json& n = j["dcm_optimizer"];
      reject_unknown_keys(n, {"max_iterations", "gradient_tolerance", "loss_tolerance", "learning_rate"}, "dcm_optimizer");
      if (n.contains("max_iterations")) c.train.dcm.max_iterations = positive<int>(n["max_iterations"], "max_iterations");
      if (n.contains("gradient_tolerance")) {
        c.train.dcm.gradient_tolerance = positive<double>(n["gradient_tolerance"], "gradient_tolerance");
      }
      if (n.contains("loss_tolerance")) {
        c.train.dcm.loss_tolerance = n["loss_tolerance"].get<double>();
        if (c.train.dcm.loss_tolerance < 0.0) throw ConfigError("loss_tolerance must be non-negative");
      }
      if (n.contains("learning_rate")) c.train.dcm.learning_rate = positive<double>(n["learning_rate"], "learning_rate");
    }
    c.train.validate();
    if (j.contains("model")) c.model = resolve_path(j["model"], base);
    if (j.contains("perturb")) {
      const Json& p = j["perturb"];
      reject_unknown_keys(p, {"attacks", "epsilons", "perturb_covariates", "tgsm_target"}, "perturb");
      if (p.contains("attacks")) {
        c.perturb.attacks.clear();
        for (const auto& a : p["attacks"]) c.perturb.attacks.push_back(parse_attack(a.get<std::string>()));
        if (c.perturb.attacks.empty()) throw ConfigError("perturb.attacks is empty");
      }
      if (p.contains("epsilons")) c.perturb.epsilons = p["epsilons"].get<std::vector<double>>();
      if (p.contains("perturb_covariates")) c.perturb.perturb_covariates = p["perturb_covariates"].get<bool>();
      if (p.contains("tgsm_target")) {
        const Json& t = p["tgsm_target"];
        if (t.is_string() && t.get<std::string>() == "least_likely") {
          c.perturb.target = {};
        } else if (t.is_number_integer()) {
          c.perturb.target = {false, t.get<int>()};
        } else {
          throw ConfigError("tgsm_target must be \"least_likely\" or an alternative index");
        }
      }
    }
    if (j.contains("elasticity")) {
      const Json& e = j["elasticity"];
      reject_unknown_keys(e, {"attributes"}, "elasticity");
      if (e.contains("attributes")) c.elasticity_attributes = e["attributes"].get<std::vector<std::string>>();
    }
    if (j.contains("surface")) {
      const Json& s = j["surface"];
      reject_unknown_keys(s, {"alternative", "attr_a", "attr_b"}, "surface");
      SurfaceConfig sc;
      sc.alternative = s.value("alternative", 0);
      sc.a = parse_axis(s.at("attr_a"), sc.a_range_given);
      sc.b = parse_axis(s.at("attr_b"), sc.b_range_given);
      c.surface = sc;
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = resolve_path(j["out"], base);
    if (j.contains("workers")) c.workers = positive<int>(j["workers"], "workers");
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["scenario"] = std::string(to_string(c.scenario));
  if (c.data) {
    Json d;
    if (c.data->path) d["path"] = c.data->path->string();
    if (c.data->train) d["train"] = c.data->train->string();
    if (c.data->test) d["test"] = c.data->test->string();
    d["train_fraction"] = c.data->train_fraction;
    j["data"] = d;
  }
  Json g{{"n", c.generator.n}, {"noise", std::string(to_string(c.generator.noise))},
         {"nonlinear_strength", c.generator.nonlinear_strength}};
  if (c.generator.true_params) g["true_params"] = *c.generator.true_params;
  j["generator"] = g;
  if (c.dcm_spec) j["dcm_spec"] = to_json(*c.dcm_spec);
  j["delta"] = c.delta;
  j["delta_grid"] = c.delta_grid.values;
  j["trainer"] = std::string(to_string(c.trainer));
  j["dnn"] = {{"depth", c.train.depth},
              {"width", c.train.width},
              {"iterations", c.train.sgd.iterations},
              {"batch_size", c.train.sgd.batch_size},
              {"learning_rate", c.train.sgd.learning_rate}};
  j["dcm_optimizer"] = {{"max_iterations", c.train.dcm.max_iterations},
                        {"gradient_tolerance", c.train.dcm.gradient_tolerance},
                        {"loss_tolerance", c.train.dcm.loss_tolerance},
                        {"learning_rate", c.train.dcm.learning_rate}};
  if (c.model) j["model"] = c.model->string();
  Json attacks = Json::array();
  for (Attack a : c.perturb.attacks) attacks.push_back(std::string(to_string(a)));
  j["perturb"] = {{"attacks", attacks},
                  {"epsilons", c.perturb.epsilons},
                  {"perturb_covariates", c.perturb.perturb_covariates},
                  {"tgsm_target", c.perturb.target.least_likely ? Json("least_likely") : Json(c.perturb.target.fixed_class)}};
  j["elasticity"] = {{"attributes", c.elasticity_attributes}};
  if (c.surface) {
    j["surface"] = {{"alternative", c.surface->alternative},
                    {"attr_a", axis_json(c.surface->a, c.surface->a_range_given)},
                    {"attr_b", axis_json(c.surface->b, c.surface->b_range_given)}};
  }
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["workers"] = c.workers;
  return j;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 computation failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

int run(const std::string& command, const std::optional<fs::path>& config_path, const Overrides& overrides,
        std::ostream& out, std::ostream& err) {
  try {
    Json j = Json::object();
    fs::path base = fs::current_path();
    if (config_path) {
      j = read_json(*config_path);
      base = fs::absolute(*config_path).parent_path();
    }
    RunConfig c = parse_config(j, base);
    if (overrides.seed) c.seed = *overrides.seed;
    if (overrides.out) c.out = *overrides.out;
    if (overrides.workers) {
      if (*overrides.workers < 1) throw ConfigError("--workers must be at least 1");
      c.workers = *overrides.workers;
    }

    Json resolved = config_to_json(c);
    resolved.erase("out");  // where results go does not change what they are
    resolved.erase("workers");
    const std::string config_text = resolved.dump(2) + "\n";
    Outputs o(c.out, command, sha256_hex(config_text));
    o.text("config.json", [&](std::ostream& s) { s << config_text; });

    if (command == "generate") {
      cmd_generate(c, o, out);
    } else if (command == "fit") {
      cmd_fit(c, o, out);
    } else if (command == "sweep") {
      cmd_sweep(c, o, out);
    } else if (command == "eval") {
      cmd_eval(c, o, out);
    } else if (command == "perturb") {
      cmd_perturb(c, o, out);
    } else if (command == "elasticity") {
      cmd_elasticity(c, o, out);
    } else if (command == "surface") {
      cmd_surface(c, o, out);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
    o.finish();
    return static_cast<int>(ExitCode::ok);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
  } catch (const DimensionError& e) {
    err << "configuration error: " << e.what() << '\n';
  } catch (const Json::exception& e) {
    err << "configuration error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }
  return static_cast<int>(ExitCode::config);
}

}  // namespace tbresnet::app
