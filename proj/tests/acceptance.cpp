// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: tbresnet_acceptance <path-to-tbresnet-cli>

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include <tbresnet/error.hpp>
#include <tbresnet/metrics.hpp>
#include <tbresnet/robustness.hpp>
#include <tbresnet/serialization.hpp>
#include <tbresnet/synthetic.hpp>
#include <tbresnet/train.hpp>

namespace fs = std::filesystem;
using namespace tbresnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Loss gradients against central differences

/// Sign pattern of every hidden pre-activation over the batch.
std::vector<bool> relu_pattern(const MlpParams& p, const Eigen::MatrixXd& inputs) {
  std::vector<bool> bits;
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l + 1 < p.n_layers(); ++l) {
    Eigen::MatrixXd pre = (p.weights[l] * a).colwise() + p.biases[l];
    for (Eigen::Index i = 0; i < pre.size(); ++i) bits.push_back(pre.data()[i] > 0.0);
    a = pre.cwiseMax(0.0);
  }
  return bits;
}

struct Probe {
  std::vector<bool> pattern;
  std::int64_t clamps;
  bool operator==(const Probe&) const = default;
};

Outcome gradient_check() {
  const double h = 1e-6;
  int instances = 0;
  double worst = 0.0;
  long compared = 0;
  long skipped = 0;
  for (Scenario s : {Scenario::mnl, Scenario::pt, Scenario::hd}) {
    const auto design = default_design(s);
    for (int t = 0; t < 20; ++t) {
      const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(t);
      Rng rng = make_rng(seed, "acceptance");
      const Eigen::Index n = 4 + static_cast<Eigen::Index>(uniform_index(rng, 13));
      const auto data = generate_synthetic(design, n, Noise::gumbel, seed);
      TrainConfig cfg;
      cfg.depth = 3;
      cfg.width = 8;
      const double delta = 0.15 + 0.7 * uniform_open01(rng);
      TbResNetModel m = initial_model(design.spec, delta, data, cfg, seed);
      m.dcm_params = design.true_params;
      // Jitter the free weights on the scale of the true ones (raw covariates multiply them).
      const Eigen::Index fixed = s == Scenario::mnl ? 0 : (s == Scenario::pt ? 3 : 2);
      const double jitter = s == Scenario::mnl ? 0.5 : (s == Scenario::pt ? 0.02 : 0.002);
      for (Eigen::Index j = fixed; j < m.dcm_params.size(); ++j) {
        m.dcm_params[j] += jitter * standard_normal(rng);
      }
      for (auto& b : m.mlp.biases) {
        for (auto& v : b) v = 0.1 * standard_normal(rng);
      }
      StandardizedInputs in = m.encode(data);
      const auto& y = data.choices();
      const auto g = loss_gradients(m, in, y);
      auto loss = [&] { return nll(m, in, y); };
      auto probe = [&] {
        ClampDiagnostics d;
        if (m.delta < 1.0) theory_utilities(m, in, &d);
        return Probe{relu_pattern(m.mlp, network_inputs(in)), d.parameter_clamps + d.probability_clamps};
      };
      auto check = [&](double analytic, double& v) {
        const double keep = v;
        v = keep + h;
        const double up = loss();
        const Probe pu = probe();
        v = keep - h;
        const double down = loss();
        const Probe pd = probe();
        v = keep;
        if (!(pu == pd)) {
          ++skipped;  // the stencil straddles a ReLU kink or touches a clamp
          return;
        }
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6}));
        ++compared;
      };
      for (Eigen::Index j = 0; j < m.dcm_params.size(); ++j) check(g.dcm[j], m.dcm_params[j]);
      for (std::size_t l = 0; l < m.mlp.n_layers(); ++l) {
        for (Eigen::Index i = 0; i < m.mlp.weights[l].size(); ++i) {
          check(g.mlp.weights[l].data()[i], m.mlp.weights[l].data()[i]);
        }
        for (Eigen::Index i = 0; i < m.mlp.biases[l].size(); ++i) check(g.mlp.biases[l][i], m.mlp.biases[l][i]);
      }
      for (Eigen::Index i = 0; i < in.x.size(); ++i) check(g.x.data()[i], in.x.data()[i]);
      for (Eigen::Index i = 0; i < in.z.size(); ++i) check(g.z.data()[i], in.z.data()[i]);
      ++instances;
    }
  }
  return {worst < 1e-4 && instances >= 60,
          fmt("%d instances, %ld entries, %ld skipped near kinks, max rel err %.2e", instances, compared, skipped, worst)};
}

// ---------------------------------------------------------------------------
// 2. Gumbel-max choices follow the softmax

Outcome softmax_consistency() {
  const int K = 4;
  const Eigen::Index n = 10000;
  const boost::math::chi_squared chi(K - 1);
  int passed = 0;
  for (int draw = 0; draw < 40; ++draw) {
    Rng rng = make_rng(static_cast<std::uint64_t>(draw), "acceptance");
    Eigen::VectorXd u(K);
    for (auto& v : u) v = standard_normal(rng);
    const Eigen::MatrixXd utilities = u.transpose().replicate(n, 1);
    Rng noise = make_rng(static_cast<std::uint64_t>(draw), "noise");
    const auto y = sample_choices(utilities, Noise::gumbel, noise);
    const Eigen::VectorXd p = choice_probabilities(u);
    double stat = 0.0;
    for (int k = 0; k < K; ++k) {
      const double observed = static_cast<double>(std::count(y.begin(), y.end(), k));
      const double expected = p[k] * static_cast<double>(n);
      stat += (observed - expected) * (observed - expected) / expected;
    }
    passed += boost::math::cdf(boost::math::complement(chi, stat)) >= 0.01;
  }
  return {passed >= 38, fmt("%d of 40 draws pass at alpha 0.01", passed)};
}

// ---------------------------------------------------------------------------
// 3. Endpoints

Outcome endpoints() {
  double worst = 0.0;
  bool identical = true;
  for (Scenario s : {Scenario::mnl, Scenario::pt, Scenario::hd}) {
    const auto design = default_design(s);
    const auto data = generate_synthetic(design, 2000, Noise::gumbel, 31);
    const auto [train, test] = split(data, 0.75, 31);
    TrainConfig cfg;
    cfg.width = 32;
    cfg.sgd.iterations = 2000;
    const auto dcm = fit_pure_dcm(design.spec, train, cfg, 31);
    const auto tiny = train_sequential(design.spec, 1e-10, train, cfg, 31);
    worst = std::max(worst, (predict_probabilities(dcm, dcm.encode(test)) - predict_probabilities(tiny, tiny.encode(test)))
                                .cwiseAbs()
                                .maxCoeff());
    const auto dnn = fit_standalone_dnn(design.spec, train, cfg, 31);
    const auto full = train_sequential(design.spec, 1.0, train, cfg, 31);
    identical = identical && predict_probabilities(dnn, dnn.encode(test)) == predict_probabilities(full, full.encode(test));
  }
  return {worst < 1e-6 && identical,
          fmt("max |P(1e-10) - P(dcm)| = %.2e, delta=1 identical to network: %s", worst, identical ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 4. Concave accuracy curve on lotteries with a missing interaction

TrainConfig sweep_config() {
  TrainConfig cfg;
  cfg.width = 32;
  cfg.sgd.learning_rate = 0.05;
  return cfg;
}

Outcome concave_sweep() {
  auto design = default_design(Scenario::pt);
  design.nonlinear_strength = 3.0;
  int hits = 0;
  std::string margins;
  for (int run = 0; run < 10; ++run) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(run);
    const auto data = generate_synthetic(design, 4000, Noise::gumbel, seed);
    const auto [train, test] = split(data, 0.75, seed);
    const auto r = sweep(design.spec, DeltaGrid::reduced(), train, test, sweep_config(), Trainer::sequential, seed,
                         workers());
    double lo = 0.0, hi = 0.0, inner = 0.0;
    for (const auto& row : r.rows) {
      if (!row.ok) throw NumericalError("sweep row failed: " + row.error);
      if (&row == &r.rows.front()) {
        lo = row.accuracy;
      } else if (&row == &r.rows.back()) {
        hi = row.accuracy;
      } else {
        inner = std::max(inner, row.accuracy);
      }
    }
    const double margin = inner - std::max(lo, hi);
    hits += margin >= 0.01 - 1e-12;
    margins += fmt("%s%+.1f", margins.empty() ? "" : " ", 100.0 * margin);
  }
  return {hits >= 8, fmt("%d of 10 runs, margins (pp): %s", hits, margins.c_str())};
}

// ---------------------------------------------------------------------------
// 5. Complete theory puts the best delta near zero

Outcome complete_theory() {
  const auto design = default_design(Scenario::mnl);
  int hits = 0;
  std::string best;
  for (int run = 0; run < 10; ++run) {
    const std::uint64_t seed = 200 + static_cast<std::uint64_t>(run);
    const auto data = generate_synthetic(design, 4000, Noise::gumbel, seed);
    const auto [train, test] = split(data, 0.75, seed);
    const auto r = sweep(design.spec, DeltaGrid::standard(), train, test, sweep_config(), Trainer::sequential, seed,
                         workers());
    const double d = r.best_accuracy_delta.value_or(1.0);
    hits += d <= 0.05;
    best += fmt("%s%g", best.empty() ? "" : " ", d);
  }
  return {hits >= 8, fmt("%d of 10 runs, best deltas: %s", hits, best.c_str())};
}

// ---------------------------------------------------------------------------
// 6. Elasticities

Outcome elasticities() {
  // Binary logit with v0 = c + beta * x, v1 = 0 and raw = standardized inputs.
  DatasetSchema schema;
  schema.n_alternatives = 2;
  schema.alt_attributes = {{0, "x"}};
  Rng rng = make_rng(6, "acceptance");
  Eigen::MatrixXd x(300, 1);
  std::vector<int> y(300);
  for (Eigen::Index i = 0; i < 300; ++i) {
    x(i, 0) = 3.0 * standard_normal(rng);
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
  }
  const ChoiceDataset binary(schema, x, Eigen::MatrixXd(300, 0), y);
  TbResNetModel logit = initial_model(DcmSpec::mnl_for(schema), 0.0, binary, TrainConfig{}, 6);
  MnlParams p = unpack_mnl(logit.layout, Eigen::VectorXd::Zero(logit.layout.n_params()));
  p.constants[0] = -0.3;
  p.attribute_coefs[0][0] = 0.7;
  logit.dcm_params = pack(logit.layout, p);
  logit.stats = StandardizationStats::identity(1, 0);
  double closed = 0.0;
  for (Eigen::Index i = 0; i < 300; ++i) {
    const double xi = x(i, 0);
    closed += 0.7 * xi * (1.0 - 1.0 / (1.0 + std::exp(-(-0.3 + 0.7 * xi))));
  }
  const double closed_err = std::abs(elasticity(logit, binary, 0, "alt0__x").sum - closed);

  // Every model type against finite differences of the probabilities.
  double worst = 0.0;
  long compared = 0;
  for (Scenario s : {Scenario::mnl, Scenario::pt, Scenario::hd}) {
    const auto design = default_design(s);
    const auto data = generate_synthetic(design, 12, Noise::gumbel, 60);
    for (double delta : {0.0, 0.5, 1.0}) {
      TrainConfig cfg;
      cfg.width = 8;
      TbResNetModel m = initial_model(design.spec, delta, data, cfg, 60);
      if (delta < 1.0) m.dcm_params = design.true_params;
      for (auto& b : m.mlp.biases) b.setConstant(0.05);
      for (Eigen::Index c = 0; c < m.schema.n_x(); ++c) {
        for (int k = 0; k < m.schema.n_alternatives; ++k) {
          const Eigen::VectorXd dp = probability_derivatives(m, data, k, c, true);
          for (Eigen::Index i = 0; i < data.size(); ++i) {
            const double x0 = data.x()(i, c);
            const double step = 1e-6 * std::max(1.0, std::abs(x0));
            auto prob = [&](double v) {
              Eigen::MatrixXd xx = data.x();
              xx(i, c) = v;
              return predict_probabilities(m, m.encode(data.with_attributes(xx, data.z())))(i, k);
            };
            const double mid = prob(x0);
            const double fwd = (prob(x0 + step) - mid) / step;
            const double bwd = (mid - prob(x0 - step)) / step;
            if (std::abs(fwd - bwd) > 1e-3 * std::max({std::abs(fwd), std::abs(bwd), 1e-6})) continue;  // kink
            const double numeric = 0.5 * (fwd + bwd);
            worst = std::max(worst, std::abs(dp[i] - numeric) / std::max({std::abs(dp[i]), std::abs(numeric), 1e-6}));
            ++compared;
          }
        }
      }
    }
  }

  // Cross-elasticities of a multinomial logit are identical across the other alternatives.
  const auto design = default_design(Scenario::mnl);
  const auto data = generate_synthetic(design, 3000, Noise::gumbel, 61);
  const auto mnl = fit_pure_dcm(design.spec, data, TrainConfig{}, 61);
  const auto table = elasticity_table(mnl, data);
  const int K = mnl.schema.n_alternatives;
  bool iia = true;
  bool signs = true;
  for (Eigen::Index c = 0; c < mnl.schema.n_x(); ++c) {
    const int own = mnl.schema.alt_attributes[static_cast<std::size_t>(c)].alternative;
    const Elasticity* row = &table[static_cast<std::size_t>(c * K)];
    const double cross = row[own == 0 ? 1 : 0].mean;
    for (int k = 0; k < K; ++k) {
      if (k != own) iia = iia && std::abs(row[k].mean - cross) <= 1e-10 * std::max(1.0, std::abs(cross));
    }
    signs = signs && row[own].mean * cross <= 0.0;
  }
  const bool pass = closed_err < 1e-8 && worst < 1e-4 && compared > 500 && iia && signs;
  return {pass, fmt("closed-form err %.1e, %ld derivatives max rel err %.1e, IIA %s, opposite signs %s", closed_err,
                    compared, worst, iia ? "yes" : "no", signs ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 7. Metrics against brute force

Outcome metric_oracles() {
  int exact = 0;
  for (int t = 0; t < 50; ++t) {
    Rng rng = make_rng(static_cast<std::uint64_t>(t), "acceptance");
    const int K = 2 + static_cast<int>(uniform_index(rng, 4));
    const auto n = static_cast<Eigen::Index>(3 + uniform_index(rng, 30));
    Eigen::MatrixXd p(n, K);
    std::vector<int> truth(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k) p(i, k) = uniform_open01(rng);
      p.row(i) /= p.row(i).sum();
      truth[static_cast<std::size_t>(i)] = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(K)));
    }
    std::vector<int> pred(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> cm(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(K), 0));
    int correct = 0;
    double ce = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      for (int k = 1; k < K; ++k) {
        if (p(i, k) > p(i, best)) best = k;
      }
      const auto row = static_cast<std::size_t>(i);
      pred[row] = best;
      ++cm[static_cast<std::size_t>(truth[row])][static_cast<std::size_t>(best)];
      correct += best == truth[row];
      ce -= std::log(p(i, truth[row]));
    }
    ce /= static_cast<double>(n);
    double f1 = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      double col = 0.0, row = 0.0;
      for (int j = 0; j < K; ++j) {
        col += cm[static_cast<std::size_t>(j)][kk];
        row += cm[kk][static_cast<std::size_t>(j)];
      }
      const double tp = cm[kk][kk];
      if (tp == 0.0) continue;
      const double prec = tp / col;
      const double rec = tp / row;
      f1 += (row / static_cast<double>(n)) * 2.0 * prec * rec / (prec + rec);
    }
    const auto r = evaluate(p, truth);
    bool same = r.accuracy == correct / static_cast<double>(n) && r.cross_entropy == ce && r.f1 == f1;
    for (int a = 0; a < K; ++a) {
      for (int b = 0; b < K; ++b) same = same && r.confusion(a, b) == cm[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
    exact += same;
  }
  double uniform_err = 0.0;
  for (int K = 2; K <= 6; ++K) {
    std::vector<int> truth(7);
    for (int i = 0; i < 7; ++i) truth[static_cast<std::size_t>(i)] = i % K;
    const double ce = cross_entropy(Eigen::MatrixXd::Constant(7, K, 1.0 / K), truth);
    uniform_err = std::max(uniform_err, std::abs(ce - std::log(static_cast<double>(K))));
  }
  return {exact == 50 && uniform_err <= 1e-12,
          fmt("%d of 50 label sets identical, uniform ln K error %.1e", exact, uniform_err)};
}

// ---------------------------------------------------------------------------
// 8. Adversarial robustness of the theory model

Outcome robustness() {
  const auto design = default_design(Scenario::mnl);
  TrainConfig cfg;
  cfg.width = 32;
  int wins = 0;
  bool identities = true;
  bool gentle = true;
  std::string pairs;
  for (int run = 0; run < 10; ++run) {
    const std::uint64_t seed = 500 + static_cast<std::uint64_t>(run);
    const auto data = generate_synthetic(design, 4000, Noise::gumbel, seed);
    const auto [train, test] = split(data, 0.75, seed);
    const TbResNetModel models[] = {fit_pure_dcm(design.spec, train, cfg, seed),
                                    fit_standalone_dnn(design.spec, train, cfg, seed)};
    double fgsm_acc[2] = {0.0, 0.0};
    for (int which = 0; which < 2; ++which) {
      const auto& m = models[which];
      const auto clean = m.encode(test);
      identities = identities && fgsm(m, clean, test.choices(), 0.0).x == clean.x &&
                   tgsm(m, clean, 0.0).x == clean.x && gaussian_noise(clean, 0.0, seed).x == clean.x;
      const auto f = robustness_curve(m, test, Attack::fgsm, {0.0, 0.1}, seed);
      const auto g = robustness_curve(m, test, Attack::gaussian, {0.0, 0.1}, seed);
      const auto t = robustness_curve(m, test, Attack::tgsm, {0.0}, seed);
      identities = identities && f.rows[0].accuracy == g.rows[0].accuracy && t.rows[0].accuracy == f.rows[0].accuracy;
      gentle = gentle && (g.rows[0].accuracy - g.rows[1].accuracy) <= (f.rows[0].accuracy - f.rows[1].accuracy);
      fgsm_acc[which] = f.rows[1].accuracy;
    }
    wins += fgsm_acc[0] > fgsm_acc[1];
    pairs += fmt("%s%.3f/%.3f", pairs.empty() ? "" : " ", fgsm_acc[0], fgsm_acc[1]);
  }
  return {wins >= 8 && identities && gentle,
          fmt("DCM beats network under FGSM 0.1 in %d of 10 (dcm/dnn: %s); eps 0 identities %s; gaussian gentler %s",
              wins, pairs.c_str(), identities ? "yes" : "no", gentle ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 9. Rademacher complexity

Outcome rademacher() {
  const double zero = empirical_rademacher(Eigen::MatrixXd::Zero(1, 5), 1000, 9).value;
  double exact = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    const int plus = __builtin_popcount(static_cast<unsigned>(mask));
    exact += std::abs(2 * plus - 4) / 4.0 / 16.0;
  }
  Eigen::MatrixXd pair(2, 4);
  pair.row(0).setOnes();
  pair.row(1).setConstant(-1.0);
  const double est = empirical_rademacher(pair, 100000, 9).value;
  return {zero == 0.0 && std::abs(est - exact) <= 0.02 && exact == 0.375,
          fmt("zero class %g, {f,-f} estimate %.4f vs exact %.4f", zero, est, exact)};
}

// ---------------------------------------------------------------------------
// 10. Closed forms of the behavioral components

Outcome closed_forms() {
  DatasetSchema schema;
  schema.n_alternatives = 2;
  schema.alt_attributes = {{0, "reward"}, {0, "delay"}};
  DcmSpec spec;
  spec.scenario = Scenario::hd;
  spec.n_alternatives = 2;
  spec.terms = {{0, "reward", "delay"}};
  const auto layout = resolve(spec, schema);
  HdParams hp;
  hp.beta0 = 1.0;
  hp.r0 = std::numbers::ln2;
  hp.w_beta = hp.w_r = Eigen::VectorXd(0);
  const double hd = dcm_utility(layout, pack(layout, hp), Eigen::Vector2d(1.0, 1.0), Eigen::VectorXd(0))[0];
  const double errs[] = {std::abs(pt_weight(1.0, 0.7) - 1.0), std::abs(pt_weight(std::exp(-1.0), 1.0) - std::exp(-1.0)),
                         std::abs(pt_value(1.0, 0.5, 3.0) - 1.0), std::abs(pt_value(-1.0, 1.0, 2.0) + 2.0),
                         std::abs(hd - 0.5)};
  double worst = 0.0;
  for (double e : errs) worst = std::max(worst, e);
  return {worst <= 1e-12, fmt("max error %.1e over 5 identities", worst)};
}

// ---------------------------------------------------------------------------
// 11. Byte-identical CLI reruns

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "tbresnet_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const Json net = {{"depth", 3}, {"width", 8}, {"iterations", 300}, {"batch_size", 50}};
  const Json surface = {{"attr_a", {{"attribute", "alt1__reward1"}, {"resolution", 10}}},
                        {"attr_b", {{"attribute", "alt1__prob1"}, {"lo", 0.05}, {"hi", 0.95}, {"resolution", 10}}}};
  Json base = {{"scenario", "pt"}, {"generator", {{"n", 600}, {"nonlinear_strength", 1.0}}}, {"dnn", net},
               {"delta", 0.3},     {"delta_grid", "reduced"},                                   {"workers", 2}};
  auto run = [&](const std::string& cmd, const Json& cfg, const std::string& out) {
    const fs::path c = root / (out + ".json");
    std::ofstream(c) << cfg.dump(2);
    const std::string line = "\"" + cli + "\" " + cmd + " --config \"" + c.string() + "\" --seed 5 --out \"" +
                             (root / out).string() + "\" > \"" + (root / (out + ".log")).string() + "\" 2>&1";
    return std::system(line.c_str());
  };
  int identical = 0;
  std::string failed;
  const char* commands[] = {"generate", "fit", "sweep", "eval", "perturb", "elasticity", "surface"};
  for (const char* cmd : commands) {
    Json cfg = base;
    if (std::string(cmd) != "generate" && std::string(cmd) != "fit" && std::string(cmd) != "sweep") {
      cfg["model"] = (root / "fit_a" / "model.json").string();
      cfg["surface"] = surface;
      cfg["perturb"] = {{"epsilons", {0.0, 0.05, 0.1}}};
    }
    const std::string a = std::string(cmd) + "_a";
    const std::string b = std::string(cmd) + "_b";
    if (run(cmd, cfg, a) != 0 || run(cmd, cfg, b) != 0) {
      failed += fmt(" %s(exit)", cmd);
      continue;
    }
    bool same = true;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root / a)) {
      const fs::path other = root / b / entry.path().filename();
      same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
      ++files;
    }
    if (same && files > 2) {
      ++identical;
    } else {
      failed += fmt(" %s", cmd);
    }
  }
  fs::remove_all(root);
  return {identical == 7, fmt("%d of 7 commands byte-identical%s%s", identical, failed.empty() ? "" : "; differing:",
                              failed.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::string cli = argc > 1 ? argv[1] : "tbresnet";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradient_check},
      {"softmax/RUM consistency", softmax_consistency},
      {"endpoint equivalence", endpoints},
      {"concave sweep shape", concave_sweep},
      {"theory-completeness diagnostic", complete_theory},
      {"elasticity oracle", elasticities},
      {"metric oracles", metric_oracles},
      {"robustness reproduction", robustness},
      {"Rademacher diagnostic", rademacher},
      {"PT/HD closed forms", closed_forms},
      {"determinism", [&] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
  }
  return failures == 0 ? 0 : 1;
}
