#include <gtest/gtest.h>

#include <tbresnet/error.hpp>
#include <tbresnet/metrics.hpp>
#include <tbresnet/robustness.hpp>

#include "support.hpp"

using namespace tbresnet;

namespace {

ChoiceDataset two_attribute_data(Eigen::Index n) {
  DatasetSchema s;
  s.n_alternatives = 2;
  s.alt_attributes = {{0, "a"}, {0, "b"}};
  s.indiv_attributes = {"age"};
  Rng rng = make_rng(2, "test");
  Eigen::MatrixXd x(n, 2), z(n, 1);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = standard_normal(rng);
    x(i, 1) = standard_normal(rng);
    z(i, 0) = standard_normal(rng);
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
  }
  return ChoiceDataset(s, x, z, y);
}

TbResNetModel linear_model(const ChoiceDataset& d, double delta = 0.0) {
  TbResNetModel m = initial_model(DcmSpec::mnl_for(d.schema()), delta, d, tbtest::tiny_config(), 1);
  MnlParams p = unpack_mnl(m.layout, Eigen::VectorXd::Zero(m.layout.n_params()));
  p.attribute_coefs[0] = Eigen::Vector2d(2.0, -3.0);
  p.covariate_coefs(0, 0) = 0.5;
  m.dcm_params = pack(m.layout, p);
  return m;
}

}  // namespace

TEST(Fgsm, ZeroEpsilonIsIdentity) {
  const auto d = two_attribute_data(20);
  const auto m = linear_model(d, 0.5);
  const auto in = m.encode(d);
  const auto adv = fgsm(m, in, d.choices(), 0.0);
  EXPECT_EQ(adv.x, in.x);
  EXPECT_EQ(adv.z, in.z);
  EXPECT_EQ(tgsm(m, in, 0.0).x, in.x);
  EXPECT_EQ(gaussian_noise(in, 0.0, 4).x, in.x);
}

TEST(Fgsm, SignStep) {
  const auto d = two_attribute_data(4);
  const auto m = linear_model(d);
  const auto in = m.encode(d);
  // With chosen alternative 1, d(-ln P_1)/dx = P_0 * beta, whose sign is (+, -).
  const std::vector<int> chosen(4, 1);
  const auto adv = fgsm(m, in, chosen, 0.1);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(adv.x(i, 0), in.x(i, 0) + 0.1);
    EXPECT_DOUBLE_EQ(adv.x(i, 1), in.x(i, 1) - 0.1);
  }
}

TEST(Fgsm, SignsAgreeWithFiniteDifferences) {
  const auto data = tbtest::sample(Scenario::pt, 30, 3);
  TbResNetModel m = initial_model(default_design(Scenario::pt).spec, 0.5, data, tbtest::tiny_config(), 3);
  m.dcm_params = default_design(Scenario::pt).true_params;
  StandardizedInputs in = m.encode(data);
  const auto g = input_gradients(m, in, data.choices());
  int agree = 0, total = 0;
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    for (Eigen::Index c = 0; c < in.x.cols(); ++c) {
      if (std::abs(g.x(i, c)) <= 1e-6) continue;
      const double keep = in.x(i, c);
      auto row_loss = [&] {
        return -std::log(predict_probabilities(m, in)(i, data.choices()[static_cast<std::size_t>(i)]));
      };
      in.x(i, c) = keep + 1e-6;
      const double up = row_loss();
      in.x(i, c) = keep - 1e-6;
      const double down = row_loss();
      in.x(i, c) = keep;
      agree += (up - down > 0) == (g.x(i, c) > 0);
      ++total;
    }
  }
  ASSERT_GT(total, 0);
  EXPECT_GE(agree, 0.99 * total);
}

TEST(Fgsm, CovariatesCanBeFrozen) {
  const auto d = two_attribute_data(10);
  const auto m = linear_model(d);
  const auto in = m.encode(d);
  PerturbationOptions o;
  o.perturb_covariates = false;
  EXPECT_EQ(fgsm(m, in, d.choices(), 0.2, o).z, in.z);
  EXPECT_NE(fgsm(m, in, d.choices(), 0.2).z, in.z);
}

TEST(Tgsm, BinaryLeastLikelyIsTheOtherClass) {
  const auto d = two_attribute_data(30);
  const auto m = linear_model(d);
  const auto in = m.encode(d);
  const auto predicted = predicted_choices(predict_probabilities(m, in));
  const auto targets = tgsm_targets(m, in, TargetRule{});
  for (std::size_t i = 0; i < targets.size(); ++i) EXPECT_EQ(targets[i], 1 - predicted[i]);
  const auto fixed = tgsm_targets(m, in, TargetRule{false, 1});
  for (int t : fixed) EXPECT_EQ(t, 1);
}

TEST(Tgsm, SmallStepLowersTargetLoss) {
  const auto data = tbtest::sample(Scenario::hd, 40, 5);
  TbResNetModel m = initial_model(default_design(Scenario::hd).spec, 0.0, data, tbtest::tiny_config(), 5);
  m.dcm_params = default_design(Scenario::hd).true_params;
  const auto in = m.encode(data);
  const auto targets = tgsm_targets(m, in, TargetRule{});
  const auto adv = tgsm(m, in, 1e-4);
  EXPECT_LE(nll(m, adv, targets), nll(m, in, targets));
}

TEST(Gaussian, DirectionMoments) {
  StandardizedInputs in;
  in.x = Eigen::MatrixXd::Zero(10000, 6);
  in.z = Eigen::MatrixXd::Zero(10000, 4);
  const auto dir = gaussian_directions(in, 17);
  const Eigen::Map<const Eigen::VectorXd> v(dir.x.data(), dir.x.size());
  Eigen::VectorXd all(dir.x.size() + dir.z.size());
  all << v, Eigen::Map<const Eigen::VectorXd>(dir.z.data(), dir.z.size());
  const double mean = all.mean();
  const double sd = std::sqrt((all.array() - mean).square().sum() / static_cast<double>(all.size() - 1));
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(sd, 1.0, 0.02);
  EXPECT_EQ(gaussian_directions(in, 17).x, dir.x);
  EXPECT_EQ(gaussian_noise(in, 0.3, 17).x, 0.3 * dir.x);
}

TEST(Curve, ZeroGridReproducesCleanMetrics) {
  const auto data = tbtest::sample(Scenario::hd, 200, 9);
  const auto m = train_sequential(default_design(Scenario::hd).spec, 0.5, data, tbtest::tiny_config(100), 9);
  const auto clean = evaluate(m, data);
  for (Attack a : {Attack::fgsm, Attack::tgsm, Attack::gaussian}) {
    const auto r = robustness_curve(m, data, a, {0.0}, 9);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].accuracy, clean.accuracy);
    EXPECT_EQ(r.rows[0].cross_entropy, clean.cross_entropy);
    EXPECT_EQ(r.rows[0].f1, clean.f1);
  }
}

TEST(Curve, GridMustContainZero) {
  const auto d = two_attribute_data(10);
  const auto m = linear_model(d);
  EXPECT_THROW(robustness_curve(m, d, Attack::fgsm, {0.1, 0.2}, 1), ConfigError);
  EXPECT_THROW(robustness_curve(m, d, Attack::fgsm, {0.0, 0.2, 0.1}, 1), ConfigError);
}
