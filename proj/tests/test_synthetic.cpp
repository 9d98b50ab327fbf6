#include <gtest/gtest.h>

#include <sstream>

#include <tbresnet/error.hpp>
#include <tbresnet/synthetic.hpp>

#include "support.hpp"

using namespace tbresnet;

TEST(Synthetic, LotteryProbabilityMoments) {
  const auto d = tbtest::sample(Scenario::pt, 40000, 11);
  const auto col = d.x().col(*d.schema().x_column("alt0__prob1"));
  const double mean = col.mean();
  const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(col.size() - 1));
  EXPECT_NEAR(mean, 0.638, 0.005);
  EXPECT_NEAR(sd, 0.263, 0.005);
  EXPECT_GT(col.minCoeff(), 0.0);
  EXPECT_LT(col.maxCoeff(), 1.0);
}

TEST(Synthetic, ComplementProbabilitiesSumToOne) {
  const auto d = tbtest::sample(Scenario::pt, 200, 3);
  const auto& s = d.schema();
  const auto p1 = d.x().col(*s.x_column("alt1__prob1"));
  const auto p2 = d.x().col(*s.x_column("alt1__prob2"));
  EXPECT_TRUE((p1 + p2).isOnes(1e-12));
}

TEST(Synthetic, DominantAlternativeWithoutNoise) {
  Eigen::MatrixXd u(500, 3);
  Rng rng = make_rng(5, "test");
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    u(i, 0) = standard_normal(rng);
    u(i, 2) = standard_normal(rng);
    u(i, 1) = std::max(u(i, 0), u(i, 2)) + 0.01;
  }
  Rng draw = make_rng(1, "noise");
  for (int c : sample_choices(u, Noise::none, draw)) EXPECT_EQ(c, 1);
}

TEST(Synthetic, EqualUtilitiesSplitEvenly) {
  const Eigen::MatrixXd u = Eigen::MatrixXd::Zero(10000, 2);
  Rng rng = make_rng(9, "noise");
  const auto y = sample_choices(u, Noise::gumbel, rng);
  const double share = std::count(y.begin(), y.end(), 0) / 10000.0;
  EXPECT_NEAR(share, 0.5, 0.02);
}

TEST(Synthetic, HdSampleSizeAndDeterminism) {
  const auto a = tbtest::sample(Scenario::hd, 5340, 21);
  const auto b = tbtest::sample(Scenario::hd, 5340, 21);
  EXPECT_EQ(a.size(), 5340);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Synthetic, ImmediateOptionHasNoDelay) {
  const auto d = tbtest::sample(Scenario::hd, 100, 2);
  EXPECT_TRUE(d.x().col(*d.schema().x_column("alt0__delay")).isZero());
  EXPECT_GT(d.x().col(*d.schema().x_column("alt1__delay")).minCoeff(), 0.0);
}

TEST(Synthetic, RejectsEmptySample) {
  EXPECT_THROW(generate_synthetic(default_design(Scenario::mnl), 0, Noise::gumbel, 1), ConfigError);
}

TEST(Synthetic, DefaultDesignsValidate) {
  for (Scenario s : {Scenario::mnl, Scenario::pt, Scenario::hd}) {
    const auto d = default_design(s);
    EXPECT_NO_THROW(d.validate());
    EXPECT_EQ(d.true_params.size(), resolve(d.spec, d.schema).n_params());
  }
}

TEST(Synthetic, InteractionShiftsOnlyFirstAlternative) {
  auto d = default_design(Scenario::pt);
  const auto data = generate_synthetic(d, 50, Noise::none, 4);
  const Eigen::MatrixXd base = true_utilities(d, data.x(), data.z());
  d.nonlinear_strength = 2.0;
  const Eigen::MatrixXd shifted = true_utilities(d, data.x(), data.z());
  EXPECT_EQ(base.col(1), shifted.col(1));
  EXPECT_FALSE(base.col(0).isApprox(shifted.col(0)));
}
