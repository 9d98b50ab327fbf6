#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include <tbresnet/dataset.hpp>
#include <tbresnet/error.hpp>

#include "support.hpp"

using namespace tbresnet;

namespace {

ChoiceDataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

ChoiceDataset counting_dataset(Eigen::Index n) {
  DatasetSchema s = tbtest::binary_schema();
  Eigen::MatrixXd x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = static_cast<double>(i);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(i % 2);
  return ChoiceDataset(s, x, Eigen::MatrixXd(n, 0), y);
}

}  // namespace

TEST(Csv, TwoRowBinaryFile) {
  const auto d = parse("choice,alt0__cost,alt1__cost\n0,1.5,2\n1,3,4\n");
  EXPECT_EQ(d.size(), 2);
  EXPECT_EQ(d.n_alternatives(), 2);
  EXPECT_DOUBLE_EQ(d.x()(1, 0), 3.0);
  EXPECT_EQ(d.choices()[1], 1);
}

TEST(Csv, ChoiceOutOfRangeIsRejected) {
  try {
    parse("choice,alt0__cost,alt1__cost\n5,1,2\n");
    FAIL() << "expected a DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("choice id out of range"), std::string::npos);
  }
}

TEST(Csv, UnknownAndMalformedInput) {
  EXPECT_THROW(parse("choice,alt0__cost,weird\n0,1,2\n"), DataError);
  EXPECT_THROW(parse("choice,alt0__cost,alt1__cost\n0,abc,2\n"), DataError);
  EXPECT_THROW(parse("choice,alt0__cost,alt1__cost\n0,1\n"), DataError);
  EXPECT_THROW(parse(""), DataError);
}

TEST(Csv, SurveyLayoutFixture) {
  const auto d = load_csv(std::string(TBRESNET_TEST_DATA) + "/sg_fixture.csv");
  EXPECT_EQ(d.n_alternatives(), 5);
  EXPECT_EQ(d.schema().n_z(), 8);
  EXPECT_EQ(d.schema().n_x(), 14);
  EXPECT_EQ(d.size(), 12);
}

TEST(Csv, WriteReadRoundTrip) {
  const auto d = tbtest::sample(Scenario::pt, 20, 4);
  std::ostringstream out;
  write_csv(d, out);
  std::istringstream in(out.str());
  const auto back = read_csv(in);
  EXPECT_TRUE(back.schema() == d.schema());
  EXPECT_EQ(back.x(), d.x());
  EXPECT_EQ(back.z(), d.z());
  EXPECT_EQ(back.choices(), d.choices());
}

TEST(Split, HalvesAreDeterministic) {
  const auto d = counting_dataset(10);
  const auto [a, b] = split(d, 0.5, 7);
  const auto [c, e] = split(d, 0.5, 7);
  EXPECT_EQ(a.size(), 5);
  EXPECT_EQ(b.size(), 5);
  EXPECT_EQ(a.x(), c.x());
  EXPECT_EQ(b.x(), e.x());
  // Together the halves cover every row once.
  std::vector<double> all;
  for (Eigen::Index i = 0; i < 5; ++i) {
    all.push_back(a.x()(i, 0));
    all.push_back(b.x()(i, 0));
  }
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
}

TEST(Split, SurveySampleSizes) {
  const auto d = counting_dataset(6698);
  const auto [train, test] = split(d, 5050.0 / 6698.0, 1);
  EXPECT_EQ(train.size(), 5050);
  EXPECT_EQ(test.size(), 1648);
}

TEST(Split, DegenerateFractions) {
  const auto d = counting_dataset(10);
  EXPECT_THROW(split(d, 1.0, 0), ConfigError);
  EXPECT_THROW(split(d, 0.0, 0), ConfigError);
}

TEST(Standardize, SimpleColumn) {
  DatasetSchema s = tbtest::binary_schema();
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  const ChoiceDataset d(s, x, Eigen::MatrixXd(3, 0), {0, 1, 0});
  const auto st = StandardizationStats::fit(d);
  const auto z = st.apply(d);
  EXPECT_NEAR(z.x()(0, 0), -1.2247, 1e-4);
  EXPECT_NEAR(z.x()(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(z.x()(2, 0), 1.2247, 1e-4);
}

TEST(Standardize, ConstantColumnKeepsUnitStd) {
  DatasetSchema s = tbtest::binary_schema();
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(3, 1, 4.0);
  const ChoiceDataset d(s, x, Eigen::MatrixXd(3, 0), {0, 1, 0});
  const auto st = StandardizationStats::fit(d);
  EXPECT_EQ(st.x_std[0], 1.0);
  EXPECT_TRUE(st.apply(d).x().isZero());
}

TEST(Standardize, StoredStatsReproduceTrain) {
  const auto d = tbtest::sample(Scenario::hd, 50, 2);
  const auto [train, test] = split(d, 0.6, 2);
  const auto s = standardize(train, test);
  EXPECT_EQ(s.stats.apply(train).x(), s.train.x());
  EXPECT_EQ(s.stats.apply(train).z(), s.train.z());
  const auto back = s.stats.invert(s.train);
  EXPECT_TRUE(back.x().isApprox(train.x(), 1e-12));
}
