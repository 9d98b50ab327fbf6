#include <gtest/gtest.h>

#include <filesystem>

#include <tbresnet/error.hpp>
#include <tbresnet/serialization.hpp>

#include "support.hpp"

using namespace tbresnet;

TEST(Serialization, ModelRoundTripPreservesPredictions) {
  const auto data = tbtest::sample(Scenario::pt, 120, 2);
  const auto m = train_sequential(default_design(Scenario::pt).spec, 0.3, data, tbtest::tiny_config(30), 2);
  const auto path = std::filesystem::temp_directory_path() / "tbresnet_roundtrip_model.json";
  save_model(m, path);
  const auto back = load_model(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.delta, m.delta);
  EXPECT_EQ(back.dcm_params, m.dcm_params);
  EXPECT_EQ(predict_probabilities(back, back.encode(data)), predict_probabilities(m, m.encode(data)));
  EXPECT_EQ(to_json(back).dump(), to_json(m).dump());
}

TEST(Serialization, SpecRoundTrip) {
  for (Scenario s : {Scenario::mnl, Scenario::pt, Scenario::hd}) {
    const auto spec = default_design(s).spec;
    EXPECT_TRUE(dcm_spec_from_json(to_json(spec)) == spec);
  }
}

TEST(Serialization, UnknownKeysAreRejected) {
  Json j = to_json(default_design(Scenario::hd).spec);
  j["surprise"] = 1;
  EXPECT_THROW(dcm_spec_from_json(j), ConfigError);
  EXPECT_THROW(reject_unknown_keys(Json{{"a", 1}, {"b", 2}}, {"a"}, "test"), ConfigError);
  EXPECT_NO_THROW(reject_unknown_keys(Json{{"a", 1}}, {"a", "b"}, "test"));
}

TEST(Serialization, ModelFormatIsChecked) {
  const auto data = tbtest::sample(Scenario::hd, 50, 1);
  const auto m = fit_pure_dcm(default_design(Scenario::hd).spec, data, tbtest::tiny_config(), 1);
  Json j = to_json(m);
  j["format"] = "something-else";
  EXPECT_THROW(model_from_json(j), ConfigError);
}
