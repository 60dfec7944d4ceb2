// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "saf/forest.hpp"

namespace saf {
namespace {

namespace fs = std::filesystem;

/// Three bands on feature 0; the other features are noise.
Dataset banded(std::size_t n, std::uint64_t seed) {
  Dataset ds;
  ds.kernel = "synthetic";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3, 3);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    for (int f = 0; f < 9; ++f) s.features.push_back(u(rng));
    const double x = s.features[0];
    s.label = x < -1 ? Label::Increase : (x > 1 ? Label::Decrease : Label::NoChange);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

TrainConfig quick() {
  TrainConfig c;
  c.trees = 15;
  return c;
}

TEST(Forest, LearnsSeparableBands) {
  const auto [f, m] = train_forest(banded(1500, 1), quick());
  EXPECT_EQ(f.trees.size(), 15u);
  EXPECT_EQ(m.test_samples, 450u);
  EXPECT_GT(m.f1.macro, 0.97);
  EXPECT_EQ(predict(f, std::vector<double>{-2.5, 0, 0, 0, 0, 0, 0, 0, 0}), Label::Increase);
  EXPECT_EQ(predict(f, std::vector<double>{2.5, 0, 0, 0, 0, 0, 0, 0, 0}), Label::Decrease);
  EXPECT_EQ(predict(f, std::vector<double>{0, 0, 0, 0, 0, 0, 0, 0, 0}), Label::NoChange);
}

TEST(Forest, DeterministicForSeed) {
  const Dataset ds = banded(600, 2);
  EXPECT_EQ(train_forest(ds, quick()).first, train_forest(ds, quick()).first);
  TrainConfig other = quick();
  other.seed = 7;
  EXPECT_FALSE(train_forest(ds, quick()).first == train_forest(ds, other).first);
}

TEST(Forest, ThresholdsAreFiniteAndChildrenForward) {
  const auto f = train_forest(banded(600, 3), quick()).first;
  for (const auto& t : f.trees)
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.feature[i] < 0) {
        const std::uint32_t* c = &t.counts[3 * i];
        EXPECT_GT(c[0] + c[1] + c[2], 0u);
        continue;
      }
      EXPECT_TRUE(std::isfinite(t.threshold[i]));
      EXPECT_GT(t.left[i], static_cast<std::int32_t>(i));
      EXPECT_GT(t.right[i], static_cast<std::int32_t>(i));
    }
}

TEST(Forest, SingleClassIsRejected) {
  Dataset ds = banded(100, 4);
  for (auto& s : ds.samples) s.label = Label::Increase;
  EXPECT_THROW(train_forest(ds, quick()), TrainingError);
  EXPECT_THROW(fit_forest({}, 9, quick()), TrainingError);
}

TEST(Forest, PredictChecksFeatureLength) {
  const auto f = train_forest(banded(300, 5), quick()).first;
  EXPECT_THROW(predict(f, std::vector<double>{1, 2}), UsageError);
}

TEST(Forest, VoteTieOrder) {
  const std::uint32_t all[3] = {4, 4, 4};
  EXPECT_EQ(DecisionTree::vote(all), Label::NoChange);
  const std::uint32_t inc_dec[3] = {4, 4, 1};
  EXPECT_EQ(DecisionTree::vote(inc_dec), Label::Decrease);
  const std::uint32_t inc[3] = {5, 4, 1};
  EXPECT_EQ(DecisionTree::vote(inc), Label::Increase);
}

TEST(F1, PerClassAndMacro) {
  const std::vector<Label> actual{Label::Increase, Label::Increase, Label::Decrease, Label::NoChange};
  const std::vector<Label> predicted{Label::Increase, Label::Decrease, Label::Decrease, Label::NoChange};
  const F1Report r = f1_scores(actual, predicted);
  EXPECT_DOUBLE_EQ(r.per_class[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.per_class[2], 1.0);
  EXPECT_DOUBLE_EQ(r.macro, (2.0 / 3.0 + 2.0 / 3.0 + 1.0) / 3.0);
}

TEST(F1, AbsentClassScoresZero) {
  const std::vector<Label> labels{Label::Increase, Label::Decrease};
  const F1Report r = f1_scores(labels, labels);
  EXPECT_EQ(r.per_class[2], 0.0);
  EXPECT_DOUBLE_EQ(r.macro, 2.0 / 3.0);
}

TEST(Forest, TrainsOnGeneratedData) {
  GenerationConfig g;
  g.target_size = 3000;
  const Dataset ds = build_dataset("log", g);
  const auto [f, m] = train_forest(ds, quick());
  EXPECT_EQ(f.kernel, "log");
  EXPECT_EQ(f.shape_class(), "3x3");
  EXPECT_EQ(f.scaling, ds.scaling);
  EXPECT_GT(m.f1.macro, 0.8);
}

class ModelFile : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("saf_forest_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(ModelFile, RoundTripPredictsIdentically) {
  Dataset ds = banded(800, 6);
  ds.params = {{"alpha", 0.5}};
  ds.scaling = Scaling{1, 2, 0};
  const auto f = train_forest(ds, quick()).first;
  const std::string p = path(model_file_name("synthetic", f.shape));
  model_save(f, p);
  const Forest g = model_load(p);
  EXPECT_EQ(g, f);
  const Dataset probe = banded(500, 99);
  for (const auto& s : probe.samples) EXPECT_EQ(predict(g, s.features), predict(f, s.features));
}

TEST_F(ModelFile, Errors) {
  EXPECT_THROW(model_load(path("absent.json")), IoError);
  std::ofstream(path("bad.json")) << "{not json";
  EXPECT_THROW(model_load(path("bad.json")), ParseError);
  std::ofstream(path("v.json")) << R"({"format_version": 3})";
  EXPECT_THROW(model_load(path("v.json")), FormatVersionError);

  auto j = forest_to_json(train_forest(banded(300, 7), quick()).first);
  j["trees"][0]["left"][0] = 0;
  std::ofstream(path("cycle.json")) << j.dump();
  EXPECT_THROW(model_load(path("cycle.json")), ParseError);
}

TEST(ModelName, Convention) { EXPECT_EQ(model_file_name("exp", {3, 3}), "exp_3x3.json"); }

}  // namespace
}  // namespace saf
