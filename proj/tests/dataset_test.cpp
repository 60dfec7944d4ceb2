// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "saf/dataset.hpp"

namespace saf {
namespace {

namespace fs = std::filesystem;

Trajectory scalar_trajectory(Direction d, std::initializer_list<std::pair<double, bool>> pts) {
  Trajectory t;
  t.direction = d;
  for (auto [v, failed] : pts) t.points.push_back({{Tensor::vector({v})}, failed});
  return t;
}

TEST(DeriveLabels, FailToPassUpward) {
  // 10 fails, 30 passes: moving down from 30 leads back to failure.
  const auto labels = derive_labels(scalar_trajectory(Direction::Up, {{10, true}, {30, false}}));
  const std::vector<DerivedLabel> want{{0, Label::NoChange}, {1, Label::Decrease}};
  EXPECT_EQ(labels, want);
}

TEST(DeriveLabels, PassToFailUpward) {
  const auto labels = derive_labels(scalar_trajectory(Direction::Up, {{-1, false}, {5, true}}));
  const std::vector<DerivedLabel> want{{0, Label::Increase}, {1, Label::NoChange}};
  EXPECT_EQ(labels, want);
}

TEST(DeriveLabels, SeveralPassingPointsBeforeFlip) {
  const auto labels =
      derive_labels(scalar_trajectory(Direction::Up, {{10, false}, {20, false}, {30, false}, {40, true}}));
  const std::vector<DerivedLabel> want{
      {0, Label::Increase}, {1, Label::Increase}, {2, Label::Increase}, {3, Label::NoChange}};
  EXPECT_EQ(labels, want);
}

TEST(DeriveLabels, DownwardMirrorsUpward) {
  const auto labels = derive_labels(scalar_trajectory(Direction::Down, {{5, false}, {-1, true}}));
  const std::vector<DerivedLabel> want{{0, Label::Decrease}, {1, Label::NoChange}};
  EXPECT_EQ(labels, want);
  const auto back = derive_labels(scalar_trajectory(Direction::Down, {{-1, true}, {5, false}}));
  EXPECT_EQ(back.back(), (DerivedLabel{1, Label::Increase}));
}

TEST(DeriveLabels, NoFlipYieldsNothing) {
  EXPECT_TRUE(derive_labels(scalar_trajectory(Direction::Up, {{1, false}, {2, false}, {3, false}})).empty());
  EXPECT_TRUE(derive_labels(scalar_trajectory(Direction::Up, {{1, true}})).empty());
}

TEST(DeriveLabels, StopsAtFirstFlip) {
  const auto labels =
      derive_labels(scalar_trajectory(Direction::Up, {{0, false}, {1, true}, {2, false}, {3, true}}));
  EXPECT_EQ(labels.size(), 2u);
}

TEST(Mutation, ExponentialStep) {
  std::mt19937_64 rng(1);
  MutationConfig m{MutationMethod::Exponential, 1.0, 10, Direction::Up, {}};
  const Tensor y = mutate_step(Tensor::vector({10.0, 20.0}), 1, m, rng);
  EXPECT_DOUBLE_EQ(y[0], 10 + std::exp(1.0));
  EXPECT_DOUBLE_EQ(y[1], 20 + std::exp(1.0));
  m.direction = Direction::Down;
  EXPECT_DOUBLE_EQ(mutate_step(Tensor::vector({10.0}), 2, m, rng)[0], 10 - std::exp(2.0));
}

TEST(Mutation, SinusoidalStep) {
  std::mt19937_64 rng(1);
  MutationConfig m{MutationMethod::Sinusoidal, std::numbers::pi / 2, 10, Direction::Up, 1.0};
  EXPECT_DOUBLE_EQ(mutate_step(Tensor::vector({10.0}), 1, m, rng)[0], 11.0);
}

TEST(Mutation, SinusoidalDefaultsToInputMagnitude) {
  std::mt19937_64 rng(1);
  MutationConfig m{MutationMethod::Sinusoidal, std::numbers::pi / 2, 10, Direction::Down, {}};
  EXPECT_DOUBLE_EQ(mutate_step(Tensor::vector({4.0, -8.0}), 1, m, rng)[0], -4.0);
}

TEST(Mutation, RandomStepIsBoundedAndShared) {
  std::mt19937_64 rng(7);
  MutationConfig m{MutationMethod::Random, 0.5, 10, Direction::Up, 2.0};
  for (int i = 1; i <= 100; ++i) {
    const Tensor y = mutate_step(Tensor::vector({0.0, 100.0}), i, m, rng);
    EXPECT_GE(y[0], 0.0);
    EXPECT_LE(y[0], 1.0);
    EXPECT_DOUBLE_EQ(y[1] - y[0], 100.0);
  }
}

TEST(Mutation, PixelBoundsClamp) {
  std::mt19937_64 rng(1);
  MutationConfig m{MutationMethod::Exponential, 1.0, 10, Direction::Up, {}};
  const Tensor y = mutate_step(Tensor::vector({250.0, 10.0}), 3, m, rng, std::pair{0.0, 255.0});
  EXPECT_EQ(y[0], 255.0);
  EXPECT_DOUBLE_EQ(y[1], 10 + std::exp(3.0));
}

TEST(Mutation, StepIndexStartsAtOne) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(mutation_step(0, MutationConfig{}, 1.0, rng), UsageError);
}

TEST(Featurize, FlattensMatchingSize) {
  std::vector<double> v(9);
  for (int i = 0; i < 9; ++i) v[i] = 9 - i;
  EXPECT_EQ(featurize(Tensor({3, 3}, v), 9), v);
}

TEST(Featurize, QuantilesOfLargerInput) {
  std::vector<double> v(16);
  for (int i = 0; i < 16; ++i) v[i] = 16 - i;
  const std::vector<double> want{1, 3, 5, 7, 9, 10, 12, 14, 16};
  EXPECT_EQ(featurize(Tensor({4, 4}, v), 9), want);
}

TEST(Featurize, RejectsUnsupportedLength) {
  EXPECT_THROW(featurize(Tensor::zeros({3, 3}), 10), UsageError);
  EXPECT_THROW(featurize(Tensor::zeros({0}), 9), UsageError);
}

TEST(Scaling, ApplyInvertRoundTrip) {
  const Scaling s{1.0, 0.5, 1e-8};
  EXPECT_DOUBLE_EQ(s.apply(3.0), 2.0);
  EXPECT_DOUBLE_EQ(s.invert(s.apply(3.0)), 3.0);
  EXPECT_DOUBLE_EQ(s.apply(0.0), (1e-8 + 1.0) * 0.5);
  EXPECT_TRUE(Scaling{}.identity());
}

TEST(Scaling, PreprocessRejectsDoubleScaling) {
  Dataset ds;
  ds.samples.push_back({{1.0}, Label::Increase});
  Dataset scaled = preprocess_scale(ds, Scaling{0, 2, 0});
  EXPECT_EQ(scaled.samples[0].features[0], 2.0);
  EXPECT_THROW(preprocess_scale(scaled, Scaling{0, 2, 0}), UsageError);
}

GenerationConfig small_config() {
  GenerationConfig c;
  c.target_size = 3000;
  return c;
}

const Dataset& exp_dataset() {
  static const Dataset ds = build_dataset("exp", small_config());
  return ds;
}

TEST(BuildDataset, BalancedAndBounded) {
  const Dataset& ds = exp_dataset();
  EXPECT_LE(ds.samples.size(), 3000u);
  const auto c = ds.class_counts();
  const auto [lo, hi] = std::minmax({c[0], c[1], c[2]});
  EXPECT_GE(static_cast<double>(lo) / static_cast<double>(hi), 0.5);
  for (std::size_t n : c) EXPECT_GE(static_cast<double>(n), 0.2 * static_cast<double>(ds.samples.size()));
  EXPECT_EQ(ds.feature_len, 9u);
  EXPECT_EQ(ds.arity, 1u);
  for (const auto& s : ds.samples) EXPECT_EQ(s.features.size(), 9u);
}

TEST(BuildDataset, Deterministic) {
  EXPECT_EQ(build_dataset("exp", small_config()), exp_dataset());
}

TEST(BuildDataset, SeedChangesSamples) {
  GenerationConfig c = small_config();
  c.seed = 43;
  EXPECT_NE(build_dataset("exp", c).samples, exp_dataset().samples);
}

TEST(BuildDataset, LabelsReplayAgainstOracles) {
  // NoChange points failed when generated; directional points passed.
  const Dataset& ds = exp_dataset();
  ASSERT_TRUE(ds.scaling.identity());
  const KernelSpec& spec = default_registry().at("exp");
  for (std::size_t i = 0; i < ds.samples.size(); i += 7) {
    const auto& s = ds.samples[i];
    const auto ops = defeaturize(ds, s, {ds.shape});
    const bool failed = run_oracles(spec, ops, ds.params).verdict.failed();
    EXPECT_EQ(failed, s.label == Label::NoChange) << "sample " << i;
  }
}

TEST(BuildDataset, MultiOperandKernel) {
  const Dataset ds = build_dataset("div", small_config());
  EXPECT_EQ(ds.arity, 2u);
  for (const auto& s : ds.samples) EXPECT_EQ(s.features.size(), 18u);
}

TEST(BuildDataset, GenerationErrorWhenNothingFails) {
  GenerationConfig c = small_config();
  c.regions = {{-1, 1}};
  c.max_rounds = 2;
  c.n_base = 10;
  std::vector<MutationConfig> gentle{{MutationMethod::Random, 0.01, 5, Direction::Up, {}},
                                     {MutationMethod::Random, 0.01, 5, Direction::Down, {}}};
  try {
    build_dataset("relu", c, gentle);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.kernel(), "relu");
  }
}

TEST(BuildDataset, RejectsBadConfig) {
  GenerationConfig c = small_config();
  c.shape = {2, 2};
  EXPECT_THROW(build_dataset("exp", c), UsageError);
  EXPECT_THROW(build_dataset("selu", small_config()), CapabilityError);
  EXPECT_THROW(build_dataset("no_such_kernel", small_config()), CapabilityError);
}

class DatasetFile : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("saf_dataset_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(DatasetFile, RoundTrip) {
  const std::string p = path("exp.csv");
  dataset_save(exp_dataset(), p);
  EXPECT_EQ(dataset_load(p), exp_dataset());
}

TEST_F(DatasetFile, FullSizeFileStaysSmall) {
  const Dataset ds = build_dataset("exp", GenerationConfig{});
  EXPECT_EQ(ds.samples.size(), 40000u);
  const std::string p = path("exp_full.csv");
  dataset_save(ds, p);
  EXPECT_LT(fs::file_size(p), 100u * 1024 * 1024);
}

TEST_F(DatasetFile, TruncatedFileIsRejected) {
  const std::string p = path("exp.csv");
  dataset_save(exp_dataset(), p);
  const auto size = fs::file_size(p);
  fs::resize_file(p, size / 2);
  EXPECT_THROW(dataset_load(p), ParseError);
}

TEST_F(DatasetFile, RecordWidthMismatch) {
  const std::string p = path("exp.csv");
  dataset_save(exp_dataset(), p);
  std::ofstream(p, std::ios::app) << "Increase,1,2,3\n";
  EXPECT_THROW(dataset_load(p), ParseError);
}

TEST_F(DatasetFile, VersionMismatch) {
  const std::string p = path("v.csv");
  std::ofstream(p) << "#saf-dataset {\"format_version\":99}\nlabel\n";
  EXPECT_THROW(dataset_load(p), FormatVersionError);
}

TEST_F(DatasetFile, MissingFile) {
  EXPECT_THROW(dataset_load(path("absent.csv")), IoError);
  std::ofstream(path("junk.csv")) << "hello\n";
  EXPECT_THROW(dataset_load(path("junk.csv")), ParseError);
}

}  // namespace
}  // namespace saf
