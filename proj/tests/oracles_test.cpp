// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "saf/oracles.hpp"

namespace saf {
namespace {

const double kInf = std::numeric_limits<double>::infinity();

TEST(NanInf, LogOfZero) {
  Tensor y = kernel_eval("log", {Tensor::vector({0.0})}, Precision::Single);
  OracleVerdict v = check_nan_inf(y);
  EXPECT_TRUE(v.failed());
  EXPECT_EQ(v.failure_class, FailureClass::NaNorINF);
}

TEST(NanInf, SoftmaxPasses) {
  OracleVerdict v = check_nan_inf(kernel_eval("softmax", {Tensor::vector({0, 0, 0})}, Precision::Single));
  EXPECT_TRUE(v.passed());
  EXPECT_FALSE(v.failure_class);
}

TEST(NanInf, ReciprocalOfSubnormalOverflows) {
  // float(1e-45) is the smallest subnormal, 2^-149; its reciprocal is 2^149.
  Tensor y = kernel_eval("div", {Tensor::vector({1.0}), Tensor::vector({1e-45})}, Precision::Single);
  EXPECT_TRUE(std::isinf(y[0]));
  EXPECT_TRUE(check_nan_inf(y).failed());
}

TEST(Range, Boundaries) {
  EXPECT_EQ(check_range(Tensor::vector({1.0000002}), -1, 1).failure_class, FailureClass::OutOfRange);
  EXPECT_TRUE(check_range(Tensor::vector({0.5}), -1, 1).passed());
  EXPECT_TRUE(check_range(Tensor::vector({-1.0}), -1, 1).passed());
  EXPECT_TRUE(check_range(Tensor::vector({0.0}), 0, 1, true).failed());
  EXPECT_TRUE(check_range(Tensor::vector({std::nan("")}), -1, 1).failed());
  EXPECT_THROW(check_range(Tensor::vector({0.0}), 1, 1), UsageError);
}

TEST(Rewrite, RatioSqrtExactAtOne) {
  EXPECT_TRUE(check_rewrite("ratio_sqrt", {Tensor::vector({1.0})}).passed());
}

TEST(Rewrite, ShiftedLogDiffLosesSmallTerm) {
  // In Single, 1e8 + log(2) rounds back to 1e8, so x - (max + log y) = 0
  // while x - max - log y = -0.6931472.
  OracleVerdict v = check_rewrite(
      "shifted_log_diff", {Tensor::vector({1e8}), Tensor::vector({1e8}), Tensor::vector({2.0})});
  ASSERT_TRUE(v.failed());
  EXPECT_EQ(v.failure_class, FailureClass::RewriteMismatch);
  EXPECT_EQ(v.detail.observed, 0.0);
  EXPECT_NEAR(v.detail.reference, -0.6931471824645996, 1e-7);
}

TEST(Rewrite, LogSoftmaxDirectFormOverflows) {
  OracleVerdict v = check_rewrite("log_softmax", {Tensor::vector({1000, 0, 0})});
  ASSERT_TRUE(v.failed());
  EXPECT_FALSE(std::isfinite(v.detail.observed));
  EXPECT_TRUE(std::isfinite(v.detail.reference));
}

TEST(Rewrite, MissingRewriteIsCapabilityError) {
  EXPECT_THROW(check_rewrite("exp", {Tensor::vector({1.0})}), CapabilityError);
}

TEST(StableAlgorithm, IdentityInverse) {
  Tensor eye({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  std::vector<Tensor> in{eye};
  auto v = check_stable_algorithm("matrix_inverse", in);
  ASSERT_TRUE(v);
  EXPECT_TRUE(v->passed());
}

TEST(StableAlgorithm, IllConditionedDiagonal) {
  // Both paths reduce to 1/d for a diagonal matrix: Gauss-Jordan divides
  // once, Cholesky squares 1/sqrt(d). In Single both give exactly 1e12
  // (float(1e-12) = 9.9999999600419720025e-13), so the verdict is Pass.
  Tensor a({3, 3}, {1, 0, 0, 0, 1e-12, 0, 0, 0, 1});
  std::vector<Tensor> in{a};
  auto v = check_stable_algorithm("matrix_inverse", in);
  ASSERT_TRUE(v);
  EXPECT_TRUE(v->passed());
  EXPECT_EQ(kernel_eval("matrix_inverse", in, Precision::Single)[4], static_cast<double>(1.0f / 1e-12f));
}

TEST(StableAlgorithm, NonSpdIsUnavailable) {
  std::vector<Tensor> in{Tensor({2, 2}, {0, 1, 1, 0})};
  EXPECT_FALSE(check_stable_algorithm("matrix_inverse", in));
  std::vector<Tensor> asym{Tensor({2, 2}, {2, 1, 0, 2})};
  EXPECT_FALSE(check_stable_algorithm("determinant", asym));
}

TEST(StableAlgorithm, DeterminantAgreesOnSpd) {
  std::vector<Tensor> in{Tensor({2, 2}, {4, 2, 2, 3})};
  auto v = check_stable_algorithm("determinant", in);
  ASSERT_TRUE(v);
  EXPECT_TRUE(v->passed());
}

TEST(Reference, SelfSimilarity) {
  std::vector<Tensor> in{Tensor::vector({1, 2, 3}), Tensor::vector({1, 2, 3})};
  auto v = check_reference_consistency("cosine_similarity", in);
  ASSERT_TRUE(v);
  EXPECT_TRUE(v->passed());
}

TEST(Reference, ClampedNormDisagrees) {
  std::vector<Tensor> in{
      Tensor::vector({2606.66824394, 2477.72226966, 3251.84008903}),
      Tensor::vector({6.730234000220725e-10, 8.367365693489935e-09, 3.82868679111134e-09})};
  auto v = check_reference_consistency("cosine_similarity", in);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->failure_class, FailureClass::ReferenceMismatch);
  EXPECT_NEAR(v->detail.reference, 0.78098548562334103, 1e-7);
}

TEST(Reference, UnclampedUnitVectorsAgree) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int s = 0; s < 1000; ++s) {
    Tensor x = Tensor::zeros({3}), y = Tensor::zeros({3});
    for (std::size_t i = 0; i < 3; ++i) {
      x[i] = n(rng);
      y[i] = n(rng);
    }
    const double sx = scale(rng), sy = scale(rng);
    for (std::size_t i = 0; i < 3; ++i) {
      x[i] *= sx;
      y[i] *= sy;
    }
    std::vector<Tensor> in{x, y};
    auto v = check_reference_consistency("cosine_similarity", in);
    ASSERT_TRUE(v);
    ASSERT_TRUE(v->passed()) << v->detail.delta;
  }
}

TEST(Reference, ZeroNormIsUnavailable) {
  std::vector<Tensor> in{Tensor::vector({1, 2, 3}), Tensor::vector({0, 0, 0})};
  EXPECT_FALSE(check_reference_consistency("cosine_similarity", in));
}

TEST(Reference, OutputsWithinUnitInterval) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int s = 0; s < 1000; ++s) {
    Tensor x = Tensor::zeros({3, 3}), y = Tensor::zeros({3, 3});
    for (auto& v : x.mutable_values()) v = u(rng);
    for (auto& v : y.mutable_values()) v = u(rng);
    const Tensor c_xy = *cosine_similarity_reference(x, y);
    for (double c : c_xy.values()) {
      ASSERT_GE(c, -1 - 1e-6);
      ASSERT_LE(c, 1 + 1e-6);
    }
  }
}

TEST(Width, RemainderOfLargeDividendDiffersInSingle) {
  Params p{{"divisor", 53.0}};
  OracleVerdict v = check_increased_width("remainder", {Tensor::vector({1933053808.0})}, 1e-6, p);
  ASSERT_TRUE(v.failed());
  EXPECT_EQ(v.failure_class, FailureClass::WidthMismatch);
  EXPECT_EQ(v.detail.observed, 35.0);
  EXPECT_EQ(v.detail.reference, 19.0);
}

TEST(Width, RemainderSmallIntegers) {
  EXPECT_TRUE(check_increased_width("remainder", {Tensor::vector({10.0})}, 1e-6, {{"divisor", 3.0}})
                  .passed());
}

TEST(Width, MatmulOverflowInSingle) {
  // Each product 2e19 * 2e19 = 4e38 exceeds FLT_MAX; Double stays finite.
  Tensor a = Tensor::filled({3, 3}, 2e19);
  OracleVerdict v = check_increased_width("matmul", {a, a});
  ASSERT_TRUE(v.failed());
  EXPECT_EQ(v.detail.observed, kInf);
}

TEST(Width, MonotoneInTolerance) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  for (int s = 0; s < 200; ++s) {
    Tensor x = Tensor::vector({u(rng)});
    bool passed_before = false;
    for (double t : {1e-9, 1e-7, 1e-5, 1e-3, 1e-1, 10.0}) {
      const bool pass = check_increased_width("remainder", {x}, t, {{"divisor", 53.0}}).passed();
      if (passed_before) {
        ASSERT_TRUE(pass);
      }
      passed_before = passed_before || pass;
    }
  }
}

TEST(RunOracles, ExpAt89) {
  OracleVerdict v = run_oracles("exp", {Tensor::vector({89.0})});
  EXPECT_EQ(v.failure_class, FailureClass::NaNorINF);
}

TEST(RunOracles, MeanPasses) {
  EXPECT_TRUE(run_oracles("mean", {Tensor::vector({1, 2, 3})}).passed());
}

TEST(RunOracles, CosineTinyNormFailsConsistency) {
  OracleVerdict v = run_oracles(
      "cosine_similarity",
      {Tensor::vector({2606.66824394, 2477.72226966, 3251.84008903}),
       Tensor::vector({6.730234000220725e-10, 8.367365693489935e-09, 3.82868679111134e-09})},
      {{"eps", 1e-8}});
  EXPECT_EQ(v.failure_class, FailureClass::ReferenceMismatch);
}

TEST(RunOracles, NonFiniteInputFails) {
  OracleVerdict v = run_oracles("relu", {Tensor::vector({1e39})});
  EXPECT_EQ(v.failure_class, FailureClass::NaNorINF);
}

TEST(RunOracles, UnimplementedIsCapabilityError) {
  EXPECT_THROW(run_oracles("svd", {Tensor::zeros({2, 2})}), CapabilityError);
}

TEST(RunOracles, DoesNotMutateInputs) {
  std::vector<Tensor> in{Tensor::vector({0.1, 89.0, -3.0})};
  const Tensor copy = in[0];
  run_oracles(default_registry().at("exp"), in);
  EXPECT_TRUE(in[0].identical(copy));
}

TEST(RunOracles, SkipsUnavailableButStillDecides) {
  // Zero-norm y: the reference is undefined, so only oracles 1 and 2 run.
  std::vector<Tensor> in{Tensor::vector({1, 2, 3}), Tensor::vector({0, 0, 0})};
  OracleRun run = run_oracles(default_registry().at("cosine_similarity"), in, {{"eps", 1e-8}});
  EXPECT_TRUE(run.verdict.passed());
  EXPECT_EQ(run.skipped.size(), 1u);
}

TEST(FailureClass, RoundTripsNames) {
  for (auto c : {FailureClass::NaNorINF, FailureClass::OutOfRange, FailureClass::RewriteMismatch,
                 FailureClass::StableAlgoMismatch, FailureClass::ReferenceMismatch,
                 FailureClass::WidthMismatch})
    EXPECT_EQ(parse_failure_class(to_string(c)), c);
  EXPECT_THROW(parse_failure_class("Boom"), ParseError);
}

}  // namespace
}  // namespace saf
