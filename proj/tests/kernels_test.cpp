// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "saf/graph.hpp"
#include "saf/kernels.hpp"
#include "test_support.hpp"

namespace saf {
namespace {

using testing::KernelCase;

TEST(KernelEval, SoftmaxOfZerosIsUniform) {
  Tensor y = kernel_eval("softmax", {Tensor::vector({0, 0, 0})}, Precision::Double);
  for (double v : y.values()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(KernelEval, UnknownKernelIsCapabilityError) {
  EXPECT_THROW(kernel_eval("svd", {Tensor::zeros({2, 2})}, Precision::Double), CapabilityError);
}

TEST(KernelEval, SingleKernelsComputeInFloat) {
  // float(1933053808) = 1933053824 and 1933053824 mod 53 = 35.
  Params p{{"divisor", 53.0}};
  EXPECT_EQ(kernel_eval("remainder", {Tensor::vector({1933053808.0})}, Precision::Single, p)[0],
            35.0);
  EXPECT_EQ(kernel_eval("remainder", {Tensor::vector({1933053808.0})}, Precision::Double, p)[0],
            19.0);
}

TEST(KernelEval, RemainderTakesSignOfDivisor) {
  Params p{{"divisor", 3.0}};
  EXPECT_EQ(kernel_eval("remainder", {Tensor::vector({-1.0})}, Precision::Double, p)[0], 2.0);
  EXPECT_EQ(kernel_eval("remainder", {Tensor::vector({10.0})}, Precision::Double, p)[0], 1.0);
}

TEST(KernelEval, NaiveSoftmaxOverflowsToNaN) {
  Tensor y = kernel_eval("softmax", {Tensor::vector({100, 0, 0})}, Precision::Single);
  EXPECT_TRUE(std::isnan(y[0]));
}

TEST(KernelEval, CosineClampActsOnTinyNorms) {
  // ||y|| = 9.2263e-9 < 1e-8, so the clamped variant divides by 1e-8 and
  // scales the true value 0.78098549 by 0.92263.
  Tensor x = Tensor::vector({2606.66824394, 2477.72226966, 3251.84008903});
  Tensor y = Tensor::vector({6.730234000220725e-10, 8.367365693489935e-09, 3.82868679111134e-09});
  EXPECT_NEAR(kernel_eval("cosine_similarity", {x, y}, Precision::Double)[0], 0.72056063860066,
              1e-12);
  EXPECT_NEAR(kernel_eval("cosine_similarity", {x, y}, Precision::Single)[0], 0.72056063860066,
              1e-6);
}

TEST(KernelEval, CosineRowWise) {
  Tensor x({2, 2}, {1, 0, 0, 1});
  Tensor y({2, 2}, {1, 0, 1, 0});
  Tensor c = kernel_eval("cosine_similarity", {x, y}, Precision::Double);
  EXPECT_EQ(c.shape(), Shape{2});
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
}

TEST(KernelEval, MatmulAndLinear) {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor b({2, 2}, {5, 6, 7, 8});
  EXPECT_EQ(kernel_eval("matmul", {a, b}, Precision::Double), Tensor({2, 2}, {19, 22, 43, 50}));
  // x W^T + b with W = b-matrix: rows of W are (5,6), (7,8).
  Tensor y = kernel_eval("linear", {a, b, Tensor::vector({1, -1})}, Precision::Double);
  EXPECT_EQ(y, Tensor({2, 2}, {18, 22, 40, 52}));
}

TEST(KernelEval, Conv2dValidCorrelation) {
  Tensor x({3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  Tensor k({2, 2}, {1, 0, 0, -1});
  EXPECT_EQ(kernel_eval("conv2d", {x, k}, Precision::Double), Tensor({2, 2}, {-4, -4, -4, -4}));
}

TEST(KernelEval, InverseAndDeterminant) {
  Tensor a({2, 2}, {4, 7, 2, 6});
  Tensor inv = kernel_eval("matrix_inverse", {a}, Precision::Double);
  EXPECT_NEAR(inv[0], 0.6, 1e-15);
  EXPECT_NEAR(inv[1], -0.7, 1e-15);
  EXPECT_NEAR(inv[2], -0.2, 1e-15);
  EXPECT_NEAR(inv[3], 0.4, 1e-15);
  EXPECT_NEAR(kernel_eval("determinant", {a}, Precision::Double)[0], 10.0, 1e-12);
}

TEST(KernelEval, CrossEntropyOfUniformLogits) {
  Tensor z({2, 3}, {0, 0, 0, 0, 0, 0});
  EXPECT_NEAR(kernel_eval("cross_entropy", {z}, Precision::Double, {{"labels", {0, 2}}})[0],
              std::log(3.0), 1e-15);
}

TEST(KernelEval, ShapeErrors) {
  EXPECT_THROW(kernel_eval("div", {Tensor::zeros({2}), Tensor::zeros({3})}, Precision::Double),
               UsageError);
  EXPECT_THROW(kernel_eval("matrix_inverse", {Tensor::zeros({2, 3})}, Precision::Double),
               UsageError);
  EXPECT_THROW(kernel_eval("cross_entropy", {Tensor::zeros({2, 3})}, Precision::Double,
                           {{"labels", 5}}),
               UsageError);
}

TEST(KernelCatalog, CoversTheCoreSetAndHelpers) {
  for (const auto& c : testing::smooth_cases()) EXPECT_NE(find_kernel(c.name), nullptr) << c.name;
  for (const auto& c : testing::extended_cases()) EXPECT_NE(find_kernel(c.name), nullptr);
  for (const char* h : {"add", "sub", "scale", "constant", "reshape"}) {
    ASSERT_NE(find_kernel(h), nullptr);
    EXPECT_TRUE(find_kernel(h)->helper);
  }
  EXPECT_EQ(testing::smooth_cases().size(), 25u);
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

void check_gradients(const KernelCase& c, int points) {
  std::mt19937_64 rng(std::hash<std::string>{}(c.name) ^ 0x5eed);
  Graph g = testing::single_kernel_graph(c);
  const NodeId site = g.output();
  int checked = 0;
  for (int p = 0; p < points; ++p) {
    const auto in = testing::sample_operands(c, rng);
    const Tape t = forward_eval(g, in, Precision::Double);
    const auto ad = backward(g, t, site, Tensor::filled(t.value(site).shape(), 1.0));
    const auto fd = finite_diff_grad(g, in, site, 1e-5);
    if (!fd) continue;
    ++checked;
    for (std::size_t k = 0; k < ad.size(); ++k)
      for (std::size_t i = 0; i < ad[k].size(); ++i)
        ASSERT_LT(rel_err(ad[k][i], (*fd)[k][i]), 1e-4)
            << c.name << " operand " << k << " element " << i << ": backward " << ad[k][i]
            << " vs finite difference " << (*fd)[k][i];
  }
  EXPECT_EQ(checked, points) << c.name;
}

TEST(KernelProperty, BackwardMatchesFiniteDifferences) {
  for (const auto& c : testing::smooth_cases()) check_gradients(c, 100);
}

TEST(KernelProperty, ExtendedBackwardMatchesFiniteDifferences) {
  for (const auto& c : testing::extended_cases()) check_gradients(c, 100);
}

TEST(KernelProperty, SingleAndDoubleAgreeOnModerateInputs) {
  std::mt19937_64 rng(11);
  for (auto c : testing::smooth_cases()) {
    for (auto& b : c.boxes) b = {-1, 1};
    for (int p = 0; p < 100; ++p) {
      const auto in = testing::sample_operands(c, rng);
      const Tensor s = kernel_eval(c.name, in, Precision::Single, c.params);
      const Tensor d = kernel_eval(c.name, in, Precision::Double, c.params);
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i]) || !std::isfinite(d[i])) continue;
        ASSERT_LT(std::abs(s[i] - d[i]) / std::max(1.0, std::abs(d[i])), 1e-4) << c.name;
      }
    }
  }
}

TEST(KernelProperty, EvaluationIsBitReproducible) {
  std::mt19937_64 rng(5);
  for (const auto& c : testing::smooth_cases()) {
    const auto in = testing::sample_operands(c, rng);
    for (Precision p : {Precision::Single, Precision::Double})
      EXPECT_TRUE(kernel_eval(c.name, in, p, c.params).identical(kernel_eval(c.name, in, p, c.params)))
          << c.name;
  }
}

}  // namespace
}  // namespace saf
