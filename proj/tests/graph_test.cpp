// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "saf/graph.hpp"

namespace saf {
namespace {

Graph unary_graph(const std::string& op, Shape shape, Params params = Params::object()) {
  Graph g;
  NodeId x = g.add_input("x", std::move(shape));
  g.add_node("y", op, {x}, std::move(params));
  return g;
}

TEST(ForwardEval, Scale) {
  Graph g = unary_graph("scale", {3}, {{"factor", 2.0}});
  Tape t = forward_eval(g, {Tensor::vector({1, 2, 3})}, Precision::Double);
  EXPECT_EQ(t.value(1), Tensor::vector({2, 4, 6}));
}

TEST(ForwardEval, ExpOverflowsInSingle) {
  Graph g = unary_graph("exp", {1});
  Tape t = forward_eval(g, {Tensor::vector({89.0})}, Precision::Single);
  EXPECT_TRUE(std::isinf(t.value(1)[0]));
  EXPECT_GT(t.value(1)[0], 0);
}

TEST(ForwardEval, ExpFiniteInDouble) {
  // e^89 to 30 digits: 4.48961281917434524628424557967e38
  Graph g = unary_graph("exp", {1});
  Tape t = forward_eval(g, {Tensor::vector({89.0})}, Precision::Double);
  EXPECT_NEAR(t.value(1)[0] / 4.48961281917434524628e38, 1.0, 1e-14);
}

TEST(ForwardEval, StopAtLeavesLaterNodesEmpty) {
  Graph g;
  NodeId x = g.add_input("x", {1});
  NodeId a = g.add_node("a", "exp", {x});
  g.add_node("b", "log", {a});
  Tape t = forward_eval(g, {Tensor::vector({1.0})}, Precision::Double, a);
  EXPECT_TRUE(t.covers(a));
  EXPECT_FALSE(t.covers(2));
  EXPECT_THROW(t.value(2), UsageError);
}

TEST(ForwardEval, ShapeMismatchNamesNode) {
  Graph g;
  NodeId a = g.add_input("a", {2, 3});
  NodeId b = g.add_input("b", {2, 3});
  g.add_node("mm", "matmul", {a, b});
  try {
    forward_eval(g, {Tensor::zeros({2, 3}), Tensor::zeros({2, 3})}, Precision::Double);
    FAIL() << "expected EvalError";
  } catch (const EvalError& e) {
    EXPECT_EQ(e.node(), "mm");
  }
}

TEST(ForwardEval, WrongInputShapeRejected) {
  Graph g = unary_graph("exp", {3});
  EXPECT_THROW(forward_eval(g, {Tensor::zeros({2})}, Precision::Double), EvalError);
}

TEST(Graph, RejectsUnknownOpsAndDuplicates) {
  Graph g;
  NodeId x = g.add_input("x", {1});
  EXPECT_THROW(g.add_node("y", "svd", {x}), EvalError);
  EXPECT_THROW(g.add_node("x", "exp", {x}), EvalError);
  EXPECT_THROW(g.add_node("z", "exp", {7}), EvalError);
}

TEST(ForwardEval, Deterministic) {
  Graph g;
  NodeId x = g.add_input("x", {3, 3});
  NodeId s = g.add_node("s", "softmax", {x});
  g.add_node("l", "log", {s});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  Tensor in = Tensor::zeros({3, 3});
  for (auto& v : in.mutable_values()) v = u(rng);
  for (Precision p : {Precision::Single, Precision::Double}) {
    Tape a = forward_eval(g, {in}, p);
    Tape b = forward_eval(g, {in}, p);
    for (NodeId i = 0; i < g.size(); ++i) EXPECT_TRUE(a.value(i).identical(b.value(i)));
  }
}

TEST(Backward, Scale) {
  Graph g = unary_graph("scale", {1}, {{"factor", 3.0}});
  Tape t = forward_eval(g, {Tensor::vector({0.7})}, Precision::Double);
  auto grads = backward(g, t, 1, Tensor::vector({1}));
  EXPECT_DOUBLE_EQ(grads[0][0], 3.0);
}

TEST(Backward, Square) {
  Graph g = unary_graph("square", {1});
  Tape t = forward_eval(g, {Tensor::vector({2})}, Precision::Double);
  EXPECT_DOUBLE_EQ(backward(g, t, 1, Tensor::vector({1}))[0][0], 4.0);
}

TEST(Backward, Exp) {
  // Central difference of exp at 1.5 with h = 1e-5 gives 4.48168907...
  Graph g = unary_graph("exp", {1});
  Tape t = forward_eval(g, {Tensor::vector({1.5})}, Precision::Double);
  EXPECT_NEAR(backward(g, t, 1, Tensor::vector({1}))[0][0], 4.4816890703, 1e-8);
}

TEST(Backward, AdjointsAlwaysDouble) {
  Graph g = unary_graph("exp", {1});
  Tape t = forward_eval(g, {Tensor::vector({1.5})}, Precision::Single);
  auto grads = backward(g, t, 1, Tensor::vector({1}));
  EXPECT_EQ(grads[0].precision(), Precision::Double);
  EXPECT_DOUBLE_EQ(grads[0][0], std::exp(static_cast<double>(1.5f)));
}

TEST(Backward, SeedOffTapeIsUsageError) {
  Graph g;
  NodeId x = g.add_input("x", {1});
  NodeId a = g.add_node("a", "exp", {x});
  NodeId b = g.add_node("b", "exp", {a});
  Tape t = forward_eval(g, {Tensor::vector({0.0})}, Precision::Double, a);
  EXPECT_THROW(backward(g, t, b, Tensor::vector({1})), UsageError);
}

TEST(Backward, FanOutAccumulates) {
  Graph g;
  NodeId x = g.add_input("x", {1});
  NodeId a = g.add_node("a", "scale", {x}, {{"factor", 2.0}});
  g.add_node("b", "add", {a, x});
  Tape t = forward_eval(g, {Tensor::vector({1.0})}, Precision::Double);
  EXPECT_DOUBLE_EQ(backward(g, t, 2, Tensor::vector({1}))[0][0], 3.0);
}

TEST(Backward, ReluKinkUsesZeroSubgradient) {
  Graph g = unary_graph("relu", {1});
  Tape t = forward_eval(g, {Tensor::vector({0.0})}, Precision::Double);
  EXPECT_EQ(backward(g, t, 1, Tensor::vector({1}))[0][0], 0.0);
}

TEST(FiniteDiff, Scale) {
  Graph g = unary_graph("scale", {1}, {{"factor", 3.0}});
  std::vector<Tensor> in{Tensor::vector({-4.2})};
  auto fd = finite_diff_grad(g, in, 1);
  ASSERT_TRUE(fd);
  EXPECT_NEAR((*fd)[0][0], 3.0, 1e-8);
}

TEST(FiniteDiff, Square) {
  Graph g = unary_graph("square", {1});
  std::vector<Tensor> in{Tensor::vector({2.0})};
  EXPECT_NEAR((*finite_diff_grad(g, in, 1))[0][0], 4.0, 1e-8);
}

TEST(FiniteDiff, SigmoidAtZero) {
  // sigma'(0) = sigma(0) (1 - sigma(0)) = 0.5 * 0.5
  Graph g = unary_graph("sigmoid", {1});
  std::vector<Tensor> in{Tensor::vector({0.0})};
  EXPECT_NEAR((*finite_diff_grad(g, in, 1))[0][0], 0.25, 1e-9);
}

TEST(FiniteDiff, NonFiniteIsUnavailable) {
  Graph g = unary_graph("log", {1});
  std::vector<Tensor> in{Tensor::vector({0.0})};
  EXPECT_FALSE(finite_diff_grad(g, in, 1).has_value());
}

}  // namespace
}  // namespace saf
