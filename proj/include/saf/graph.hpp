// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saf/error.hpp"
#include "saf/kernels.hpp"
#include "saf/tensor.hpp"

namespace saf {

using NodeId = std::size_t;

struct Node {
  std::string name;
  /// "input" for entry nodes, otherwise a kernel or helper name.
  std::string op;
  Params params = Params::object();
  std::vector<NodeId> inputs;
  /// Declared shape; only meaningful for entry nodes.
  Shape shape;
};

/// Acyclic computation graph. Nodes are stored in topological order: every
/// edge points at an earlier node.
class Graph {
 public:
  NodeId add_input(std::string name, Shape shape) {
    check_name(name);
    Node n;
    n.name = std::move(name);
    n.op = "input";
    n.shape = std::move(shape);
    nodes_.push_back(std::move(n));
    inputs_.push_back(nodes_.size() - 1);
    output_ = nodes_.size() - 1;
    return nodes_.size() - 1;
  }

  NodeId add_node(std::string name, std::string op, std::vector<NodeId> inputs,
                  Params params = Params::object()) {
    check_name(name);
    const Kernel* k = find_kernel(op);
    if (k == nullptr) throw EvalError(name, "unknown op '" + op + "'");
    if (inputs.size() < k->min_arity || inputs.size() > k->max_arity)
      throw EvalError(name, op + " takes " + std::to_string(k->min_arity) +
                                " input(s), got " + std::to_string(inputs.size()));
    for (NodeId i : inputs)
      if (i >= nodes_.size())
        throw EvalError(name, "input refers to a later or missing node");
    Node n;
    n.name = std::move(name);
    n.op = std::move(op);
    n.params = params.is_null() ? Params::object() : std::move(params);
    n.inputs = std::move(inputs);
    nodes_.push_back(std::move(n));
    output_ = nodes_.size() - 1;
    return nodes_.size() - 1;
  }

  void set_output(NodeId id) {
    if (id >= nodes_.size()) throw UsageError("output node out of range");
    output_ = id;
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeId>& inputs() const noexcept { return inputs_; }
  NodeId output() const noexcept { return output_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::optional<NodeId> find(std::string_view name) const {
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].name == name) return i;
    return std::nullopt;
  }

 private:
  void check_name(const std::string& name) const {
    if (find(name)) throw EvalError(name, "duplicate node id");
  }

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
  NodeId output_ = 0;
};

/// Forward values of one evaluation. Nodes past `evaluated()` hold nothing.
struct Tape {
  Precision precision = Precision::Double;
  std::vector<Tensor> values;
  std::size_t evaluated = 0;

  bool covers(NodeId id) const noexcept { return id < evaluated; }
  const Tensor& value(NodeId id) const {
    if (!covers(id)) throw UsageError("node " + std::to_string(id) + " is not on the tape");
    return values[id];
  }
};

/// Inputs of node `id` as stored on the tape.
inline std::vector<Tensor> node_operands(const Graph& g, const Tape& tape, NodeId id) {
  std::vector<Tensor> ops;
  for (NodeId i : g.node(id).inputs) ops.push_back(tape.value(i));
  return ops;
}

/// Evaluates nodes in order up to and including `stop_at` (default: all).
inline Tape forward_eval(const Graph& g, std::span<const Tensor> inputs, Precision precision,
                         std::optional<NodeId> stop_at = std::nullopt) {
  if (inputs.size() != g.inputs().size())
    throw UsageError("graph takes " + std::to_string(g.inputs().size()) +
                     " input(s), got " + std::to_string(inputs.size()));
  const NodeId last = stop_at ? *stop_at : g.size() - 1;
  if (g.size() == 0 || last >= g.size()) throw UsageError("stop node out of range");

  Tape tape;
  tape.precision = precision;
  tape.values.resize(g.size());
  std::size_t next_input = 0;
  for (NodeId id = 0; id <= last; ++id) {
    const Node& n = g.node(id);
    if (n.op == "input") {
      const Tensor& t = inputs[next_input++];
      if (t.shape() != n.shape)
        throw EvalError(n.name, "expected input shape " + shape_string(n.shape) + ", got " +
                                    shape_string(t.shape()));
      tape.values[id] = t.as(precision);
    } else {
      std::vector<Tensor> ops = node_operands(g, tape, id);
      try {
        tape.values[id] = get_kernel(n.op).forward(ops, n.params, precision);
      } catch (const UsageError& e) {
        throw EvalError(n.name, e.what());
      }
    }
    tape.evaluated = id + 1;
  }
  return tape;
}

inline Tape forward_eval(const Graph& g, std::initializer_list<Tensor> inputs,
                         Precision precision, std::optional<NodeId> stop_at = std::nullopt) {
  return forward_eval(g, std::span<const Tensor>(inputs.begin(), inputs.size()), precision,
                      stop_at);
}

/// Reverse accumulation from several seeds at once. Returns one gradient per
/// graph entry, in Double.
inline std::vector<Tensor> backward(const Graph& g, const Tape& tape,
                                    std::span<const std::pair<NodeId, Tensor>> seeds) {
  std::vector<std::optional<Tensor>> adj(g.size());
  NodeId top = 0;
  for (const auto& [id, seed] : seeds) {
    if (!tape.covers(id)) throw UsageError("seed node " + std::to_string(id) + " is not on the tape");
    if (seed.shape() != tape.values[id].shape())
      throw UsageError("seed adjoint shape " + shape_string(seed.shape()) +
                       " does not match node shape " + shape_string(tape.values[id].shape()));
    Tensor s = seed.as(Precision::Double);
    if (adj[id]) {
      for (std::size_t i = 0; i < s.size(); ++i) (*adj[id])[i] += s[i];
    } else {
      adj[id] = std::move(s);
    }
    top = std::max(top, id);
  }
  for (NodeId id = top + 1; id-- > 0;) {
    if (!adj[id]) continue;
    const Node& n = g.node(id);
    if (n.op == "input" || n.inputs.empty()) continue;
    std::vector<Tensor> ops;
    for (NodeId i : n.inputs) ops.push_back(tape.values[i].as(Precision::Double));
    const auto grads = get_kernel(n.op).vjp(ops, n.params, *adj[id]);
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      const NodeId src = n.inputs[k];
      if (adj[src]) {
        for (std::size_t i = 0; i < grads[k].size(); ++i) (*adj[src])[i] += grads[k][i];
      } else {
        adj[src] = grads[k];
      }
    }
  }
  std::vector<Tensor> out;
  for (NodeId id : g.inputs())
    out.push_back(adj[id] ? *adj[id] : Tensor::zeros(g.node(id).shape));
  return out;
}

inline std::vector<Tensor> backward(const Graph& g, const Tape& tape, NodeId seed_node,
                                    const Tensor& seed_adjoint) {
  const std::pair<NodeId, Tensor> seed{seed_node, seed_adjoint};
  return backward(g, tape, std::span(&seed, 1));
}

/// Central differences of sum(seed_node) with respect to every entry
/// element, in Double. nullopt when any perturbed evaluation is non-finite.
inline std::optional<std::vector<Tensor>> finite_diff_grad(const Graph& g,
                                                           std::span<const Tensor> inputs,
                                                           NodeId seed_node, double h = 1e-5) {
  std::vector<Tensor> x;
  for (const auto& t : inputs) x.push_back(t.as(Precision::Double));
  auto objective = [&]() -> std::optional<double> {
    const Tape t = forward_eval(g, x, Precision::Double, seed_node);
    const Tensor& v = t.value(seed_node);
    if (!v.all_finite()) return std::nullopt;
    double s = 0;
    for (double e : v.values()) s += e;
    return s;
  };
  std::vector<Tensor> grads;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Tensor gk = Tensor::zeros(x[k].shape());
    for (std::size_t i = 0; i < x[k].size(); ++i) {
      const double orig = x[k][i];
      x[k][i] = orig + h;
      const auto up = objective();
      x[k][i] = orig - h;
      const auto down = objective();
      x[k][i] = orig;
      if (!up || !down) return std::nullopt;
      gk[i] = (*up - *down) / (2 * h);
    }
    grads.push_back(std::move(gk));
  }
  return grads;
}

}  // namespace saf
