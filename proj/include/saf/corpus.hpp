// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "saf/program.hpp"

namespace saf {

/// Benchmark programs as (file stem, JSON text). Each seeded program names
/// the node where its bug surfaces and the failure class it produces.
inline const std::vector<std::pair<std::string_view, std::string_view>>& corpus_sources() {
  static const std::vector<std::pair<std::string_view, std::string_view>> kSources = {
      {"exp_overflow", R"({
  "format_version": 1,
  "name": "exp_overflow",
  "description": "Positive classifier margins sharpened and exponentiated without a max shift.",
  "inputs": [{"id": "margins", "shape": [3, 3], "bounds": [25, "inf"]}],
  "nodes": [
    {"id": "z", "op": "scale", "inputs": ["margins"], "params": {"factor": 1.5}},
    {"id": "e", "op": "exp", "inputs": ["z"]}
  ],
  "output": "e",
  "expected_bug": {"site": "e", "failure_class": "NaNorINF", "note": "INF in exp"}
})"},
      {"log_small_prob", R"({
  "format_version": 1,
  "name": "log_small_prob",
  "description": "Log of a sigmoid probability that underflows to zero.",
  "inputs": [{"id": "x", "shape": [3, 3]}],
  "nodes": [
    {"id": "p", "op": "sigmoid", "inputs": ["x"]},
    {"id": "logp", "op": "log", "inputs": ["p"]}
  ],
  "output": "logp",
  "expected_bug": {"site": "logp", "failure_class": "NaNorINF", "note": "-INF in log for very small probabilities"}
})"},
      {"softmax_nan", R"({
  "format_version": 1,
  "name": "softmax_nan",
  "description": "Unshifted softmax over raw scores.",
  "inputs": [{"id": "scores", "shape": [3, 3]}],
  "nodes": [{"id": "probs", "op": "softmax", "inputs": ["scores"]}],
  "output": "probs",
  "expected_bug": {"site": "probs", "failure_class": "NaNorINF", "note": "NaN in softmax"}
})"},
      {"matmul_overflow", R"({
  "format_version": 1,
  "name": "matmul_overflow",
  "description": "Product of two unnormalized weight matrices.",
  "inputs": [{"id": "a", "shape": [3, 3]}, {"id": "b", "shape": [3, 3]}],
  "nodes": [{"id": "ab", "op": "matmul", "inputs": ["a", "b"]}],
  "output": "ab",
  "expected_bug": {"site": "ab", "failure_class": "NaNorINF", "note": "NaN in matmul caused by overflow"}
})"},
      {"l2_norm_overflow", R"({
  "format_version": 1,
  "name": "l2_norm_overflow",
  "description": "Naive L2 norm: square, sum, square root.",
  "inputs": [{"id": "v", "shape": [3, 3]}],
  "nodes": [
    {"id": "sq", "op": "square", "inputs": ["v"]},
    {"id": "total", "op": "sum", "inputs": ["sq"]},
    {"id": "norm", "op": "sqrt", "inputs": ["total"]}
  ],
  "output": "norm",
  "expected_bug": {"site": "sq", "failure_class": "NaNorINF", "note": "NaN in L2 norm caused by overflow"}
})"},
      {"power_overflow", R"({
  "format_version": 1,
  "name": "power_overflow",
  "description": "Cubic feature expansion.",
  "inputs": [{"id": "x", "shape": [3, 3]}],
  "nodes": [{"id": "cube", "op": "pow", "inputs": ["x"], "params": {"exponent": 3}}],
  "output": "cube",
  "expected_bug": {"site": "cube", "failure_class": "NaNorINF", "note": "NaN in power caused by overflow"}
})"},
      {"cosine_inconsistency", R"({
  "format_version": 1,
  "name": "cosine_inconsistency",
  "description": "Row-wise cosine similarity between embeddings and tiny positive attention weights.",
  "inputs": [
    {"id": "u", "shape": [3, 3], "bounds": [-10000, 10000]},
    {"id": "w", "shape": [3, 3], "bounds": [1e-12, 1e-6]}
  ],
  "nodes": [{"id": "sim", "op": "cosine_similarity", "inputs": ["u", "w"], "params": {"eps": 1e-8}}],
  "output": "sim",
  "expected_bug": {"site": "sim", "failure_class": "ReferenceMismatch", "note": "Inconsistency for cosine similarity"}
})"},
      {"division_blowup", R"({
  "format_version": 1,
  "name": "division_blowup",
  "description": "Normalization by a sum that can cancel to zero.",
  "inputs": [{"id": "x", "shape": [3, 3]}],
  "nodes": [
    {"id": "s", "op": "sum", "inputs": ["x"]},
    {"id": "ratio", "op": "div", "inputs": ["x", "s"]}
  ],
  "output": "ratio",
  "expected_bug": {"site": "ratio", "failure_class": "NaNorINF", "note": "INF in division by a vanishing sum"}
})"},
      {"remainder_width", R"({
  "format_version": 1,
  "name": "remainder_width",
  "description": "Bucketing large identifiers with a remainder.",
  "inputs": [{"id": "ids", "shape": [3, 3], "bounds": [0, "inf"]}],
  "nodes": [{"id": "bucket", "op": "remainder", "inputs": ["ids"], "params": {"divisor": 53}}],
  "output": "bucket",
  "expected_bug": {"site": "bucket", "failure_class": "WidthMismatch", "note": "Precision loss in remainder"}
})"},
      {"cosine_transport", R"({
  "format_version": 1,
  "name": "cosine_transport",
  "description": "Transport cost between a source and a target built on cosine similarity.",
  "inputs": [
    {"id": "x", "shape": [3], "bounds": [1000, 10000]},
    {"id": "y", "shape": [3], "bounds": [1e-12, 1e-6]}
  ],
  "nodes": [
    {"id": "dist", "op": "cosine_similarity", "inputs": ["x", "y"], "params": {"eps": 1e-8}},
    {"id": "neg", "op": "scale", "inputs": ["dist"], "params": {"factor": -10}},
    {"id": "p", "op": "exp", "inputs": ["neg"]},
    {"id": "total", "op": "sum", "inputs": ["p"]},
    {"id": "plan", "op": "div", "inputs": ["p", "total"]},
    {"id": "one", "op": "constant", "params": {"value": 1, "shape": [1]}},
    {"id": "cost", "op": "sub", "inputs": ["one", "dist"]}
  ],
  "output": "cost",
  "expected_bug": {"site": "dist", "failure_class": "ReferenceMismatch", "note": "Clamped norm changes the transport cost"}
})"},
      {"clean_sigmoid", R"({
  "format_version": 1,
  "name": "clean_sigmoid",
  "description": "Sigmoid of normalized pixels; no reachable failure.",
  "inputs": [{"id": "pixels", "shape": [3, 3], "bounds": [0, 1]}],
  "nodes": [{"id": "act", "op": "sigmoid", "inputs": ["pixels"]}],
  "output": "act"
})"},
  };
  return kSources;
}

inline std::vector<ProgramSpec> corpus_manifest() {
  std::vector<ProgramSpec> out;
  for (const auto& [name, text] : corpus_sources()) out.push_back(program_parse_text(text));
  return out;
}

}  // namespace saf
