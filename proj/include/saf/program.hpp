// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "saf/error.hpp"
#include "saf/graph.hpp"
#include "saf/oracles.hpp"
#include "saf/tensor.hpp"

namespace saf {

inline constexpr int kProgramFormatVersion = 1;

struct ProgramInput {
  std::string id;
  Shape shape;
  /// Element domain; initial inputs are drawn from it and mutations stay
  /// inside it.
  std::optional<std::pair<double, double>> bounds;
};

/// Seeded bug annotation carried by corpus programs.
struct ExpectedBug {
  std::string site;
  FailureClass failure_class = FailureClass::NaNorINF;
  std::string note;
};

struct ProgramSpec {
  std::string name;
  std::string description;
  std::vector<ProgramInput> inputs;
  Graph graph;
  std::optional<ExpectedBug> expected;
};

namespace detail {

inline std::pair<double, double> parse_input_bounds(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("bounds must be [lo, hi]");
  const double lo = json_bound(j[0], 0), hi = json_bound(j[1], 0);
  if (!(lo <= hi)) throw ParseError("bounds need lo <= hi");
  return {lo, hi};
}

/// Deterministic probe values used to check shapes at parse time.
inline std::vector<Tensor> probe_inputs(const std::vector<ProgramInput>& inputs) {
  std::mt19937_64 rng(0);
  std::vector<Tensor> out;
  for (const auto& in : inputs) {
    double lo = 0.5, hi = 1.5;
    if (in.bounds) {
      lo = std::isfinite(in.bounds->first) ? in.bounds->first : std::min(in.bounds->second, 0.5);
      hi = std::isfinite(in.bounds->second) ? in.bounds->second : lo + 1;
    }
    std::uniform_real_distribution<double> u(lo, hi);
    Tensor t = Tensor::zeros(in.shape);
    for (auto& v : t.mutable_values()) v = lo == hi ? lo : u(rng);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

/// Validates `doc` and builds its graph. Nodes may be listed in any order;
/// they are added in dependency order and cycles are rejected.
inline ProgramSpec program_from_json(const nlohmann::json& doc) {
  ProgramSpec p;
  std::string where = "program";
  try {
    const int v = doc.at("format_version").get<int>();
    if (v != kProgramFormatVersion)
      throw FormatVersionError("program format_version " + std::to_string(v) + " is not supported");
    p.name = doc.at("name").get<std::string>();
    p.description = doc.value("description", "");

    std::map<std::string, NodeId> ids;
    for (const auto& ji : doc.at("inputs")) {
      ProgramInput in;
      in.id = ji.at("id").get<std::string>();
      where = "input '" + in.id + "'";
      in.shape = ji.at("shape").get<Shape>();
      if (in.shape.empty() || shape_size(in.shape) == 0) throw ParseError("shape must be non-empty");
      if (ji.contains("bounds")) in.bounds = detail::parse_input_bounds(ji.at("bounds"));
      if (ids.count(in.id)) throw ParseError("duplicate id");
      ids[in.id] = p.graph.add_input(in.id, in.shape);
      p.inputs.push_back(std::move(in));
    }

    const auto& nodes = doc.at("nodes");
    std::map<std::string, const nlohmann::json*> pending;
    std::vector<std::string> order;
    for (const auto& jn : nodes) {
      const std::string id = jn.at("id").get<std::string>();
      where = "node '" + id + "'";
      if (ids.count(id) || pending.count(id)) throw ParseError("duplicate id");
      const std::string op = jn.at("op").get<std::string>();
      if (!find_kernel(op)) throw ParseError("unknown op '" + op + "'");
      pending[id] = &jn;
      order.push_back(id);
    }
    // Repeatedly add nodes whose operands exist; leftovers form a cycle or
    // point at missing ids.
    while (!pending.empty()) {
      bool progressed = false;
      for (const auto& id : order) {
        auto it = pending.find(id);
        if (it == pending.end()) continue;
        const auto& jn = *it->second;
        std::vector<NodeId> args;
        bool ready = true;
        for (const auto& a : jn.value("inputs", nlohmann::json::array())) {
          const auto name = a.get<std::string>();
          auto f = ids.find(name);
          if (f == ids.end()) {
            where = "node '" + id + "'";
            if (!pending.count(name)) throw ParseError("unknown input '" + name + "'");
            ready = false;
            break;
          }
          args.push_back(f->second);
        }
        if (!ready) continue;
        where = "node '" + id + "'";
        ids[id] = p.graph.add_node(id, jn.at("op").get<std::string>(), std::move(args),
                                   jn.value("params", Params::object()));
        pending.erase(it);
        progressed = true;
      }
      if (!progressed) throw ParseError("node '" + pending.begin()->first + "': dependency cycle");
    }

    where = "program";
    const std::string out = doc.at("output").get<std::string>();
    auto o = ids.find(out);
    if (o == ids.end()) throw ParseError("output '" + out + "' is not a node");
    p.graph.set_output(o->second);

    if (doc.contains("expected_bug")) {
      const auto& e = doc.at("expected_bug");
      ExpectedBug b;
      b.site = e.at("site").get<std::string>();
      b.failure_class = parse_failure_class(e.at("failure_class").get<std::string>());
      b.note = e.value("note", "");
      if (!ids.count(b.site)) throw ParseError("expected_bug site '" + b.site + "' is not a node");
      p.expected = b;
    }
  } catch (const FormatVersionError&) {
    throw;
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    throw ParseError(msg.rfind("node '", 0) == 0 ? msg : where + ": " + msg);
  } catch (const EvalError& e) {
    throw ParseError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": " + e.what());
  } catch (const CapabilityError& e) {
    throw ParseError(where + ": " + e.what());
  }

  // Shape check: evaluate once on probe values.
  try {
    forward_eval(p.graph, detail::probe_inputs(p.inputs), Precision::Double);
  } catch (const EvalError& e) {
    throw ParseError(std::string("shape check failed at ") + e.what());
  }
  return p;
}

inline ProgramSpec program_parse_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("program: ") + e.what());
  }
  return program_from_json(doc);
}

inline ProgramSpec program_parse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open program '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return program_parse_text(ss.str());
}

inline nlohmann::ordered_json program_to_json(const ProgramSpec& p) {
  nlohmann::ordered_json j;
  j["format_version"] = kProgramFormatVersion;
  j["name"] = p.name;
  j["description"] = p.description;
  auto& ins = j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& in : p.inputs) {
    nlohmann::ordered_json ji{{"id", in.id}, {"shape", in.shape}};
    if (in.bounds) ji["bounds"] = {in.bounds->first, in.bounds->second};
    ins.push_back(ji);
  }
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : p.graph.nodes()) {
    if (n.op == "input") continue;
    nlohmann::ordered_json jn{{"id", n.name}, {"op", n.op}};
    auto& args = jn["inputs"] = nlohmann::ordered_json::array();
    for (NodeId i : n.inputs) args.push_back(p.graph.node(i).name);
    if (!n.params.empty()) jn["params"] = n.params;
    nodes.push_back(jn);
  }
  j["output"] = p.graph.node(p.graph.output()).name;
  if (p.expected)
    j["expected_bug"] = {{"site", p.expected->site},
                         {"failure_class", to_string(p.expected->failure_class)},
                         {"note", p.expected->note}};
  return j;
}

}  // namespace saf
