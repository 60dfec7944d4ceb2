// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "saf/error.hpp"
#include "saf/kernels.hpp"
#include "saf/tensor.hpp"

namespace saf {

inline constexpr int kRegistryFormatVersion = 1;

/// Closed per-element interval under which a kernel is known to be stable.
struct SafeCondition {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::string text;

  bool holds(double v) const { return v >= lo && v <= hi; }
};

enum class OracleType {
  NanInf = 1,
  Range = 2,
  Rewrite = 3,
  StableAlgorithm = 4,
  Reference = 5,
  IncreasedWidth = 6,
};

struct OracleSpec {
  OracleType type = OracleType::NanInf;
  // Range
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
  // Comparisons
  double tolerance = 1e-6;
  /// Rewrite / stable algorithm / reference implementation name.
  std::string counterpart;
  /// Increased width: "relative" or "integer".
  std::string metric = "relative";
};

struct Region {
  double lo = 0;
  double hi = 0;
};

/// Extra mutation schedule for one kernel, run in both directions.
struct MutationSpec {
  /// "exponential", "random" or "sinusoidal".
  std::string method = "random";
  double rate = 1.0;
  int max_steps = 50;
  /// Fixed step multiplier; 0 keeps the input-relative default.
  double scale = 0;
};

/// How dataset generation samples and mutates inputs for one kernel.
struct GenerationProfile {
  /// Regions shared by every operand unless `operand_regions` overrides.
  std::vector<Region> regions;
  std::vector<std::vector<Region>> operand_regions;
  /// Operand shapes relative to the trained square shape: "square", "vector"
  /// (one row), "same".
  std::vector<std::string> operand_shapes;
  /// Known failing bases. A single value fills every operand; a list gives
  /// one fill value per operand.
  std::vector<std::vector<double>> known_failures;
  Params params = Params::object();
  /// Affine map applied before featurization: (v + offset) * factor.
  double offset = 0;
  double factor = 1;
  /// Replacement for exact zeros when the kernel is undefined at 0.
  double epsilon = 0;
  /// Appended to the default schedules, e.g. fine steps around a point
  /// failure such as a zero divisor.
  std::vector<MutationSpec> mutations;
};

struct KernelSpec {
  std::string name;
  std::string category;
  std::string description;
  bool implemented = false;
  /// Executable beyond the core set (used by the stable-algorithm and
  /// increased-width oracles).
  bool extended = false;
  std::size_t arity = 1;
  std::optional<SafeCondition> safe_condition;
  std::vector<OracleSpec> oracles;
  GenerationProfile generation;

  bool executable() const { return implemented || extended; }
};

class Registry {
 public:
  Registry() = default;
  Registry(std::string version, std::vector<KernelSpec> entries)
      : version_(std::move(version)), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (!index_.emplace(entries_[i].name, i).second)
        throw ParseError("registry entry '" + entries_[i].name + "': duplicate name");
  }

  const std::string& version() const noexcept { return version_; }
  const std::vector<KernelSpec>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const KernelSpec* find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  const KernelSpec& at(std::string_view name) const {
    if (const KernelSpec* k = find(name)) return *k;
    throw CapabilityError("'" + std::string(name) + "' is not in the registry");
  }

  std::size_t implemented_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.implemented ? 1 : 0;
    return n;
  }

 private:
  std::string version_;
  std::vector<KernelSpec> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

namespace detail {

inline double json_bound(const nlohmann::json& j, double fallback) {
  if (j.is_null()) return fallback;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError("bad bound '" + s + "'");
  }
  return j.get<double>();
}

inline std::vector<Region> parse_regions(const nlohmann::json& j) {
  std::vector<Region> out;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != 2) throw ParseError("region must be [lo, hi]");
    Region reg{r[0].get<double>(), r[1].get<double>()};
    if (!(reg.lo < reg.hi)) throw ParseError("region lo must be below hi");
    out.push_back(reg);
  }
  return out;
}

inline OracleSpec parse_oracle(const nlohmann::json& j) {
  OracleSpec o;
  const int t = j.at("type").get<int>();
  if (t < 1 || t > 6) throw ParseError("unknown oracle type " + std::to_string(t));
  o.type = static_cast<OracleType>(t);
  o.lo = json_bound(j.value("lo", nlohmann::json()), o.lo);
  o.hi = json_bound(j.value("hi", nlohmann::json()), o.hi);
  o.lo_open = j.value("lo_open", false);
  o.hi_open = j.value("hi_open", false);
  o.tolerance = j.value("tolerance", 1e-6);
  o.counterpart = j.value("counterpart", "");
  o.metric = j.value("metric", "relative");
  if (o.type == OracleType::Range && !(o.lo < o.hi))
    throw ParseError("range oracle needs lo < hi");
  if (!(o.tolerance > 0)) throw ParseError("oracle tolerance must be positive");
  if (o.metric != "relative" && o.metric != "integer")
    throw ParseError("unknown width metric '" + o.metric + "'");
  const bool needs_counterpart = o.type == OracleType::Rewrite ||
                                 o.type == OracleType::StableAlgorithm ||
                                 o.type == OracleType::Reference;
  if (needs_counterpart && o.counterpart.empty())
    throw ParseError("oracle type " + std::to_string(t) + " needs a counterpart");
  return o;
}

inline KernelSpec parse_entry(const nlohmann::json& j) {
  KernelSpec k;
  k.name = j.at("name").get<std::string>();
  try {
    k.category = j.at("category").get<std::string>();
    k.description = j.value("description", "");
    k.implemented = j.value("implemented", false);
    k.extended = j.value("extended", false);
    k.arity = j.value("arity", std::size_t{1});
    if (j.contains("safe_condition")) {
      const auto& s = j.at("safe_condition");
      SafeCondition c;
      c.lo = json_bound(s.value("lo", nlohmann::json()), c.lo);
      c.hi = json_bound(s.value("hi", nlohmann::json()), c.hi);
      c.text = s.value("text", "");
      if (!(c.lo <= c.hi)) throw ParseError("safe condition needs lo <= hi");
      k.safe_condition = c;
    }
    for (const auto& o : j.at("oracle_bindings")) k.oracles.push_back(parse_oracle(o));
    if (j.contains("generation")) {
      const auto& g = j.at("generation");
      auto& p = k.generation;
      if (g.contains("regions")) p.regions = parse_regions(g.at("regions"));
      if (g.contains("operand_regions"))
        for (const auto& r : g.at("operand_regions"))
          p.operand_regions.push_back(parse_regions(r));
      if (g.contains("operand_shapes"))
        p.operand_shapes = g.at("operand_shapes").get<std::vector<std::string>>();
      if (g.contains("known_failures"))
        for (const auto& kf : g.at("known_failures")) {
          if (kf.is_number()) {
            p.known_failures.push_back({kf.get<double>()});
          } else {
            auto v = kf.get<std::vector<double>>();
            if (v.size() != k.arity) throw ParseError("known failure needs one value per operand");
            p.known_failures.push_back(std::move(v));
          }
        }
      if (g.contains("params")) p.params = g.at("params");
      p.offset = g.value("offset", 0.0);
      p.factor = g.value("factor", 1.0);
      p.epsilon = g.value("epsilon", 0.0);
      if (g.contains("mutations"))
        for (const auto& jm : g.at("mutations")) {
          MutationSpec m;
          m.method = jm.value("method", "random");
          m.rate = jm.value("rate", 1.0);
          m.max_steps = jm.value("max_steps", 50);
          m.scale = jm.value("scale", 0.0);
          if (m.method != "exponential" && m.method != "random" && m.method != "sinusoidal")
            throw ParseError("unknown mutation method '" + m.method + "'");
          if (!(m.rate > 0) || m.max_steps < 1 || m.scale < 0)
            throw ParseError("mutation needs rate > 0, max_steps >= 1, scale >= 0");
          p.mutations.push_back(m);
        }
      if (!(p.factor > 0)) throw ParseError("scale factor must be positive");
    }
  } catch (const ParseError& e) {
    throw ParseError("registry entry '" + k.name + "': " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("registry entry '" + k.name + "': " + e.what());
  }
  if (k.executable()) {
    if (find_kernel(k.name) == nullptr)
      throw ParseError("registry entry '" + k.name + "': no executable kernel");
    if (k.oracles.empty())
      throw ParseError("registry entry '" + k.name + "': no oracle binding");
  }
  return k;
}

}  // namespace detail

inline Registry registry_from_json(const nlohmann::json& doc) {
  try {
    const int v = doc.at("format_version").get<int>();
    if (v != kRegistryFormatVersion)
      throw FormatVersionError("registry format_version " + std::to_string(v) +
                               " is not supported");
    std::vector<KernelSpec> entries;
    for (const auto& e : doc.at("functions")) entries.push_back(detail::parse_entry(e));
    return Registry(doc.at("registry_version").get<std::string>(), std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("registry: ") + e.what());
  }
}

inline Registry registry_parse(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("registry: ") + e.what());
  }
  return registry_from_json(doc);
}

inline Registry registry_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open registry file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return registry_parse(ss.str());
}

/// True iff every element of `input` satisfies the kernel's safe condition.
inline bool safe_condition_check(const Registry& reg, std::string_view name,
                                 const Tensor& input) {
  const KernelSpec& k = reg.at(name);
  if (!k.safe_condition)
    throw CapabilityError("'" + k.name + "' has no recorded safe condition");
  for (double v : input.values())
    if (!k.safe_condition->holds(v)) return false;
  return true;
}

}  // namespace saf
