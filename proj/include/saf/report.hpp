// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "saf/error.hpp"
#include "saf/fuzz.hpp"
#include "saf/oracles.hpp"
#include "saf/program.hpp"
#include "saf/tensor.hpp"

namespace saf {

inline constexpr int kReportFormatVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

/// One fuzzed site under one seed.
struct ReportEntry {
  std::string program;
  std::string site;
  std::string kernel;
  std::uint64_t seed = 0;
  FuzzStatus status = FuzzStatus::Exhausted;
  std::optional<FailureClass> failure_class;
  std::string detail;
  /// Program inputs that trigger the failure, in declaration order.
  std::optional<std::vector<Tensor>> failing_input;
  std::size_t iterations = 0;
  std::size_t sa_queries = 0;
  std::size_t resets = 0;
  double wall_time_s = 0;
  /// Annotated class when this site carries the program's seeded bug.
  std::optional<FailureClass> expected;
  std::vector<std::string> diagnostics;

  bool matched() const { return expected && status == FuzzStatus::Found && failure_class == expected; }
};

struct ReportTotals {
  std::size_t sites = 0;
  std::size_t bugs_found = 0;
  /// Mean wall time over Found entries; 0 when nothing was found.
  double average_time_s = 0;
};

struct Report {
  std::string tool_version{kToolVersion};
  std::string registry_version;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<ReportEntry> entries;
  /// Program-level notes such as sites skipped for want of a model.
  std::vector<std::string> diagnostics;

  ReportTotals totals() const {
    ReportTotals t;
    t.sites = entries.size();
    double time = 0;
    for (const auto& e : entries)
      if (e.status == FuzzStatus::Found) {
        ++t.bugs_found;
        time += e.wall_time_s;
      }
    if (t.bugs_found) t.average_time_s = time / static_cast<double>(t.bugs_found);
    return t;
  }
};

inline nlohmann::ordered_json fuzz_config_to_json(const FuzzConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"seed", c.seed},
          {"timeout_s", c.timeout_s},
          {"rate", c.rate},
          {"eps_grad", c.eps_grad},
          {"max_resets", c.max_resets},
          {"max_iterations", c.max_iterations},
          {"use_history", c.use_history},
          {"rate_growth", c.rate_growth},
          {"scale_features", c.scale_features},
          {"history_size", c.history_size}};
}

/// Appends the results of one program run under `seed`.
inline void report_add(Report& r, const ProgramSpec& p, const ProgramRun& run, std::uint64_t seed) {
  for (const auto& d : run.diagnostics) r.diagnostics.push_back(p.name + ": " + d);
  for (const auto& res : run.results) {
    ReportEntry e;
    e.program = p.name;
    e.site = res.site.name;
    e.kernel = res.site.kernel;
    e.seed = seed;
    e.status = res.status;
    if (res.verdict) {
      e.failure_class = res.verdict->failure_class;
      e.detail = res.verdict->detail.message;
    }
    e.failing_input = res.failing_input;
    e.iterations = res.iterations;
    e.sa_queries = res.sa_queries;
    e.resets = res.resets;
    e.wall_time_s = res.wall_time_s;
    if (p.expected && p.expected->site == res.site.name) e.expected = p.expected->failure_class;
    e.diagnostics = res.diagnostics;
    r.entries.push_back(std::move(e));
  }
}

namespace detail {

/// Numbers as JSON numbers; non-finite values as "inf", "-inf" or "nan".
inline nlohmann::ordered_json encode_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double decode_double(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "nan") return std::numeric_limits<double>::quiet_NaN();
  return json_bound(j, 0);
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const Report& r) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["format_version"] = kReportFormatVersion;
  j["tool_version"] = r.tool_version;
  j["registry_version"] = r.registry_version;
  j["config"] = r.config;
  auto& entries = j["entries"] = oj::array();
  for (const auto& e : r.entries) {
    oj je;
    je["program"] = e.program;
    je["site"] = e.site;
    je["kernel"] = e.kernel;
    je["seed"] = e.seed;
    je["status"] = to_string(e.status);
    je["failure_class"] = e.failure_class ? oj(to_string(*e.failure_class)) : oj();
    je["detail"] = e.detail;
    if (e.failing_input) {
      auto& in = je["failing_input"] = oj::array();
      for (const auto& t : *e.failing_input) {
        auto& vals = (in.emplace_back(oj{{"shape", t.shape()}, {"values", oj::array()}}))["values"];
        for (double v : t.values()) vals.push_back(detail::encode_double(v));
      }
    } else {
      je["failing_input"] = nullptr;
    }
    je["iterations"] = e.iterations;
    je["sa_queries"] = e.sa_queries;
    je["resets"] = e.resets;
    je["wall_time_s"] = e.wall_time_s;
    je["expected_failure_class"] = e.expected ? oj(to_string(*e.expected)) : oj();
    je["matched"] = e.expected ? oj(e.matched()) : oj();
    je["diagnostics"] = e.diagnostics;
    entries.push_back(std::move(je));
  }
  j["diagnostics"] = r.diagnostics;
  const ReportTotals t = r.totals();
  j["totals"] = {{"sites", t.sites}, {"bugs_found", t.bugs_found}, {"average_time_s", t.average_time_s}};
  return j;
}

/// Inverse of report_to_json. Stored totals must agree with the entries.
inline Report report_from_json(const nlohmann::ordered_json& j) {
  Report r;
  try {
    const int v = j.at("format_version").get<int>();
    if (v != kReportFormatVersion)
      throw FormatVersionError("report format_version " + std::to_string(v) + " is not supported");
    r.tool_version = j.at("tool_version").get<std::string>();
    r.registry_version = j.at("registry_version").get<std::string>();
    r.config = j.at("config");
    for (const auto& je : j.at("entries")) {
      ReportEntry e;
      e.program = je.at("program").get<std::string>();
      e.site = je.at("site").get<std::string>();
      e.kernel = je.at("kernel").get<std::string>();
      e.seed = je.at("seed").get<std::uint64_t>();
      const auto status = je.at("status").get<std::string>();
      if (status != "Found" && status != "Exhausted") throw ParseError("unknown status '" + status + "'");
      e.status = status == "Found" ? FuzzStatus::Found : FuzzStatus::Exhausted;
      if (!je.at("failure_class").is_null())
        e.failure_class = parse_failure_class(je.at("failure_class").get<std::string>());
      e.detail = je.at("detail").get<std::string>();
      if (!je.at("failing_input").is_null()) {
        std::vector<Tensor> in;
        for (const auto& jt : je.at("failing_input")) {
          std::vector<double> vals;
          for (const auto& v : jt.at("values")) vals.push_back(detail::decode_double(v));
          in.emplace_back(jt.at("shape").get<Shape>(), std::move(vals));
        }
        e.failing_input = std::move(in);
      }
      e.iterations = je.at("iterations").get<std::size_t>();
      e.sa_queries = je.at("sa_queries").get<std::size_t>();
      e.resets = je.at("resets").get<std::size_t>();
      e.wall_time_s = je.at("wall_time_s").get<double>();
      if (!je.at("expected_failure_class").is_null())
        e.expected = parse_failure_class(je.at("expected_failure_class").get<std::string>());
      e.diagnostics = je.at("diagnostics").get<std::vector<std::string>>();
      r.entries.push_back(std::move(e));
    }
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    const auto& jt = j.at("totals");
    const ReportTotals t = r.totals();
    if (jt.at("sites").get<std::size_t>() != t.sites || jt.at("bugs_found").get<std::size_t>() != t.bugs_found)
      throw ParseError("report totals disagree with its entries");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  } catch (const UsageError& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return r;
}

inline std::string report_dump(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

/// The report with every wall-clock field zeroed; two runs with the same
/// seeds must agree on this text byte for byte.
inline std::string report_dump_untimed(Report r) {
  for (auto& e : r.entries) e.wall_time_s = 0;
  return report_dump(r);
}

inline void report_emit(const Report& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << report_dump(r);
  if (!out) throw IoError("failed writing report '" + path + "'");
}

inline Report report_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace saf
