// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "saf/dataset.hpp"
#include "saf/forest.hpp"
#include "saf/graph.hpp"
#include "saf/oracles.hpp"
#include "saf/program.hpp"
#include "saf/registry.hpp"

namespace saf {

struct UnstableSite {
  NodeId node = 0;
  std::string name;
  std::string kernel;
  std::vector<Shape> entry_shapes;
};

struct ScanResult {
  std::vector<UnstableSite> sites;
  /// Registry matches without an executable kernel, and similar notes.
  std::vector<std::string> diagnostics;
};

/// Nodes whose op is a registry entry, in topological order.
inline ScanResult scan_for_unstable(const ProgramSpec& p, const Registry& reg) {
  ScanResult r;
  const Graph& g = p.graph;
  const auto probe = forward_eval(g, detail::probe_inputs(p.inputs), Precision::Double);
  for (NodeId id = 0; id < g.size(); ++id) {
    const Node& n = g.node(id);
    const KernelSpec* k = reg.find(n.op);
    if (k == nullptr) continue;
    if (!k->executable()) {
      r.diagnostics.push_back("node '" + n.name + "': '" + n.op + "' is listed but not implemented");
      continue;
    }
    UnstableSite s{id, n.name, n.op, {}};
    for (NodeId i : n.inputs) s.entry_shapes.push_back(probe.value(i).shape());
    r.sites.push_back(std::move(s));
  }
  return r;
}

enum class FuzzMode { Guided, Random };
enum class FuzzStatus { Found, Exhausted };

inline std::string_view to_string(FuzzStatus s) { return s == FuzzStatus::Found ? "Found" : "Exhausted"; }
inline std::string_view to_string(FuzzMode m) { return m == FuzzMode::Guided ? "guided" : "random"; }

struct FuzzConfig {
  double timeout_s = 1800;
  double rate = 1.0;
  std::uint64_t seed = 42;
  double eps_grad = 1e-6;
  std::size_t max_resets = 50;
  /// Iteration budget per site; keeps runs reproducible when the timer
  /// would otherwise decide.
  std::size_t max_iterations = 10000;
  bool use_history = true;
  /// Rate multiplier while the signal repeats; 1 disables growth.
  double rate_growth = 2.0;
  /// Featurize site values with the forest's training scaling.
  bool scale_features = true;
  FuzzMode mode = FuzzMode::Guided;
  std::size_t history_size = 32;

  void validate() const {
    if (!(timeout_s > 0)) throw UsageError("timeout must be positive");
    if (!(eps_grad > 0)) throw UsageError("gradient floor must be positive");
    if (!(rate > 0)) throw UsageError("rate must be positive");
    if (!(rate_growth >= 1)) throw UsageError("rate growth must be at least 1");
  }
};

/// Per-element limits over every program input, initially unbounded.
struct Bounds {
  std::vector<std::vector<double>> lower;
  std::vector<std::vector<double>> upper;

  static Bounds unbounded(const std::vector<Tensor>& x) {
    Bounds b;
    for (const auto& t : x) {
      b.lower.emplace_back(t.size(), -std::numeric_limits<double>::infinity());
      b.upper.emplace_back(t.size(), std::numeric_limits<double>::infinity());
    }
    return b;
  }
};

struct HistoryEntry {
  std::vector<Tensor> snapshot;
  SASignal direction = SASignal::NoChange;
  /// Oracle outcome when this point was validated.
  std::optional<bool> failed;
};

/// Gradient of the sum of the site's entry values with respect to every
/// program input, from a Double tape.
inline std::vector<Tensor> site_entry_gradient(const Graph& g, const Tape& tape, NodeId site) {
  std::vector<std::pair<NodeId, Tensor>> seeds;
  for (NodeId i : g.node(site).inputs) seeds.emplace_back(i, Tensor::filled(tape.value(i).shape(), 1.0));
  return backward(g, tape, seeds);
}

/// dx = s * rate / clamp(g) with clamp(g) = sign(g) * max(|g|, eps) and
/// sign(0) = +1. Non-finite gradient elements count as zero.
inline std::vector<Tensor> step_from_gradient(const std::vector<Tensor>& grad, SASignal signal, double rate,
                                              double eps_grad) {
  if (signal == SASignal::NoChange) throw UsageError("NoChange carries no direction");
  const double s = signal == SASignal::Increase ? 1.0 : -1.0;
  std::vector<Tensor> dx;
  for (const auto& gk : grad) {
    Tensor d = Tensor::zeros(gk.shape());
    for (std::size_t i = 0; i < gk.size(); ++i) {
      double gv = gk[i];
      if (std::isnan(gv)) gv = 0;
      const double mag = std::max(std::abs(gv), eps_grad);
      d[i] = s * rate / (gv < 0 ? -mag : mag);
    }
    dx.push_back(std::move(d));
  }
  return dx;
}

inline std::vector<Tensor> propagate_signal(const Graph& g, const Tape& tape, NodeId site, SASignal signal,
                                            double rate, double eps_grad) {
  if (!tape.covers(site)) throw UsageError("tape does not reach the site");
  return step_from_gradient(site_entry_gradient(g, tape, site), signal, rate, eps_grad);
}

/// Bound offset for a strict interior clamp next to `bound`.
inline double interior_margin(double bound) { return 1e-9 * std::max(1.0, std::abs(bound)); }

/// Records the move direction in the bounds, then picks the next point:
/// the midpoint where both bounds are finite, otherwise x + dx kept strictly
/// inside the finite bound.
inline std::vector<Tensor> constrain_update(const std::vector<Tensor>& x, const std::vector<Tensor>& dx,
                                            Bounds& b) {
  std::vector<Tensor> out = x;
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t i = 0; i < x[k].size(); ++i) {
      double& lo = b.lower[k][i];
      double& hi = b.upper[k][i];
      const double v = x[k][i], d = dx[k][i];
      if (d > 0) lo = std::max(lo, v);
      if (d < 0) hi = std::min(hi, v);
      double c = v + d;
      if (lo > hi) {
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
      } else if (std::isfinite(lo) && std::isfinite(hi)) {
        c = lo / 2 + hi / 2;
      } else if (std::isfinite(lo) && c <= lo) {
        c = lo + interior_margin(lo);
      } else if (std::isfinite(hi) && c >= hi) {
        c = hi - interior_margin(hi);
      }
      out[k][i] = c;
    }
  return out;
}

/// Runs the program through `site` and applies the site kernel's oracles to
/// the Single-precision entry values; the increased-width oracle gets the
/// Double entry values.
inline OracleRun validate_failure(const ProgramSpec& p, NodeId site, const std::vector<Tensor>& x,
                                  const Registry& reg = default_registry()) {
  const Node& n = p.graph.node(site);
  const Tape single = forward_eval(p.graph, x, Precision::Single, site);
  const Tape wide = forward_eval(p.graph, x, Precision::Double, site);
  return run_oracles(reg.at(n.op), node_operands(p.graph, single, site), n.params,
                     node_operands(p.graph, wide, site));
}

/// Fresh input drawn from each input's declared bounds, else U(-10, 10).
inline std::vector<Tensor> initial_input(const ProgramSpec& p, std::mt19937_64& rng) {
  std::vector<Tensor> x;
  for (const auto& in : p.inputs) {
    double lo = -10, hi = 10;
    if (in.bounds) {
      const auto [blo, bhi] = *in.bounds;
      if (std::isfinite(blo) && std::isfinite(bhi)) {
        lo = blo;
        hi = bhi;
      } else if (std::isfinite(blo)) {
        lo = std::max(blo, -10.0);
        hi = std::max(lo + 20, 10.0);
      } else if (std::isfinite(bhi)) {
        hi = std::min(bhi, 10.0);
        lo = std::min(hi - 20, -10.0);
      }
    }
    std::uniform_real_distribution<double> u(lo, hi);
    Tensor t = Tensor::zeros(in.shape);
    for (auto& v : t.mutable_values()) v = lo == hi ? lo : u(rng);
    x.push_back(std::move(t));
  }
  return x;
}

struct FuzzResult {
  UnstableSite site;
  FuzzStatus status = FuzzStatus::Exhausted;
  std::optional<std::vector<Tensor>> failing_input;
  std::optional<OracleVerdict> verdict;
  std::size_t iterations = 0;
  double wall_time_s = 0;
  std::size_t sa_queries = 0;
  std::size_t resets = 0;
  std::vector<std::string> diagnostics;
};

/// Searches one site for a failure-inducing program input.
inline FuzzResult fuzz_site(const ProgramSpec& p, const UnstableSite& site, const Forest* forest,
                            const FuzzConfig& cfg, std::mt19937_64& rng,
                            std::optional<std::vector<Tensor>> start = std::nullopt,
                            const Registry& reg = default_registry()) {
  cfg.validate();
  const Graph& g = p.graph;
  FuzzResult r;
  r.site = site;
  const bool guided = cfg.mode == FuzzMode::Guided;
  if (guided && forest == nullptr) throw UsageError("guided search needs a forest");
  if (guided && forest->kernel != site.kernel)
    throw UsageError("forest for '" + forest->kernel + "' cannot guide a '" + site.kernel + "' site");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  std::vector<Tensor> x = start ? *start : initial_input(p, rng);
  Bounds bounds = Bounds::unbounded(x);
  std::deque<HistoryEntry> history;
  double rate = cfg.rate;
  // Largest rate since the last fresh start; escapes resume above it.
  double peak_rate = cfg.rate;
  std::optional<SASignal> last;
  std::bernoulli_distribution coin(0.5);

  // Fresh start; false once the reset budget is spent.
  auto reset = [&](const char* why) {
    ++r.resets;
    if (r.resets > cfg.max_resets) {
      r.diagnostics.push_back(std::string("reset budget spent (last: ") + why + ")");
      return false;
    }
    x = initial_input(p, rng);
    bounds = Bounds::unbounded(x);
    history.clear();
    rate = peak_rate = cfg.rate;
    last.reset();
    return true;
  };
  // The bracket closed without a NoChange: the signals disagree around x.
  // Drop the bounds and keep searching from x with a larger step.
  auto escape = [&] {
    ++r.resets;
    if (r.resets > cfg.max_resets) {
      r.diagnostics.push_back("reset budget spent (last: bracket collapsed)");
      return false;
    }
    bounds = Bounds::unbounded(x);
    peak_rate = std::min(peak_rate * std::max(cfg.rate_growth, 2.0), 1e300);
    rate = peak_rate;
    last.reset();
    return true;
  };

  for (;;) {
    if (r.iterations >= cfg.max_iterations) {
      r.diagnostics.push_back("iteration budget spent");
      break;
    }
    if (elapsed() > cfg.timeout_s) {
      r.diagnostics.push_back("timeout");
      break;
    }
    ++r.iterations;

    std::vector<Tensor> entry;
    try {
      const Tape single = forward_eval(g, x, Precision::Single, site.node);
      entry = node_operands(g, single, site.node);
    } catch (const EvalError& e) {
      r.diagnostics.push_back(e.what());
      break;
    }

    SASignal signal;
    bool validate = true;
    if (guided) {
      const auto features =
          featurize_operands(entry, forest->feature_len, cfg.scale_features ? forest->scaling : Scaling{});
      if (features.size() != forest->input_len()) {
        r.diagnostics.push_back("site arity does not match the forest");
        break;
      }
      signal = predict(*forest, features);
      ++r.sa_queries;
      validate = signal == SASignal::NoChange;
    } else {
      signal = coin(rng) ? SASignal::Increase : SASignal::Decrease;
    }

    if (validate) {
      OracleRun run = validate_failure(p, site.node, x, reg);
      if (!history.empty()) history.back().failed = run.verdict.failed();
      if (run.verdict.failed()) {
        r.status = FuzzStatus::Found;
        r.failing_input = x;
        r.verdict = run.verdict;
        break;
      }
      if (guided) {
        if (!reset("misprediction")) break;
        continue;
      }
    }

    if (last) rate = *last == signal ? std::min(rate * cfg.rate_growth, 1e300) : cfg.rate;
    last = signal;
    peak_rate = std::max(peak_rate, rate);
    const Tape wide = forward_eval(g, x, Precision::Double, site.node);
    const auto dx = propagate_signal(g, wide, site.node, signal, rate, cfg.eps_grad);
    std::vector<Tensor> next;
    if (cfg.use_history) {
      next = constrain_update(x, dx, bounds);
    } else {
      next = x;
      for (std::size_t k = 0; k < x.size(); ++k)
        for (std::size_t i = 0; i < x[k].size(); ++i) next[k][i] += dx[k][i];
    }
    bool at_domain_edge = false;
    for (std::size_t k = 0; k < next.size(); ++k) {
      const auto& dom = p.inputs[k].bounds;
      for (auto& v : next[k].mutable_values()) {
        const double raw = v;
        if (dom) v = std::clamp(v, dom->first, dom->second);
        v = std::clamp(v, -1e300, 1e300);
        at_domain_edge = at_domain_edge || v != raw;
      }
    }
    bool moved = false, bracketed = false;
    for (std::size_t k = 0; k < next.size(); ++k)
      for (std::size_t i = 0; i < next[k].size(); ++i) {
        moved = moved || std::abs(next[k][i] - x[k][i]) > 1e-12 * std::max(1.0, std::abs(x[k][i]));
        bracketed = bracketed || std::isfinite(bounds.lower[k][i]) || std::isfinite(bounds.upper[k][i]);
      }
    if (!moved) {
      // A signal that points out of the input domain cannot be followed
      // from here; start elsewhere.
      const bool ok = at_domain_edge ? reset("signal leaves the input domain")
                                     : (bracketed ? escape() : reset("no progress"));
      if (!ok) break;
      continue;
    }
    if (cfg.use_history) {
      history.push_back({x, signal, std::nullopt});
      if (history.size() > cfg.history_size) history.pop_front();
    }
    x = std::move(next);
  }
  r.wall_time_s = elapsed();
  return r;
}

/// Forests by kernel and shape class, loaded on demand from a directory of
/// `<kernel>_<shape>.json` files or added in memory.
class ModelStore {
 public:
  ModelStore() = default;
  explicit ModelStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(Forest f) {
    const std::string key = model_file_name(f.kernel, f.shape);
    cache_[key] = std::make_shared<Forest>(std::move(f));
  }

  /// Forest whose shape class matches `shape`, else the 3x3 forest.
  const Forest* find(const std::string& kernel, const Shape& shape) {
    if (const Forest* f = lookup(model_file_name(kernel, shape))) return f;
    return lookup(model_file_name(kernel, {3, 3}));
  }

 private:
  const Forest* lookup(const std::string& key) {
    if (auto it = cache_.find(key); it != cache_.end()) return it->second.get();
    if (dir_.empty() || !std::filesystem::exists(dir_ / key)) return nullptr;
    auto f = std::make_shared<Forest>(model_load((dir_ / key).string()));
    return (cache_[key] = std::move(f)).get();
  }

  std::filesystem::path dir_;
  std::map<std::string, std::shared_ptr<Forest>> cache_;
};

struct ProgramRun {
  std::string program;
  std::vector<FuzzResult> results;
  std::vector<std::string> diagnostics;
};

/// Independent RNG stream for site `index` under `seed`.
inline std::mt19937_64 site_rng(std::uint64_t seed, std::size_t index) {
  return std::mt19937_64(detail::splitmix64(seed ^ detail::splitmix64(0x5a5a + index)));
}

/// Fuzzes every site in scan order. Sites without a forest are skipped in
/// guided mode.
inline ProgramRun fuzz_program(const ProgramSpec& p, const Registry& reg, ModelStore& models,
                               const FuzzConfig& cfg) {
  ProgramRun run;
  run.program = p.name;
  const ScanResult scan = scan_for_unstable(p, reg);
  run.diagnostics = scan.diagnostics;
  for (std::size_t i = 0; i < scan.sites.size(); ++i) {
    const auto& site = scan.sites[i];
    const Forest* f = nullptr;
    if (cfg.mode == FuzzMode::Guided) {
      f = models.find(site.kernel, site.entry_shapes.front());
      if (f == nullptr) {
        run.diagnostics.push_back("site '" + site.name + "': no model for '" + site.kernel + "'");
        continue;
      }
    }
    auto rng = site_rng(cfg.seed, i);
    run.results.push_back(fuzz_site(p, site, f, cfg, rng, std::nullopt, reg));
  }
  return run;
}

}  // namespace saf
