// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "saf/default_registry.hpp"
#include "saf/error.hpp"
#include "saf/oracles.hpp"
#include "saf/registry.hpp"
#include "saf/tensor.hpp"

namespace saf {

inline constexpr int kDatasetFormatVersion = 1;

/// Soft-assertion signal. The numeric values are class indices.
enum class Label { Increase = 0, Decrease = 1, NoChange = 2 };
using SASignal = Label;

inline constexpr std::array<Label, 3> kLabels = {Label::Increase, Label::Decrease, Label::NoChange};

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::Increase: return "Increase";
    case Label::Decrease: return "Decrease";
    case Label::NoChange: return "NoChange";
  }
  return "?";
}

inline Label parse_label(std::string_view s) {
  for (Label l : kLabels)
    if (to_string(l) == s) return l;
  throw ParseError("unknown label '" + std::string(s) + "'");
}

enum class MutationMethod { Exponential, Random, Sinusoidal };
enum class Direction { Up, Down };

inline std::string_view to_string(MutationMethod m) {
  switch (m) {
    case MutationMethod::Exponential: return "exponential";
    case MutationMethod::Random: return "random";
    case MutationMethod::Sinusoidal: return "sinusoidal";
  }
  return "?";
}

inline std::string_view to_string(Direction d) { return d == Direction::Up ? "up" : "down"; }

struct MutationConfig {
  MutationMethod method = MutationMethod::Exponential;
  double rate = 1.0;
  int max_steps = 100;
  Direction direction = Direction::Up;
  /// Multiplier for Random and Sinusoidal steps. Unset: 1 for Random, the
  /// input's largest magnitude for Sinusoidal.
  std::optional<double> scale;
};

struct GenerationConfig {
  std::size_t n_base = 100;
  /// Empty: use the kernel's registry profile, else the generic default.
  std::vector<Region> regions;
  Shape shape{3, 3};
  /// Mutation configs tried per base; 0 tries all of them.
  std::size_t mutations_per_base = 0;
  std::uint64_t seed = 42;
  std::optional<std::pair<double, double>> pixel_bounds;
  std::size_t target_size = 40000;
  /// Upper limit on rounds of fresh base inputs.
  std::size_t max_rounds = 40;
};

inline std::vector<Region> default_regions() { return {{-100, 0}, {0, 100}, {100, 1e6}}; }

/// Mutation schedules used when the caller does not provide any.
inline std::vector<MutationConfig> default_mutations() {
  std::vector<MutationConfig> out;
  for (Direction d : {Direction::Up, Direction::Down}) {
    for (double r : {0.05, 0.25, 1.0}) out.push_back({MutationMethod::Exponential, r, 100, d, {}});
    for (double r : {0.02, 0.2}) out.push_back({MutationMethod::Random, r, 50, d, {}});
    for (double r : {0.3, 1.1}) out.push_back({MutationMethod::Sinusoidal, r, 50, d, {}});
  }
  return out;
}

// ---- scaling and featurization ---------------------------------------------

/// Affine preprocessing (v + offset) * factor, with exact zeros first
/// replaced by `epsilon` when it is non-zero.
struct Scaling {
  double offset = 0;
  double factor = 1;
  double epsilon = 0;

  double apply(double v) const {
    if (epsilon != 0 && v == 0) v = epsilon;
    return (v + offset) * factor;
  }
  double invert(double f) const {
    double v = f / factor - offset;
    if (epsilon != 0 && v == epsilon) v = 0;
    return v;
  }
  bool identity() const { return offset == 0 && factor == 1 && epsilon == 0; }
  friend bool operator==(const Scaling&, const Scaling&) = default;
};

inline std::string shape_class(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out;
}

inline bool supported_feature_len(std::size_t n) { return n == 9 || n == 196 || n == 784; }

/// Flattens when the element count equals `feature_len`, otherwise takes
/// `feature_len` equally spaced order statistics from min to max.
inline std::vector<double> featurize(const Tensor& x, std::size_t feature_len) {
  if (x.empty()) throw UsageError("cannot featurize an empty tensor");
  if (!supported_feature_len(feature_len))
    throw UsageError("feature length " + std::to_string(feature_len) + " is not a trained shape class");
  std::vector<double> v(x.values().begin(), x.values().end());
  if (v.size() == feature_len) return v;
  std::sort(v.begin(), v.end(), [](double a, double b) {
    if (std::isnan(a)) return false;
    if (std::isnan(b)) return true;
    return a < b;
  });
  std::vector<double> out(feature_len);
  const double last = static_cast<double>(v.size() - 1);
  for (std::size_t i = 0; i < feature_len; ++i) {
    const double pos = last * static_cast<double>(i) / static_cast<double>(feature_len - 1);
    out[i] = v[static_cast<std::size_t>(std::llround(pos))];
  }
  return out;
}

/// Per-operand featurization, scaled and concatenated.
inline std::vector<double> featurize_operands(std::span<const Tensor> operands,
                                              std::size_t feature_len, const Scaling& scaling) {
  std::vector<double> out;
  out.reserve(operands.size() * feature_len);
  for (const auto& t : operands)
    for (double v : featurize(t, feature_len)) out.push_back(scaling.apply(v));
  return out;
}

// ---- datasets --------------------------------------------------------------

struct LabeledSample {
  std::vector<double> features;
  Label label = Label::NoChange;
  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

struct Dataset {
  std::string kernel;
  Shape shape{3, 3};
  std::size_t feature_len = 9;
  std::size_t arity = 1;
  /// Kernel call-site params used while generating.
  Params params = Params::object();
  Scaling scaling;
  /// Generation settings snapshot.
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<LabeledSample> samples;

  std::array<std::size_t, 3> class_counts() const {
    std::array<std::size_t, 3> c{0, 0, 0};
    for (const auto& s : samples) ++c[static_cast<std::size_t>(s.label)];
    return c;
  }
  std::string shape_class() const { return saf::shape_class(shape); }
  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.kernel == b.kernel && a.shape == b.shape && a.feature_len == b.feature_len &&
           a.arity == b.arity && a.params == b.params && a.scaling == b.scaling &&
           a.config == b.config && a.samples == b.samples;
  }
};

// ---- generation ------------------------------------------------------------

/// n_base tensors; base i draws every element uniformly from region
/// i mod |regions|.
inline std::vector<Tensor> generate_base_inputs(const GenerationConfig& config,
                                                std::mt19937_64& rng) {
  const auto regions = config.regions.empty() ? default_regions() : config.regions;
  std::vector<Tensor> out;
  out.reserve(config.n_base);
  for (std::size_t i = 0; i < config.n_base; ++i) {
    const Region& r = regions[i % regions.size()];
    std::uniform_real_distribution<double> u(r.lo, r.hi);
    Tensor t = Tensor::zeros(config.shape);
    for (auto& v : t.mutable_values()) {
      v = u(rng);
      if (config.pixel_bounds) v = std::clamp(v, config.pixel_bounds->first, config.pixel_bounds->second);
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline double max_magnitude(std::span<const Tensor> xs) {
  double m = 0;
  for (const auto& t : xs)
    for (double v : t.values())
      if (std::isfinite(v)) m = std::max(m, std::abs(v));
  return m;
}

/// Signed step size for step `step_index` (>= 1).
inline double mutation_step(int step_index, const MutationConfig& m, double default_scale,
                            std::mt19937_64& rng) {
  if (step_index < 1) throw UsageError("mutation step index starts at 1");
  double step = 0;
  switch (m.method) {
    case MutationMethod::Exponential:
      step = std::exp(m.rate * step_index);
      break;
    case MutationMethod::Random: {
      std::uniform_real_distribution<double> u(0, 1);
      step = u(rng) * m.rate * m.scale.value_or(1.0);
      break;
    }
    case MutationMethod::Sinusoidal:
      step = std::abs(std::sin(m.rate * step_index)) * m.scale.value_or(default_scale);
      break;
  }
  return m.direction == Direction::Up ? step : -step;
}

/// x shifted by one shared step; pixel bounds re-applied when given.
inline Tensor mutate_step(const Tensor& x, int step_index, const MutationConfig& m,
                          std::mt19937_64& rng,
                          std::optional<std::pair<double, double>> pixel_bounds = std::nullopt) {
  const double step = mutation_step(step_index, m, max_magnitude(std::span(&x, 1)), rng);
  Tensor y = x;
  for (auto& v : y.mutable_values()) {
    v += step;
    if (pixel_bounds) v = std::clamp(v, pixel_bounds->first, pixel_bounds->second);
  }
  return y;
}

struct TrajectoryPoint {
  std::vector<Tensor> operands;
  bool failed = false;
};

struct Trajectory {
  Direction direction = Direction::Up;
  std::vector<TrajectoryPoint> points;
};

struct DerivedLabel {
  std::size_t point = 0;
  Label label = Label::NoChange;
  friend bool operator==(const DerivedLabel&, const DerivedLabel&) = default;
};

/// Labels the points of a trajectory up to its first outcome flip. Passing
/// points before a pass-to-fail flip get the mutation direction; failing
/// points get NoChange; after a fail-to-pass flip the passing endpoint gets
/// the reverse direction.
inline std::vector<DerivedLabel> derive_labels(const Trajectory& t) {
  std::vector<DerivedLabel> out;
  if (t.points.size() < 2) return out;
  const bool base_failed = t.points[0].failed;
  std::size_t flip = 0;
  for (std::size_t i = 1; i < t.points.size(); ++i)
    if (t.points[i].failed != base_failed) {
      flip = i;
      break;
    }
  if (flip == 0) return out;
  const Label forward = t.direction == Direction::Up ? Label::Increase : Label::Decrease;
  const Label reverse = t.direction == Direction::Up ? Label::Decrease : Label::Increase;
  for (std::size_t i = 0; i < flip; ++i) out.push_back({i, base_failed ? Label::NoChange : forward});
  out.push_back({flip, base_failed ? reverse : Label::NoChange});
  return out;
}

namespace detail {

inline Shape operand_shape(const std::string& rule, const Shape& base) {
  if (rule.empty() || rule == "square" || rule == "same") return base;
  if (rule == "vector") return {base.back()};
  throw UsageError("unknown operand shape rule '" + rule + "'");
}

/// Keeps a uniform random subset of at most `cap` items.
struct Reservoir {
  std::size_t cap = 0;
  std::size_t seen = 0;
  std::vector<LabeledSample> items;

  void offer(LabeledSample s, std::mt19937_64& rng) {
    ++seen;
    if (items.size() < cap) {
      items.push_back(std::move(s));
      return;
    }
    std::uniform_int_distribution<std::size_t> u(0, seen - 1);
    const std::size_t j = u(rng);
    if (j < cap) items[j] = std::move(s);
  }
};

}  // namespace detail

inline Scaling scaling_for(const KernelSpec& k) {
  return Scaling{k.generation.offset, k.generation.factor, k.generation.epsilon};
}

/// Applies `scaling` to every feature and records it. Expects raw features.
inline Dataset preprocess_scale(Dataset ds, const Scaling& scaling) {
  if (!ds.scaling.identity()) throw UsageError("dataset is already scaled");
  if (!scaling.identity())
    for (auto& s : ds.samples)
      for (auto& v : s.features) v = scaling.apply(v);
  ds.scaling = scaling;
  return ds;
}

/// Unit-tests `kernel` along mutation trajectories and returns a balanced,
/// preprocessed dataset of at most `config.target_size` samples.
inline Dataset build_dataset(const KernelSpec& kernel, const GenerationConfig& config,
                             std::vector<MutationConfig> mutations = {}) {
  if (!kernel.executable())
    throw CapabilityError("'" + kernel.name + "' has no executable implementation");
  if (config.n_base == 0) throw UsageError("n_base must be at least 1");
  if (mutations.empty()) {
    mutations = default_mutations();
    for (const auto& ms : kernel.generation.mutations)
      for (Direction d : {Direction::Up, Direction::Down}) {
        MutationConfig m;
        m.method = ms.method == "exponential" ? MutationMethod::Exponential
                   : ms.method == "sinusoidal" ? MutationMethod::Sinusoidal
                                               : MutationMethod::Random;
        m.rate = ms.rate;
        m.max_steps = ms.max_steps;
        m.direction = d;
        if (ms.scale > 0) m.scale = ms.scale;
        mutations.push_back(m);
      }
  }
  for (const auto& m : mutations)
    if (!(m.rate > 0) || m.max_steps < 1) throw UsageError("mutation rate and max_steps must be positive");
  const std::size_t feature_len = shape_size(config.shape);
  if (!supported_feature_len(feature_len))
    throw UsageError("unsupported training shape " + shape_string(config.shape));

  const auto& prof = kernel.generation;
  const std::size_t arity = kernel.arity;
  std::vector<Shape> shapes;
  std::vector<std::vector<Region>> regions;
  for (std::size_t k = 0; k < arity; ++k) {
    shapes.push_back(detail::operand_shape(k < prof.operand_shapes.size() ? prof.operand_shapes[k] : "",
                                           config.shape));
    if (!config.regions.empty())
      regions.push_back(config.regions);
    else if (k < prof.operand_regions.size())
      regions.push_back(prof.operand_regions[k]);
    else if (!prof.regions.empty())
      regions.push_back(prof.regions);
    else
      regions.push_back(default_regions());
  }

  Dataset ds;
  ds.kernel = kernel.name;
  ds.shape = config.shape;
  ds.feature_len = feature_len;
  ds.arity = arity;
  ds.params = prof.params;
  ds.scaling = Scaling{};

  std::mt19937_64 rng(config.seed);
  // Class quotas sum to target_size exactly.
  std::array<detail::Reservoir, 3> pools;
  for (std::size_t c = 0; c < 3; ++c) pools[c].cap = config.target_size / 3 + (c < config.target_size % 3 ? 1 : 0);

  auto oracle_fails = [&](const std::vector<Tensor>& ops) {
    return run_oracles(kernel, ops, prof.params).verdict.failed();
  };

  auto run_base = [&](const std::vector<Tensor>& base) {
    std::vector<std::size_t> order(mutations.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (config.mutations_per_base > 0 && config.mutations_per_base < order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(config.mutations_per_base);
    }
    const double base_scale = std::max(1.0, max_magnitude(base));
    for (std::size_t mi : order) {
      MutationConfig m = mutations[mi];
      if (!m.scale && m.method != MutationMethod::Exponential) m.scale = base_scale;
      Trajectory traj;
      traj.direction = m.direction;
      traj.points.push_back({base, oracle_fails(base)});
      for (int step = 1; step <= m.max_steps; ++step) {
        const double delta = mutation_step(step, m, base_scale, rng);
        std::vector<Tensor> next = traj.points.back().operands;
        for (auto& t : next)
          for (auto& v : t.mutable_values()) {
            v += delta;
            if (config.pixel_bounds)
              v = std::clamp(v, config.pixel_bounds->first, config.pixel_bounds->second);
          }
        const bool failed = oracle_fails(next);
        traj.points.push_back({std::move(next), failed});
        if (failed != traj.points.front().failed) break;
      }
      for (const auto& dl : derive_labels(traj)) {
        LabeledSample s;
        s.features = featurize_operands(traj.points[dl.point].operands, feature_len, Scaling{});
        s.label = dl.label;
        pools[static_cast<std::size_t>(dl.label)].offer(std::move(s), rng);
      }
    }
  };

  for (const auto& fill : prof.known_failures) {
    std::vector<Tensor> base;
    for (std::size_t k = 0; k < shapes.size(); ++k)
      base.push_back(Tensor::filled(shapes[k], fill.size() == 1 ? fill[0] : fill[k]));
    run_base(base);
  }
  std::size_t rounds = 0;
  for (; rounds < config.max_rounds; ++rounds) {
    bool full = true;
    for (const auto& p : pools) full = full && p.seen >= p.cap;
    if (full) break;
    for (std::size_t i = 0; i < config.n_base; ++i) {
      std::vector<Tensor> base;
      std::size_t idx = i;
      for (std::size_t k = 0; k < arity; ++k) {
        const Region& r = regions[k][idx % regions[k].size()];
        idx /= regions[k].size();
        std::uniform_real_distribution<double> u(r.lo, r.hi);
        Tensor t = Tensor::zeros(shapes[k]);
        for (auto& v : t.mutable_values()) {
          v = u(rng);
          if (config.pixel_bounds)
            v = std::clamp(v, config.pixel_bounds->first, config.pixel_bounds->second);
        }
        base.push_back(std::move(t));
      }
      run_base(base);
    }
  }

  std::size_t minority = pools[0].cap;
  for (const auto& p : pools) minority = std::min(minority, p.items.size());
  if (minority < 100) {
    std::ostringstream os;
    os << "too few samples per class after " << rounds << " rounds (";
    for (Label l : kLabels)
      os << to_string(l) << "=" << pools[static_cast<std::size_t>(l)].items.size()
         << (l == Label::NoChange ? ")" : ", ");
    throw GenerationError(kernel.name, os.str());
  }
  // Down-sample over-represented classes to 1.5x the minority class.
  const std::size_t cap = minority + minority / 2;
  for (auto& p : pools) {
    std::shuffle(p.items.begin(), p.items.end(), rng);
    if (p.items.size() > cap) p.items.resize(cap);
    for (auto& s : p.items) ds.samples.push_back(std::move(s));
  }
  std::shuffle(ds.samples.begin(), ds.samples.end(), rng);

  auto& c = ds.config;
  c["n_base"] = config.n_base;
  c["seed"] = config.seed;
  c["target_size"] = config.target_size;
  c["rounds"] = rounds;
  c["mutations_per_base"] = config.mutations_per_base;
  if (config.pixel_bounds) c["pixel_bounds"] = {config.pixel_bounds->first, config.pixel_bounds->second};
  auto& regs = c["regions"] = nlohmann::ordered_json::array();
  for (const auto& rk : regions) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rk) arr.push_back({r.lo, r.hi});
    regs.push_back(arr);
  }
  auto& muts = c["mutations"] = nlohmann::ordered_json::array();
  for (const auto& m : mutations)
    muts.push_back({{"method", to_string(m.method)},
                    {"rate", m.rate},
                    {"max_steps", m.max_steps},
                    {"direction", to_string(m.direction)},
                    {"scale", m.scale ? nlohmann::ordered_json(*m.scale) : nlohmann::ordered_json()}});
  return preprocess_scale(std::move(ds), scaling_for(kernel));
}

inline Dataset build_dataset(std::string_view kernel, const GenerationConfig& config,
                             std::vector<MutationConfig> mutations = {},
                             const Registry& reg = default_registry()) {
  return build_dataset(reg.at(kernel), config, std::move(mutations));
}

/// Raw operand tensors behind a sample whose operands were flattened.
inline std::vector<Tensor> defeaturize(const Dataset& ds, const LabeledSample& s,
                                       const std::vector<Shape>& shapes) {
  std::vector<Tensor> out;
  std::size_t off = 0;
  for (const auto& shape : shapes) {
    const std::size_t n = shape_size(shape);
    if (n != ds.feature_len) throw UsageError("operand was summarized by quantiles");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = ds.scaling.invert(s.features[off + i]);
    off += n;
    out.emplace_back(shape, std::move(v));
  }
  return out;
}

// ---- persistence -----------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError("bad number '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

/// Writes a header line `#saf-dataset <json>`, a column line, then one
/// `label,f0,f1,...` record per sample.
inline void dataset_save(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  const auto counts = ds.class_counts();
  nlohmann::ordered_json h;
  h["format_version"] = kDatasetFormatVersion;
  h["kernel"] = ds.kernel;
  h["shape"] = ds.shape;
  h["feature_len"] = ds.feature_len;
  h["arity"] = ds.arity;
  h["params"] = ds.params;
  h["scaling"] = {{"offset", ds.scaling.offset}, {"factor", ds.scaling.factor}, {"epsilon", ds.scaling.epsilon}};
  h["class_counts"] = {{"Increase", counts[0]}, {"Decrease", counts[1]}, {"NoChange", counts[2]}};
  h["samples"] = ds.samples.size();
  h["config"] = ds.config;
  out << "#saf-dataset " << h.dump() << '\n';
  out << "label";
  for (std::size_t i = 0; i < ds.feature_len * ds.arity; ++i) out << ",f" << i;
  out << '\n';
  for (const auto& s : ds.samples) {
    out << to_string(s.label);
    for (double v : s.features) out << ',' << detail::format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("failed writing dataset '" + path + "'");
}

inline Dataset dataset_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::string line;
  const std::string magic = "#saf-dataset ";
  if (!std::getline(in, line) || line.rfind(magic, 0) != 0)
    throw ParseError("'" + path + "' is not a dataset file");
  Dataset ds;
  std::size_t expected = 0;
  try {
    const auto h = nlohmann::ordered_json::parse(line.substr(magic.size()));
    const int v = h.at("format_version").get<int>();
    if (v != kDatasetFormatVersion)
      throw FormatVersionError("dataset format_version " + std::to_string(v) + " is not supported");
    ds.kernel = h.at("kernel").get<std::string>();
    ds.shape = h.at("shape").get<Shape>();
    ds.feature_len = h.at("feature_len").get<std::size_t>();
    ds.arity = h.at("arity").get<std::size_t>();
    ds.params = h.at("params");
    ds.scaling = {h.at("scaling").at("offset").get<double>(), h.at("scaling").at("factor").get<double>(),
                  h.at("scaling").at("epsilon").get<double>()};
    ds.config = h.at("config");
    expected = h.at("samples").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("dataset header: " + std::string(e.what()));
  }
  if (!std::getline(in, line)) throw ParseError("dataset is missing its column line");
  const std::size_t width = ds.feature_len * ds.arity;
  ds.samples.reserve(expected);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    LabeledSample s;
    std::size_t start = 0, comma = line.find(',');
    s.label = parse_label(std::string_view(line).substr(0, comma));
    while (comma != std::string::npos) {
      start = comma + 1;
      comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      s.features.push_back(detail::parse_double(std::string_view(line).substr(start, end - start)));
    }
    if (s.features.size() != width)
      throw ParseError("dataset record " + std::to_string(ds.samples.size() + 1) + " has " +
                       std::to_string(s.features.size()) + " features, expected " + std::to_string(width));
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.size() != expected)
    throw ParseError("dataset holds " + std::to_string(ds.samples.size()) + " records, header says " +
                     std::to_string(expected));
  return ds;
}

}  // namespace saf
