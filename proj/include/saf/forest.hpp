// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "saf/dataset.hpp"
#include "saf/error.hpp"

namespace saf {

inline constexpr int kModelFormatVersion = 1;

/// One CART tree in flat arrays. Node i is a leaf when feature[i] < 0.
struct DecisionTree {
  std::vector<std::int32_t> feature;
  std::vector<double> threshold;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  /// Leaf class histograms, three counts per node (zero for inner nodes).
  std::vector<std::uint32_t> counts;

  std::size_t size() const noexcept { return feature.size(); }

  /// Histogram argmax; ties go NoChange, then Decrease, then Increase.
  static Label vote(const std::uint32_t* c) {
    Label best = Label::NoChange;
    for (Label l : {Label::Decrease, Label::Increase})
      if (c[static_cast<int>(l)] > c[static_cast<int>(best)]) best = l;
    return best;
  }

  Label predict(std::span<const double> x) const {
    std::size_t n = 0;
    while (feature[n] >= 0) n = static_cast<std::size_t>(x[feature[n]] <= threshold[n] ? left[n] : right[n]);
    return vote(&counts[3 * n]);
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct TrainConfig {
  std::size_t trees = 100;
  std::uint64_t seed = 42;
  double test_split = 0.3;
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  /// Candidate features per split; 0 means floor(sqrt(feature count)).
  std::size_t max_features = 0;
};

struct Forest {
  std::vector<DecisionTree> trees;
  std::uint64_t seed = 42;
  std::string kernel;
  Shape shape{3, 3};
  std::size_t feature_len = 9;
  std::size_t arity = 1;
  Scaling scaling;
  Params params = Params::object();

  std::size_t input_len() const { return feature_len * arity; }
  std::string shape_class() const { return saf::shape_class(shape); }
  friend bool operator==(const Forest& a, const Forest& b) {
    return a.trees == b.trees && a.seed == b.seed && a.kernel == b.kernel && a.shape == b.shape &&
           a.feature_len == b.feature_len && a.arity == b.arity && a.scaling == b.scaling &&
           a.params == b.params;
  }
};

/// Majority vote of the trees; ties go NoChange, then Decrease, then Increase.
inline SASignal predict(const Forest& f, std::span<const double> features) {
  if (features.size() != f.input_len())
    throw UsageError("forest expects " + std::to_string(f.input_len()) + " features, got " +
                     std::to_string(features.size()));
  if (f.trees.empty()) throw UsageError("forest has no trees");
  std::array<std::uint32_t, 3> votes{0, 0, 0};
  for (const auto& t : f.trees) ++votes[static_cast<std::size_t>(t.predict(features))];
  return DecisionTree::vote(votes.data());
}

struct F1Report {
  std::array<double, 3> per_class{0, 0, 0};
  double macro = 0;
};

/// Per-class F1 of `predicted` against `actual`; a class that never occurs
/// and is never predicted scores 0.
inline F1Report f1_scores(std::span<const Label> actual, std::span<const Label> predicted) {
  std::array<double, 3> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const auto a = static_cast<std::size_t>(actual[i]), p = static_cast<std::size_t>(predicted[i]);
    if (a == p) {
      ++tp[a];
    } else {
      ++fp[p];
      ++fn[a];
    }
  }
  F1Report r;
  for (std::size_t c = 0; c < 3; ++c) {
    const double denom = 2 * tp[c] + fp[c] + fn[c];
    r.per_class[c] = denom == 0 ? 0.0 : 2 * tp[c] / denom;
    r.macro += r.per_class[c] / 3.0;
  }
  return r;
}

inline F1Report evaluate_f1(const Forest& f, std::span<const LabeledSample> samples) {
  std::vector<Label> actual, predicted;
  for (const auto& s : samples) {
    actual.push_back(s.label);
    predicted.push_back(predict(f, s.features));
  }
  return f1_scores(actual, predicted);
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double gini(const std::array<double, 3>& c, double n) {
  if (n == 0) return 0;
  double s = 0;
  for (double v : c) s += (v / n) * (v / n);
  return 1 - s;
}

/// Threshold strictly below `b` and at least `a` (a < b).
inline double split_point(double a, double b) {
  double m = a / 2 + b / 2;
  if (!(m < b) || !std::isfinite(m)) m = a;
  return m;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& columns, const std::vector<Label>& labels,
              const TrainConfig& cfg, std::size_t mtry)
      : cols_(columns), labels_(labels), cfg_(cfg), mtry_(mtry) {}

  DecisionTree build(std::vector<std::uint32_t> rows, std::mt19937_64& rng) {
    DecisionTree t;
    struct Task {
      std::size_t begin, end, depth;
      std::int32_t node;
    };
    rows_ = std::move(rows);
    std::vector<Task> stack;
    stack.push_back({0, rows_.size(), 0, new_node(t)});
    std::vector<std::size_t> features(cols_.size());
    std::iota(features.begin(), features.end(), 0);
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      std::array<double, 3> hist{0, 0, 0};
      for (std::size_t i = task.begin; i < task.end; ++i) ++hist[static_cast<std::size_t>(labels_[rows_[i]])];
      const double n = static_cast<double>(task.end - task.begin);
      const bool pure = std::count(hist.begin(), hist.end(), 0.0) >= 2;
      const bool depth_done = cfg_.max_depth != 0 && task.depth >= cfg_.max_depth;
      Split best;
      if (!pure && !depth_done && task.end - task.begin >= 2 * cfg_.min_samples_leaf) {
        std::shuffle(features.begin(), features.end(), rng);
        std::size_t tried = 0;
        for (std::size_t f : features) {
          if (tried >= mtry_ && best.valid) break;
          const Split s = best_split(f, task.begin, task.end, hist, n);
          if (s.constant) continue;
          ++tried;
          if (s.valid && (!best.valid || s.impurity < best.impurity)) best = s;
        }
      }
      if (!best.valid) {
        for (std::size_t c = 0; c < 3; ++c)
          t.counts[3 * static_cast<std::size_t>(task.node) + c] = static_cast<std::uint32_t>(hist[c]);
        continue;
      }
      const auto& col = cols_[best.feature];
      const auto mid = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(task.begin),
                                      rows_.begin() + static_cast<std::ptrdiff_t>(task.end),
                                      [&](std::uint32_t r) { return col[r] <= best.threshold; });
      const std::size_t split = static_cast<std::size_t>(mid - rows_.begin());
      const std::int32_t l = new_node(t), r = new_node(t);
      t.feature[task.node] = static_cast<std::int32_t>(best.feature);
      t.threshold[task.node] = best.threshold;
      t.left[task.node] = l;
      t.right[task.node] = r;
      stack.push_back({split, task.end, task.depth + 1, r});
      stack.push_back({task.begin, split, task.depth + 1, l});
    }
    return t;
  }

 private:
  struct Split {
    bool valid = false;
    bool constant = false;
    std::size_t feature = 0;
    double threshold = 0;
    double impurity = 0;
  };

  static std::int32_t new_node(DecisionTree& t) {
    t.feature.push_back(-1);
    t.threshold.push_back(0);
    t.left.push_back(-1);
    t.right.push_back(-1);
    t.counts.insert(t.counts.end(), 3, 0);
    return static_cast<std::int32_t>(t.feature.size() - 1);
  }

  Split best_split(std::size_t f, std::size_t begin, std::size_t end, const std::array<double, 3>& total,
                   double n) {
    const auto& col = cols_[f];
    scratch_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t r = rows_[i];
      scratch_.push_back({col[r], static_cast<std::uint8_t>(labels_[r])});
    }
    std::sort(scratch_.begin(), scratch_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Split s;
    s.feature = f;
    if (!(scratch_.front().first < scratch_.back().first)) {
      s.constant = true;
      return s;
    }
    std::array<double, 3> left{0, 0, 0};
    const double min_leaf = static_cast<double>(cfg_.min_samples_leaf);
    for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
      ++left[scratch_[i].second];
      if (!(scratch_[i].first < scratch_[i + 1].first)) continue;
      const double nl = static_cast<double>(i + 1), nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      std::array<double, 3> right{total[0] - left[0], total[1] - left[1], total[2] - left[2]};
      const double imp = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
      if (!s.valid || imp < s.impurity) {
        s.valid = true;
        s.impurity = imp;
        s.threshold = split_point(scratch_[i].first, scratch_[i + 1].first);
      }
    }
    return s;
  }

  const std::vector<std::vector<double>>& cols_;
  const std::vector<Label>& labels_;
  const TrainConfig& cfg_;
  std::size_t mtry_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::pair<double, std::uint8_t>> scratch_;
};

}  // namespace detail

struct TrainMetrics {
  F1Report f1;
  double train_seconds = 0;
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  std::size_t total_nodes = 0;
};

/// Fits `trees` bootstrap CART trees on `samples` (no held-out split).
inline Forest fit_forest(std::span<const LabeledSample> samples, std::size_t input_len,
                         const TrainConfig& cfg) {
  if (samples.empty()) throw TrainingError("cannot train on an empty dataset");
  if (cfg.trees == 0) throw TrainingError("tree count must be at least 1");
  std::array<std::size_t, 3> present{0, 0, 0};
  for (const auto& s : samples) {
    if (s.features.size() != input_len) throw TrainingError("inconsistent feature length");
    ++present[static_cast<std::size_t>(s.label)];
  }
  if (std::count(present.begin(), present.end(), 0u) >= 2)
    throw TrainingError("training data holds a single class");

  std::vector<std::vector<double>> cols(input_len, std::vector<double>(samples.size()));
  std::vector<Label> labels(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    labels[i] = samples[i].label;
    for (std::size_t f = 0; f < input_len; ++f) cols[f][i] = samples[i].features[f];
  }
  const std::size_t mtry =
      cfg.max_features ? std::min(cfg.max_features, input_len)
                       : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(input_len))));
  Forest forest;
  forest.seed = cfg.seed;
  detail::TreeBuilder builder(cols, labels, cfg, mtry);
  const auto n = static_cast<std::uint32_t>(samples.size());
  for (std::size_t t = 0; t < cfg.trees; ++t) {
    std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(t)));
    std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
    std::vector<std::uint32_t> rows(n);
    for (auto& r : rows) r = pick(rng);
    forest.trees.push_back(builder.build(std::move(rows), rng));
  }
  return forest;
}

/// Splits `ds` into train/test with a seeded shuffle, trains, and scores
/// macro-F1 on the held-out part.
inline std::pair<Forest, TrainMetrics> train_forest(const Dataset& ds, const TrainConfig& cfg = {}) {
  if (!(cfg.test_split >= 0 && cfg.test_split < 1)) throw UsageError("test split must be in [0, 1)");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(ds.samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_split * static_cast<double>(order.size())));
  std::vector<LabeledSample> train, test;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_test ? test : train).push_back(ds.samples[order[i]]);

  Forest f = fit_forest(train, ds.feature_len * ds.arity, cfg);
  f.kernel = ds.kernel;
  f.shape = ds.shape;
  f.feature_len = ds.feature_len;
  f.arity = ds.arity;
  f.scaling = ds.scaling;
  f.params = ds.params;

  TrainMetrics m;
  m.train_samples = train.size();
  m.test_samples = test.size();
  if (!test.empty()) m.f1 = evaluate_f1(f, test);
  for (const auto& t : f.trees) m.total_nodes += t.size();
  m.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(f), m};
}

// ---- persistence -----------------------------------------------------------

/// Model file: JSON with format_version, metadata, and per-tree parallel
/// arrays feature / threshold / left / right / counts.
inline nlohmann::ordered_json forest_to_json(const Forest& f) {
  nlohmann::ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kernel"] = f.kernel;
  j["shape"] = f.shape;
  j["shape_class"] = f.shape_class();
  j["feature_len"] = f.feature_len;
  j["arity"] = f.arity;
  j["seed"] = f.seed;
  j["classes"] = {"Increase", "Decrease", "NoChange"};
  j["params"] = f.params;
  j["scaling"] = {{"offset", f.scaling.offset}, {"factor", f.scaling.factor}, {"epsilon", f.scaling.epsilon}};
  auto& trees = j["trees"] = nlohmann::ordered_json::array();
  for (const auto& t : f.trees)
    trees.push_back({{"feature", t.feature},
                     {"threshold", t.threshold},
                     {"left", t.left},
                     {"right", t.right},
                     {"counts", t.counts}});
  return j;
}

inline Forest forest_from_json(const nlohmann::json& j) {
  Forest f;
  try {
    const int v = j.at("format_version").get<int>();
    if (v != kModelFormatVersion)
      throw FormatVersionError("model format_version " + std::to_string(v) + " is not supported");
    f.kernel = j.at("kernel").get<std::string>();
    f.shape = j.at("shape").get<Shape>();
    f.feature_len = j.at("feature_len").get<std::size_t>();
    f.arity = j.at("arity").get<std::size_t>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.params = j.at("params");
    const auto& s = j.at("scaling");
    f.scaling = {s.at("offset").get<double>(), s.at("factor").get<double>(), s.at("epsilon").get<double>()};
    for (const auto& jt : j.at("trees")) {
      DecisionTree t;
      t.feature = jt.at("feature").get<std::vector<std::int32_t>>();
      t.threshold = jt.at("threshold").get<std::vector<double>>();
      t.left = jt.at("left").get<std::vector<std::int32_t>>();
      t.right = jt.at("right").get<std::vector<std::int32_t>>();
      t.counts = jt.at("counts").get<std::vector<std::uint32_t>>();
      const std::size_t n = t.feature.size();
      if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.counts.size() != 3 * n)
        throw ParseError("tree arrays have inconsistent lengths");
      for (std::size_t i = 0; i < n; ++i) {
        if (t.feature[i] < 0) continue;
        if (static_cast<std::size_t>(t.feature[i]) >= f.feature_len * f.arity || t.left[i] <= static_cast<std::int32_t>(i) ||
            t.right[i] <= static_cast<std::int32_t>(i) || static_cast<std::size_t>(t.left[i]) >= n ||
            static_cast<std::size_t>(t.right[i]) >= n || !std::isfinite(t.threshold[i]))
          throw ParseError("tree node " + std::to_string(i) + " is malformed");
      }
      f.trees.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (f.trees.empty()) throw ParseError("model has no trees");
  return f;
}

inline void model_save(const Forest& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model '" + path + "'");
  out << forest_to_json(f).dump() << '\n';
  if (!out) throw IoError("failed writing model '" + path + "'");
}

inline Forest model_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("model '" + path + "': " + e.what());
  }
  return forest_from_json(j);
}

/// Conventional model file name, e.g. exp_3x3.json.
inline std::string model_file_name(const std::string& kernel, const Shape& shape) {
  return kernel + "_" + shape_class(shape) + ".json";
}

}  // namespace saf
