// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "saf/corpus.hpp"
#include "saf/dataset.hpp"
#include "saf/forest.hpp"
#include "saf/fuzz.hpp"
#include "saf/registry.hpp"
#include "saf/report.hpp"

namespace saf {

/// Distinct site kernels over `programs`, in first-seen order.
inline std::vector<std::string> site_kernels(const std::vector<ProgramSpec>& programs, const Registry& reg) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : programs)
    for (const auto& s : scan_for_unstable(p, reg).sites)
      if (seen.insert(s.kernel).second) out.push_back(s.kernel);
  return out;
}

/// Generates and trains a 3x3 forest for every kernel the store lacks and
/// saves it under `dir`. Returns the kernels that were trained.
inline std::vector<std::string> ensure_models(ModelStore& store, const std::filesystem::path& dir,
                                              const std::vector<std::string>& kernels,
                                              const GenerationConfig& gen, const TrainConfig& train,
                                              const Registry& reg = default_registry(),
                                              std::ostream* log = nullptr) {
  std::vector<std::string> trained;
  for (const auto& k : kernels) {
    if (store.find(k, gen.shape) != nullptr) continue;
    if (log) *log << "training model for '" << k << "'\n";
    const Dataset ds = build_dataset(reg.at(k), gen);
    auto [forest, metrics] = train_forest(ds, train);
    if (log)
      *log << "  macro-F1 " << metrics.f1.macro << ", " << metrics.train_seconds << " s\n";
    std::filesystem::create_directories(dir);
    model_save(forest, (dir / model_file_name(k, forest.shape)).string());
    store.add(std::move(forest));
    trained.push_back(k);
  }
  return trained;
}

/// Fuzzes every program once per seed and collects a report.
inline Report run_corpus(const std::vector<ProgramSpec>& programs, const std::vector<std::uint64_t>& seeds,
                         ModelStore& store, FuzzConfig cfg, const Registry& reg = default_registry()) {
  Report r;
  r.registry_version = reg.version();
  r.config = fuzz_config_to_json(cfg);
  r.config["seeds"] = seeds;
  r.config.erase("seed");
  for (std::uint64_t seed : seeds) {
    cfg.seed = seed;
    for (const auto& p : programs) report_add(r, p, fuzz_program(p, reg, store, cfg), seed);
  }
  return r;
}

}  // namespace saf
