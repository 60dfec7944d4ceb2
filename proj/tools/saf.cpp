// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: registry listing, dataset generation, training,
// scanning, fuzzing and the corpus benchmark.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "saf/bench.hpp"
#include "saf/corpus.hpp"
#include "saf/dataset.hpp"
#include "saf/forest.hpp"
#include "saf/fuzz.hpp"
#include "saf/program.hpp"
#include "saf/registry.hpp"
#include "saf/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBugs = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

saf::Shape parse_shape(const std::string& text) {
  saf::Shape s;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    std::size_t used = 0;
    long v = -1;
    try {
      v = std::stol(part, &used);
    } catch (const std::exception&) {
    }
    if (used != part.size() || v <= 0) throw saf::UsageError("bad shape '" + text + "', expected e.g. 3x3");
    s.push_back(static_cast<std::size_t>(v));
  }
  if (s.empty()) throw saf::UsageError("bad shape '" + text + "'");
  return s;
}

/// Seed precedence: flag, then SAF_SEED, then the default.
std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value) {
  if (flag->count()) return flag_value;
  if (const char* env = std::getenv("SAF_SEED")) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw saf::UsageError(std::string("SAF_SEED='") + env + "' is not an unsigned integer");
  }
  return 42;
}

saf::FuzzMode parse_mode(const std::string& m) {
  if (m == "guided") return saf::FuzzMode::Guided;
  if (m == "random") return saf::FuzzMode::Random;
  throw saf::UsageError("mode must be guided or random");
}

void print_entry(const saf::ReportEntry& e) {
  std::cout << e.program << "/" << e.site << " [" << e.kernel << "] seed " << e.seed << ": "
            << saf::to_string(e.status);
  if (e.failure_class) std::cout << " " << saf::to_string(*e.failure_class);
  std::cout << " after " << e.iterations << " iterations, " << e.resets << " resets, " << std::fixed
            << std::setprecision(3) << e.wall_time_s << " s" << std::defaultfloat;
  if (e.expected) std::cout << (e.matched() ? " (expected)" : " (expected " + std::string(saf::to_string(*e.expected)) + ")");
  std::cout << "\n";
}

void print_totals(const saf::Report& r) {
  const auto t = r.totals();
  std::cout << "sites " << t.sites << ", bugs found " << t.bugs_found << ", average time " << std::fixed
            << std::setprecision(3) << t.average_time_s << " s\n"
            << std::defaultfloat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-assertion fuzzing for numerical kernels"};
  app.require_subcommand(1);
  std::string registry_path;
  app.add_option("--registry", registry_path, "Registry JSON file (default: built-in)")->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list-functions", "Print the unstable-function registry");

  auto* gen = app.add_subcommand("gen-data", "Generate a labeled training dataset for one kernel");
  std::string gen_function, gen_shape = "3x3", gen_out;
  std::size_t gen_samples = 40000;
  std::uint64_t gen_seed_v = 42;
  gen->add_option("--function", gen_function, "Kernel name")->required();
  gen->add_option("--shape", gen_shape, "Operand shape, e.g. 3x3")->capture_default_str();
  gen->add_option("--samples", gen_samples, "Target dataset size")->capture_default_str()->check(CLI::PositiveNumber);
  auto* gen_seed = gen->add_option("--seed", gen_seed_v, "RNG seed (overrides SAF_SEED)");
  gen->add_option("--out", gen_out, "Output dataset file")->required();

  auto* train = app.add_subcommand("train", "Train a soft-assertion forest on a dataset");
  std::string train_dataset, train_out;
  std::size_t train_trees = 100;
  double train_split = 0.3;
  std::uint64_t train_seed_v = 42;
  train->add_option("--dataset", train_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  train->add_option("--trees", train_trees, "Number of trees")->capture_default_str()->check(CLI::PositiveNumber);
  auto* train_seed = train->add_option("--seed", train_seed_v, "RNG seed (overrides SAF_SEED)");
  train->add_option("--test-split", train_split, "Held-out fraction")->capture_default_str()->check(CLI::Range(0.0, 0.99));
  train->add_option("--out", train_out, "Output model file")->required();

  auto* scan = app.add_subcommand("scan", "List the unstable sites of a program");
  std::string scan_program;
  scan->add_option("program", scan_program, "Program JSON file")->required()->check(CLI::ExistingFile);

  auto* fuzz = app.add_subcommand("fuzz", "Fuzz every unstable site of a program");
  std::string fuzz_program_path, fuzz_models, fuzz_out, fuzz_mode = "guided";
  double fuzz_timeout = 1800, fuzz_rate = 1.0;
  std::uint64_t fuzz_seed_v = 42;
  fuzz->add_option("program", fuzz_program_path, "Program JSON file")->required()->check(CLI::ExistingFile);
  fuzz->add_option("--models", fuzz_models, "Directory of <kernel>_<shape>.json models");
  fuzz->add_option("--timeout", fuzz_timeout, "Seconds per site")->capture_default_str()->check(CLI::PositiveNumber);
  fuzz->add_option("--rate", fuzz_rate, "Mutation rate")->capture_default_str()->check(CLI::PositiveNumber);
  auto* fuzz_seed = fuzz->add_option("--seed", fuzz_seed_v, "RNG seed (overrides SAF_SEED)");
  fuzz->add_option("--mode", fuzz_mode, "guided or random")->capture_default_str();
  fuzz->add_option("--out", fuzz_out, "Report file");

  auto* bench = app.add_subcommand("bench", "Fuzz the shipped corpus and summarize");
  std::string bench_models = "models", bench_out, bench_mode = "guided";
  std::size_t bench_seeds = 1;
  double bench_timeout = 60;
  std::uint64_t bench_seed_v = 42;
  bool bench_untimed = false;
  bench->add_option("--models", bench_models, "Model directory; missing models are trained into it")->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "Number of consecutive seeds")->capture_default_str()->check(CLI::PositiveNumber);
  auto* bench_seed = bench->add_option("--seed", bench_seed_v, "First seed (overrides SAF_SEED)");
  bench->add_option("--timeout", bench_timeout, "Seconds per site")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--mode", bench_mode, "guided or random")->capture_default_str();
  bench->add_option("--out", bench_out, "Report file");
  bench->add_flag("--untimed", bench_untimed, "Write zero wall times so reruns compare byte for byte");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const saf::Registry registry = registry_path.empty() ? saf::default_registry() : saf::registry_load(registry_path);

    if (list->parsed()) {
      for (const auto& k : registry.entries()) {
        std::cout << k.name << "\t" << k.category << "\t"
                  << (k.implemented ? "implemented" : (k.extended ? "extended" : "listed")) << "\t"
                  << (k.safe_condition ? k.safe_condition->text : "-") << "\n";
      }
      return kExitOk;
    }

    if (gen->parsed()) {
      saf::GenerationConfig cfg;
      cfg.shape = parse_shape(gen_shape);
      cfg.target_size = gen_samples;
      cfg.seed = resolve_seed(gen_seed, gen_seed_v);
      const saf::Dataset ds = saf::build_dataset(registry.at(gen_function), cfg);
      saf::dataset_save(ds, gen_out);
      std::size_t counts[3] = {0, 0, 0};
      for (const auto& s : ds.samples) ++counts[static_cast<int>(s.label)];
      std::cout << ds.samples.size() << " samples for '" << gen_function << "' (Increase " << counts[0]
                << ", Decrease " << counts[1] << ", NoChange " << counts[2] << ") written to " << gen_out << "\n";
      return kExitOk;
    }

    if (train->parsed()) {
      saf::TrainConfig cfg;
      cfg.trees = train_trees;
      cfg.seed = resolve_seed(train_seed, train_seed_v);
      cfg.test_split = train_split;
      const saf::Dataset ds = saf::dataset_load(train_dataset);
      const auto [forest, m] = saf::train_forest(ds, cfg);
      saf::model_save(forest, train_out);
      std::cout << "kernel " << forest.kernel << " shape " << forest.shape_class() << "\n"
                << "macro-F1 " << std::setprecision(4) << m.f1.macro << " (Increase " << m.f1.per_class[0]
                << ", Decrease " << m.f1.per_class[1] << ", NoChange " << m.f1.per_class[2] << ")\n"
                << "training time " << std::setprecision(3) << m.train_seconds / 60.0 << " min ("
                << m.train_seconds << " s)\n";
      return kExitOk;
    }

    if (scan->parsed()) {
      const saf::ProgramSpec p = saf::program_parse(scan_program);
      const saf::ScanResult r = saf::scan_for_unstable(p, registry);
      for (const auto& s : r.sites) {
        std::cout << s.name << "\t" << s.kernel;
        for (const auto& shp : s.entry_shapes) std::cout << "\t" << saf::shape_class(shp);
        std::cout << "\n";
      }
      for (const auto& d : r.diagnostics) std::cerr << "note: " << d << "\n";
      return kExitOk;
    }

    if (fuzz->parsed()) {
      const saf::ProgramSpec p = saf::program_parse(fuzz_program_path);
      saf::FuzzConfig cfg;
      cfg.timeout_s = fuzz_timeout;
      cfg.rate = fuzz_rate;
      cfg.seed = resolve_seed(fuzz_seed, fuzz_seed_v);
      cfg.mode = parse_mode(fuzz_mode);
      if (cfg.mode == saf::FuzzMode::Guided && fuzz_models.empty())
        throw saf::UsageError("guided fuzzing needs --models");
      saf::ModelStore store{std::filesystem::path(fuzz_models)};
      saf::Report report;
      report.registry_version = registry.version();
      report.config = saf::fuzz_config_to_json(cfg);
      saf::report_add(report, p, saf::fuzz_program(p, registry, store, cfg), cfg.seed);
      for (const auto& e : report.entries) print_entry(e);
      for (const auto& d : report.diagnostics) std::cerr << "note: " << d << "\n";
      print_totals(report);
      if (!fuzz_out.empty()) saf::report_emit(report, fuzz_out);
      return report.totals().bugs_found > 0 ? kExitBugs : kExitOk;
    }

    if (bench->parsed()) {
      saf::FuzzConfig cfg;
      cfg.timeout_s = bench_timeout;
      cfg.mode = parse_mode(bench_mode);
      const std::uint64_t first = resolve_seed(bench_seed, bench_seed_v);
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < bench_seeds; ++i) seeds.push_back(first + i);
      const auto programs = saf::corpus_manifest();
      saf::ModelStore store{std::filesystem::path(bench_models)};
      if (cfg.mode == saf::FuzzMode::Guided)
        saf::ensure_models(store, bench_models, saf::site_kernels(programs, registry), saf::GenerationConfig{},
                           saf::TrainConfig{}, registry, &std::cerr);
      saf::Report report = saf::run_corpus(programs, seeds, store, cfg, registry);
      if (bench_untimed)
        for (auto& e : report.entries) e.wall_time_s = 0;
      bool as_expected = true;
      for (const auto& e : report.entries) {
        print_entry(e);
        if (e.expected && !e.matched()) as_expected = false;
      }
      // Programs without an annotation must come out clean.
      for (const auto& p : programs)
        if (!p.expected)
          for (const auto& e : report.entries)
            if (e.program == p.name && e.status == saf::FuzzStatus::Found) as_expected = false;
      for (const auto& d : report.diagnostics) std::cerr << "note: " << d << "\n";
      print_totals(report);
      std::cout << (as_expected ? "corpus: all expectations met\n" : "corpus: expectations NOT met\n");
      if (!bench_out.empty()) saf::report_emit(report, bench_out);
      return as_expected ? kExitOk : kExitBugs;
    }
  } catch (const saf::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const saf::CapabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const saf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
