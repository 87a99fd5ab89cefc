// Copyright 2026 The genpower Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// genpower: command-line front end. Exit codes: 0 ok, 1 usage, 2 data error.

#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "genpower/common.hpp"
#include "genpower/pipeline.hpp"

namespace {

using genpower::PipelineConfig;
using genpower::UsageError;

struct RawOptions {
  std::string ssa_years;
  std::string subset;
  std::string split;
  std::string eval_split;
  std::string ss_type;
  std::string ngram_families;
  std::string c_grid;
  bool no_taggers = false;
};

// Validates the string-typed flags into the config.
void finish_config(const RawOptions& raw, PipelineConfig& cfg) {
  if (!raw.ssa_years.empty()) {
    const auto parts = genpower::split(raw.ssa_years, ':');
    try {
      if (parts.size() != 2) throw std::invalid_argument("shape");
      cfg.gender.year_from = std::stoi(std::string(parts[0]));
      cfg.gender.year_to = std::stoi(std::string(parts[1]));
    } catch (const std::exception&) {
      throw UsageError(fmt::format("--ssa-years expects FROM:TO, got '{}'", raw.ssa_years));
    }
  }
  if (!raw.subset.empty()) {
    auto m = genpower::parse_subset_mode(raw.subset);
    if (!m) throw UsageError(fmt::format("--subset expects asgi or apgi, got '{}'", raw.subset));
    cfg.subset = *m;
  }
  if (!raw.split.empty()) {
    try {
      cfg.split = genpower::parse_split_proportions(raw.split);
    } catch (const genpower::DataError& e) {
      throw UsageError(fmt::format("--split: {}", e.what()));
    }
  }
  if (!raw.eval_split.empty()) {
    auto s = genpower::parse_split(raw.eval_split);
    if (!s) throw UsageError(fmt::format("--eval-split expects train, dev or test"));
    cfg.eval_split = *s;
  }
  if (!raw.ss_type.empty()) {
    auto t = genpower::stats::parse_ss_type(raw.ss_type);
    if (!t) throw UsageError("--ss-type expects I, II or III");
    cfg.ss_type = *t;
  }
  if (!raw.ngram_families.empty()) {
    cfg.ngram_families.clear();
    for (const auto& f : genpower::split(raw.ngram_families, ',')) {
      auto fam = genpower::parse_ngram_family(genpower::trim(f));
      if (!fam) throw UsageError(fmt::format("unknown ngram family '{}'", f));
      cfg.ngram_families.insert(*fam);
    }
  }
  if (!raw.c_grid.empty()) {
    cfg.c_grid.clear();
    for (const auto& f : genpower::split(raw.c_grid, ',')) {
      try {
        cfg.c_grid.push_back(std::stod(std::string(f)));
      } catch (const std::exception&) {
        throw UsageError(fmt::format("bad --c-grid value '{}'", f));
      }
      if (!(cfg.c_grid.back() > 0)) throw UsageError("--c-grid values must be positive");
    }
  }
  if (cfg.c && !(*cfg.c > 0)) throw UsageError("--c must be positive");
  if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw UsageError("--alpha must be in (0, 1)");
  if (cfg.degree < 1) throw UsageError("--degree must be at least 1");
  cfg.baseline_taggers = !raw.no_taggers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genpower: gender and power analytics for email threads"};
  app.set_config("--config", "", "INI/TOML file with option defaults; flags win");
  app.require_subcommand(1);
  app.fallthrough();

  PipelineConfig cfg;
  RawOptions raw;
  std::string work_dir = cfg.work_dir.string();
  std::string threads, ssa_dir, hierarchy, overrides, annotations, split_file, model;

  app.add_option("--work-dir", work_dir, "Directory for artifacts")->capture_default_str();
  app.add_option("--threads", threads, "Thread corpus (JSON lines)");
  app.add_option("--ssa-dir", ssa_dir, "Directory with SSA yobYYYY.txt files");
  app.add_option("--hierarchy", hierarchy, "Dominance pairs CSV (superior,subordinate)");
  app.add_option("--overrides", overrides, "Manual gender CSV (participant,gender)");
  app.add_option("--annotations", annotations, "Dialog act / ODP annotation sidecar");
  app.add_option("--split-file", split_file, "Thread split CSV (thread_id,split)");
  app.add_option("--model", model, "Model path (default <work-dir>/model.json)");
  app.add_option("--seed", cfg.seed, "Seed for split hashing and SMO order")->capture_default_str();
  app.add_option("--as-threshold", cfg.gender.ambiguity_threshold, "Ambiguity score threshold")
      ->capture_default_str();
  app.add_option("--ssa-years", raw.ssa_years, "SSA year range FROM:TO (default 1931:1977)");
  app.add_option("--subset", raw.subset, "Thread subset: asgi or apgi (default apgi)");
  app.add_option("--split", raw.split, "TRAIN:DEV:TEST proportions (default 0.50:0.24:0.26)");
  app.add_option("--feature-sets", cfg.feature_sets, "Feature sets, e.g. LEX+THR,LEX+THR+GEN");
  app.add_option("--ngram-families", raw.ngram_families,
                 "Comma list of lemma, pos, mixed (default lemma)");
  app.add_option("--min-df", cfg.min_df, "Minimum TRAIN document frequency")
      ->capture_default_str();
  app.add_option("--max-terms", cfg.max_terms, "Vocabulary size cap")->capture_default_str();
  app.add_flag("--no-taggers", raw.no_taggers, "Skip the baseline dialog act / ODP taggers");
  app.add_flag("--env-both", cfg.env_both, "GNE also encodes p2's environment");
  app.add_option("--c", cfg.c, "Fixed SVM C (default: select on DEV)");
  app.add_option("--c-grid", raw.c_grid, "Comma list of C values for DEV selection");
  app.add_option("--tolerance", cfg.tolerance, "SMO stopping tolerance")->capture_default_str();
  app.add_option("--degree", cfg.degree, "Polynomial kernel degree")->capture_default_str();
  app.add_option("--eval-split", raw.eval_split, "Split for eval: train, dev or test");
  app.add_option("--ss-type", raw.ss_type, "ANOVA sums of squares: I, II or III");
  app.add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();

  using Command = void (*)(const PipelineConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"ssa-build", "Aggregate SSA names and ambiguity scores", genpower::cmd_ssa_build},
      {"gender-assign", "Assign participant genders", genpower::cmd_gender_assign},
      {"subset", "Filter threads to ASGI or APGI", genpower::cmd_subset},
      {"pairs", "Extract interacting and related pairs", genpower::cmd_pairs},
      {"features", "Extract features for related pairs", genpower::cmd_features},
      {"analyze", "t-tests, ANOVA, Tukey HSD over structural features", genpower::cmd_analyze},
      {"train", "Train the power classifier", genpower::cmd_train},
      {"eval", "Evaluate a trained model", genpower::cmd_eval},
      {"ablate", "Compare feature sets", genpower::cmd_ablate},
  };
  Command selected = nullptr;
  for (const auto& [name, help, fn] : commands) {
    Command f = fn;
    app.add_subcommand(name, help)->callback([&selected, f] { selected = f; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto set_path = [](const std::string& s, std::optional<std::filesystem::path>& out) {
    if (!s.empty()) out = s;
  };
  try {
    cfg.work_dir = work_dir;
    set_path(threads, cfg.threads);
    set_path(ssa_dir, cfg.ssa_dir);
    set_path(hierarchy, cfg.hierarchy);
    set_path(overrides, cfg.overrides);
    set_path(annotations, cfg.annotations);
    set_path(split_file, cfg.split_file);
    set_path(model, cfg.model);
    finish_config(raw, cfg);
    selected(cfg, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "genpower: " << e.what() << "\n";
    return 1;
  } catch (const genpower::DataError& e) {
    std::cerr << "genpower: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "genpower: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
