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

// Pipeline commands behind the command-line tool. Every command reads its
// inputs from explicit paths or from artifacts of earlier commands in the
// work directory, and writes fixed-name artifacts back atomically.
//
//   ssa-build      name_stats.csv, ssa_summary.json
//   gender-assign  participants.csv, gender_report.json
//   subset         threads_<mode>.jsonl, subset_<mode>.json
//   pairs          pairs.csv, pairs_summary.json
//   features       features.csv, ngrams.csv, vocab.csv, features_summary.json
//   analyze        analysis.json, analysis.csv, analysis_groups.csv
//   train          model.json, train_report.json
//   eval           predictions_<split>.csv, eval_<split>.json
//   ablate         ablation.csv, ablation.json

#ifndef GENPOWER_PIPELINE_HPP_
#define GENPOWER_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "genpower/corpus.hpp"
#include "genpower/featurize.hpp"
#include "genpower/features.hpp"
#include "genpower/gender.hpp"
#include "genpower/stats.hpp"

namespace genpower {

// Bad or missing command-line options. The CLI maps it to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::filesystem::path work_dir = "genpower-work";
  std::optional<std::filesystem::path> threads;
  std::optional<std::filesystem::path> ssa_dir;
  std::optional<std::filesystem::path> hierarchy;
  std::optional<std::filesystem::path> overrides;
  std::optional<std::filesystem::path> annotations;
  std::optional<std::filesystem::path> split_file;
  std::optional<std::filesystem::path> model;  // default: <work_dir>/model.json

  GenderConfig gender;
  std::uint64_t seed = 42;
  SplitProportions split;
  SubsetMode subset = SubsetMode::kAllParticipants;

  std::optional<std::string> feature_sets;
  std::set<NgramFamily> ngram_families = {NgramFamily::kLemma};
  std::size_t min_df = 2;
  std::size_t max_terms = 2000;
  bool baseline_taggers = true;

  bool env_both = false;
  std::optional<double> c;
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0};
  double tolerance = 1e-3;
  int degree = 2;
  Split eval_split = Split::kTest;

  stats::SsType ss_type = stats::SsType::kII;
  double alpha = 0.05;
};

inline constexpr std::string_view kDefaultTrainSpec = "LEX+THR+GEN+GNE";
inline constexpr std::string_view kDefaultAblationSpecs =
    "LEX+THR,LEX+THR+GEN,LEX+THR+GEN+GNE,GEN,PST+VRB+THR+DA+ODP,PST+VRB+THR+DA+ODP+GEN+GNE";

void cmd_ssa_build(const PipelineConfig& cfg, std::ostream& log);
void cmd_gender_assign(const PipelineConfig& cfg, std::ostream& log);
void cmd_subset(const PipelineConfig& cfg, std::ostream& log);
void cmd_pairs(const PipelineConfig& cfg, std::ostream& log);
void cmd_features(const PipelineConfig& cfg, std::ostream& log);
void cmd_analyze(const PipelineConfig& cfg, std::ostream& log);
void cmd_train(const PipelineConfig& cfg, std::ostream& log);
void cmd_eval(const PipelineConfig& cfg, std::ostream& log);
void cmd_ablate(const PipelineConfig& cfg, std::ostream& log);

// The feature table written by `features`, read back.
struct FeatureTable {
  std::vector<Instance> instances;
  Vocabulary vocabulary;
};
FeatureTable load_feature_table(const std::filesystem::path& work_dir);

// Analysis observations: each RIPP instance contributes p1 and p2 with
// their own M_t features, power, gender and environment.
struct AnalysisObservation {
  std::array<double, kNumStructuralFeatures> values{};
  PowerLabel power = PowerLabel::kSuperior;
  Gender gender = Gender::kIndeterminate;
  std::optional<GenderEnv> env;
};
std::vector<AnalysisObservation> analysis_observations(const std::vector<Instance>& xs);

}  // namespace genpower

#endif  // GENPOWER_PIPELINE_HPP_
