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

// Power-prediction instances: feature-set selection, TRAIN-fitted
// standardization and ngram vocabulary, the serialized model, evaluation
// and feature-set ablation.

#ifndef GENPOWER_FEATURIZE_HPP_
#define GENPOWER_FEATURIZE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "genpower/corpus.hpp"
#include "genpower/features.hpp"
#include "genpower/learn.hpp"
#include "genpower/pairs.hpp"

namespace genpower {

// Ngram terms seen in TRAIN. Every term gets one id per variant:
// id = 4 * term_index + variant, so swapping p1 and p2 toggles bit 0.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> terms);  // sorted, unique

  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return 4 * terms_.size(); }
  std::optional<std::uint32_t> find(Variant v, std::string_view term) const;
  std::string feature(std::uint32_t id) const;  // "p1_im|L1:send"
  static Variant variant_of(std::uint32_t id) { return static_cast<Variant>(id % 4); }
  const std::string& term_of(std::uint32_t id) const { return terms_[id / 4]; }
  static std::uint32_t swap_roles(std::uint32_t id) { return id ^ 1u; }

 private:
  std::vector<std::string> terms_;
};

// Terms occurring in at least `min_df` TRAIN instances (any variant); the
// `max_terms` most frequent are kept, ties broken alphabetically.
Vocabulary build_vocabulary(const std::vector<const PairFeatures*>& train, std::size_t min_df,
                            std::size_t max_terms);

struct Instance {
  std::size_t id = 0;
  std::string thread_id;
  std::string p1;
  std::string p2;
  Split split = Split::kTrain;
  PowerLabel label = PowerLabel::kSuperior;
  std::array<std::array<double, kNumStructuralFeatures>, 4> structural{};  // by Variant
  Gender gender_p1 = Gender::kIndeterminate;
  Gender gender_p2 = Gender::kIndeterminate;
  std::optional<GenderEnv> env_p1;
  std::optional<GenderEnv> env_p2;
  std::vector<std::pair<std::uint32_t, double>> ngrams;  // sorted by id
  bool is_reversed = false;

  const std::array<double, kNumStructuralFeatures>& operator[](Variant v) const {
    return structural[static_cast<std::size_t>(v)];
  }
};

Instance make_instance(std::size_t id, const PairInstance& pair, const PairFeatures& f,
                       Split split, const Vocabulary& vocab);

// Roles swapped, label flipped.
Instance reversed(const Instance& x);

// A named combination of feature families.
struct FeatureSpec {
  std::set<FeatureFamily> families;
  std::string name() const;  // LEX first, then PST VRB THR DA ODP GEN GNE
  bool operator==(const FeatureSpec&) const = default;
};

// "THR+LEX+GEN" (case-insensitive); throws DataError when empty or unknown.
FeatureSpec parse_feature_spec(std::string_view s);
// Comma separated list of specs.
std::vector<FeatureSpec> parse_feature_specs(std::string_view s);

struct SpaceOptions {
  bool env_both = false;  // GNE also encodes p2's environment
};

// Column layout of a spec plus the TRAIN-fitted transform.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  FeatureSpace(FeatureSpec spec, SpaceOptions opts, const Vocabulary& vocab);

  static FeatureSpace fit(const FeatureSpec& spec, const SpaceOptions& opts,
                          const Vocabulary& vocab, const std::vector<Instance>& train);

  learn::Vector<double> transform(const Instance& x) const;
  learn::Matrix<double> transform(const std::vector<Instance>& xs) const;

  const FeatureSpec& spec() const { return spec_; }
  const SpaceOptions& options() const { return opts_; }
  std::size_t dense_dimension() const { return dense_names_.size(); }
  std::size_t dimension() const { return dense_names_.size() + (lexical_ ? vocab_size_ : 0); }
  const std::vector<std::string>& dense_names() const { return dense_names_; }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& scales() const { return scales_; }
  void set_standardization(std::vector<double> means, std::vector<double> scales);

 private:
  std::vector<double> raw_dense(const Instance& x) const;

  FeatureSpec spec_;
  SpaceOptions opts_;
  std::size_t vocab_size_ = 0;
  std::vector<std::uint8_t> blocks_;  // per vocabulary id: variant * 3 + family
  bool lexical_ = false;
  std::vector<std::string> dense_names_;
  std::vector<double> means_;
  std::vector<double> scales_;  // 0 marks a constant column
};

struct TrainOptions {
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0};
  double tolerance = 1e-3;
  int degree = 2;
  std::uint64_t seed = 42;
  SpaceOptions space;
};

inline constexpr std::string_view kModelFormat = "genpower-svm";
inline constexpr int kModelVersion = 1;

struct Model {
  FeatureSpace space;
  Vocabulary vocabulary;
  learn::SvmModel<double> svm;
  std::uint64_t seed = 42;
  bool converged = true;
};

// Trains on both orderings of each TRAIN instance.
Model train_model(const std::vector<Instance>& train, const Vocabulary& vocab,
                  const FeatureSpec& spec, double c, const TrainOptions& opts);

// Structured text with hexadecimal floats; reloads bit-exactly.
std::string serialize_model(const Model& m);
Model parse_model(std::string_view text);

double decision_value(const Model& m, const Instance& x);
PowerLabel predict(const Model& m, const Instance& x);  // 0 -> SUPERIOR

struct Prediction {
  std::size_t instance_id = 0;
  PowerLabel gold = PowerLabel::kSuperior;
  PowerLabel pred = PowerLabel::kSuperior;
  double decision = 0;
};

struct Evaluation {
  double accuracy = 0;
  std::size_t correct = 0;
  std::vector<Prediction> predictions;
};

// Throws DataError on an empty set.
Evaluation evaluate(const Model& m, const std::vector<Instance>& xs);
std::string predictions_to_csv(const std::vector<Prediction>& p);

// Most frequent TRAIN label (ties: SUPERIOR) scored on `xs`.
struct MajorityBaseline {
  PowerLabel label = PowerLabel::kSuperior;
  double accuracy = 0;
};
MajorityBaseline majority_baseline(const std::vector<Instance>& train,
                                   const std::vector<Instance>& xs);

struct ModelSelection {
  Model model;
  double c = 0;
  double dev_accuracy = 0;
  std::vector<std::pair<double, double>> grid;  // (C, DEV accuracy)
};

// Best C on DEV; ties go to the smaller C.
ModelSelection select_model(const std::vector<Instance>& train, const std::vector<Instance>& dev,
                            const Vocabulary& vocab, const FeatureSpec& spec,
                            const TrainOptions& opts);

struct AblationRow {
  FeatureSpec spec;
  double c = 0;
  double dev_accuracy = 0;
  std::optional<double> test_accuracy;
  std::size_t dimension = 0;
  std::optional<std::string> base_spec;  // spec without GEN/GNE, when run
  std::optional<double> delta;           // accuracy gain over base_spec
  std::optional<double> error_reduction;
  std::optional<double> mcnemar_p_vs_best;
  std::vector<Prediction> predictions;   // on TEST if present, else DEV
};

struct AblationComparison {
  std::string spec_1;
  std::string spec_2;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  bool exact = false;
  double p = 1;
};

struct AblationReport {
  std::string evaluated_on;  // "TEST" or "DEV"
  MajorityBaseline majority;
  std::vector<AblationRow> rows;  // ranked by DEV accuracy, then input order
  std::vector<AblationComparison> comparisons;
};

AblationReport ablate(const std::vector<Instance>& train, const std::vector<Instance>& dev,
                      const std::vector<Instance>& test, const Vocabulary& vocab,
                      const std::vector<FeatureSpec>& specs, const TrainOptions& opts);

std::string ablation_to_csv(const AblationReport& r);

}  // namespace genpower

#endif  // GENPOWER_FEATURIZE_HPP_
