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

// Dialog-structure features of a participant p over a reference message set
// M (either the whole thread or the interaction messages of a pair), the
// pluggable dialog-act / overt-display-of-power taggers that feed them, and
// lexical ngrams.

#ifndef GENPOWER_FEATURES_HPP_
#define GENPOWER_FEATURES_HPP_

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genpower/corpus.hpp"
#include "genpower/pairs.hpp"

namespace genpower {

enum class Feature : std::uint8_t {
  kInitiator,
  kFirstMsgPos,
  kLastMsgPos,
  kMsgCount,
  kMsgRatio,
  kTokenCount,
  kTokenRatio,
  kTokenPerMsg,
  kAvgRecipients,
  kAvgToRecipients,
  kInToListPct,
  kAddPerson,
  kRemovePerson,
  kReplyRate,
  kReqActionCount,
  kReqInformCount,
  kInformCount,
  kConventionalCount,
  kDanglingReqPct,
  kOdpCount,
};
inline constexpr std::size_t kNumStructuralFeatures = 20;

// Feature sets used for analysis and ablation.
enum class FeatureFamily : std::uint8_t {
  kPositional,       // PST
  kVerbosity,        // VRB
  kThreadStructure,  // THR
  kDialogAct,        // DA
  kOdp,              // ODP
  kLexical,          // LEX
  kGender,           // GEN
  kGenderEnv,        // GNE
};

std::string_view feature_name(Feature f);    // "MsgRatio"
std::string_view feature_column(Feature f);  // "msg_ratio"
FeatureFamily feature_family(Feature f);
std::string_view to_string(FeatureFamily f);  // "PST", ...
std::optional<FeatureFamily> parse_feature_family(std::string_view s);
const std::array<Feature, kNumStructuralFeatures>& all_features();

// The four per-pair versions of every feature.
enum class Variant : std::uint8_t { kP1Im, kP2Im, kP1Mt, kP2Mt };
std::string_view variant_prefix(Variant v);  // "p1_im", "p2_im", "p1_mt", "p2_mt"
inline constexpr std::array<Variant, 4> kVariants = {Variant::kP1Im, Variant::kP2Im,
                                                     Variant::kP1Mt, Variant::kP2Mt};

using SparseCounts = std::map<std::string, double>;

struct FeatureVector {
  Variant variant = Variant::kP1Mt;
  std::array<double, kNumStructuralFeatures> values{};
  SparseCounts ngrams;

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
};

// Reference message set in canonical thread order.
using MessageSet = std::vector<const Message*>;
MessageSet all_messages(const Thread& t);
MessageSet select_messages(const Thread& t, const std::vector<std::string>& ids);

struct Token {
  std::string surface;
  std::string lower;
};

// Maximal runs of letters, digits and apostrophes.
std::vector<Token> tokenize(std::string_view body);

struct Positional {
  double initiator = 0;
  double first_msg_pos = 1;
  double last_msg_pos = 1;
};
Positional positional(std::string_view p, const MessageSet& m);

struct Verbosity {
  double msg_count = 0;
  double msg_ratio = 0;
  double token_count = 0;
  double token_ratio = 0;
  double token_per_msg = 0;
};
Verbosity verbosity(std::string_view p, const MessageSet& m);

struct ThreadStructure {
  double avg_recipients = 0;
  double avg_to_recipients = 0;
  double in_to_list_pct = 0;
  double add_person = 0;
  double remove_person = 0;
  double reply_rate = 0;
};
// Parents of p's replies are looked up in `t`; replies received by p are
// counted within `m`.
ThreadStructure thread_structure(const Thread& t, std::string_view p, const MessageSet& m);

struct DialogActCounts {
  double req_action = 0;
  double req_inform = 0;
  double inform = 0;
  double conventional = 0;
  double dangling_req_pct = 0;
};
// Throws DataError when one of p's messages has no sentence annotation.
DialogActCounts dialog_act_counts(std::string_view p, const MessageSet& m);
double odp_count(std::string_view p, const MessageSet& m);

enum class NgramFamily : std::uint8_t { kLemma, kPos, kMixed };
std::string_view to_string(NgramFamily f);
std::optional<NgramFamily> parse_ngram_family(std::string_view s);

// Unigram and bigram counts over p's messages. Keys look like
// "L1:send", "L2:send the", "P2:V DET", "M2:V the". LEMMA falls back to
// lowercased surface tokens when a message has no token annotation;
// POS and MIXED require token annotations.
SparseCounts ngrams(std::string_view p, const MessageSet& m,
                    const std::set<NgramFamily>& families);

// Open-class POS tags are replaced by the tag in MIXED ngrams.
bool is_open_class(std::string_view pos);

struct FeatureOptions {
  bool dialog_acts = true;
  std::set<NgramFamily> ngram_families = {NgramFamily::kLemma};
};

FeatureVector compute_features(const Thread& t, std::string_view p, const MessageSet& m,
                               const FeatureOptions& opts);

struct PairFeatures {
  std::array<FeatureVector, 4> variants;  // indexed by Variant
  Gender gender_p1 = Gender::kIndeterminate;
  Gender gender_p2 = Gender::kIndeterminate;
  std::optional<GenderEnv> env_p1;
  std::optional<GenderEnv> env_p2;

  const FeatureVector& operator[](Variant v) const {
    return variants[static_cast<std::size_t>(v)];
  }
  // (p1 is M, p1 is F, p2 is M, p2 is F)
  std::array<double, 4> gender_one_hot() const;
};

PairFeatures pair_features(const Thread& t, std::string_view p1, std::string_view p2,
                           const PairContext& ctx, const FeatureOptions& opts);

// --- taggers ---------------------------------------------------------------

class DialogActTagger {
 public:
  virtual ~DialogActTagger() = default;
  virtual std::vector<SentenceSpan> tag(std::string_view body) const = 0;
};

class OdpTagger {
 public:
  virtual ~OdpTagger() = default;
  virtual bool is_odp(std::string_view sentence, DialogAct act) const = 0;
};

// Splits on terminal punctuation and newlines. Every span is trimmed and
// labelled INFORM.
std::vector<SentenceSpan> split_sentences(std::string_view body);

// Low-fidelity lexical rules: '?' -> REQUEST_INFORMATION, greeting/closing
// lexicon -> CONVENTIONAL, imperative opener or "please" -> REQUEST_ACTION,
// otherwise INFORM.
class BaselineDialogActTagger final : public DialogActTagger {
 public:
  std::vector<SentenceSpan> tag(std::string_view body) const override;
  static DialogAct classify(std::string_view sentence);
};

// Low-fidelity necessity/deadline patterns without mitigation markers.
class BaselineOdpTagger final : public OdpTagger {
 public:
  bool is_odp(std::string_view sentence, DialogAct act) const override;
};

// Tags every message lacking sentence annotations; existing annotations are
// kept untouched.
Corpus tag_corpus(const Corpus& corpus, const DialogActTagger& da, const OdpTagger& odp);

}  // namespace genpower

#endif  // GENPOWER_FEATURES_HPP_
