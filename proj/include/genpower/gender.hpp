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

// Name-statistics gender resolution for email participants.
//
// A first name n with male count m and female count f over the configured
// year window has ambiguity score
//
//   AS(n) = 100 - |mp(n) - fp(n)|,  mp = 100 m / (m + f),  fp = 100 f / (m + f)
//
// which is 0 for single-gender names and 100 for an even split. A name is
// given the majority gender when AS(n) <= threshold. Participants get the
// gender of their lowest-AS candidate first name, unless a manual override
// exists.

#ifndef GENPOWER_GENDER_HPP_
#define GENPOWER_GENDER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genpower/corpus.hpp"

namespace genpower {

struct NameCounts {
  std::uint64_t male = 0;
  std::uint64_t female = 0;
};

// Per-name male/female totals. Keys are lowercase; lookups are
// case-insensitive.
class NameStats {
 public:
  void add(std::string_view name, Gender g, std::uint64_t count);
  const NameCounts* find(std::string_view name) const;
  std::size_t size() const { return counts_.size(); }
  const std::map<std::string, NameCounts>& entries() const { return counts_; }

 private:
  std::map<std::string, NameCounts> counts_;
};

struct GenderConfig {
  double ambiguity_threshold = 10.0;
  int year_from = 1931;
  int year_to = 1977;

  void validate() const;  // throws DataError
};

// Equals 100 - |mp - fp|, evaluated as 200 min(m, f) / (m + f) so that the
// score is exactly symmetric and exactly zero for single-gender names.
template <typename Scalar = double>
Scalar ambiguity_score(const NameCounts& c) {
  const auto lo = static_cast<Scalar>(c.male < c.female ? c.male : c.female);
  const auto total = static_cast<Scalar>(c.male) + static_cast<Scalar>(c.female);
  return Scalar(200) * lo / total;
}

std::optional<double> ambiguity_score(const NameStats& stats, std::string_view name);

Gender likely_gender(const NameCounts& c, double threshold);
Gender likely_gender(const NameStats& stats, std::string_view name, const GenderConfig& cfg);

// Candidate first names from a header name field, falling back to the email
// address when the field is empty. All candidates are lowercase.
std::vector<std::string> candidate_names(std::optional<std::string_view> name_field,
                                         std::string_view email);

// First-name guess from an email address (local part up to '.', '_' or '-',
// or up to the first interior capital for camel case).
std::optional<std::string> email_first_name(std::string_view address);

enum class Provenance : std::uint8_t { kManual, kAuto, kNone };
std::string_view to_string(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view s);

struct ParticipantRecord {
  std::string email;
  std::set<std::string> display_names;
  Gender gender = Gender::kIndeterminate;
  std::optional<double> ambiguity_score;
  Provenance provenance = Provenance::kNone;
  std::optional<std::string> chosen_name;
  // Distinct display names resolve to opposite confident genders (for
  // example a shared assistant mailbox name).
  bool conflicting_names = false;
};

using GenderOverrides = std::map<std::string, Gender>;
using GenderAssignments = std::map<std::string, ParticipantRecord>;

ParticipantRecord assign_participant(std::string_view email,
                                     const std::set<std::string>& display_names,
                                     const NameStats& stats, const GenderOverrides& overrides,
                                     const GenderConfig& cfg);

// Every participant with the non-empty display names seen in headers.
std::map<std::string, std::set<std::string>> collect_participants(const Corpus& corpus);

GenderAssignments assign_corpus(const Corpus& corpus, const NameStats& stats,
                                const GenderOverrides& overrides, const GenderConfig& cfg);

// Gender of `email`, INDETERMINATE when unknown.
Gender gender_of(const GenderAssignments& a, std::string_view email);

enum class SubsetMode : std::uint8_t { kAllSenders, kAllParticipants };
std::string_view to_string(SubsetMode m);  // "asgi" / "apgi"
std::optional<SubsetMode> parse_subset_mode(std::string_view s);

bool in_subset(const Thread& t, const GenderAssignments& a, SubsetMode mode);
Corpus subset_corpus(const Corpus& corpus, const GenderAssignments& a, SubsetMode mode);

struct GoldAccuracy {
  std::size_t gold_total = 0;   // gold participants present in the assignment table
  std::size_t assigned = 0;     // of those, given a gender automatically
  std::size_t correct = 0;
  double coverage_pct = 0.0;    // 100 assigned / gold_total
  double accuracy_pct = 0.0;    // 100 correct / assigned
};

struct AssignmentReport {
  std::size_t total_participants = 0;
  std::size_t assigned_participants = 0;
  double participant_coverage_pct = 0.0;
  std::size_t total_messages = 0;
  std::size_t gendered_sender_messages = 0;
  double message_coverage_pct = 0.0;
  std::size_t total_threads = 0;
  std::size_t asgi_threads = 0;
  double asgi_pct = 0.0;
  std::size_t apgi_threads = 0;
  double apgi_pct = 0.0;
  std::size_t male = 0;
  std::size_t female = 0;
  std::size_t manual = 0;
  std::size_t conflicting = 0;
  std::optional<GoldAccuracy> gold;
};

AssignmentReport coverage_report(const Corpus& corpus, const GenderAssignments& a);

// Accuracy of automatic assignment (computed without overrides) against gold.
GoldAccuracy gold_accuracy(const GenderAssignments& automatic, const GenderOverrides& gold);

// CSV "email,gender,ambiguity_score,provenance" sorted by email.
std::string assignments_to_csv(const GenderAssignments& a);
GenderAssignments assignments_from_csv(const std::vector<std::string>& lines);

}  // namespace genpower

#endif  // GENPOWER_GENDER_HPP_
