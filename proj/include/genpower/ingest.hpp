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

// Readers for every on-disk input.
//
//   threads      one JSON object per line:
//                {"thread_id": ..., "messages": [{"msg_id", "parent_id"?,
//                 "timestamp", "from": {"email", "name"?}, "to": [...],
//                 "cc": [...], "body"}]}
//   SSA          directory of yobYYYY.txt files with rows "Name,G,Count"
//   hierarchy    header-less CSV "superior_email,subordinate_email"
//   overrides    CSV "email,gender,source"
//   annotations  one JSON object per line:
//                {"thread_id", "msg_id", "spans": [{"start", "end", "da", "odp"}],
//                 "tokens"?: [{"lemma", "pos"}]}

#ifndef GENPOWER_INGEST_HPP_
#define GENPOWER_INGEST_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genpower/corpus.hpp"
#include "genpower/gender.hpp"

namespace genpower {

// Parses one thread record; `line_no` is used in error messages.
Thread parse_thread(std::string_view line, std::size_t line_no);
std::string serialize_thread(const Thread& t);

Corpus load_threads(const std::filesystem::path& path);
Corpus parse_threads(const std::vector<std::string>& lines);
std::string serialize_threads(const Corpus& corpus);

// Raw rows of one SSA year file.
struct SsaRow {
  std::string name;
  Gender gender = Gender::kMale;
  std::uint64_t count = 0;
};
std::vector<SsaRow> parse_ssa_file(const std::filesystem::path& path);

// Sums counts over yobYYYY.txt files with year_from <= YYYY <= year_to.
NameStats load_ssa(const std::filesystem::path& dir, int year_from, int year_to);

DominanceSet parse_hierarchy(const std::vector<std::string>& lines);
DominanceSet load_hierarchy(const std::filesystem::path& path);

GenderOverrides parse_overrides(const std::vector<std::string>& lines);
GenderOverrides load_overrides(const std::filesystem::path& path);

struct Annotation {
  std::vector<SentenceSpan> spans;
  std::optional<std::vector<TokenAnnotation>> tokens;
};

// Keyed by (thread_id, msg_id).
using AnnotationSidecar = std::map<std::pair<std::string, std::string>, Annotation>;

AnnotationSidecar parse_annotations(const std::vector<std::string>& lines);
AnnotationSidecar load_annotations(const std::filesystem::path& path);

// Replaces sentence spans (and token annotations when given) of every
// referenced message. Throws DataError on dangling references or bad spans.
Corpus apply_annotations(const Corpus& corpus, const AnnotationSidecar& sidecar);

// Optional explicit split file: CSV "thread_id,split".
CorpusSplit load_split_file(const std::filesystem::path& path);

}  // namespace genpower

#endif  // GENPOWER_INGEST_HPP_
