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

// In-memory model of threaded email corpora: messages, threads, participant
// genders, the organizational dominance relation and train/dev/test splits.
// Everything downstream consumes these types.

#ifndef GENPOWER_CORPUS_HPP_
#define GENPOWER_CORPUS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genpower/common.hpp"

namespace genpower {

enum class Gender : std::uint8_t { kMale, kFemale, kIndeterminate };

std::string_view to_string(Gender g);  // "M", "F", "INDETERMINATE"
std::optional<Gender> parse_gender(std::string_view s);
inline bool is_identified(Gender g) { return g != Gender::kIndeterminate; }

enum class DialogAct : std::uint8_t {
  kRequestAction,
  kRequestInformation,
  kInform,
  kConventional,
};

std::string_view to_string(DialogAct a);  // "RA", "RI", "INF", "CONV"
std::optional<DialogAct> parse_dialog_act(std::string_view s);
inline bool is_request(DialogAct a) {
  return a == DialogAct::kRequestAction || a == DialogAct::kRequestInformation;
}

// A tagged sentence: half-open character range [start, end) into the body.
struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  DialogAct act = DialogAct::kInform;
  bool odp = false;

  bool operator==(const SentenceSpan&) const = default;
};

// Token-level annotation from an external lemmatizer/POS tagger.
struct TokenAnnotation {
  std::string lemma;
  std::string pos;

  bool operator==(const TokenAnnotation&) const = default;
};

// One header mailbox: identity key plus the raw display name (may be empty).
struct Mailbox {
  std::string email;
  std::string name;

  bool operator==(const Mailbox&) const = default;
};

struct Message {
  std::string id;
  std::optional<std::string> parent_id;
  std::int64_t timestamp_ms = 0;  // UTC milliseconds since the epoch
  Mailbox from;
  std::vector<Mailbox> to;
  std::vector<Mailbox> cc;
  std::string body;
  std::optional<std::vector<SentenceSpan>> sentences;
  std::optional<std::vector<TokenAnnotation>> tokens;

  const std::string& sender() const { return from.email; }
  bool in_to(std::string_view email) const;
  bool in_cc(std::string_view email) const;
  bool is_recipient(std::string_view email) const { return in_to(email) || in_cc(email); }
  // Sender plus every recipient, sorted and unique.
  std::vector<std::string> participants() const;
  std::size_t recipient_count() const { return to.size() + cc.size(); }

  bool operator==(const Message&) const = default;
};

// Lowercases addresses, removes repeated recipients and drops CC entries that
// already appear in To. Throws DataError on an empty sender.
Message normalize_message(Message m);

// Throws DataError unless spans are ordered, non-overlapping and inside the body.
void validate_spans(const Message& m);

// Sorts by (timestamp, id). Throws DataError naming a duplicated id.
std::vector<Message> order_messages(std::vector<Message> messages);

// An immutable, canonically ordered thread.
class Thread {
 public:
  // Normalizes and orders `messages` and validates reply links and spans.
  Thread(std::string id, std::vector<Message> messages);

  const std::string& id() const { return id_; }
  std::span<const Message> messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }
  const Message& operator[](std::size_t i) const { return messages_[i]; }

  // P_t: every sender and recipient, sorted.
  const std::vector<std::string>& participants() const { return participants_; }
  bool has_participant(std::string_view email) const;

  // Position of a message id in canonical order.
  std::optional<std::size_t> index_of(std::string_view msg_id) const;
  const Message* find(std::string_view msg_id) const;

  bool operator==(const Thread&) const = default;

 private:
  std::string id_;
  std::vector<Message> messages_;
  std::vector<std::string> participants_;
};

// Rebuilds a thread from its current messages (the canonical ordering is
// a fixed point).
Thread order_messages(const Thread& thread);

using Corpus = std::vector<Thread>;

// Superior -> subordinate edges, together with their transitive closure.
class DominanceSet {
 public:
  using Edge = std::pair<std::string, std::string>;

  DominanceSet() = default;
  // Throws DataError on a self pair or a cycle (the message lists one cycle).
  explicit DominanceSet(std::vector<Edge> immediate);

  const std::set<Edge>& immediate() const { return immediate_; }
  const std::set<Edge>& closed() const { return closed_; }
  bool dominates(std::string_view superior, std::string_view subordinate) const;
  bool empty() const { return immediate_.empty(); }

 private:
  std::set<Edge> immediate_;
  std::set<Edge> closed_;
};

enum class Split : std::uint8_t { kTrain, kDev, kTest };
std::string_view to_string(Split s);
std::optional<Split> parse_split(std::string_view s);

struct SplitProportions {
  double train = 0.50;
  double dev = 0.24;
  double test = 0.26;
};

// Parses "a:b:c"; the parts are normalized to sum to one.
SplitProportions parse_split_proportions(std::string_view spec);

class CorpusSplit {
 public:
  CorpusSplit() = default;
  explicit CorpusSplit(std::map<std::string, Split> assignment)
      : assignment_(std::move(assignment)) {}

  // Assignment by a stable hash of thread_id and seed.
  static CorpusSplit by_hash(const Corpus& corpus, const SplitProportions& p,
                             std::uint64_t seed);

  Split at(std::string_view thread_id) const;
  bool contains(std::string_view thread_id) const;
  const std::map<std::string, Split>& assignment() const { return assignment_; }

 private:
  std::map<std::string, Split> assignment_;
};

// The hashed split bucket of a single thread id.
Split hash_split(std::string_view thread_id, const SplitProportions& p, std::uint64_t seed);

// ISO-8601 "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)" to UTC milliseconds.
std::int64_t parse_timestamp(std::string_view text);
// UTC "YYYY-MM-DDTHH:MM:SS[.fff]Z".
std::string format_timestamp(std::int64_t ms);

}  // namespace genpower

#endif  // GENPOWER_CORPUS_HPP_
