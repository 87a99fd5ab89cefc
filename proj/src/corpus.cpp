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

#include "genpower/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <unordered_map>

#include <fmt/format.h>

namespace genpower {

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::kMale: return "M";
    case Gender::kFemale: return "F";
    case Gender::kIndeterminate: return "INDETERMINATE";
  }
  return "INDETERMINATE";
}

std::optional<Gender> parse_gender(std::string_view s) {
  s = trim(s);
  if (s == "M" || s == "m") return Gender::kMale;
  if (s == "F" || s == "f") return Gender::kFemale;
  if (s == "INDETERMINATE" || s == "I") return Gender::kIndeterminate;
  return std::nullopt;
}

std::string_view to_string(DialogAct a) {
  switch (a) {
    case DialogAct::kRequestAction: return "RA";
    case DialogAct::kRequestInformation: return "RI";
    case DialogAct::kInform: return "INF";
    case DialogAct::kConventional: return "CONV";
  }
  return "INF";
}

std::optional<DialogAct> parse_dialog_act(std::string_view s) {
  if (s == "RA") return DialogAct::kRequestAction;
  if (s == "RI") return DialogAct::kRequestInformation;
  if (s == "INF") return DialogAct::kInform;
  if (s == "CONV") return DialogAct::kConventional;
  return std::nullopt;
}

namespace {

bool contains_email(const std::vector<Mailbox>& boxes, std::string_view email) {
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const Mailbox& b) { return b.email == email; });
}

}  // namespace

bool Message::in_to(std::string_view email) const { return contains_email(to, email); }
bool Message::in_cc(std::string_view email) const { return contains_email(cc, email); }

std::vector<std::string> Message::participants() const {
  std::vector<std::string> out;
  out.reserve(1 + to.size() + cc.size());
  out.push_back(from.email);
  for (const auto& b : to) out.push_back(b.email);
  for (const auto& b : cc) out.push_back(b.email);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Message normalize_message(Message m) {
  m.from.email = normalize_email(m.from.email);
  if (m.from.email.empty()) {
    throw DataError(fmt::format("message '{}' has an empty sender", m.id));
  }
  auto dedupe = [](std::vector<Mailbox>& boxes, const std::vector<Mailbox>* exclude) {
    std::vector<Mailbox> kept;
    for (auto& b : boxes) {
      b.email = normalize_email(b.email);
      if (b.email.empty()) continue;
      if (contains_email(kept, b.email)) continue;
      if (exclude != nullptr && contains_email(*exclude, b.email)) continue;
      kept.push_back(std::move(b));
    }
    boxes = std::move(kept);
  };
  dedupe(m.to, nullptr);
  dedupe(m.cc, &m.to);
  return m;
}

void validate_spans(const Message& m) {
  if (!m.sentences) return;
  std::size_t prev_end = 0;
  for (const auto& s : *m.sentences) {
    if (s.start >= s.end || s.end > m.body.size()) {
      throw DataError(fmt::format("message '{}': span [{},{}) outside body of length {}",
                                  m.id, s.start, s.end, m.body.size()));
    }
    if (s.start < prev_end) {
      throw DataError(fmt::format("message '{}': span [{},{}) overlaps or precedes previous span",
                                  m.id, s.start, s.end));
    }
    prev_end = s.end;
  }
}

std::vector<Message> order_messages(std::vector<Message> messages) {
  std::sort(messages.begin(), messages.end(), [](const Message& a, const Message& b) {
    if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
    return a.id < b.id;
  });
  std::vector<const std::string*> ids;
  ids.reserve(messages.size());
  for (const auto& m : messages) ids.push_back(&m.id);
  std::sort(ids.begin(), ids.end(), [](auto* a, auto* b) { return *a < *b; });
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (*ids[i] == *ids[i - 1]) throw DataError(fmt::format("duplicate msg_id '{}'", *ids[i]));
  }
  return messages;
}

Thread::Thread(std::string id, std::vector<Message> messages) : id_(std::move(id)) {
  if (messages.empty()) throw DataError(fmt::format("thread '{}' has no messages", id_));
  for (auto& m : messages) m = normalize_message(std::move(m));
  messages_ = order_messages(std::move(messages));
  std::vector<std::string> all;
  for (const auto& m : messages_) {
    validate_spans(m);
    if (m.parent_id) {
      if (*m.parent_id == m.id || !find(*m.parent_id)) {
        throw DataError(fmt::format("thread '{}': message '{}' replies to unknown message '{}'",
                                    id_, m.id, *m.parent_id));
      }
    }
    auto p = m.participants();
    all.insert(all.end(), p.begin(), p.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  participants_ = std::move(all);
}

bool Thread::has_participant(std::string_view email) const {
  return std::binary_search(participants_.begin(), participants_.end(), email,
                            [](const auto& a, const auto& b) {
                              return std::string_view(a) < std::string_view(b);
                            });
}

std::optional<std::size_t> Thread::index_of(std::string_view msg_id) const {
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    if (messages_[i].id == msg_id) return i;
  }
  return std::nullopt;
}

const Message* Thread::find(std::string_view msg_id) const {
  auto i = index_of(msg_id);
  return i ? &messages_[*i] : nullptr;
}

Thread order_messages(const Thread& thread) {
  return Thread(thread.id(), std::vector<Message>(thread.messages().begin(),
                                                  thread.messages().end()));
}

// --- dominance -------------------------------------------------------------

DominanceSet::DominanceSet(std::vector<Edge> immediate) {
  std::vector<std::string> names;
  for (auto& [sup, sub] : immediate) {
    sup = normalize_email(sup);
    sub = normalize_email(sub);
    if (sup == sub) throw DataError(fmt::format("self-dominance pair ({},{})", sup, sub));
    names.push_back(sup);
    names.push_back(sub);
    immediate_.emplace(sup, sub);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  const std::size_t n = names.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(names[i], i);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [sup, sub] : immediate_) adj[index[sup]].push_back(index[sub]);

  // Cycle detection by iterative three-colour DFS; on a back edge the cycle
  // is read off the explicit stack.
  std::vector<std::uint8_t> colour(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < adj[node].size()) {
        const std::size_t child = adj[node][next++];
        if (colour[child] == 1) {
          std::string cycle;
          bool on = false;
          for (const auto& frame : stack) {
            if (frame.first == child) on = true;
            if (on) cycle += names[frame.first] + " -> ";
          }
          cycle += names[child];
          throw DataError("dominance cycle: " + cycle);
        }
        if (colour[child] == 0) {
          colour[child] = 1;
          stack.emplace_back(child, 0);
        }
      } else {
        colour[node] = 2;
        stack.pop_back();
      }
    }
  }

  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> frontier(adj[s].begin(), adj[s].end());
    while (!frontier.empty()) {
      const std::size_t v = frontier.back();
      frontier.pop_back();
      if (seen[v]) continue;
      seen[v] = true;
      closed_.emplace(names[s], names[v]);
      for (std::size_t w : adj[v]) {
        if (!seen[w]) frontier.push_back(w);
      }
    }
  }
}

bool DominanceSet::dominates(std::string_view superior, std::string_view subordinate) const {
  return closed_.count(Edge(std::string(superior), std::string(subordinate))) > 0;
}

// --- splits ----------------------------------------------------------------

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "TRAIN";
    case Split::kDev: return "DEV";
    case Split::kTest: return "TEST";
  }
  return "TRAIN";
}

std::optional<Split> parse_split(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "train") return Split::kTrain;
  if (v == "dev") return Split::kDev;
  if (v == "test") return Split::kTest;
  return std::nullopt;
}

SplitProportions parse_split_proportions(std::string_view spec) {
  auto parts = split(spec, ':');
  if (parts.size() != 3) throw DataError(fmt::format("split '{}' is not of the form a:b:c", spec));
  double v[3];
  for (int i = 0; i < 3; ++i) {
    auto p = trim(parts[i]);
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v[i]);
    if (ec != std::errc() || ptr != p.data() + p.size() || v[i] < 0) {
      throw DataError(fmt::format("split '{}': bad proportion '{}'", spec, p));
    }
  }
  const double total = v[0] + v[1] + v[2];
  if (total <= 0) throw DataError(fmt::format("split '{}' sums to zero", spec));
  return {v[0] / total, v[1] / total, v[2] / total};
}

Split hash_split(std::string_view thread_id, const SplitProportions& p, std::uint64_t seed) {
  const double u = static_cast<double>(stable_hash(thread_id, seed) >> 11) * 0x1.0p-53;
  if (u < p.train) return Split::kTrain;
  if (u < p.train + p.dev) return Split::kDev;
  return Split::kTest;
}

CorpusSplit CorpusSplit::by_hash(const Corpus& corpus, const SplitProportions& p,
                                 std::uint64_t seed) {
  std::map<std::string, Split> a;
  for (const auto& t : corpus) a.emplace(t.id(), hash_split(t.id(), p, seed));
  return CorpusSplit(std::move(a));
}

Split CorpusSplit::at(std::string_view thread_id) const {
  auto it = assignment_.find(std::string(thread_id));
  if (it == assignment_.end()) {
    throw DataError(fmt::format("thread '{}' has no split assignment", thread_id));
  }
  return it->second;
}

bool CorpusSplit::contains(std::string_view thread_id) const {
  return assignment_.count(std::string(thread_id)) > 0;
}

// --- timestamps ------------------------------------------------------------

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw DataError(fmt::format("bad timestamp '{}'", text));
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, v);
  if (ec != std::errc() || ptr != text.data() + pos + len) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  return v;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) throw DataError(fmt::format("bad timestamp '{}'", text));
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  text = trim(text);
  const int y = parse_fixed(text, 0, 4);
  expect_char(text, 4, '-');
  const int mo = parse_fixed(text, 5, 2);
  expect_char(text, 7, '-');
  const int d = parse_fixed(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' ')) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  const int h = parse_fixed(text, 11, 2);
  expect_char(text, 13, ':');
  const int mi = parse_fixed(text, 14, 2);
  expect_char(text, 16, ':');
  const int s = parse_fixed(text, 17, 2);
  std::size_t pos = 19;
  int ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 3) ms = ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw DataError(fmt::format("bad timestamp '{}'", text));
    for (; digits < 3; ++digits) ms *= 10;
  }
  int offset_min = 0;
  if (pos >= text.size()) throw DataError(fmt::format("timestamp '{}' lacks a zone", text));
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = parse_fixed(text, pos + 1, 2);
    std::size_t mpos = pos + 3;
    if (mpos < text.size() && text[mpos] == ':') ++mpos;
    const int om = parse_fixed(text, mpos, 2);
    offset_min = sign * (oh * 60 + om);
    pos = mpos + 2;
  } else {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  if (pos != text.size()) throw DataError(fmt::format("bad timestamp '{}'", text));

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw DataError(fmt::format("bad timestamp '{}'", text));
  }
  const auto tp = sys_days(ymd) + hours(h) + minutes(mi) + seconds(s) + milliseconds(ms) -
                  minutes(offset_min);
  return duration_cast<milliseconds>(tp.time_since_epoch()).count();
}

std::string format_timestamp(std::int64_t ms) {
  using namespace std::chrono;
  const sys_time<milliseconds> tp{milliseconds(ms)};
  const auto days = floor<std::chrono::days>(tp);
  const year_month_day ymd{days};
  const hh_mm_ss hms{tp - days};
  std::string out = fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}",
                                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                                static_cast<unsigned>(ymd.day()), hms.hours().count(),
                                hms.minutes().count(), hms.seconds().count());
  const auto frac = hms.subseconds().count();
  if (frac != 0) out += fmt::format(".{:03d}", frac);
  out += 'Z';
  return out;
}

}  // namespace genpower
