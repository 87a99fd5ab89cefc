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

#include <cctype>
#include <regex>
#include <set>

#include "genpower/features.hpp"

namespace genpower {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// Lowercased words of a sentence, punctuation removed.
std::vector<std::string> words_of(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(sentence)) out.push_back(std::move(tok.lower));
  return out;
}

bool starts_with_words(const std::vector<std::string>& words,
                       std::initializer_list<std::string_view> phrase) {
  if (words.size() < phrase.size()) return false;
  std::size_t i = 0;
  for (auto w : phrase) {
    if (words[i++] != w) return false;
  }
  return true;
}

}  // namespace

std::vector<SentenceSpan> split_sentences(std::string_view body) {
  std::vector<SentenceSpan> spans;
  auto emit = [&](std::size_t start, std::size_t end) {
    while (start < end && is_space(body[start])) ++start;
    while (end > start && is_space(body[end - 1])) --end;
    if (start < end) spans.push_back(SentenceSpan{start, end, DialogAct::kInform, false});
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];
    if (c == '\n') {
      emit(start, i);
      start = ++i;
      continue;
    }
    if (is_terminal(c)) {
      std::size_t j = i;
      while (j < body.size() && is_terminal(body[j])) ++j;
      if (j == body.size() || is_space(body[j])) {
        emit(start, j);
        start = i = j;
        continue;
      }
      i = j;
      continue;
    }
    ++i;
  }
  emit(start, body.size());
  return spans;
}

DialogAct BaselineDialogActTagger::classify(std::string_view sentence) {
  sentence = trim(sentence);
  std::string_view stripped = sentence;
  while (!stripped.empty() && (stripped.back() == '"' || stripped.back() == ')')) {
    stripped.remove_suffix(1);
  }
  if (!stripped.empty() && stripped.back() == '?') return DialogAct::kRequestInformation;

  const auto words = words_of(sentence);
  if (words.empty()) return DialogAct::kInform;
  static const std::set<std::string_view> kConventionalOpeners = {
      "thanks", "thank", "thx", "hi", "hello", "hey", "dear", "regards", "cheers",
      "sincerely", "congratulations", "congrats", "welcome", "greetings"};
  if (kConventionalOpeners.count(words[0]) > 0 || starts_with_words(words, {"best", "regards"}) ||
      starts_with_words(words, {"best", "wishes"}) ||
      starts_with_words(words, {"good", "morning"}) ||
      starts_with_words(words, {"good", "afternoon"}) ||
      starts_with_words(words, {"good", "evening"}) ||
      starts_with_words(words, {"take", "care"}) ||
      starts_with_words(words, {"have", "a", "good"}) ||
      starts_with_words(words, {"have", "a", "great"})) {
    return DialogAct::kConventional;
  }
  static const std::set<std::string_view> kImperatives = {
      "please", "send", "call", "let", "forward", "review", "give", "make", "check",
      "take", "get", "keep", "schedule", "prepare", "provide", "update", "fax", "attach",
      "print", "sign", "return", "confirm", "contact", "submit", "complete", "add", "remove",
      "change", "fill", "ask", "tell", "bring", "come", "pls", "kindly"};
  if (kImperatives.count(words[0]) > 0) return DialogAct::kRequestAction;
  return DialogAct::kInform;
}

std::vector<SentenceSpan> BaselineDialogActTagger::tag(std::string_view body) const {
  auto spans = split_sentences(body);
  for (auto& s : spans) s.act = classify(body.substr(s.start, s.end - s.start));
  return spans;
}

bool BaselineOdpTagger::is_odp(std::string_view sentence, DialogAct act) const {
  if (act == DialogAct::kConventional) return false;
  static const std::regex kNecessity(
      R"((^|[^a-z'])(i need|we need|must|have to|has to|asap|as soon as possible)([^a-z']|$))",
      std::regex::ECMAScript | std::regex::optimize);
  static const std::regex kDeadline(
      R"((^|[^a-z'])by (the )?(end of (the )?)?(today|tonight|tomorrow|noon|eod|cob|monday|tuesday|wednesday|thursday|friday|saturday|sunday|next|this|jan|feb|mar|apr|may|jun|jul|aug|sep|oct|nov|dec|[0-9]))",
      std::regex::ECMAScript | std::regex::optimize);
  static const std::regex kMitigation(
      R"((^|[^a-z'])(could you|would you|please try)([^a-z']|$))",
      std::regex::ECMAScript | std::regex::optimize);
  const std::string lower = to_lower(sentence);
  if (std::regex_search(lower, kMitigation)) return false;
  return std::regex_search(lower, kNecessity) || std::regex_search(lower, kDeadline);
}

Corpus tag_corpus(const Corpus& corpus, const DialogActTagger& da, const OdpTagger& odp) {
  Corpus out;
  out.reserve(corpus.size());
  for (const auto& t : corpus) {
    std::vector<Message> messages(t.messages().begin(), t.messages().end());
    for (auto& m : messages) {
      if (m.sentences) continue;
      auto spans = da.tag(m.body);
      for (auto& s : spans) {
        s.odp = odp.is_odp(std::string_view(m.body).substr(s.start, s.end - s.start), s.act);
      }
      m.sentences = std::move(spans);
    }
    out.emplace_back(t.id(), std::move(messages));
  }
  return out;
}

}  // namespace genpower
