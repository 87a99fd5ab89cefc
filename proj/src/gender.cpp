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

#include "genpower/gender.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace genpower {

void NameStats::add(std::string_view name, Gender g, std::uint64_t count) {
  if (!is_identified(g)) throw DataError("name statistics accept only M or F counts");
  auto& c = counts_[to_lower(trim(name))];
  (g == Gender::kMale ? c.male : c.female) += count;
}

const NameCounts* NameStats::find(std::string_view name) const {
  auto it = counts_.find(to_lower(trim(name)));
  if (it == counts_.end() || it->second.male + it->second.female == 0) return nullptr;
  return &it->second;
}

void GenderConfig::validate() const {
  if (!(ambiguity_threshold >= 0.0 && ambiguity_threshold <= 100.0)) {
    throw DataError(fmt::format("ambiguity threshold {} outside [0,100]", ambiguity_threshold));
  }
  if (year_from > year_to) {
    throw DataError(fmt::format("year window {}:{} is empty", year_from, year_to));
  }
}

std::optional<double> ambiguity_score(const NameStats& stats, std::string_view name) {
  const NameCounts* c = stats.find(name);
  if (c == nullptr) return std::nullopt;
  return ambiguity_score(*c);
}

Gender likely_gender(const NameCounts& c, double threshold) {
  if (c.male + c.female == 0) return Gender::kIndeterminate;
  if (ambiguity_score(c) > threshold) return Gender::kIndeterminate;
  if (c.male > c.female) return Gender::kMale;
  if (c.male < c.female) return Gender::kFemale;
  return Gender::kIndeterminate;
}

Gender likely_gender(const NameStats& stats, std::string_view name, const GenderConfig& cfg) {
  const NameCounts* c = stats.find(name);
  if (c == nullptr) return Gender::kIndeterminate;
  return likely_gender(*c, cfg.ambiguity_threshold);
}

namespace {

bool is_alpha(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }

// Drops surrounding punctuation such as quotes, parentheses and periods.
std::string_view strip_non_letters(std::string_view w) {
  while (!w.empty() && !is_alpha(static_cast<unsigned char>(w.front()))) w.remove_prefix(1);
  while (!w.empty() && !is_alpha(static_cast<unsigned char>(w.back()))) w.remove_suffix(1);
  return w;
}

void push_unique(std::vector<std::string>& out, std::string s) {
  if (s.empty()) return;
  if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
}

}  // namespace

std::optional<std::string> email_first_name(std::string_view address) {
  address = strip_artifact_prefix(address);
  while (!address.empty() && (address.front() == '<' || address.front() == '"')) {
    address.remove_prefix(1);
  }
  std::string_view local = address.substr(0, address.find('@'));
  std::string_view prefix = local;
  const std::size_t sep = local.find_first_of("._-");
  if (sep != std::string_view::npos) {
    prefix = local.substr(0, sep);
  } else {
    for (std::size_t i = 1; i < local.size(); ++i) {
      if (std::isupper(static_cast<unsigned char>(local[i])) != 0 &&
          std::islower(static_cast<unsigned char>(local[0])) != 0) {
        prefix = local.substr(0, i);
        break;
      }
    }
  }
  prefix = strip_non_letters(prefix);
  if (prefix.empty()) return std::nullopt;
  return to_lower(prefix);
}

std::vector<std::string> candidate_names(std::optional<std::string_view> name_field,
                                         std::string_view email) {
  std::vector<std::string> out;
  std::string_view field = name_field ? strip_artifact_prefix(*name_field) : std::string_view{};
  while (!field.empty() && (field.front() == '"' || field.front() == '\'')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == '"' || field.back() == '\'')) field.remove_suffix(1);
  field = trim(field);

  if (field.empty()) {
    if (auto n = email_first_name(email)) push_unique(out, *n);
    return out;
  }

  std::vector<std::string_view> words;
  bool has_comma = false;
  std::size_t i = 0;
  while (i < field.size()) {
    const char c = field[i];
    if (c == ',') {
      has_comma = true;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < field.size() && field[j] != ',' &&
           std::isspace(static_cast<unsigned char>(field[j])) == 0) {
      ++j;
    }
    words.push_back(field.substr(i, j - i));
    i = j;
  }

  for (auto w : words) {
    if (w.find('@') != std::string_view::npos) {
      if (auto n = email_first_name(w)) push_unique(out, *n);
      return out;
    }
  }

  auto add_word = [&](std::string_view w) { push_unique(out, to_lower(strip_non_letters(w))); };
  switch (words.size()) {
    case 1:
      add_word(words[0]);
      break;
    case 2:
      add_word(has_comma ? words[1] : words[0]);
      break;
    case 3:
      if (has_comma) {
        add_word(words[1]);
        add_word(words[2]);
      } else {
        add_word(words[0]);
        add_word(words[1]);
      }
      break;
    default:
      // Irregular fields (four or more words) yield no candidate.
      break;
  }
  return out;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kManual: return "MANUAL";
    case Provenance::kAuto: return "AUTO";
    case Provenance::kNone: return "NONE";
  }
  return "NONE";
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  s = trim(s);
  if (s == "MANUAL") return Provenance::kManual;
  if (s == "AUTO") return Provenance::kAuto;
  if (s == "NONE") return Provenance::kNone;
  return std::nullopt;
}

namespace {

struct Choice {
  std::string name;
  double score = 0.0;
  Gender gender = Gender::kIndeterminate;
};

// Lowest-AS candidate that passes the threshold; ties keep the earlier one.
std::optional<Choice> best_candidate(const std::vector<std::string>& candidates,
                                     const NameStats& stats, double threshold) {
  std::optional<Choice> best;
  for (const auto& name : candidates) {
    const NameCounts* c = stats.find(name);
    if (c == nullptr) continue;
    const Gender g = likely_gender(*c, threshold);
    if (!is_identified(g)) continue;
    const double as = ambiguity_score(*c);
    if (!best || as < best->score) best = Choice{name, as, g};
  }
  return best;
}

}  // namespace

ParticipantRecord assign_participant(std::string_view email,
                                     const std::set<std::string>& display_names,
                                     const NameStats& stats, const GenderOverrides& overrides,
                                     const GenderConfig& cfg) {
  ParticipantRecord rec;
  rec.email = normalize_email(email);
  rec.display_names = display_names;

  std::vector<std::string> candidates;
  bool saw_male = false;
  bool saw_female = false;
  if (display_names.empty()) {
    candidates = candidate_names(std::nullopt, rec.email);
  } else {
    for (const auto& name : display_names) {
      auto per_name = candidate_names(std::string_view(name), rec.email);
      if (auto c = best_candidate(per_name, stats, cfg.ambiguity_threshold)) {
        (c->gender == Gender::kMale ? saw_male : saw_female) = true;
      }
      for (auto& c : per_name) push_unique(candidates, std::move(c));
    }
  }
  rec.conflicting_names = saw_male && saw_female;

  if (auto it = overrides.find(rec.email); it != overrides.end()) {
    rec.gender = it->second;
    rec.provenance = Provenance::kManual;
    return rec;
  }
  if (auto best = best_candidate(candidates, stats, cfg.ambiguity_threshold)) {
    rec.gender = best->gender;
    rec.ambiguity_score = best->score;
    rec.chosen_name = best->name;
    rec.provenance = Provenance::kAuto;
  }
  return rec;
}

std::map<std::string, std::set<std::string>> collect_participants(const Corpus& corpus) {
  std::map<std::string, std::set<std::string>> out;
  auto note = [&](const Mailbox& b) {
    auto& names = out[b.email];
    auto name = trim(strip_artifact_prefix(b.name));
    if (!name.empty()) names.emplace(name);
  };
  for (const auto& t : corpus) {
    for (const auto& m : t.messages()) {
      note(m.from);
      for (const auto& b : m.to) note(b);
      for (const auto& b : m.cc) note(b);
    }
  }
  return out;
}

GenderAssignments assign_corpus(const Corpus& corpus, const NameStats& stats,
                                const GenderOverrides& overrides, const GenderConfig& cfg) {
  cfg.validate();
  GenderAssignments out;
  for (const auto& [email, names] : collect_participants(corpus)) {
    out.emplace(email, assign_participant(email, names, stats, overrides, cfg));
  }
  return out;
}

Gender gender_of(const GenderAssignments& a, std::string_view email) {
  auto it = a.find(std::string(email));
  return it == a.end() ? Gender::kIndeterminate : it->second.gender;
}

std::string_view to_string(SubsetMode m) {
  return m == SubsetMode::kAllSenders ? "asgi" : "apgi";
}

std::optional<SubsetMode> parse_subset_mode(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "asgi") return SubsetMode::kAllSenders;
  if (v == "apgi") return SubsetMode::kAllParticipants;
  return std::nullopt;
}

bool in_subset(const Thread& t, const GenderAssignments& a, SubsetMode mode) {
  if (mode == SubsetMode::kAllSenders) {
    return std::all_of(t.messages().begin(), t.messages().end(), [&](const Message& m) {
      return is_identified(gender_of(a, m.sender()));
    });
  }
  return std::all_of(t.participants().begin(), t.participants().end(),
                     [&](const std::string& p) { return is_identified(gender_of(a, p)); });
}

Corpus subset_corpus(const Corpus& corpus, const GenderAssignments& a, SubsetMode mode) {
  Corpus out;
  for (const auto& t : corpus) {
    if (in_subset(t, a, mode)) out.push_back(t);
  }
  return out;
}

namespace {

double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

AssignmentReport coverage_report(const Corpus& corpus, const GenderAssignments& a) {
  AssignmentReport r;
  for (const auto& [email, _] : collect_participants(corpus)) {
    ++r.total_participants;
    auto it = a.find(email);
    if (it == a.end()) continue;
    const auto& rec = it->second;
    if (is_identified(rec.gender)) ++r.assigned_participants;
    if (rec.gender == Gender::kMale) ++r.male;
    if (rec.gender == Gender::kFemale) ++r.female;
    if (rec.provenance == Provenance::kManual) ++r.manual;
    if (rec.conflicting_names) ++r.conflicting;
  }
  for (const auto& t : corpus) {
    ++r.total_threads;
    for (const auto& m : t.messages()) {
      ++r.total_messages;
      if (is_identified(gender_of(a, m.sender()))) ++r.gendered_sender_messages;
    }
    if (in_subset(t, a, SubsetMode::kAllSenders)) ++r.asgi_threads;
    if (in_subset(t, a, SubsetMode::kAllParticipants)) ++r.apgi_threads;
  }
  r.participant_coverage_pct = pct(r.assigned_participants, r.total_participants);
  r.message_coverage_pct = pct(r.gendered_sender_messages, r.total_messages);
  r.asgi_pct = pct(r.asgi_threads, r.total_threads);
  r.apgi_pct = pct(r.apgi_threads, r.total_threads);
  return r;
}

GoldAccuracy gold_accuracy(const GenderAssignments& automatic, const GenderOverrides& gold) {
  GoldAccuracy g;
  for (const auto& [email, truth] : gold) {
    auto it = automatic.find(email);
    if (it == automatic.end()) continue;
    ++g.gold_total;
    if (!is_identified(it->second.gender)) continue;
    ++g.assigned;
    if (it->second.gender == truth) ++g.correct;
  }
  g.coverage_pct = pct(g.assigned, g.gold_total);
  g.accuracy_pct = pct(g.correct, g.assigned);
  return g;
}

std::string assignments_to_csv(const GenderAssignments& a) {
  std::string out = "email,gender,ambiguity_score,provenance\n";
  for (const auto& [email, rec] : a) {
    out += fmt::format("{},{},{},{}\n", email, to_string(rec.gender),
                       rec.ambiguity_score ? format_double(*rec.ambiguity_score) : "",
                       to_string(rec.provenance));
  }
  return out;
}

GenderAssignments assignments_from_csv(const std::vector<std::string>& lines) {
  GenderAssignments out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || (i == 0 && line.starts_with("email,"))) continue;
    auto f = split(line, ',');
    if (f.size() != 4) {
      throw DataError(fmt::format("participants line {}: expected 4 fields", i + 1));
    }
    ParticipantRecord rec;
    rec.email = normalize_email(f[0]);
    auto g = parse_gender(f[1]);
    auto p = parse_provenance(f[3]);
    if (!g || !p) throw DataError(fmt::format("participants line {}: bad gender/provenance", i + 1));
    rec.gender = *g;
    rec.provenance = *p;
    if (!trim(f[2]).empty()) {
      double v = 0;
      auto s = trim(f[2]);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(fmt::format("participants line {}: bad ambiguity score", i + 1));
      }
      rec.ambiguity_score = v;
    }
    out.emplace(rec.email, std::move(rec));
  }
  return out;
}

}  // namespace genpower
