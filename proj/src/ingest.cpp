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

#include "genpower/ingest.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>
#include <json.hpp>

namespace genpower {

using json = nlohmann::ordered_json;

namespace {

class FieldError : public DataError {
 public:
  using DataError::DataError;
};

const json& require(const json& obj, const char* field) {
  if (!obj.is_object() || !obj.contains(field)) {
    throw FieldError(fmt::format("missing required field '{}'", field));
  }
  return obj.at(field);
}

std::string require_string(const json& obj, const char* field) {
  const json& v = require(obj, field);
  if (!v.is_string()) throw FieldError(fmt::format("field '{}' must be a string", field));
  return v.get<std::string>();
}

Mailbox parse_mailbox(const json& v, const char* field) {
  Mailbox b;
  if (v.is_string()) {
    b.email = v.get<std::string>();
    return b;
  }
  if (!v.is_object()) throw FieldError(fmt::format("field '{}' must hold mailboxes", field));
  b.email = require_string(v, "email");
  if (v.contains("name") && v.at("name").is_string()) b.name = v.at("name").get<std::string>();
  return b;
}

std::vector<Mailbox> parse_mailboxes(const json& msg, const char* field) {
  std::vector<Mailbox> out;
  if (!msg.contains(field) || msg.at(field).is_null()) return out;
  const json& arr = msg.at(field);
  if (!arr.is_array()) throw FieldError(fmt::format("field '{}' must be an array", field));
  for (const auto& v : arr) out.push_back(parse_mailbox(v, field));
  return out;
}

json mailbox_json(const Mailbox& b) {
  json j;
  j["email"] = b.email;
  if (!b.name.empty()) j["name"] = b.name;
  return j;
}

std::vector<SentenceSpan> parse_spans(const json& arr) {
  if (!arr.is_array()) throw FieldError("field 'spans' must be an array");
  std::vector<SentenceSpan> spans;
  for (const auto& s : arr) {
    SentenceSpan span;
    const json& start = require(s, "start");
    const json& end = require(s, "end");
    if (!start.is_number_unsigned() || !end.is_number_unsigned()) {
      throw FieldError("span offsets must be non-negative integers");
    }
    span.start = start.get<std::size_t>();
    span.end = end.get<std::size_t>();
    const std::string da = require_string(s, "da");
    auto act = parse_dialog_act(da);
    if (!act) throw FieldError(fmt::format("unknown dialog act '{}'", da));
    span.act = *act;
    if (s.contains("odp")) {
      if (!s.at("odp").is_boolean()) throw FieldError("field 'odp' must be a boolean");
      span.odp = s.at("odp").get<bool>();
    }
    spans.push_back(span);
  }
  return spans;
}

json spans_json(const std::vector<SentenceSpan>& spans) {
  json arr = json::array();
  for (const auto& s : spans) {
    json j;
    j["start"] = s.start;
    j["end"] = s.end;
    j["da"] = std::string(to_string(s.act));
    j["odp"] = s.odp;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<TokenAnnotation> parse_tokens(const json& arr) {
  if (!arr.is_array()) throw FieldError("field 'tokens' must be an array");
  std::vector<TokenAnnotation> out;
  for (const auto& t : arr) out.push_back({require_string(t, "lemma"), require_string(t, "pos")});
  return out;
}

json tokens_json(const std::vector<TokenAnnotation>& tokens) {
  json arr = json::array();
  for (const auto& t : tokens) arr.push_back(json{{"lemma", t.lemma}, {"pos", t.pos}});
  return arr;
}

Message parse_message(const json& j) {
  Message m;
  m.id = require_string(j, "msg_id");
  if (j.contains("parent_id") && !j.at("parent_id").is_null()) {
    m.parent_id = require_string(j, "parent_id");
  }
  m.timestamp_ms = parse_timestamp(require_string(j, "timestamp"));
  m.from = parse_mailbox(require(j, "from"), "from");
  m.to = parse_mailboxes(j, "to");
  m.cc = parse_mailboxes(j, "cc");
  if (j.contains("body") && !j.at("body").is_null()) m.body = require_string(j, "body");
  if (j.contains("sentences")) m.sentences = parse_spans(j.at("sentences"));
  if (j.contains("tokens")) m.tokens = parse_tokens(j.at("tokens"));
  return m;
}

std::vector<std::string> csv_fields(std::string_view line, std::size_t min_fields,
                                    const std::string& where) {
  std::vector<std::string> out;
  for (auto f : split(line, ',')) out.emplace_back(trim(f));
  if (out.size() < min_fields) {
    throw DataError(fmt::format("{}: expected at least {} fields", where, min_fields));
  }
  return out;
}

bool skip_line(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

Thread parse_thread(std::string_view line, std::size_t line_no) {
  try {
    const json j = json::parse(line);
    const std::string id = require_string(j, "thread_id");
    const json& msgs = require(j, "messages");
    if (!msgs.is_array()) throw FieldError("field 'messages' must be an array");
    std::vector<Message> messages;
    for (const auto& mj : msgs) messages.push_back(parse_message(mj));
    return Thread(id, std::move(messages));
  } catch (const json::exception& e) {
    throw DataError(fmt::format("line {}: malformed record: {}", line_no, e.what()));
  } catch (const DataError& e) {
    throw DataError(fmt::format("line {}: {}", line_no, e.what()));
  }
}

std::string serialize_thread(const Thread& t) {
  json j;
  j["thread_id"] = t.id();
  json msgs = json::array();
  for (const auto& m : t.messages()) {
    json mj;
    mj["msg_id"] = m.id;
    if (m.parent_id) mj["parent_id"] = *m.parent_id;
    mj["timestamp"] = format_timestamp(m.timestamp_ms);
    mj["from"] = mailbox_json(m.from);
    json to = json::array();
    for (const auto& b : m.to) to.push_back(mailbox_json(b));
    json cc = json::array();
    for (const auto& b : m.cc) cc.push_back(mailbox_json(b));
    mj["to"] = std::move(to);
    mj["cc"] = std::move(cc);
    mj["body"] = m.body;
    if (m.sentences) mj["sentences"] = spans_json(*m.sentences);
    if (m.tokens) mj["tokens"] = tokens_json(*m.tokens);
    msgs.push_back(std::move(mj));
  }
  j["messages"] = std::move(msgs);
  return j.dump();
}

Corpus parse_threads(const std::vector<std::string>& lines) {
  Corpus out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    out.push_back(parse_thread(lines[i], i + 1));
  }
  return out;
}

Corpus load_threads(const std::filesystem::path& path) {
  return parse_threads(read_lines(path));
}

std::string serialize_threads(const Corpus& corpus) {
  std::string out;
  for (const auto& t : corpus) {
    out += serialize_thread(t);
    out += '\n';
  }
  return out;
}

std::vector<SsaRow> parse_ssa_file(const std::filesystem::path& path) {
  std::vector<SsaRow> rows;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = fmt::format("{}:{}", path.string(), i + 1);
    auto f = split(trim(lines[i]), ',');
    if (f.size() != 3) throw DataError(fmt::format("{}: expected Name,G,Count", where));
    SsaRow row;
    row.name = std::string(trim(f[0]));
    if (row.name.empty()) throw DataError(fmt::format("{}: empty name", where));
    const auto g = trim(f[1]);
    if (g == "M") {
      row.gender = Gender::kMale;
    } else if (g == "F") {
      row.gender = Gender::kFemale;
    } else {
      throw DataError(fmt::format("{}: invalid gender code '{}'", where, g));
    }
    const auto c = trim(f[2]);
    auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), row.count);
    if (ec != std::errc() || ptr != c.data() + c.size() || row.count == 0) {
      throw DataError(fmt::format("{}: invalid count '{}'", where, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

NameStats load_ssa(const std::filesystem::path& dir, int year_from, int year_to) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw DataError(fmt::format("SSA directory '{}' does not exist", dir.string()));
  }
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() != 11 || !name.starts_with("yob") || !name.ends_with(".txt")) continue;
    int year = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 3, name.data() + 7, year);
    if (ec != std::errc() || ptr != name.data() + 7) continue;
    if (year < year_from || year > year_to) continue;
    files.emplace_back(year, entry.path());
  }
  if (files.empty()) {
    throw DataError(fmt::format("no yobYYYY.txt files for {}-{} in '{}'", year_from, year_to,
                                dir.string()));
  }
  std::sort(files.begin(), files.end());
  NameStats stats;
  for (const auto& [year, path] : files) {
    for (const auto& row : parse_ssa_file(path)) stats.add(row.name, row.gender, row.count);
  }
  return stats;
}

DominanceSet parse_hierarchy(const std::vector<std::string>& lines) {
  std::vector<DominanceSet::Edge> edges;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (skip_line(lines[i])) continue;
    auto f = csv_fields(lines[i], 2, fmt::format("hierarchy line {}", i + 1));
    if (f[0].empty() || f[1].empty()) {
      throw DataError(fmt::format("hierarchy line {}: empty email", i + 1));
    }
    edges.emplace_back(f[0], f[1]);
  }
  return DominanceSet(std::move(edges));
}

DominanceSet load_hierarchy(const std::filesystem::path& path) {
  return parse_hierarchy(read_lines(path));
}

GenderOverrides parse_overrides(const std::vector<std::string>& lines) {
  GenderOverrides out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (skip_line(lines[i])) continue;
    auto f = csv_fields(lines[i], 2, fmt::format("overrides line {}", i + 1));
    if (i == 0 && f[0] == "email") continue;
    const std::string email = normalize_email(f[0]);
    auto g = parse_gender(f[1]);
    if (email.empty() || !g || !is_identified(*g)) {
      throw DataError(fmt::format("overrides line {}: expected email and gender M or F", i + 1));
    }
    auto [it, inserted] = out.emplace(email, *g);
    if (!inserted && it->second != *g) {
      throw DataError(fmt::format("overrides line {}: conflicting genders for '{}'", i + 1, email));
    }
  }
  return out;
}

GenderOverrides load_overrides(const std::filesystem::path& path) {
  return parse_overrides(read_lines(path));
}

AnnotationSidecar parse_annotations(const std::vector<std::string>& lines) {
  AnnotationSidecar out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      const json j = json::parse(lines[i]);
      Annotation a;
      a.spans = parse_spans(require(j, "spans"));
      if (j.contains("tokens")) a.tokens = parse_tokens(j.at("tokens"));
      out[{require_string(j, "thread_id"), require_string(j, "msg_id")}] = std::move(a);
    } catch (const json::exception& e) {
      throw DataError(fmt::format("annotations line {}: malformed record: {}", i + 1, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("annotations line {}: {}", i + 1, e.what()));
    }
  }
  return out;
}

AnnotationSidecar load_annotations(const std::filesystem::path& path) {
  return parse_annotations(read_lines(path));
}

Corpus apply_annotations(const Corpus& corpus, const AnnotationSidecar& sidecar) {
  std::map<std::string, const Thread*> by_id;
  for (const auto& t : corpus) by_id.emplace(t.id(), &t);
  for (const auto& [key, _] : sidecar) {
    auto it = by_id.find(key.first);
    if (it == by_id.end() || it->second->find(key.second) == nullptr) {
      throw DataError(fmt::format("annotation references unknown message ({}, {})", key.first,
                                  key.second));
    }
  }
  Corpus out;
  out.reserve(corpus.size());
  for (const auto& t : corpus) {
    std::vector<Message> messages(t.messages().begin(), t.messages().end());
    for (auto& m : messages) {
      auto it = sidecar.find({t.id(), m.id});
      if (it == sidecar.end()) continue;
      m.sentences = it->second.spans;
      if (it->second.tokens) m.tokens = it->second.tokens;
    }
    out.emplace_back(t.id(), std::move(messages));
  }
  return out;
}

CorpusSplit load_split_file(const std::filesystem::path& path) {
  std::map<std::string, Split> a;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (skip_line(lines[i])) continue;
    auto f = csv_fields(lines[i], 2, fmt::format("split line {}", i + 1));
    if (i == 0 && f[0] == "thread_id") continue;
    auto s = parse_split(f[1]);
    if (!s) throw DataError(fmt::format("split line {}: unknown split '{}'", i + 1, f[1]));
    if (!a.emplace(f[0], *s).second) {
      throw DataError(fmt::format("split line {}: thread '{}' assigned twice", i + 1, f[0]));
    }
  }
  return CorpusSplit(std::move(a));
}

}  // namespace genpower
