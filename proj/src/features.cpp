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

#include "genpower/features.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

namespace genpower {

namespace {

struct FeatureInfo {
  Feature feature;
  std::string_view name;
  std::string_view column;
  FeatureFamily family;
};

constexpr std::array<FeatureInfo, kNumStructuralFeatures> kFeatureTable = {{
    {Feature::kInitiator, "Initiator", "initiator", FeatureFamily::kPositional},
    {Feature::kFirstMsgPos, "FirstMsgPos", "first_msg_pos", FeatureFamily::kPositional},
    {Feature::kLastMsgPos, "LastMsgPos", "last_msg_pos", FeatureFamily::kPositional},
    {Feature::kMsgCount, "MsgCount", "msg_count", FeatureFamily::kVerbosity},
    {Feature::kMsgRatio, "MsgRatio", "msg_ratio", FeatureFamily::kVerbosity},
    {Feature::kTokenCount, "TokenCount", "token_count", FeatureFamily::kVerbosity},
    {Feature::kTokenRatio, "TokenRatio", "token_ratio", FeatureFamily::kVerbosity},
    {Feature::kTokenPerMsg, "TokenPerMsg", "token_per_msg", FeatureFamily::kVerbosity},
    {Feature::kAvgRecipients, "AvgRecipients", "avg_recipients", FeatureFamily::kThreadStructure},
    {Feature::kAvgToRecipients, "AvgToRecipients", "avg_to_recipients",
     FeatureFamily::kThreadStructure},
    {Feature::kInToListPct, "InToList%", "in_to_list_pct", FeatureFamily::kThreadStructure},
    {Feature::kAddPerson, "AddPerson", "add_person", FeatureFamily::kThreadStructure},
    {Feature::kRemovePerson, "RemovePerson", "remove_person", FeatureFamily::kThreadStructure},
    {Feature::kReplyRate, "ReplyRate", "reply_rate", FeatureFamily::kThreadStructure},
    {Feature::kReqActionCount, "ReqActionCount", "req_action_count", FeatureFamily::kDialogAct},
    {Feature::kReqInformCount, "ReqInformCount", "req_inform_count", FeatureFamily::kDialogAct},
    {Feature::kInformCount, "InformCount", "inform_count", FeatureFamily::kDialogAct},
    {Feature::kConventionalCount, "ConventionalCount", "conventional_count",
     FeatureFamily::kDialogAct},
    {Feature::kDanglingReqPct, "DanglingReq%", "dangling_req_pct", FeatureFamily::kDialogAct},
    {Feature::kOdpCount, "ODPCount", "odp_count", FeatureFamily::kOdp},
}};

const FeatureInfo& info(Feature f) { return kFeatureTable[static_cast<std::size_t>(f)]; }

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

}  // namespace

std::string_view feature_name(Feature f) { return info(f).name; }
std::string_view feature_column(Feature f) { return info(f).column; }
FeatureFamily feature_family(Feature f) { return info(f).family; }

const std::array<Feature, kNumStructuralFeatures>& all_features() {
  static const auto kAll = [] {
    std::array<Feature, kNumStructuralFeatures> a{};
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = kFeatureTable[i].feature;
    return a;
  }();
  return kAll;
}

std::string_view to_string(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::kPositional: return "PST";
    case FeatureFamily::kVerbosity: return "VRB";
    case FeatureFamily::kThreadStructure: return "THR";
    case FeatureFamily::kDialogAct: return "DA";
    case FeatureFamily::kOdp: return "ODP";
    case FeatureFamily::kLexical: return "LEX";
    case FeatureFamily::kGender: return "GEN";
    case FeatureFamily::kGenderEnv: return "GNE";
  }
  return "PST";
}

std::optional<FeatureFamily> parse_feature_family(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "pst") return FeatureFamily::kPositional;
  if (v == "vrb") return FeatureFamily::kVerbosity;
  if (v == "thr") return FeatureFamily::kThreadStructure;
  if (v == "da") return FeatureFamily::kDialogAct;
  if (v == "odp") return FeatureFamily::kOdp;
  if (v == "lex") return FeatureFamily::kLexical;
  if (v == "gen") return FeatureFamily::kGender;
  if (v == "gne") return FeatureFamily::kGenderEnv;
  return std::nullopt;
}

std::string_view variant_prefix(Variant v) {
  switch (v) {
    case Variant::kP1Im: return "p1_im";
    case Variant::kP2Im: return "p2_im";
    case Variant::kP1Mt: return "p1_mt";
    case Variant::kP2Mt: return "p2_mt";
  }
  return "p1_mt";
}

MessageSet all_messages(const Thread& t) {
  MessageSet out;
  out.reserve(t.size());
  for (const auto& m : t.messages()) out.push_back(&m);
  return out;
}

MessageSet select_messages(const Thread& t, const std::vector<std::string>& ids) {
  MessageSet out;
  for (const auto& m : t.messages()) {
    if (std::find(ids.begin(), ids.end(), m.id) != ids.end()) out.push_back(&m);
  }
  return out;
}

std::vector<Token> tokenize(std::string_view body) {
  auto is_word = [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '\'' || c >= 0x80;
  };
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < body.size()) {
    if (!is_word(static_cast<unsigned char>(body[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < body.size() && is_word(static_cast<unsigned char>(body[j]))) ++j;
    std::string surface(body.substr(i, j - i));
    std::string lower = to_lower(surface);
    out.push_back({std::move(surface), std::move(lower)});
    i = j;
  }
  return out;
}

Positional positional(std::string_view p, const MessageSet& m) {
  Positional out;
  if (m.empty()) return out;
  const double denom = static_cast<double>(std::max<std::size_t>(m.size() - 1, 1));
  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]->sender() != p) continue;
    if (!first) first = i;
    last = i;
  }
  out.initiator = m.front()->sender() == p ? 1.0 : 0.0;
  if (first) {
    out.first_msg_pos = static_cast<double>(*first) / denom;
    out.last_msg_pos = static_cast<double>(*last) / denom;
  }
  return out;
}

Verbosity verbosity(std::string_view p, const MessageSet& m) {
  Verbosity out;
  double total_tokens = 0;
  for (const Message* msg : m) {
    const auto n = static_cast<double>(tokenize(msg->body).size());
    total_tokens += n;
    if (msg->sender() == p) {
      out.msg_count += 1;
      out.token_count += n;
    }
  }
  out.msg_ratio = ratio(out.msg_count, static_cast<double>(m.size()));
  out.token_ratio = ratio(out.token_count, total_tokens);
  out.token_per_msg = ratio(out.token_count, out.msg_count);
  return out;
}

ThreadStructure thread_structure(const Thread& t, std::string_view p, const MessageSet& m) {
  ThreadStructure out;
  double sent = 0;
  double recipients = 0;
  double to_recipients = 0;
  double received = 0;
  double received_in_to = 0;
  double replies = 0;
  for (const Message* msg : m) {
    if (msg->sender() == p) {
      sent += 1;
      recipients += static_cast<double>(msg->recipient_count());
      to_recipients += static_cast<double>(msg->to.size());
      if (msg->parent_id) {
        const Message* parent = t.find(*msg->parent_id);
        if (parent != nullptr) {
          const auto reply_set = msg->participants();
          const auto parent_set = parent->participants();
          const bool adds = !std::includes(parent_set.begin(), parent_set.end(),
                                           reply_set.begin(), reply_set.end());
          const bool drops = std::any_of(parent_set.begin(), parent_set.end(),
                                         [&](const std::string& q) {
                                           return q != p && !std::binary_search(
                                                                reply_set.begin(),
                                                                reply_set.end(), q);
                                         });
          if (adds) out.add_person = 1;
          if (drops) out.remove_person = 1;
        }
      }
    }
    if (msg->is_recipient(p)) {
      received += 1;
      if (msg->in_to(p)) received_in_to += 1;
    }
    if (msg->parent_id) {
      auto parent = std::find_if(m.begin(), m.end(),
                                 [&](const Message* q) { return q->id == *msg->parent_id; });
      if (parent != m.end() && (*parent)->sender() == p) replies += 1;
    }
  }
  out.avg_recipients = ratio(recipients, sent);
  out.avg_to_recipients = ratio(to_recipients, sent);
  out.in_to_list_pct = 100.0 * ratio(received_in_to, received);
  out.reply_rate = ratio(replies, sent);
  return out;
}

namespace {

const std::vector<SentenceSpan>& sentences_of(const Message& msg) {
  if (!msg.sentences) {
    throw DataError(fmt::format(
        "message '{}' has no dialog-act annotation; supply an annotations file or run a tagger",
        msg.id));
  }
  return *msg.sentences;
}

}  // namespace

DialogActCounts dialog_act_counts(std::string_view p, const MessageSet& m) {
  DialogActCounts out;
  double request_msgs = 0;
  double dangling = 0;
  for (const Message* msg : m) {
    if (msg->sender() != p) continue;
    bool has_request = false;
    for (const auto& s : sentences_of(*msg)) {
      switch (s.act) {
        case DialogAct::kRequestAction: out.req_action += 1; break;
        case DialogAct::kRequestInformation: out.req_inform += 1; break;
        case DialogAct::kInform: out.inform += 1; break;
        case DialogAct::kConventional: out.conventional += 1; break;
      }
      has_request = has_request || is_request(s.act);
    }
    if (!has_request) continue;
    request_msgs += 1;
    const bool answered = std::any_of(m.begin(), m.end(), [&](const Message* r) {
      return r->parent_id && *r->parent_id == msg->id;
    });
    if (!answered) dangling += 1;
  }
  out.dangling_req_pct = 100.0 * ratio(dangling, request_msgs);
  return out;
}

double odp_count(std::string_view p, const MessageSet& m) {
  double n = 0;
  for (const Message* msg : m) {
    if (msg->sender() != p) continue;
    for (const auto& s : sentences_of(*msg)) {
      if (s.odp) n += 1;
    }
  }
  return n;
}

std::string_view to_string(NgramFamily f) {
  switch (f) {
    case NgramFamily::kLemma: return "lemma";
    case NgramFamily::kPos: return "pos";
    case NgramFamily::kMixed: return "mixed";
  }
  return "lemma";
}

std::optional<NgramFamily> parse_ngram_family(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "lemma") return NgramFamily::kLemma;
  if (v == "pos") return NgramFamily::kPos;
  if (v == "mixed") return NgramFamily::kMixed;
  return std::nullopt;
}

bool is_open_class(std::string_view pos) {
  static const std::set<std::string_view> kUniversal = {"NOUN", "PROPN", "VERB", "ADJ", "ADV",
                                                        "N", "V", "A", "R"};
  if (kUniversal.count(pos) > 0) return true;
  // Penn Treebank: NN*, VB*, JJ*, RB*.
  return pos.size() >= 2 && (pos.starts_with("NN") || pos.starts_with("VB") ||
                             pos.starts_with("JJ") || pos.starts_with("RB"));
}

SparseCounts ngrams(std::string_view p, const MessageSet& m,
                    const std::set<NgramFamily>& families) {
  SparseCounts out;
  auto count = [&](std::string_view tag, const std::vector<std::string>& units) {
    for (std::size_t i = 0; i < units.size(); ++i) {
      out[fmt::format("{}1:{}", tag, units[i])] += 1;
      if (i + 1 < units.size()) out[fmt::format("{}2:{} {}", tag, units[i], units[i + 1])] += 1;
    }
  };
  for (const Message* msg : m) {
    if (msg->sender() != p) continue;
    const bool need_tokens =
        families.count(NgramFamily::kPos) > 0 || families.count(NgramFamily::kMixed) > 0;
    if (need_tokens && !msg->tokens) {
      throw DataError(fmt::format(
          "message '{}' has no token annotations; POS and MIXED ngrams need them", msg->id));
    }
    if (families.count(NgramFamily::kLemma) > 0) {
      std::vector<std::string> lemmas;
      if (msg->tokens) {
        for (const auto& tok : *msg->tokens) lemmas.push_back(to_lower(tok.lemma));
      } else {
        for (auto& tok : tokenize(msg->body)) lemmas.push_back(std::move(tok.lower));
      }
      count("L", lemmas);
    }
    if (families.count(NgramFamily::kPos) > 0) {
      std::vector<std::string> tags;
      for (const auto& tok : *msg->tokens) tags.push_back(tok.pos);
      count("P", tags);
    }
    if (families.count(NgramFamily::kMixed) > 0) {
      std::vector<std::string> mixed;
      for (const auto& tok : *msg->tokens) {
        mixed.push_back(is_open_class(tok.pos) ? tok.pos : to_lower(tok.lemma));
      }
      count("M", mixed);
    }
  }
  return out;
}

FeatureVector compute_features(const Thread& t, std::string_view p, const MessageSet& m,
                               const FeatureOptions& opts) {
  FeatureVector v;
  const Positional pst = positional(p, m);
  v[Feature::kInitiator] = pst.initiator;
  v[Feature::kFirstMsgPos] = pst.first_msg_pos;
  v[Feature::kLastMsgPos] = pst.last_msg_pos;

  const Verbosity vrb = verbosity(p, m);
  v[Feature::kMsgCount] = vrb.msg_count;
  v[Feature::kMsgRatio] = vrb.msg_ratio;
  v[Feature::kTokenCount] = vrb.token_count;
  v[Feature::kTokenRatio] = vrb.token_ratio;
  v[Feature::kTokenPerMsg] = vrb.token_per_msg;

  const ThreadStructure thr = thread_structure(t, p, m);
  v[Feature::kAvgRecipients] = thr.avg_recipients;
  v[Feature::kAvgToRecipients] = thr.avg_to_recipients;
  v[Feature::kInToListPct] = thr.in_to_list_pct;
  v[Feature::kAddPerson] = thr.add_person;
  v[Feature::kRemovePerson] = thr.remove_person;
  v[Feature::kReplyRate] = thr.reply_rate;

  if (opts.dialog_acts) {
    const DialogActCounts da = dialog_act_counts(p, m);
    v[Feature::kReqActionCount] = da.req_action;
    v[Feature::kReqInformCount] = da.req_inform;
    v[Feature::kInformCount] = da.inform;
    v[Feature::kConventionalCount] = da.conventional;
    v[Feature::kDanglingReqPct] = da.dangling_req_pct;
    v[Feature::kOdpCount] = odp_count(p, m);
  }
  if (!opts.ngram_families.empty()) v.ngrams = ngrams(p, m, opts.ngram_families);
  return v;
}

std::array<double, 4> PairFeatures::gender_one_hot() const {
  return {gender_p1 == Gender::kMale ? 1.0 : 0.0, gender_p1 == Gender::kFemale ? 1.0 : 0.0,
          gender_p2 == Gender::kMale ? 1.0 : 0.0, gender_p2 == Gender::kFemale ? 1.0 : 0.0};
}

PairFeatures pair_features(const Thread& t, std::string_view p1, std::string_view p2,
                           const PairContext& ctx, const FeatureOptions& opts) {
  PairFeatures out;
  const MessageSet im = select_messages(t, ctx.im_messages);
  const MessageSet all = all_messages(t);
  for (Variant v : kVariants) {
    const bool first = v == Variant::kP1Im || v == Variant::kP1Mt;
    const bool interaction = v == Variant::kP1Im || v == Variant::kP2Im;
    auto& fv = out.variants[static_cast<std::size_t>(v)];
    fv = compute_features(t, first ? p1 : p2, interaction ? im : all, opts);
    fv.variant = v;
  }
  out.gender_p1 = ctx.gender_p1;
  out.gender_p2 = ctx.gender_p2;
  out.env_p1 = ctx.env_p1;
  out.env_p2 = ctx.env_p2;
  return out;
}

}  // namespace genpower
