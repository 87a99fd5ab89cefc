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

#include "genpower/pairs.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace genpower {

std::string_view to_string(PowerLabel l) {
  return l == PowerLabel::kSuperior ? "SUPERIOR" : "SUBORDINATE";
}

std::optional<PowerLabel> parse_power_label(std::string_view s) {
  s = trim(s);
  if (s == "SUPERIOR") return PowerLabel::kSuperior;
  if (s == "SUBORDINATE") return PowerLabel::kSubordinate;
  return std::nullopt;
}

std::string_view to_string(GenderEnv e) {
  switch (e) {
    case GenderEnv::kFemale: return "FEMALE_ENV";
    case GenderEnv::kMixed: return "MIXED_ENV";
    case GenderEnv::kMale: return "MALE_ENV";
  }
  return "MIXED_ENV";
}

std::optional<GenderEnv> parse_gender_env(std::string_view s) {
  s = trim(s);
  if (s == "FEMALE_ENV") return GenderEnv::kFemale;
  if (s == "MIXED_ENV") return GenderEnv::kMixed;
  if (s == "MALE_ENV") return GenderEnv::kMale;
  return std::nullopt;
}

namespace {

bool has_content(const Message& m) { return !trim(m.body).empty(); }

bool interacts(const Message& m, std::string_view p1, std::string_view p2) {
  if (!has_content(m)) return false;
  return (m.sender() == p1 && m.is_recipient(p2)) || (m.sender() == p2 && m.is_recipient(p1));
}

}  // namespace

std::vector<std::string> interaction_messages(const Thread& t, std::string_view p1,
                                              std::string_view p2) {
  std::vector<std::string> out;
  if (p1 == p2) return out;
  for (const auto& m : t.messages()) {
    if (interacts(m, p1, p2)) out.push_back(m.id);
  }
  return out;
}

std::vector<UnorderedPair> interacting_pairs(const Thread& t) {
  std::set<UnorderedPair> pairs;
  for (const auto& m : t.messages()) {
    if (!has_content(m)) continue;
    auto add = [&](const Mailbox& r) {
      if (r.email == m.sender()) return;
      pairs.insert(std::minmax(m.sender(), r.email));
    };
    for (const auto& r : m.to) add(r);
    for (const auto& r : m.cc) add(r);
  }
  return {pairs.begin(), pairs.end()};
}

std::optional<PowerLabel> hp_label(const DominanceSet& d, std::string_view p1,
                                   std::string_view p2) {
  const bool down = d.dominates(p1, p2);
  const bool up = d.dominates(p2, p1);
  if (down && up) {
    throw DataError(fmt::format("pair ({}, {}) is related in both directions", p1, p2));
  }
  if (down) return PowerLabel::kSuperior;
  if (up) return PowerLabel::kSubordinate;
  return std::nullopt;
}

std::vector<std::pair<PairKey, PowerLabel>> related_pairs(std::string_view thread_id,
                                                          const std::vector<UnorderedPair>& ipp,
                                                          const DominanceSet& d) {
  std::vector<std::pair<PairKey, PowerLabel>> out;
  for (const auto& [a, b] : ipp) {
    if (auto label = hp_label(d, a, b)) {
      out.emplace_back(PairKey{std::string(thread_id), a, b}, *label);
    }
  }
  return out;
}

GenderEnv gender_environment(std::size_t female_others, std::size_t total_others) {
  if (total_others == 0) throw DataError("gender environment of a single-participant thread");
  // w = female/total compared with 1/3 and 2/3 in integers.
  if (3 * female_others > 2 * total_others) return GenderEnv::kFemale;
  if (3 * female_others < total_others) return GenderEnv::kMale;
  return GenderEnv::kMixed;
}

GenderEnv gender_environment(const Thread& t, std::string_view p, const GenderAssignments& a) {
  std::size_t female = 0;
  std::size_t total = 0;
  for (const auto& q : t.participants()) {
    if (q == p) continue;
    const Gender g = gender_of(a, q);
    if (!is_identified(g)) {
      throw DataError(fmt::format("thread '{}': participant '{}' has no identified gender",
                                  t.id(), q));
    }
    ++total;
    if (g == Gender::kFemale) ++female;
  }
  return gender_environment(female, total);
}

std::vector<PairInstance> extract_pairs(const Thread& t, const DominanceSet& d,
                                        const GenderAssignments& a, bool related_only) {
  const bool all_gendered = in_subset(t, a, SubsetMode::kAllParticipants);
  std::vector<PairInstance> out;
  for (const auto& [p1, p2] : interacting_pairs(t)) {
    PairInstance inst;
    inst.key = PairKey{t.id(), p1, p2};
    inst.ctx.hp = hp_label(d, p1, p2);
    if (related_only && !inst.ctx.hp) continue;
    inst.ctx.im_messages = interaction_messages(t, p1, p2);
    inst.ctx.gender_p1 = gender_of(a, p1);
    inst.ctx.gender_p2 = gender_of(a, p2);
    if (all_gendered) {
      inst.ctx.env_p1 = gender_environment(t, p1, a);
      inst.ctx.env_p2 = gender_environment(t, p2, a);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

PairInstance reversed(const PairInstance& p) {
  PairInstance r = p;
  std::swap(r.key.p1, r.key.p2);
  if (r.ctx.hp) r.ctx.hp = flip(*r.ctx.hp);
  std::swap(r.ctx.gender_p1, r.ctx.gender_p2);
  std::swap(r.ctx.env_p1, r.ctx.env_p2);
  return r;
}

std::string pairs_to_csv(const std::vector<PairInstance>& pairs) {
  std::string out = "thread_id,p1,p2,hp_label,gender_p1,gender_p2,env_p1,env_p2,n_im_messages\n";
  for (const auto& p : pairs) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_field(p.key.thread_id),
                       csv_field(p.key.p1), csv_field(p.key.p2), p.ctx.hp ? to_string(*p.ctx.hp) : "", to_string(p.ctx.gender_p1),
                       to_string(p.ctx.gender_p2), p.ctx.env_p1 ? to_string(*p.ctx.env_p1) : "",
                       p.ctx.env_p2 ? to_string(*p.ctx.env_p2) : "", p.ctx.im_messages.size());
  }
  return out;
}

}  // namespace genpower
