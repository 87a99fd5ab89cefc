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

// Interacting participant pairs within a thread, their hierarchical power
// labels and each participant's gender environment.

#ifndef GENPOWER_PAIRS_HPP_
#define GENPOWER_PAIRS_HPP_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genpower/corpus.hpp"
#include "genpower/gender.hpp"

namespace genpower {

struct PairKey {
  std::string thread_id;
  std::string p1;
  std::string p2;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;
};

enum class PowerLabel : std::uint8_t { kSuperior, kSubordinate };
std::string_view to_string(PowerLabel l);
std::optional<PowerLabel> parse_power_label(std::string_view s);
inline PowerLabel flip(PowerLabel l) {
  return l == PowerLabel::kSuperior ? PowerLabel::kSubordinate : PowerLabel::kSuperior;
}

enum class GenderEnv : std::uint8_t { kFemale, kMixed, kMale };
std::string_view to_string(GenderEnv e);  // FEMALE_ENV, MIXED_ENV, MALE_ENV
std::optional<GenderEnv> parse_gender_env(std::string_view s);

struct PairContext {
  std::vector<std::string> im_messages;  // IM_t(p1, p2) in thread order
  std::optional<PowerLabel> hp;          // present iff the pair is related
  Gender gender_p1 = Gender::kIndeterminate;
  Gender gender_p2 = Gender::kIndeterminate;
  std::optional<GenderEnv> env_p1;
  std::optional<GenderEnv> env_p2;
};

struct PairInstance {
  PairKey key;
  PairContext ctx;
};

using UnorderedPair = std::pair<std::string, std::string>;  // first < second

// Non-empty messages where one of p1, p2 sends and the other is in To or CC.
std::vector<std::string> interaction_messages(const Thread& t, std::string_view p1,
                                              std::string_view p2);

// All unordered pairs with at least one interaction message, sorted.
std::vector<UnorderedPair> interacting_pairs(const Thread& t);

// HP(p1, p2) from the closed dominance relation; absent when unrelated.
std::optional<PowerLabel> hp_label(const DominanceSet& d, std::string_view p1,
                                   std::string_view p2);

// Related pairs in (first, second) order with HP of `first` relative to
// `second`. Unrelated pairs are dropped.
std::vector<std::pair<PairKey, PowerLabel>> related_pairs(std::string_view thread_id,
                                                          const std::vector<UnorderedPair>& ipp,
                                                          const DominanceSet& d);

// Environment from p's point of view over P_t \ {p}: female share > 2/3 is
// FEMALE_ENV, < 1/3 is MALE_ENV, otherwise MIXED_ENV (exact comparison).
GenderEnv gender_environment(const Thread& t, std::string_view p, const GenderAssignments& a);
GenderEnv gender_environment(std::size_t female_others, std::size_t total_others);

// Pair instances of one thread, each unordered pair once in (first, second)
// order. With `related_only` only hierarchy-related pairs are emitted.
// Environments are filled in only when every participant has a gender.
std::vector<PairInstance> extract_pairs(const Thread& t, const DominanceSet& d,
                                        const GenderAssignments& a, bool related_only);

// The same pair seen from the other side: roles swapped, label flipped.
PairInstance reversed(const PairInstance& p);

struct PairCounts {
  std::size_t threads = 0;
  std::size_t ipp = 0;
  std::size_t ripp = 0;
};

// CSV "thread_id,p1,p2,hp_label,gender_p1,gender_p2,env_p1,env_p2,n_im_messages".
std::string pairs_to_csv(const std::vector<PairInstance>& pairs);

}  // namespace genpower

#endif  // GENPOWER_PAIRS_HPP_
