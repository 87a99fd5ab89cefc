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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "genpower/ingest.hpp"
#include "genpower/pairs.hpp"

using namespace genpower;

namespace {

std::string who(int i) { return "p" + std::to_string(i) + "@x.com"; }

Thread random_thread(std::mt19937_64& rng, int people, int id) {
  std::vector<Message> msgs;
  const int n = 1 + int(rng() % 6);
  for (int i = 0; i < n; ++i) {
    Message m;
    m.id = "m" + std::to_string(i);
    m.timestamp_ms = 1000 * i;
    const int s = int(rng() % people);
    m.from = Mailbox{who(s), ""};
    for (int r = 0; r < people; ++r) {
      if (r == s) continue;
      const auto roll = rng() % 6;
      if (roll == 0) m.to.push_back(Mailbox{who(r), ""});
      if (roll == 1) m.cc.push_back(Mailbox{who(r), ""});
    }
    if (m.to.empty()) m.to.push_back(Mailbox{who((s + 1) % people), ""});
    m.body = rng() % 7 == 0 ? "  " : "text";
    msgs.push_back(m);
  }
  return Thread("t" + std::to_string(id), msgs);
}

}  // namespace

TEST_CASE("pair extraction against a brute-force oracle") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const int people = 2 + int(rng() % 6);
    const Thread t = random_thread(rng, people, rep);

    // Random hierarchy: edges only from lower to higher index, closed by brute force.
    std::vector<std::string> lines;
    std::vector<std::vector<bool>> reach(people, std::vector<bool>(people, false));
    for (int i = 0; i < people; ++i) {
      for (int j = i + 1; j < people; ++j) {
        if (rng() % 4 == 0) {
          lines.push_back(who(i) + "," + who(j));
          reach[i][j] = true;
        }
      }
    }
    for (int k = 0; k < people; ++k)
      for (int i = 0; i < people; ++i)
        for (int j = 0; j < people; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    const DominanceSet d = parse_hierarchy(lines);

    // Genders: everybody identified, so environments are defined.
    GenderAssignments a;
    std::vector<bool> female(people);
    for (int i = 0; i < people; ++i) {
      female[i] = rng() % 2 == 0;
      ParticipantRecord r;
      r.email = who(i);
      r.gender = female[i] ? Gender::kFemale : Gender::kMale;
      a[who(i)] = r;
    }

    // Oracle: pairs with a nonempty message between them, by index.
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> im;
    for (const auto& m : t.messages()) {
      if (m.body.find_first_not_of(' ') == std::string::npos) continue;
      for (int i = 0; i < people; ++i) {
        for (int j = 0; j < people; ++j) {
          if (i == j) continue;
          if (m.sender() == who(i) && m.is_recipient(who(j))) {
            const std::string lo = who(std::min(i, j));
            const std::string hi = who(std::max(i, j));
            auto& v = im[lo < hi ? std::make_pair(lo, hi) : std::make_pair(hi, lo)];
            if (v.empty() || v.back() != m.id) v.push_back(m.id);
          }
        }
      }
    }
    auto index_of = [&](const std::string& e) { return std::stoi(e.substr(1, e.find('@') - 1)); };

    const auto got = extract_pairs(t, d, a, false);
    REQUIRE(got.size() == im.size());
    std::size_t k = 0;
    for (const auto& [key, msgs] : im) {
      const PairInstance& p = got[k++];
      CHECK(p.key.p1 == key.first);
      CHECK(p.key.p2 == key.second);
      CHECK(p.ctx.im_messages == msgs);
      const int i = index_of(key.first), j = index_of(key.second);
      if (reach[i][j]) {
        CHECK(p.ctx.hp == PowerLabel::kSuperior);
      } else if (reach[j][i]) {
        CHECK(p.ctx.hp == PowerLabel::kSubordinate);
      } else {
        CHECK_FALSE(p.ctx.hp);
      }
      // Environment of p1 from exact fractions over the other participants.
      std::size_t f = 0, total = 0;
      for (const auto& q : t.participants()) {
        if (q == key.first) continue;
        ++total;
        f += female[index_of(q)] ? 1 : 0;
      }
      REQUIRE(p.ctx.env_p1);
      const GenderEnv want = 3 * f > 2 * total ? GenderEnv::kFemale
                             : 3 * f < total   ? GenderEnv::kMale
                                               : GenderEnv::kMixed;
      CHECK(*p.ctx.env_p1 == want);
    }
    const auto related = extract_pairs(t, d, a, true);
    for (const auto& p : related) CHECK(p.ctx.hp);
  }
}

TEST_CASE("environment thresholds are exact") {
  CHECK(gender_environment(2, 3) == GenderEnv::kMixed);   // exactly 2/3
  CHECK(gender_environment(1, 3) == GenderEnv::kMixed);   // exactly 1/3
  CHECK(gender_environment(3, 4) == GenderEnv::kFemale);
  CHECK(gender_environment(0, 4) == GenderEnv::kMale);
  CHECK_THROWS_AS(gender_environment(0, 0), DataError);
}

TEST_CASE("fixture: a -> b with (a, b) in the hierarchy gives one related pair") {
  Message m;
  m.id = "m1";
  m.from = Mailbox{"a@x.com", ""};
  m.to = {Mailbox{"b@x.com", ""}};
  m.body = "hello";
  const Thread t("t", {m});
  const DominanceSet d = parse_hierarchy({"a@x.com,b@x.com"});
  GenderAssignments a;
  const auto pairs = extract_pairs(t, d, a, true);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].ctx.hp == PowerLabel::kSuperior);
  CHECK_FALSE(pairs[0].ctx.env_p1);  // genders unknown
  const auto r = reversed(pairs[0]);
  CHECK(r.key.p1 == "b@x.com");
  CHECK(r.ctx.hp == PowerLabel::kSubordinate);
}

TEST_CASE("pairs CSV quotes awkward fields") {
  PairInstance p;
  p.key = PairKey{"thread,1", "a@x.com", "b@x.com"};
  p.ctx.hp = PowerLabel::kSuperior;
  const std::string csv = pairs_to_csv({p});
  CHECK(csv.find("\"thread,1\"") != std::string::npos);
}
