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

#ifndef GENPOWER_ACCEPTANCE  // the acceptance binary supplies its own main
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#endif
#include <doctest.h>

#include <cmath>
#include <random>

#include "genpower/gender.hpp"
#include "genpower/ingest.hpp"

using namespace genpower;

namespace {

// Oracle straight from the percentages: 100 - |mp - fp|.
long double as_oracle(std::uint64_t m, std::uint64_t f) {
  const long double total = static_cast<long double>(m) + static_cast<long double>(f);
  const long double mp = 100.0L * m / total;
  const long double fp = 100.0L * f / total;
  return 100.0L - std::fabs(mp - fp);
}

// Exact integer test of AS <= t for integer t: 200 min <= t (m + f).
bool within(std::uint64_t m, std::uint64_t f, std::uint64_t t) {
  return 200 * std::min(m, f) <= t * (m + f);
}

std::uint64_t random_count(std::mt19937_64& rng) {
  // Mix of tiny, typical and huge counts, zeros included.
  switch (rng() % 4) {
    case 0: return rng() % 3;
    case 1: return rng() % 100;
    case 2: return rng() % 100000;
    default: return rng() % 5000000000ULL;
  }
}

}  // namespace

TEST_CASE("ambiguity score properties over 10^4 random count tables") {
  std::mt19937_64 rng(2026);
  int cases = 0;
  int failures = 0;
  while (cases < 10000) {
    NameCounts c{random_count(rng), random_count(rng)};
    if (c.male + c.female == 0) continue;
    ++cases;
    const double as = ambiguity_score(c);
    const double swapped = ambiguity_score(NameCounts{c.female, c.male});
    bool ok = true;
    ok &= as == swapped;                                       // symmetry, exact
    ok &= as >= 0 && as <= 100;                                // range
    ok &= (as == 0) == (c.male == 0 || c.female == 0);         // zero iff single-gender
    ok &= std::fabs(as - double(as_oracle(c.male, c.female))) <= 1e-9;

    // The three G(n) cases at integer thresholds, decided exactly.
    const auto t = rng() % 101;
    const Gender g = likely_gender(c, double(t));
    Gender want = Gender::kIndeterminate;
    if (within(c.male, c.female, t) && c.male > c.female) want = Gender::kMale;
    if (within(c.male, c.female, t) && c.female > c.male) want = Gender::kFemale;
    ok &= g == want;

    // Lowering the threshold never flips M <-> F.
    Gender prev = likely_gender(c, 100.0);
    for (double th = 100.0; th >= 0; th -= 2.5) {
      const Gender now = likely_gender(c, th);
      ok &= now == prev || now == Gender::kIndeterminate;
      prev = now;
    }
    failures += ok ? 0 : 1;
  }
  CHECK(cases == 10000);
  CHECK(failures == 0);
}

TEST_CASE("ambiguity score examples") {
  CHECK(ambiguity_score(NameCounts{60, 40}) == doctest::Approx(80));
  CHECK(ambiguity_score(NameCounts{50, 50}) == 100);
  CHECK(ambiguity_score(NameCounts{10, 0}) == 0);
  CHECK(ambiguity_score(NameCounts{999, 1}) == doctest::Approx(0.2));
  CHECK(likely_gender(NameCounts{999, 1}, 10) == Gender::kMale);
  CHECK(likely_gender(NameCounts{60, 40}, 10) == Gender::kIndeterminate);
  CHECK(likely_gender(NameCounts{1, 999}, 10) == Gender::kFemale);
  NameStats s;
  CHECK_FALSE(ambiguity_score(s, "nobody"));
  CHECK(likely_gender(s, "nobody", GenderConfig{}) == Gender::kIndeterminate);
  s.add("Kay", Gender::kFemale, 50);
  CHECK(likely_gender(s, "KAY", GenderConfig{}) == Gender::kFemale);
}

TEST_CASE("candidate names") {
  using V = std::vector<std::string>;
  CHECK(candidate_names("Mann, Kay", "kay.mann@enron.com") == V{"kay"});
  CHECK(candidate_names("Kay Mann", "x@y.com") == V{"kay"});
  CHECK(candidate_names("Mary Ann Smith", "x@y.com") == V{"mary", "ann"});
  CHECK(candidate_names("Smith, Mary Ann", "x@y.com") == V{"mary", "ann"});
  CHECK(candidate_names(std::nullopt, "john.smith@corp.com") == V{"john"});
  CHECK(candidate_names("", "jane_doe@corp.com") == V{"jane"});
  CHECK(candidate_names("", "bob-jones@corp.com") == V{"bob"});
  CHECK(candidate_names("", "maryJones@corp.com") == V{"mary"});
  CHECK(candidate_names("?SKay Mann", "x@y.com") == V{"kay"});
}

TEST_CASE("assignment precedence and min-AS choice") {
  NameStats s;
  s.add("pat", Gender::kMale, 60);
  s.add("pat", Gender::kFemale, 40);
  s.add("maria", Gender::kFemale, 998);
  s.add("maria", Gender::kMale, 1);
  s.add("john", Gender::kMale, 1000);
  const GenderConfig cfg;

  auto r = assign_participant("pat.maria@x.com", {"Pat Maria Lopez"}, s, {}, cfg);
  CHECK(r.gender == Gender::kFemale);
  CHECK(r.provenance == Provenance::kAuto);
  REQUIRE(r.ambiguity_score);
  CHECK(*r.ambiguity_score == doctest::Approx(200.0 / 999));

  GenderOverrides o{{"john.doe@x.com", Gender::kFemale}};
  r = assign_participant("john.doe@x.com", {"John Doe"}, s, o, cfg);
  CHECK(r.gender == Gender::kFemale);
  CHECK(r.provenance == Provenance::kManual);

  r = assign_participant("zz@x.com", {"Qqq Rrr"}, s, {}, cfg);
  CHECK(r.gender == Gender::kIndeterminate);
  CHECK(r.provenance == Provenance::kNone);
}

TEST_CASE("subsets and coverage") {
  const Corpus corpus = parse_threads({
      R"({"thread_id":"t1","messages":[{"msg_id":"m1","timestamp":"2001-01-01T00:00:00Z",)"
      R"("from":{"email":"john.a@x.com","name":"John A"},"to":[{"email":"mary.b@x.com","name":"Mary B"}],)"
      R"("cc":[{"email":"zz@x.com","name":"Qqq"}],"body":"hi"}]})",
      R"({"thread_id":"t2","messages":[{"msg_id":"m1","timestamp":"2001-01-01T00:00:00Z",)"
      R"("from":{"email":"john.a@x.com","name":"John A"},"to":[{"email":"mary.b@x.com","name":"Mary B"}],)"
      R"("cc":[],"body":"hi"}]})",
      R"({"thread_id":"t3","messages":[{"msg_id":"m1","timestamp":"2001-01-01T00:00:00Z",)"
      R"("from":{"email":"zz@x.com","name":"Qqq"},"to":[{"email":"mary.b@x.com","name":"Mary B"}],)"
      R"("cc":[],"body":"hi"}]})",
  });
  NameStats s;
  s.add("john", Gender::kMale, 100);
  s.add("mary", Gender::kFemale, 100);
  const auto a = assign_corpus(corpus, s, {}, GenderConfig{});
  const auto asgi = subset_corpus(corpus, a, SubsetMode::kAllSenders);
  const auto apgi = subset_corpus(corpus, a, SubsetMode::kAllParticipants);
  REQUIRE(asgi.size() == 2);
  CHECK(asgi[0].id() == "t1");
  CHECK(asgi[1].id() == "t2");
  REQUIRE(apgi.size() == 1);
  CHECK(apgi[0].id() == "t2");

  const auto rep = coverage_report(corpus, a);
  CHECK(rep.total_participants == 3);
  CHECK(rep.assigned_participants == 2);
  CHECK(rep.participant_coverage_pct == doctest::Approx(200.0 / 3));
  CHECK(rep.total_messages == 3);
  CHECK(rep.gendered_sender_messages == 2);
  CHECK(rep.asgi_threads == 2);
  CHECK(rep.apgi_threads == 1);

  // 10 gold participants, all assigned, 9 correct.
  GenderAssignments auto_a;
  GenderOverrides gold;
  for (int i = 0; i < 10; ++i) {
    const std::string e = "p" + std::to_string(i) + "@x.com";
    ParticipantRecord r;
    r.email = e;
    r.gender = Gender::kMale;
    r.provenance = Provenance::kAuto;
    auto_a[e] = r;
    gold[e] = i == 0 ? Gender::kFemale : Gender::kMale;
  }
  const auto g = gold_accuracy(auto_a, gold);
  CHECK(g.coverage_pct == doctest::Approx(100));
  CHECK(g.accuracy_pct == doctest::Approx(90));
}

TEST_CASE("assignment CSV round trip") {
  NameStats s;
  s.add("john", Gender::kMale, 100);
  GenderAssignments a;
  a["john.a@x.com"] = assign_participant("john.a@x.com", {"John A"}, s, {}, GenderConfig{});
  a["q@x.com"] = assign_participant("q@x.com", {}, s, {}, GenderConfig{});
  const std::string csv = assignments_to_csv(a);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const auto nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  const auto back = assignments_from_csv(lines);
  CHECK(assignments_to_csv(back) == csv);
  CHECK(gender_of(back, "john.a@x.com") == Gender::kMale);
}

TEST_CASE("config validation") {
  GenderConfig c;
  c.ambiguity_threshold = 101;
  CHECK_THROWS_AS(c.validate(), DataError);
  c.ambiguity_threshold = 10;
  c.year_from = 1980;
  c.year_to = 1970;
  CHECK_THROWS_AS(c.validate(), DataError);
}
