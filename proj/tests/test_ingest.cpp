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

#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "genpower/common.hpp"
#include "genpower/ingest.hpp"

using namespace genpower;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("genpower_test_" + tag + "_" +
                                        std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return path / name;
  }
};

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

const char* kThread =
    R"({"thread_id":"t1","messages":[)"
    R"({"msg_id":"m2","parent_id":"m1","timestamp":"2001-05-01T10:05:00-05:00",)"
    R"("from":{"email":"Bob@X.com","name":"Bob B"},"to":[{"email":"alice@x.com","name":"Alice"}],)"
    R"("cc":[],"body":"ok"},)"
    R"({"msg_id":"m1","timestamp":"2001-05-01T10:00:00-05:00",)"
    R"("from":{"email":"alice@x.com","name":"?SAlice A"},"to":[{"email":"bob@x.com","name":"Bob"}],)"
    R"("cc":[{"email":"carol@x.com"}],"body":"Please send it."}]})";

}  // namespace

TEST_CASE("thread parsing canonicalizes and round-trips") {
  const Thread t = parse_thread(kThread, 1);
  REQUIRE(t.size() == 2);
  CHECK(t[0].id == "m1");  // ordered by timestamp
  CHECK(t[1].sender() == "bob@x.com");
  CHECK(t[0].from.name == "?SAlice A");  // raw; the prefix is stripped by the name heuristics
  CHECK(t[0].timestamp_ms == 988729200000);
  const std::string text = serialize_thread(t);
  const Thread back = parse_thread(text, 1);
  CHECK(back == t);
  CHECK(serialize_thread(back) == text);
}

TEST_CASE("thread parsing errors") {
  CHECK(parse_threads({}).empty());
  const std::string no_from =
      R"({"thread_id":"t","messages":[{"msg_id":"m","timestamp":"2001-01-01T00:00:00Z","to":[]}]})";
  const std::string e = error_of([&] { parse_threads({no_from}); });
  CHECK(e.find("line 1") != std::string::npos);
  CHECK(e.find("from") != std::string::npos);
  CHECK_THROWS_AS(parse_threads({"{not json"}), DataError);
  const std::string dangling_parent =
      R"({"thread_id":"t","messages":[{"msg_id":"m","parent_id":"zz","timestamp":"2001-01-01T00:00:00Z",)"
      R"("from":{"email":"a@x.com"},"to":[]}]})";
  CHECK_THROWS_AS(parse_threads({dangling_parent}), DataError);
}

TEST_CASE("SSA aggregation equals a brute-force sum over raw rows") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> names = {"Pat", "Kay", "John", "Mary", "Lee", "Sam"};
  for (int rep = 0; rep < 20; ++rep) {
    TempDir dir("ssa");
    std::map<std::pair<std::string, char>, std::uint64_t> oracle;
    const int from = 1950 + int(rng() % 5);
    const int to = from + int(rng() % 6);
    for (int year = 1948; year <= 1962; ++year) {
      std::string text;
      for (const auto& n : names) {
        for (char g : {'M', 'F'}) {
          if (rng() % 3 == 0) continue;
          const std::uint64_t c = 5 + rng() % 1000;
          text += n + "," + g + "," + std::to_string(c) + "\r\n";
          if (year >= from && year <= to) oracle[{to_lower(n), g}] += c;
        }
      }
      dir.write("yob" + std::to_string(year) + ".txt", text);
    }
    const NameStats s = load_ssa(dir.path, from, to);
    for (const auto& n : names) {
      const NameCounts* c = s.find(n);
      const std::uint64_t m = oracle.count({to_lower(n), 'M'}) ? oracle[{to_lower(n), 'M'}] : 0;
      const std::uint64_t f = oracle.count({to_lower(n), 'F'}) ? oracle[{to_lower(n), 'F'}] : 0;
      if (m + f == 0) {
        CHECK(c == nullptr);
      } else {
        REQUIRE(c != nullptr);
        CHECK(c->male == m);
        CHECK(c->female == f);
      }
    }
  }
}

TEST_CASE("SSA errors") {
  TempDir dir("ssa_err");
  dir.write("yob1960.txt", "Pat,M,30\nPat,X,5\n");
  const std::string e = error_of([&] { load_ssa(dir.path, 1960, 1960); });
  CHECK(e.find("yob1960.txt") != std::string::npos);
  CHECK(e.find("2") != std::string::npos);
  CHECK_THROWS_AS(load_ssa(dir.path, 1900, 1901), DataError);
  CHECK_THROWS_AS(load_ssa(dir.path / "missing", 1960, 1960), DataError);
}

TEST_CASE("hierarchy closure matches a Floyd-Warshall oracle") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + int(rng() % 49);
    // Random DAG: edges only from lower to higher index.
    std::vector<std::string> lines;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    auto name = [](int i) { return "p" + std::to_string(i) + "@x.com"; };
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng() % 100 < 8) {
          lines.push_back(name(i) + "," + name(j));
          reach[i][j] = true;
        }
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        }
      }
    }
    const DominanceSet d = parse_hierarchy(lines);
    std::size_t expected = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        expected += reach[i][j] ? 1 : 0;
        CHECK(d.dominates(name(i), name(j)) == reach[i][j]);
      }
    }
    CHECK(d.closed().size() == expected);
  }
}

TEST_CASE("hierarchy errors") {
  const auto d = parse_hierarchy({"a@x.com,b@x.com", "b@x.com,c@x.com"});
  CHECK(d.dominates("a@x.com", "c@x.com"));
  const std::string e = error_of([] { parse_hierarchy({"a@x.com,b@x.com", "b@x.com,a@x.com"}); });
  CHECK(e.find("cycle") != std::string::npos);
  CHECK_THROWS_AS(parse_hierarchy({"a@x.com,a@x.com"}), DataError);
  CHECK(parse_hierarchy({}).empty());
}

TEST_CASE("overrides") {
  const auto o = parse_overrides({"Kay.Mann@enron.com,F,public-record"});
  CHECK(o.at("kay.mann@enron.com") == Gender::kFemale);
  const std::string e =
      error_of([] { parse_overrides({"a@x.com,M,x", "a@x.com,F,y"}); });
  CHECK(e.find("a@x.com") != std::string::npos);
  CHECK(parse_overrides({}).empty());
}

TEST_CASE("annotations") {
  const Corpus c = parse_threads({kThread});
  const auto side = parse_annotations({
      R"({"thread_id":"t1","msg_id":"m1","spans":[{"start":0,"end":7,"da":"RA","odp":false},)"
      R"({"start":7,"end":15,"da":"INF"}]})",
  });
  const Corpus a = apply_annotations(c, side);
  REQUIRE(a[0][0].sentences);
  CHECK(a[0][0].sentences->size() == 2);
  CHECK(a[0][0].sentences->at(0).act == DialogAct::kRequestAction);
  CHECK_FALSE(a[0][1].sentences);

  const auto dangling =
      parse_annotations({R"({"thread_id":"t1","msg_id":"zz","spans":[]})"});
  const std::string e = error_of([&] { apply_annotations(c, dangling); });
  CHECK(e.find("zz") != std::string::npos);
  const auto overlapping = parse_annotations(
      {R"({"thread_id":"t1","msg_id":"m1","spans":[)"
       R"({"start":0,"end":7,"da":"RA"},{"start":5,"end":9,"da":"RA"}]})"});
  CHECK_THROWS_AS(apply_annotations(c, overlapping), DataError);
}

TEST_CASE("split file and hash split") {
  TempDir dir("split");
  const auto p = dir.write("split.csv", "t1,train\nt2,DEV\nt3,test\n");
  const CorpusSplit s = load_split_file(p);
  CHECK(s.at("t2") == Split::kDev);
  CHECK_THROWS_AS(s.at("t9"), DataError);

  // Proportions: 10^4 ids land close to 50/24/26.
  std::map<Split, int> counts;
  for (int i = 0; i < 10000; ++i) {
    counts[hash_split("thread-" + std::to_string(i), SplitProportions{}, 42)]++;
  }
  CHECK(std::abs(counts[Split::kTrain] - 5000) < 250);
  CHECK(std::abs(counts[Split::kDev] - 2400) < 250);
  CHECK(std::abs(counts[Split::kTest] - 2600) < 250);
  CHECK(hash_split("x", SplitProportions{}, 42) == hash_split("x", SplitProportions{}, 42));
}
