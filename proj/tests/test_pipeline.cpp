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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_runner.hpp"

using namespace genpower_test;

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> r;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(cell);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("full mini-corpus pipeline is byte-identical across reruns") {
  const fs::path root = fresh_dir("pipe");
  const RunResult a = run_minicorpus(root / "a", root / "scratch");
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const RunResult b = run_minicorpus(root / "b", root / "scratch");
  REQUIRE_MESSAGE(b.code == 0, b.err);
  const auto sa = snapshot(root / "a");
  const auto sb = snapshot(root / "b");
  CHECK(sa.size() == sb.size());
  for (const auto& name : {"name_stats.csv", "participants.csv", "pairs.csv", "features.csv",
                           "vocab.csv", "analysis.json", "model.json", "predictions_test.csv",
                           "ablation.csv"}) {
    REQUIRE_MESSAGE(sa.count(name), std::string(name));
  }
  CHECK(sa == sb);

  // Rerunning a step in place rewrites the same bytes.
  const RunResult again = run_cli({"train", "--work-dir", (root / "a").string()}, root / "scratch");
  CHECK(again.code == 0);
  CHECK(slurp(root / "a" / "model.json") == sb.at("model.json"));

  // Predictions cover every TEST instance with a valid label.
  const auto feats = read_csv(root / "a" / "features.csv");
  const auto preds = read_csv(root / "a" / "predictions_test.csv");
  std::size_t test_rows = 0;
  for (std::size_t i = 1; i < feats.size(); ++i) test_rows += feats[i][4] == "TEST" ? 1 : 0;
  CHECK(test_rows > 0);
  CHECK(preds.size() == test_rows + 1);
  const auto ev = nlohmann::json::parse(slurp(root / "a" / "eval_test.json"));
  CHECK(ev.at("accuracy").get<double>() >= 0.0);
  CHECK(ev.at("accuracy").get<double>() <= 1.0);
  fs::remove_all(root);
}

TEST_CASE("exit codes and messages") {
  const fs::path root = fresh_dir("codes");
  const std::string w = (root / "w").string();
  const fs::path s = root / "scratch";

  CHECK(run_cli({"--no-such-flag", "pairs"}, s).code == 1);
  CHECK(run_cli({}, s).code == 1);
  CHECK(run_cli({"ssa-build", "--work-dir", w}, s).code == 1);  // --ssa-dir missing
  CHECK(run_cli({"train", "--work-dir", w, "--ss-type", "IV"}, s).code == 1);

  RunResult r = run_cli({"ssa-build", "--work-dir", w, "--ssa-dir", (root / "nope").string()}, s);
  CHECK(r.code == 2);
  CHECK(r.err.find("nope") != std::string::npos);

  // A later command without its upstream artifact names the producer.
  r = run_cli({"pairs", "--work-dir", w, "--hierarchy",
               source_path("data/minicorpus/hierarchy.csv").string()},
              s);
  CHECK(r.code == 2);
  CHECK(r.err.find("subset") != std::string::npos);
  r = run_cli({"eval", "--work-dir", w}, s);
  CHECK(r.code == 2);
  CHECK(r.err.find("train") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("analyze tolerates constant features") {
  const fs::path root = fresh_dir("const");
  const fs::path w = root / "w";
  REQUIRE(run_minicorpus(w, root / "scratch").code == 0);

  // Overwrite every feature value with the same constant.
  auto rows = read_csv(w / "features.csv");
  std::string text;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      if (k) text += ',';
      text += (i > 0 && k >= 10) ? "1" : rows[i][k];
    }
    text += '\n';
  }
  std::ofstream(w / "features.csv", std::ios::binary) << text;

  const RunResult r = run_cli({"analyze", "--work-dir", w.string()}, root / "scratch");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string csv = slurp(w / "analysis.csv");
  CHECK(csv.find("nan") == std::string::npos);
  CHECK(csv.find("inf") == std::string::npos);
  for (const auto& row : read_csv(w / "analysis.csv")) {
    if (row.size() > 8 && row[8] == "1") FAIL("constant feature flagged significant: " << row[0]);
  }
  fs::remove_all(root);
}
