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


// Helpers for driving the genpower executable from tests.

#ifndef GENPOWER_TESTS_CLI_RUNNER_HPP_
#define GENPOWER_TESTS_CLI_RUNNER_HPP_

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace genpower_test {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

// Runs the CLI with `args`; stdout and stderr are captured through files.
inline RunResult run_cli(const std::vector<std::string>& args, const fs::path& scratch) {
  fs::create_directories(scratch);
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  std::string cmd = quote(GENPOWER_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

inline fs::path source_path(const std::string& rel) { return fs::path(GENPOWER_SOURCE_DIR) / rel; }

inline fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     ("genpower_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Every command of the mini-corpus pipeline, in order. Returns the first
// failing step's result, or the last one.
inline RunResult run_minicorpus(const fs::path& work, const fs::path& scratch) {
  const std::string w = work.string();
  const std::string m = source_path("data/minicorpus").string();
  const std::vector<std::vector<std::string>> steps = {
      {"ssa-build", "--work-dir", w, "--ssa-dir", source_path("data/ssa").string()},
      {"gender-assign", "--work-dir", w, "--threads", m + "/threads.jsonl", "--overrides",
       m + "/overrides.csv"},
      {"subset", "--work-dir", w, "--threads", m + "/threads.jsonl"},
      {"pairs", "--work-dir", w, "--hierarchy", m + "/hierarchy.csv"},
      {"features", "--work-dir", w},
      {"analyze", "--work-dir", w},
      {"train", "--work-dir", w},
      {"eval", "--work-dir", w},
      {"ablate", "--work-dir", w},
  };
  RunResult r;
  for (const auto& s : steps) {
    r = run_cli(s, scratch);
    if (r.code != 0) {
      r.err = s[0] + ": " + r.err;
      return r;
    }
  }
  return r;
}

// Relative path -> contents for every regular file under `root`.
inline std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return files;
}

}  // namespace genpower_test

#endif  // GENPOWER_TESTS_CLI_RUNNER_HPP_
