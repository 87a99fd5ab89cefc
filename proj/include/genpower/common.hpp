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

#ifndef GENPOWER_COMMON_HPP_
#define GENPOWER_COMMON_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace genpower {

// Raised for malformed or inconsistent input data. The CLI maps it to exit
// code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Splits on every occurrence of `sep`; empty fields are kept.
std::vector<std::string_view> split(std::string_view s, char sep);

// Lowercased, trimmed mailbox identity with a leading "?S" artifact removed.
std::string normalize_email(std::string_view raw);

// Removes a leading literal "?S" (after leading whitespace).
std::string_view strip_artifact_prefix(std::string_view s);

// Stable 64-bit FNV-1a hash of `seed` followed by `text`, with a murmur
// finalizer so high bits spread on short near-identical ids.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);

// Reads a text file as lines with trailing '\r' removed.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(std::string_view s);

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> parse_csv_line(std::string_view line);

// Shortest round-trippable decimal representation of a double.
std::string format_double(double v);

}  // namespace genpower

#endif  // GENPOWER_COMMON_HPP_
