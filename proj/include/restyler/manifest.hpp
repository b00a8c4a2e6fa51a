// Copyright 2026 The restyler Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace restyler {

enum class SampleRole { kSource, kStyle, kRestyled };

const char* role_name(SampleRole r);
SampleRole role_from_name(std::string_view name);  // kParseError

/// One dataset sample. Restyled samples carry their provenance: the content
/// and style ids they were produced from, the backend, and the match rank.
/// Restyled samples inherit the label_path of their content source — labels
/// describe structure, which restyling leaves untouched.
struct SampleRecord {
  std::string id;
  SampleRole role = SampleRole::kSource;
  std::string path;
  std::optional<std::string> label_path;
  std::optional<std::string> content_id;
  std::optional<std::string> style_id;
  std::optional<std::string> backend;
  std::optional<int> rank;
};

/// A sample that could not be processed, with a stable reason string.
struct SkipRecord {
  std::string id;
  std::string reason;
};

/// Tab-separated dataset manifest with a `restyler-manifest v1` header
/// line. Missing optional fields serialise as "-". Sample rows start with
/// "sample", skip rows with "skip"; order is preserved exactly.
struct Manifest {
  std::vector<SampleRecord> samples;
  std::vector<SkipRecord> skips;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);  // kParseError

std::string serialize_manifest(const Manifest& m);
Manifest parse_manifest(std::string_view text);

}  // namespace restyler
