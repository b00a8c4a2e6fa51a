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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "restyler/phash.hpp"

namespace restyler {

/// kPh picks the K styles with the smallest hash distance; kRs picks K
/// styles uniformly at random (the quality baseline).
enum class MatchMode { kPh, kRs };

const char* match_mode_name(MatchMode m);
MatchMode match_mode_from_name(std::string_view name);  // kParseError

/// Hash index over a style corpus. Insertion order is significant:
/// distance ties are broken in favor of the earlier insertion, so lookups
/// are fully deterministic for a fixed build sequence. Immutable once
/// built; concurrent queries are safe.
class HashIndex {
 public:
  /// Throws kDuplicateId if `id` is already present.
  void insert(const std::string& id, PerceptualHash hash);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::string& id_at(std::size_t i) const { return ids_[i]; }
  PerceptualHash hash_at(std::size_t i) const { return hashes_[i]; }

  /// Insertion index of `id`, if present.
  std::optional<std::size_t> find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id).has_value(); }

 private:
  std::vector<std::string> ids_;
  std::vector<PerceptualHash> hashes_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

HashIndex build_index(const std::vector<HashEntry>& entries);

/// One retrieved style, ordered by (distance, insertion index) ascending.
struct Match {
  std::string style_id;
  /// Hamming distance in [0, 64]; absent for random selections.
  std::optional<int> distance;
  std::uint32_t index = 0;  // insertion index within the queried HashIndex
};

/// Exact K nearest neighbours by Hamming distance over a brute-force scan.
/// Returns min(k, index.size()) matches sorted by (distance, index).
/// Throws kEmptyIndex if the index is empty, kBadArgument if k < 1.
std::vector<Match> knn(const HashIndex& index, PerceptualHash query, int k);

/// Quality baseline: draws min(k, size) distinct styles for `source_id`
/// without replacement, uniformly over the index. The draw depends only on
/// (seed, source_id, index insertion order) — never on platform or
/// processing order — via a counter-based generator, so selections are
/// reproducible everywhere. Matches carry no distance.
std::vector<Match> random_select(const HashIndex& index,
                                 std::string_view source_id, int k,
                                 std::uint64_t seed);

/// One match set per query, in query order. kPh runs knn per source in
/// parallel over `workers` threads (results are gathered in query order,
/// so output is independent of the worker count); kRs draws per-source
/// streams from `seed`.
std::vector<std::vector<Match>> match_corpus(
    const HashIndex& index, const std::vector<HashEntry>& queries,
    MatchMode mode, int k, std::uint64_t seed, int workers);

/// Match file row: `<source-id>\t<rank>\t<style-id>\t<distance|NA>\t<mode>`
/// with mode "ph" or "rs". Ranks are 0-based.
struct MatchRecord {
  std::string source_id;
  int rank = 0;
  std::string style_id;
  std::optional<int> distance;
  std::string mode;
};

/// Flattens match sets into file rows, one per (source, rank).
std::vector<MatchRecord> to_match_records(
    const std::vector<HashEntry>& queries,
    const std::vector<std::vector<Match>>& sets, MatchMode mode);

void write_match_file(const std::filesystem::path& path,
                      const std::vector<MatchRecord>& records);
std::vector<MatchRecord> read_match_file(const std::filesystem::path& path);

}  // namespace restyler
