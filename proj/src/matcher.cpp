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

#include "restyler/matcher.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>

#include "restyler/digest.hpp"
#include "restyler/error.hpp"

namespace restyler {

const char* match_mode_name(MatchMode m) {
  return m == MatchMode::kPh ? "ph" : "rs";
}

MatchMode match_mode_from_name(std::string_view name) {
  if (name == "ph") return MatchMode::kPh;
  if (name == "rs") return MatchMode::kRs;
  fail(Errc::kParseError,
       "unknown match mode '" + std::string(name) + "' (want ph or rs)");
}

void HashIndex::insert(const std::string& id, PerceptualHash hash) {
  if (!lookup_.emplace(id, ids_.size()).second) {
    fail(Errc::kDuplicateId, "duplicate sample id '" + id + "'");
  }
  ids_.push_back(id);
  hashes_.push_back(hash);
}

std::optional<std::size_t> HashIndex::find(std::string_view id) const {
  const auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

HashIndex build_index(const std::vector<HashEntry>& entries) {
  HashIndex index;
  for (const auto& [id, hash] : entries) index.insert(id, hash);
  return index;
}

std::vector<Match> knn(const HashIndex& index, PerceptualHash query,
                       int k) {
  if (k < 1) {
    fail(Errc::kBadArgument, "k must be >= 1, got " + std::to_string(k));
  }
  if (index.empty()) {
    fail(Errc::kEmptyIndex, "knn over an empty index");
  }
  const std::size_t m = std::min<std::size_t>(k, index.size());

  // Bounded selection over packed (distance, insertion index) keys; the
  // packing makes heap order equal the required (distance, index) order,
  // ties included, so the result matches a full sort exactly.
  std::vector<std::uint64_t> heap;
  heap.reserve(m + 1);
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::uint64_t dist =
        static_cast<std::uint64_t>(hamming(query, index.hash_at(i)));
    const std::uint64_t key = (dist << 32) | static_cast<std::uint32_t>(i);
    if (heap.size() < m) {
      heap.push_back(key);
      std::push_heap(heap.begin(), heap.end());
    } else if (key < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = key;
      std::push_heap(heap.begin(), heap.end());
    }
  }
  std::sort(heap.begin(), heap.end());

  std::vector<Match> matches;
  matches.reserve(heap.size());
  for (std::uint64_t key : heap) {
    const auto idx = static_cast<std::uint32_t>(key & 0xffffffffu);
    matches.push_back(Match{index.id_at(idx),
                            static_cast<int>(key >> 32), idx});
  }
  return matches;
}

std::vector<Match> random_select(const HashIndex& index,
                                 std::string_view source_id, int k,
                                 std::uint64_t seed) {
  if (k < 1) {
    fail(Errc::kBadArgument, "k must be >= 1, got " + std::to_string(k));
  }
  if (index.empty()) {
    fail(Errc::kEmptyIndex, "random_select over an empty index");
  }
  const std::size_t n = index.size();
  const std::size_t m = std::min<std::size_t>(k, n);

  // Each source gets its own counter-based stream; draws use modulo
  // reduction (the slight bias is irrelevant here and keeps the sequence
  // identical on every platform).
  const std::uint64_t stream = mix64(mix64(seed) ^ fnv1a64(source_id));

  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<Match> matches;
  matches.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t r = mix64(stream + (i + 1) * kGolden);
    const std::size_t j = i + static_cast<std::size_t>(r % (n - i));
    std::swap(pool[i], pool[j]);
    matches.push_back(Match{index.id_at(pool[i]), std::nullopt, pool[i]});
  }
  return matches;
}

std::vector<std::vector<Match>> match_corpus(
    const HashIndex& index, const std::vector<HashEntry>& queries,
    MatchMode mode, int k, std::uint64_t seed, int workers) {
  std::vector<std::vector<Match>> sets(queries.size());
  if (mode == MatchMode::kPh) {
    const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
    for (std::int64_t i = 0; i < n; ++i) {
      sets[i] = knn(index, queries[i].second, k);
    }
  } else {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      sets[i] = random_select(index, queries[i].first, k, seed);
    }
  }
  return sets;
}

std::vector<MatchRecord> to_match_records(
    const std::vector<HashEntry>& queries,
    const std::vector<std::vector<Match>>& sets, MatchMode mode) {
  std::vector<MatchRecord> records;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t rank = 0; rank < sets[i].size(); ++rank) {
      const Match& m = sets[i][rank];
      records.push_back(MatchRecord{queries[i].first,
                                    static_cast<int>(rank), m.style_id,
                                    m.distance, match_mode_name(mode)});
    }
  }
  return records;
}

void write_match_file(const std::filesystem::path& path,
                      const std::vector<MatchRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  }
  for (const MatchRecord& r : records) {
    out << r.source_id << '\t' << r.rank << '\t' << r.style_id << '\t';
    if (r.distance) {
      out << *r.distance;
    } else {
      out << "NA";
    }
    out << '\t' << r.mode << '\n';
  }
  out.flush();
  if (!out) {
    fail(Errc::kIoError, "write error on " + path.string());
  }
}

std::vector<MatchRecord> read_match_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::kIoError, "cannot open " + path.string());
  }
  std::vector<MatchRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto bad = [&](const std::string& why) {
      fail(Errc::kParseError,
           path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 5) bad("expected 5 tab-separated fields");
    MatchRecord r;
    r.source_id = fields[0];
    try {
      r.rank = std::stoi(fields[1]);
    } catch (const std::exception&) {
      bad("bad rank '" + fields[1] + "'");
    }
    r.style_id = fields[2];
    if (fields[3] != "NA") {
      try {
        r.distance = std::stoi(fields[3]);
      } catch (const std::exception&) {
        bad("bad distance '" + fields[3] + "'");
      }
    }
    r.mode = fields[4];
    if (r.mode != "ph" && r.mode != "rs") bad("bad mode '" + r.mode + "'");
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace restyler
