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
#include <string>
#include <string_view>
#include <vector>

#include "restyler/manifest.hpp"
#include "restyler/matcher.hpp"
#include "restyler/restyle.hpp"

namespace restyler {

enum class OutputFormat { kPng, kJpeg };

struct PipelineConfig {
  std::filesystem::path source_dir;
  std::filesystem::path style_dir;
  std::filesystem::path out_dir;
  /// Optional directory of label maps mirroring source_dir's layout (same
  /// relative path, .png extension). Samples without a matching file simply
  /// carry no label.
  std::filesystem::path labels_dir;
  MatchMode mode = MatchMode::kPh;
  int k = 5;
  std::uint64_t seed = 0;
  RestyleConfig backend;
  int workers = 1;
  OutputFormat output_format = OutputFormat::kPng;
  int jpeg_quality = 95;
  /// Compute the hash-driven metrics report (domain gaps, structure
  /// preservation). In RS mode hashes are only needed when this is on.
  bool compute_metrics = true;
};

/// Throws kConfigError describing every violated constraint at once
/// (k >= 1, workers >= 1, dirs exist, out_dir disjoint from inputs, ...).
void validate_config(const PipelineConfig& cfg);

/// Deterministic directory scan: image files (.png/.jpg/.jpeg, any case)
/// discovered recursively, sorted lexicographically by relative path, with
/// id = relative path (forward slashes). Non-image files become skip
/// records. Throws kMissingDir.
Manifest ingest(const std::filesystem::path& dir, SampleRole role);

struct PipelineResult {
  Manifest manifest;        // the enriched dataset Z plus style rows
  std::size_t num_sources = 0;
  std::size_t num_styles = 0;
  std::size_t num_restyled = 0;
  std::size_t num_failures = 0;  // total skip records
  std::size_t num_reused = 0;    // outputs satisfied by a previous run
  std::filesystem::path manifest_path;
};

/// End-to-end run: ingest both corpora, hash, match, restyle every source
/// with each of its k matched styles, and write into cfg.out_dir:
///   source_hashes.tsv, style_hashes.tsv   (hash files; RS mode writes
///                                           them only when metrics are on)
///   matches.tsv                            (match file)
///   restyled/...                           (output images)
///   manifest.tsv                           (sources + styles + restyled)
///   metrics.csv                            (when compute_metrics)
///   state.tsv                              (resume ledger)
/// |Z| = (k+1) * |sources| minus recorded failures: individual decode or
/// restyle failures become skip records and never abort the run. Reruns
/// skip work whose inputs and config digest are unchanged and whose output
/// still exists, and reproduce manifests byte-identically.
PipelineResult run_pipeline(const PipelineConfig& cfg);

struct VerifyIssue {
  std::string id;
  std::string problem;
};

struct VerifyReport {
  std::size_t samples_checked = 0;
  std::vector<VerifyIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Referential integrity, file existence, decodability, and provenance
/// completeness of a written manifest. Report-only: never throws on
/// content problems, only on an unreadable manifest.
VerifyReport verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace restyler
