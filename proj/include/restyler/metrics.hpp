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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "restyler/image.hpp"
#include "restyler/matcher.hpp"

namespace restyler {

/// Pooled per-pixel statistics of a corpus in the decorrelated colour
/// space: mean vector and covariance over every pixel of every image.
struct CorpusStats {
  std::array<double, 3> mean{};
  // Row-major 3x3, symmetric positive semi-definite.
  std::array<double, 9> covariance{};
  std::uint64_t pixel_count = 0;
};

/// Accumulates stats over a corpus delivered by `loader(i)` for
/// i in [0, count). Images are converted to the decorrelated space if
/// needed. Per-image partial sums are computed in parallel with `workers`
/// threads and merged in image order with compensated summation, so the
/// result is bit-identical for any worker count. Throws kEmptyCorpus when
/// count == 0 or every image is empty.
CorpusStats corpus_stats(std::size_t count,
                         const std::function<ImageBuffer(std::size_t)>& loader,
                         int workers);

/// Symmetric dissimilarity between two corpora modelled as Gaussians:
///   |mu_a - mu_b|^2 + tr(Ca + Cb - 2 (Ca^1/2 Cb Ca^1/2)^1/2).
/// Zero iff the moments coincide. The matrix square root comes from a
/// symmetric eigendecomposition with negative eigenvalues floored at zero,
/// so slightly non-PSD inputs (rounding) are tolerated.
double domain_gap(const CorpusStats& a, const CorpusStats& b);

/// Pearson correlation between the luminance gradient-magnitude fields of
/// two same-sized images (central differences, interior pixels only).
/// 1.0 means edges coincide exactly. If both fields are constant the
/// images are trivially alike (returns 1); if only one is, they are not
/// (returns 0). Throws kDimensionMismatch on size disagreement.
double structure_preservation(const ImageBuffer& a, const ImageBuffer& b);

/// Distance quality of one match mode. RS selections carry no stored
/// distance, so they are scored post-hoc against the index.
struct ModeQuality {
  std::string mode;  // "ph" or "rs"
  std::size_t count = 0;
  std::array<std::uint64_t, 65> histogram{};  // distance -> occurrences
  double mean = 0.0;
  int p50 = 0;
  int p90 = 0;
};

struct MatchQualityReport {
  std::vector<ModeQuality> modes;  // one entry per mode present
  /// (style id, times matched), in index insertion order, reused only.
  std::vector<std::pair<std::string, std::size_t>> style_reuse;
};

/// Summarises match files: Hamming-distance distribution per mode plus
/// style reuse counts. Throws kUnknownId when a record references an id
/// missing from `source_hashes` or `index`.
MatchQualityReport match_quality_report(
    const std::vector<MatchRecord>& records,
    const std::vector<HashEntry>& source_hashes, const HashIndex& index);

/// One row of the metrics report CSV: `metric,subset_a,subset_b,value`.
struct MetricRecord {
  std::string metric;
  std::string subset_a;
  std::string subset_b;
  double value = 0.0;
};

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricRecord>& records);

}  // namespace restyler
