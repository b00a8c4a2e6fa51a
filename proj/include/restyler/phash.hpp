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

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "restyler/image.hpp"

namespace restyler {

/// 2-D DCT-II coefficients of a square grayscale image. Row-major with
/// index (u, v); (0, 0) is the DC term. The transform is orthonormal, so
/// coefficient energy equals pixel energy (Parseval).
struct DctSpectrum {
  int size = 0;
  std::vector<double> coeffs;

  double at(int u, int v) const {
    return coeffs[static_cast<std::size_t>(u) * size + v];
  }
};

/// Orthonormal 2-D DCT-II, computed as two passes of a precomputed 1-D
/// basis matrix. Requires a square single-channel buffer with side >= 8.
DctSpectrum dct2(const ImageBuffer& img);

/// Inverse of dct2; reconstructs the input within 1e-6.
ImageBuffer idct2(const DctSpectrum& spectrum);

/// 64-bit structural fingerprint. Bit i covers coefficient (u, v) of the
/// 8x8 low-frequency block with i = 8u + v, stored MSB-first (the DC bit is
/// the most significant). Bits are set where the coefficient strictly
/// exceeds the median of the 63 non-DC block coefficients; ties map to 0.
struct PerceptualHash {
  std::uint64_t bits = 0;
  friend bool operator==(const PerceptualHash&, const PerceptualHash&) =
      default;
};

/// grayscale -> resize(32x32) -> dct2 -> 8x8 top-left block -> median
/// threshold. Deterministic: equal pixel content gives equal hashes.
PerceptualHash compute_hash(const ImageBuffer& img);

/// Population count of a XOR b; an integer in [0, 64].
inline int hamming(PerceptualHash a, PerceptualHash b) {
  return std::popcount(a.bits ^ b.bits);
}

/// 16 lowercase hex characters, MSB first.
std::string to_hex(PerceptualHash h);
PerceptualHash hash_from_hex(std::string_view hex);

// Corpus hash file: one `<sample-id>\t<hex-hash>` line per sample, UTF-8,
// LF endings, in input order.
using HashEntry = std::pair<std::string, PerceptualHash>;

void write_hash_file(const std::filesystem::path& path,
                     const std::vector<HashEntry>& entries);
std::vector<HashEntry> read_hash_file(const std::filesystem::path& path);

}  // namespace restyler
