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

#include "restyler/phash.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "restyler/digest.hpp"
#include "restyler/error.hpp"

namespace restyler {
namespace {

// Orthonormal 1-D DCT-II basis, row-major: basis[u*n + x].
// Row 0 is sqrt(1/N); row u>0 is sqrt(2/N) cos(pi (2x+1) u / 2N).
std::vector<double> dct_basis(int n) {
  std::vector<double> basis(static_cast<std::size_t>(n) * n);
  const double norm0 = std::sqrt(1.0 / n);
  const double norm = std::sqrt(2.0 / n);
  for (int u = 0; u < n; ++u) {
    for (int x = 0; x < n; ++x) {
      basis[static_cast<std::size_t>(u) * n + x] =
          (u == 0 ? norm0 : norm) *
          std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * n));
    }
  }
  return basis;
}

void require_square_gray(const ImageBuffer& img) {
  if (img.channels != 1) {
    fail(Errc::kNotGray, "dct2 needs a single-channel buffer, got " +
                             std::to_string(img.channels) + " channels");
  }
  if (img.width != img.height) {
    fail(Errc::kNotSquare, "dct2 needs a square buffer, got " +
                               std::to_string(img.width) + "x" +
                               std::to_string(img.height));
  }
  if (img.width < 8) {
    fail(Errc::kBadArgument,
         "dct2 needs side >= 8, got " + std::to_string(img.width));
  }
}

}  // namespace

DctSpectrum dct2(const ImageBuffer& img) {
  require_square_gray(img);
  const int n = img.width;
  const std::vector<double> a = dct_basis(n);

  // T = A g A^T as two matrix products; tmp = A g.
  std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int x = 0; x < n; ++x) {
      const double w = a[static_cast<std::size_t>(u) * n + x];
      for (int y = 0; y < n; ++y) {
        tmp[static_cast<std::size_t>(u) * n + y] += w * img.at(0, x, y);
      }
    }
  }
  DctSpectrum spectrum;
  spectrum.size = n;
  spectrum.coeffs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int y = 0; y < n; ++y) {
        acc += tmp[static_cast<std::size_t>(u) * n + y] *
               a[static_cast<std::size_t>(v) * n + y];
      }
      spectrum.coeffs[static_cast<std::size_t>(u) * n + v] = acc;
    }
  }
  return spectrum;
}

ImageBuffer idct2(const DctSpectrum& spectrum) {
  const int n = spectrum.size;
  if (n < 1 ||
      spectrum.coeffs.size() != static_cast<std::size_t>(n) * n) {
    fail(Errc::kBadArgument, "malformed spectrum");
  }
  const std::vector<double> a = dct_basis(n);
  // g = A^T T A; tmp = A^T T.
  std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
  for (int x = 0; x < n; ++x) {
    for (int u = 0; u < n; ++u) {
      const double w = a[static_cast<std::size_t>(u) * n + x];
      for (int v = 0; v < n; ++v) {
        tmp[static_cast<std::size_t>(x) * n + v] +=
            w * spectrum.coeffs[static_cast<std::size_t>(u) * n + v];
      }
    }
  }
  ImageBuffer img = make_image(n, n, 1, Colorspace::kGray);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      double acc = 0.0;
      for (int v = 0; v < n; ++v) {
        acc += tmp[static_cast<std::size_t>(x) * n + v] *
               a[static_cast<std::size_t>(v) * n + y];
      }
      img.at(0, x, y) = static_cast<float>(acc);
    }
  }
  return img;
}

// Transforming a perfectly flat image leaves AC coefficients that are
// only accumulation dust (~1e-16 and below), yet a strict median split
// would happily turn that dust into bits. Anything at or below this floor
// is treated as an exact zero; real image content sits many orders of
// magnitude above it.
constexpr double kAcNoiseFloor = 1e-10;

PerceptualHash compute_hash(const ImageBuffer& img) {
  const DctSpectrum spectrum = dct2(resize(to_grayscale(img), 32, 32));

  // 8x8 low-frequency block, row-major; slot 0 is DC.
  double block[64];
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      const double coeff = spectrum.at(u, v);
      block[8 * u + v] = std::abs(coeff) <= kAcNoiseFloor ? 0.0 : coeff;
    }
  }
  // Median of the 63 AC coefficients (the DC term dwarfs them and would
  // skew the threshold). 63 values -> the median sits at sorted index 31.
  double ac[63];
  std::copy(block + 1, block + 64, ac);
  std::nth_element(ac, ac + 31, ac + 63);
  const double median = ac[31];

  PerceptualHash hash;
  for (int i = 0; i < 64; ++i) {
    if (block[i] > median) {
      hash.bits |= 1ull << (63 - i);  // bit 0 (DC) at the MSB
    }
  }
  return hash;
}

std::string to_hex(PerceptualHash h) { return to_hex16(h.bits); }

PerceptualHash hash_from_hex(std::string_view hex) {
  return PerceptualHash{parse_hex16(hex)};
}

void write_hash_file(const std::filesystem::path& path,
                     const std::vector<HashEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  }
  for (const auto& [id, hash] : entries) {
    out << id << '\t' << to_hex(hash) << '\n';
  }
  out.flush();
  if (!out) {
    fail(Errc::kIoError, "write error on " + path.string());
  }
}

std::vector<HashEntry> read_hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::kIoError, "cannot open " + path.string());
  }
  std::vector<HashEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      fail(Errc::kParseError, path.string() + ":" + std::to_string(lineno) +
                                  ": expected <id>\\t<hash>");
    }
    entries.emplace_back(line.substr(0, tab),
                         hash_from_hex(line.substr(tab + 1)));
  }
  return entries;
}

}  // namespace restyler
