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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace restyler::oracles {
namespace {

std::array<double, 9> matmul3(const std::array<double, 9>& a,
                              const std::array<double, 9>& b) {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 3; ++k) {
        out[r * 3 + c] += a[r * 3 + k] * b[k * 3 + c];
      }
    }
  }
  return out;
}

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

std::array<double, 9> invert3(const std::array<double, 9>& m) {
  const double det = det3(m);
  std::array<double, 9> inv{};
  inv[0] = (m[4] * m[8] - m[5] * m[7]) / det;
  inv[1] = (m[2] * m[7] - m[1] * m[8]) / det;
  inv[2] = (m[1] * m[5] - m[2] * m[4]) / det;
  inv[3] = (m[5] * m[6] - m[3] * m[8]) / det;
  inv[4] = (m[0] * m[8] - m[2] * m[6]) / det;
  inv[5] = (m[2] * m[3] - m[0] * m[5]) / det;
  inv[6] = (m[3] * m[7] - m[4] * m[6]) / det;
  inv[7] = (m[1] * m[6] - m[0] * m[7]) / det;
  inv[8] = (m[0] * m[4] - m[1] * m[3]) / det;
  return inv;
}

}  // namespace

std::vector<double> naive_dct2(const ImageBuffer& img) {
  const int n = img.width;
  std::vector<double> coeffs(static_cast<std::size_t>(n) * n, 0.0);
  const double a0 = std::sqrt(1.0 / n);
  const double a1 = std::sqrt(2.0 / n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
          acc += img.at(0, x, y) *
                 std::cos(std::numbers::pi * (2 * x + 1) * u / (2.0 * n)) *
                 std::cos(std::numbers::pi * (2 * y + 1) * v / (2.0 * n));
        }
      }
      coeffs[static_cast<std::size_t>(u) * n + v] =
          (u == 0 ? a0 : a1) * (v == 0 ? a0 : a1) * acc;
    }
  }
  return coeffs;
}

std::vector<Match> knn_full_sort(const HashIndex& index, PerceptualHash q,
                                 int k) {
  std::vector<Match> all;
  all.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    all.push_back(Match{index.id_at(i), hamming(q, index.hash_at(i)),
                        static_cast<std::uint32_t>(i)});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Match& a, const Match& b) {
                     if (*a.distance != *b.distance) {
                       return *a.distance < *b.distance;
                     }
                     return a.index < b.index;
                   });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(k);
  return all;
}

Moments two_pass_moments(std::span<const float> plane) {
  long double sum = 0.0L;
  for (float v : plane) sum += v;
  const long double mean = sum / static_cast<long double>(plane.size());
  long double ss = 0.0L;
  for (float v : plane) {
    const long double d = v - mean;
    ss += d * d;
  }
  Moments m;
  m.mean = static_cast<double>(mean);
  m.stddev = static_cast<double>(
      std::sqrt(ss / static_cast<long double>(plane.size())));
  return m;
}

CorpusStats concat_corpus_stats(const std::vector<ImageBuffer>& images) {
  // Flatten every pixel, then single definitional pass over the list.
  std::vector<std::array<double, 3>> pixels;
  for (const ImageBuffer& raw : images) {
    if (raw.empty()) continue;
    const ImageBuffer img = raw.colorspace == Colorspace::kDecorrelated
                                ? raw
                                : rgb_to_decorrelated(raw);
    for (std::size_t i = 0; i < img.plane_size(); ++i) {
      pixels.push_back(
          {img.plane(0)[i], img.plane(1)[i], img.plane(2)[i]});
    }
  }
  CorpusStats stats;
  stats.pixel_count = pixels.size();
  const long double n = static_cast<long double>(pixels.size());
  for (int a = 0; a < 3; ++a) {
    long double sum = 0.0L;
    for (const auto& p : pixels) sum += p[a];
    stats.mean[a] = static_cast<double>(sum / n);
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      long double ss = 0.0L;
      for (const auto& p : pixels) {
        ss += (p[a] - stats.mean[a]) * (p[b] - stats.mean[b]);
      }
      stats.covariance[a * 3 + b] = static_cast<double>(ss / n);
    }
  }
  return stats;
}

double sqrt_product_trace(const std::array<double, 9>& a,
                          const std::array<double, 9>& b) {
  // Denman-Beavers: Y_{k+1} = (gY_k + (gZ_k)^-1)/2 with Z iterated
  // symmetrically, Y_0 = a*b, Z_0 = I; Y converges to sqrt(a*b). The
  // determinant scaling g keeps convergence quadratic even when the
  // product is nearly singular.
  std::array<double, 9> y = matmul3(a, b);
  std::array<double, 9> z = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int it = 0; it < 100; ++it) {
    const double dets = std::abs(det3(y) * det3(z));
    const double g = dets > 0.0 ? std::pow(dets, -1.0 / 6.0) : 1.0;
    std::array<double, 9> ys, zs;
    for (int i = 0; i < 9; ++i) {
      ys[i] = g * y[i];
      zs[i] = g * z[i];
    }
    const std::array<double, 9> yi = invert3(ys);
    const std::array<double, 9> zi = invert3(zs);
    std::array<double, 9> yn{}, zn{};
    double delta = 0.0;
    for (int i = 0; i < 9; ++i) {
      yn[i] = 0.5 * (ys[i] + zi[i]);
      zn[i] = 0.5 * (zs[i] + yi[i]);
      delta += std::abs(yn[i] - y[i]);
    }
    y = yn;
    z = zn;
    if (delta < 1e-13) break;
  }
  return y[0] + y[4] + y[8];
}

double wasserstein1(std::span<const float> a, std::span<const float> b) {
  std::array<double, 256> ha{}, hb{};
  for (float v : a) {
    ha[std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)] += 1.0 / a.size();
  }
  for (float v : b) {
    hb[std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)] += 1.0 / b.size();
  }
  // W1 between 1-D distributions = integral of |CDF difference|.
  double w1 = 0.0, ca = 0.0, cb = 0.0;
  for (int bin = 0; bin < 255; ++bin) {
    ca += ha[bin];
    cb += hb[bin];
    w1 += std::abs(ca - cb) / 255.0;
  }
  return w1;
}

}  // namespace restyler::oracles
