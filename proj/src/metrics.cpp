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

#include "restyler/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>

#include "restyler/error.hpp"

namespace restyler {
namespace {

// Per-image accumulation state: pixel count, channel sums and raw
// cross-product sums. Merging partials is associative, which is what makes
// the parallel accumulation deterministic.
struct Partial {
  std::uint64_t count = 0;
  std::array<double, 3> sum{};
  std::array<double, 9> sumsq{};
};

ImageBuffer ensure_decorrelated(ImageBuffer img) {
  if (img.colorspace == Colorspace::kDecorrelated) return img;
  if (img.colorspace == Colorspace::kGray) {
    // Promote to achromatic RGB first; chroma channels land at zero.
    ImageBuffer rgb = make_image(img.width, img.height, 3, Colorspace::kRgb);
    for (int c = 0; c < 3; ++c) {
      std::copy(img.plane(0).begin(), img.plane(0).end(),
                rgb.plane(c).begin());
    }
    return rgb_to_decorrelated(rgb);
  }
  return rgb_to_decorrelated(img);
}

Partial accumulate_image(const ImageBuffer& raw) {
  Partial p;
  if (raw.empty()) return p;
  const ImageBuffer img = ensure_decorrelated(raw);
  auto c0 = img.plane(0), c1 = img.plane(1), c2 = img.plane(2);
  for (std::size_t i = 0; i < c0.size(); ++i) {
    const double v[3] = {c0[i], c1[i], c2[i]};
    for (int a = 0; a < 3; ++a) {
      p.sum[a] += v[a];
      for (int b = 0; b < 3; ++b) {
        p.sumsq[a * 3 + b] += v[a] * v[b];
      }
    }
  }
  p.count = c0.size();
  return p;
}

// Neumaier-compensated running sum; keeps the merge independent of
// magnitude ordering effects to well below the 1e-9 contract.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// --- 3x3 symmetric eigendecomposition (cyclic Jacobi) ---

struct Eigen3 {
  std::array<double, 3> values{};
  std::array<double, 9> vectors{};  // column j = eigenvector j
};

Eigen3 jacobi_eigen(const std::array<double, 9>& m) {
  std::array<double, 9> a = m;
  std::array<double, 9> v = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::abs(a[1]) + std::abs(a[2]) + std::abs(a[5]);
    if (off < 1e-15) break;
    static constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pair : kPairs) {
      const int p = pair[0], q = pair[1];
      const double apq = a[p * 3 + q];
      if (apq == 0.0) continue;
      const double app = a[p * 3 + p], aqq = a[q * 3 + q];
      const double theta = (aqq - app) / (2.0 * apq);
      const double t = (theta >= 0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;
      for (int k = 0; k < 3; ++k) {
        const double akp = a[k * 3 + p], akq = a[k * 3 + q];
        a[k * 3 + p] = c * akp - s * akq;
        a[k * 3 + q] = s * akp + c * akq;
      }
      for (int k = 0; k < 3; ++k) {
        const double apk = a[p * 3 + k], aqk = a[q * 3 + k];
        a[p * 3 + k] = c * apk - s * aqk;
        a[q * 3 + k] = s * apk + c * aqk;
      }
      for (int k = 0; k < 3; ++k) {
        const double vkp = v[k * 3 + p], vkq = v[k * 3 + q];
        v[k * 3 + p] = c * vkp - s * vkq;
        v[k * 3 + q] = s * vkp + c * vkq;
      }
    }
  }
  Eigen3 e;
  e.values = {a[0], a[4], a[8]};
  e.vectors = v;
  return e;
}

// Principal square root of a symmetric PSD matrix, with eigenvalues
// floored at zero to absorb -1e-9-scale rounding.
std::array<double, 9> sqrt_psd(const std::array<double, 9>& m,
                               const char* label) {
  const Eigen3 e = jacobi_eigen(m);
  for (double lambda : e.values) {
    if (lambda < -1e-9) {
      fail(Errc::kNonPsd, std::string(label) +
                              " covariance has eigenvalue " +
                              std::to_string(lambda));
    }
  }
  std::array<double, 9> out{};
  for (int j = 0; j < 3; ++j) {
    const double root = std::sqrt(std::max(e.values[j], 0.0));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out[r * 3 + c] += root * e.vectors[r * 3 + j] * e.vectors[c * 3 + j];
      }
    }
  }
  return out;
}

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

void require_symmetric(const std::array<double, 9>& m, const char* label) {
  for (int r = 0; r < 3; ++r) {
    for (int c = r + 1; c < 3; ++c) {
      if (std::abs(m[r * 3 + c] - m[c * 3 + r]) > 1e-9) {
        fail(Errc::kNonPsd,
             std::string(label) + " covariance is not symmetric");
      }
    }
  }
}

// Luminance plane for gradient analysis; accepts RGB or GRAY.
ImageBuffer luminance(const ImageBuffer& img) { return to_grayscale(img); }

std::vector<double> gradient_magnitude(const ImageBuffer& lum) {
  const int w = lum.width, h = lum.height;
  std::vector<double> grad;
  if (w < 3 || h < 3) return grad;
  grad.reserve(static_cast<std::size_t>(w - 2) * (h - 2));
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double gx =
          (lum.at(0, y, x + 1) - lum.at(0, y, x - 1)) * 0.5;
      const double gy =
          (lum.at(0, y + 1, x) - lum.at(0, y - 1, x)) * 0.5;
      grad.push_back(std::sqrt(gx * gx + gy * gy));
    }
  }
  return grad;
}

}  // namespace

CorpusStats corpus_stats(
    std::size_t count,
    const std::function<ImageBuffer(std::size_t)>& loader, int workers) {
  if (count == 0) {
    fail(Errc::kEmptyCorpus, "corpus_stats over an empty corpus");
  }
  std::vector<Partial> partials(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    partials[i] = accumulate_image(loader(i));
  }

  // Merge strictly in image order: together with the per-image serial
  // accumulation this makes the result bit-identical for any worker count.
  std::uint64_t total = 0;
  std::array<CompensatedSum, 3> sum{};
  std::array<CompensatedSum, 9> sumsq{};
  for (const Partial& p : partials) {
    total += p.count;
    for (int a = 0; a < 3; ++a) sum[a].add(p.sum[a]);
    for (int i = 0; i < 9; ++i) sumsq[i].add(p.sumsq[i]);
  }
  if (total == 0) {
    fail(Errc::kEmptyCorpus, "corpus contains no pixels");
  }

  CorpusStats stats;
  stats.pixel_count = total;
  const double inv = 1.0 / static_cast<double>(total);
  for (int a = 0; a < 3; ++a) stats.mean[a] = sum[a].value() * inv;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      stats.covariance[a * 3 + b] =
          sumsq[a * 3 + b].value() * inv - stats.mean[a] * stats.mean[b];
    }
  }
  // E[xy] - E[x]E[y] computed independently per cell can leave the matrix
  // asymmetric in the last bit; average the halves.
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const double m =
          0.5 * (stats.covariance[a * 3 + b] + stats.covariance[b * 3 + a]);
      stats.covariance[a * 3 + b] = m;
      stats.covariance[b * 3 + a] = m;
    }
  }
  return stats;
}

double domain_gap(const CorpusStats& a, const CorpusStats& b) {
  require_symmetric(a.covariance, "first");
  require_symmetric(b.covariance, "second");

  double mean_term = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = a.mean[i] - b.mean[i];
    mean_term += d * d;
  }

  const std::array<double, 9> root_a = sqrt_psd(a.covariance, "first");
  // root_a * Cb * root_a is symmetric PSD by construction; symmetrize to
  // clean up rounding before the second root.
  std::array<double, 9> inner =
      matmul3(matmul3(root_a, b.covariance), root_a);
  for (int r = 0; r < 3; ++r) {
    for (int c = r + 1; c < 3; ++c) {
      const double m = 0.5 * (inner[r * 3 + c] + inner[c * 3 + r]);
      inner[r * 3 + c] = m;
      inner[c * 3 + r] = m;
    }
  }
  const std::array<double, 9> cross = sqrt_psd(inner, "cross");

  double trace_term = 0.0;
  for (int i = 0; i < 3; ++i) {
    trace_term += a.covariance[i * 3 + i] + b.covariance[i * 3 + i] -
                  2.0 * cross[i * 3 + i];
  }
  return std::max(0.0, mean_term + trace_term);
}

double structure_preservation(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width != b.width || a.height != b.height) {
    fail(Errc::kDimensionMismatch,
         "images differ in size: " + std::to_string(a.width) + "x" +
             std::to_string(a.height) + " vs " + std::to_string(b.width) +
             "x" + std::to_string(b.height));
  }
  const std::vector<double> ga = gradient_magnitude(luminance(a));
  const std::vector<double> gb = gradient_magnitude(luminance(b));
  if (ga.empty()) return 1.0;  // no interior: nothing to disagree on

  const double n = static_cast<double>(ga.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    mean_a += ga[i];
    mean_b += gb[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < ga.size(); ++i) {
    const double da = ga[i] - mean_a;
    const double db = gb[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    // Flat against flat is a perfect (if vacuous) match; flat against
    // structured is a total mismatch.
    return (var_a == 0.0 && var_b == 0.0) ? 1.0 : 0.0;
  }
  if (cov == var_a && cov == var_b) {
    // Cauchy-Schwarz equality: the fields agree up to a mean shift.
    return 1.0;
  }
  const double r = cov / (std::sqrt(var_a) * std::sqrt(var_b));
  return std::clamp(r, -1.0, 1.0);
}

MatchQualityReport match_quality_report(
    const std::vector<MatchRecord>& records,
    const std::vector<HashEntry>& source_hashes, const HashIndex& index) {
  std::unordered_map<std::string, PerceptualHash> sources;
  for (const auto& [id, hash] : source_hashes) sources.emplace(id, hash);

  std::map<std::string, ModeQuality> modes;
  std::vector<std::size_t> reuse(index.size(), 0);
  for (const MatchRecord& r : records) {
    const auto src = sources.find(r.source_id);
    if (src == sources.end()) {
      fail(Errc::kUnknownId, "source id '" + r.source_id +
                                 "' missing from the hash list");
    }
    const auto style_idx = index.find(r.style_id);
    if (!style_idx) {
      fail(Errc::kUnknownId,
           "style id '" + r.style_id + "' missing from the index");
    }
    // Stored distance when present; random selections are scored post-hoc.
    const int d = r.distance ? *r.distance
                             : hamming(src->second,
                                       index.hash_at(*style_idx));
    ModeQuality& q = modes[r.mode];
    q.mode = r.mode;
    ++q.count;
    ++q.histogram[static_cast<std::size_t>(std::clamp(d, 0, 64))];
    ++reuse[*style_idx];
  }

  MatchQualityReport report;
  for (auto& [name, q] : modes) {
    std::uint64_t cum = 0;
    double sum = 0.0;
    q.p50 = q.p90 = 64;
    bool p50_set = false, p90_set = false;
    for (int d = 0; d <= 64; ++d) {
      cum += q.histogram[d];
      sum += static_cast<double>(q.histogram[d]) * d;
      if (!p50_set && cum * 2 >= q.count) {
        q.p50 = d;
        p50_set = true;
      }
      if (!p90_set && cum * 10 >= q.count * 9) {
        q.p90 = d;
        p90_set = true;
      }
    }
    q.mean = sum / static_cast<double>(q.count);
    report.modes.push_back(q);
  }
  for (std::size_t i = 0; i < reuse.size(); ++i) {
    if (reuse[i] >= 2) {
      report.style_reuse.emplace_back(index.id_at(i), reuse[i]);
    }
  }
  return report;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  }
  out << "metric,subset_a,subset_b,value\n";
  char buf[64];
  for (const MetricRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%.9g", r.value);
    out << r.metric << ',' << r.subset_a << ',' << r.subset_b << ',' << buf
        << '\n';
  }
  out.flush();
  if (!out) {
    fail(Errc::kIoError, "write error on " + path.string());
  }
}

}  // namespace restyler
