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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "oracles.hpp"
#include "restyler/digest.hpp"
#include "restyler/error.hpp"
#include "restyler/image.hpp"
#include "restyler/metrics.hpp"
#include "testutil.hpp"

using namespace restyler;

namespace {

CorpusStats stats_of(const std::vector<ImageBuffer>& images, int workers = 1) {
  return corpus_stats(
      images.size(), [&](std::size_t i) { return images[i]; }, workers);
}

/// Diagonal-covariance Gaussian summary for closed-form gap checks.
CorpusStats gaussian(std::array<double, 3> mean, std::array<double, 3> diag) {
  CorpusStats s;
  s.mean = mean;
  s.covariance = {diag[0], 0, 0, 0, diag[1], 0, 0, 0, diag[2]};
  s.pixel_count = 1;
  return s;
}

/// Symmetric PSD matrix m = b * b^T from a pseudo-random 3x3 b.
std::array<double, 9> random_psd(std::uint64_t seed) {
  std::array<double, 9> b{};
  for (int i = 0; i < 9; ++i) {
    b[i] = testutil::uniform(seed, i, -1.0, 1.0);
  }
  std::array<double, 9> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) m[i * 3 + j] += b[i * 3 + k] * b[j * 3 + k];
    }
  }
  return m;
}

}  // namespace

TEST_CASE("corpus stats of one constant image have zero covariance") {
  const std::vector<ImageBuffer> corpus = {
      make_image(8, 4, 3, Colorspace::kRgb, 0.5f)};
  const CorpusStats stats = stats_of(corpus);
  CHECK(stats.pixel_count == 32);
  for (double v : stats.covariance) CHECK(std::abs(v) <= 1e-12);
  // Achromatic input: both chroma means vanish.
  CHECK(std::abs(stats.mean[1]) <= 1e-9);
  CHECK(std::abs(stats.mean[2]) <= 1e-9);
}

TEST_CASE("duplicating every image leaves corpus stats unchanged") {
  std::vector<ImageBuffer> corpus;
  for (int i = 0; i < 4; ++i) {
    corpus.push_back(testutil::synth_image(24, 24, 40 + i));
  }
  std::vector<ImageBuffer> doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  const CorpusStats once = stats_of(corpus);
  const CorpusStats twice = stats_of(doubled);
  CHECK(twice.pixel_count == 2 * once.pixel_count);
  for (int i = 0; i < 3; ++i) {
    CHECK(twice.mean[i] == doctest::Approx(once.mean[i]).epsilon(1e-12));
  }
  for (int i = 0; i < 9; ++i) {
    CHECK(twice.covariance[i] ==
          doctest::Approx(once.covariance[i]).epsilon(1e-9));
  }
}

TEST_CASE("corpus stats match a flat concatenation of all pixels") {
  std::vector<ImageBuffer> corpus;
  corpus.push_back(testutil::synth_image(16, 16, 50));
  corpus.push_back(testutil::synth_image(32, 8, 51, {0.2f, 0, -0.1f}));
  corpus.push_back(testutil::synth_image(8, 8, 52));
  const CorpusStats got = stats_of(corpus);
  const CorpusStats want = oracles::concat_corpus_stats(corpus);
  CHECK(got.pixel_count == want.pixel_count);
  for (int i = 0; i < 3; ++i) {
    CHECK(got.mean[i] == doctest::Approx(want.mean[i]).epsilon(1e-9));
  }
  for (int i = 0; i < 9; ++i) {
    CHECK(std::abs(got.covariance[i] - want.covariance[i]) <= 1e-9);
  }
}

TEST_CASE("corpus stats are bit-identical for any worker count") {
  std::vector<ImageBuffer> corpus;
  for (int i = 0; i < 9; ++i) {
    corpus.push_back(testutil::synth_image(17 + i, 13, 60 + i));
  }
  const CorpusStats one = stats_of(corpus, 1);
  for (int workers : {2, 4, 16}) {
    const CorpusStats many = stats_of(corpus, workers);
    for (int i = 0; i < 3; ++i) CHECK(many.mean[i] == one.mean[i]);
    for (int i = 0; i < 9; ++i) {
      CHECK(many.covariance[i] == one.covariance[i]);
    }
  }
}

TEST_CASE("grayscale images enter corpus stats as achromatic pixels") {
  const ImageBuffer gray = testutil::noise_image(12, 12, 1, 70);
  const CorpusStats stats = stats_of({gray});
  CHECK(stats.pixel_count == 144);
  CHECK(std::abs(stats.mean[1]) <= 1e-9);  // no chroma anywhere
  CHECK(std::abs(stats.mean[2]) <= 1e-9);
}

TEST_CASE("an empty corpus is an error") {
  try {
    corpus_stats(0, [](std::size_t) { return ImageBuffer{}; }, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kEmptyCorpus);
  }
}

TEST_CASE("the gap between a corpus and itself is zero") {
  std::vector<ImageBuffer> corpus;
  for (int i = 0; i < 3; ++i) {
    corpus.push_back(testutil::synth_image(20, 20, 80 + i));
  }
  const CorpusStats stats = stats_of(corpus);
  CHECK(domain_gap(stats, stats) <= 1e-9);
}

TEST_CASE("the gap between isotropic Gaussians has a closed form") {
  // Equal means, covariances I and 4I: tr(I + 4I - 2*sqrt(4I)) = 9 - 6 = 3.
  const CorpusStats a = gaussian({0, 0, 0}, {1, 1, 1});
  const CorpusStats b = gaussian({0, 0, 0}, {4, 4, 4});
  CHECK(domain_gap(a, b) == doctest::Approx(3.0).epsilon(1e-9));
  // Equal covariances: only the squared mean distance remains.
  const CorpusStats c = gaussian({1, 2, 3}, {1, 1, 1});
  const CorpusStats d = gaussian({1, 2, 5}, {1, 1, 1});
  CHECK(domain_gap(c, d) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(domain_gap(a, b) == domain_gap(b, a));
}

TEST_CASE("the gap's trace term matches an independent matrix square root") {
  for (int trial = 0; trial < 25; ++trial) {
    CorpusStats a, b;
    a.covariance = random_psd(2 * trial);
    b.covariance = random_psd(2 * trial + 1);
    a.pixel_count = b.pixel_count = 1;
    for (int i = 0; i < 3; ++i) {
      a.mean[i] = testutil::uniform(trial, 100 + i, -1.0, 1.0);
      b.mean[i] = testutil::uniform(trial, 200 + i, -1.0, 1.0);
    }
    double want = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double d = a.mean[i] - b.mean[i];
      want += d * d;
      want += a.covariance[i * 3 + i] + b.covariance[i * 3 + i];
    }
    want -= 2.0 * oracles::sqrt_product_trace(a.covariance, b.covariance);
    CHECK(domain_gap(a, b) == doctest::Approx(std::max(0.0, want)).epsilon(1e-6));
  }
}

TEST_CASE("the gap rejects asymmetric covariance input") {
  CorpusStats a = gaussian({0, 0, 0}, {1, 1, 1});
  CorpusStats b = a;
  b.covariance[1] = 0.5;  // (0,1) without its mirror
  try {
    domain_gap(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNonPsd);
  }
}

TEST_CASE("the gap rejects clearly indefinite covariance input") {
  CorpusStats a = gaussian({0, 0, 0}, {1, 1, 1});
  CorpusStats bad = gaussian({0, 0, 0}, {-1, 1, 1});
  try {
    domain_gap(a, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNonPsd);
  }
}

TEST_CASE("structure preservation of an image with itself is exactly one") {
  const ImageBuffer img = testutil::synth_image(33, 21, 90);
  CHECK(structure_preservation(img, img) == 1.0);
}

TEST_CASE("value inversion keeps every edge in place") {
  const ImageBuffer img = testutil::synth_image(32, 32, 91);
  ImageBuffer neg = img;
  for (float& v : neg.data) v = 1.0f - v;
  CHECK(structure_preservation(img, neg) ==
        doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("independent noise fields are structurally unrelated") {
  double total = 0.0;
  const int kTrials = 10;
  for (int i = 0; i < kTrials; ++i) {
    const ImageBuffer a = testutil::noise_image(48, 48, 3, 500 + 2 * i);
    const ImageBuffer b = testutil::noise_image(48, 48, 3, 501 + 2 * i);
    total += std::abs(structure_preservation(a, b));
  }
  CHECK(total / kTrials < 0.2);
}

TEST_CASE("a flat image shares no structure with a textured one") {
  const ImageBuffer flat = make_image(16, 16, 3, Colorspace::kRgb, 0.5f);
  const ImageBuffer tex = testutil::synth_image(16, 16, 92);
  CHECK(structure_preservation(flat, tex) == 0.0);
  CHECK(structure_preservation(tex, flat) == 0.0);
  CHECK(structure_preservation(flat, flat) == 1.0);
}

TEST_CASE("images too small for gradients are trivially preserved") {
  const ImageBuffer a = testutil::noise_image(2, 9, 3, 93);
  const ImageBuffer b = testutil::noise_image(2, 9, 3, 94);
  CHECK(structure_preservation(a, b) == 1.0);
}

TEST_CASE("structure preservation needs equal dimensions") {
  const ImageBuffer a = make_image(8, 8, 3, Colorspace::kRgb);
  const ImageBuffer b = make_image(8, 9, 3, Colorspace::kRgb);
  try {
    structure_preservation(a, b);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDimensionMismatch);
  }
}

TEST_CASE("match quality summarises stored and post-hoc distances") {
  // Index of four styles at known distances from one query hash.
  HashIndex index;
  index.insert("s0", PerceptualHash{0x0});
  index.insert("s1", PerceptualHash{0x1});
  index.insert("s2", PerceptualHash{0x3});
  index.insert("s3", PerceptualHash{0x7});
  std::vector<HashEntry> sources = {{"q", PerceptualHash{0x0}}};

  std::vector<MatchRecord> records = {
      {"q", 0, "s0", 0, "ph"},
      {"q", 1, "s1", 1, "ph"},
      {"q", 2, "s2", 2, "ph"},
      {"q", 0, "s3", std::nullopt, "rs"},  // post-hoc: hamming = 3
      {"q", 1, "s0", std::nullopt, "rs"},  // post-hoc: hamming = 0
  };
  const MatchQualityReport report =
      match_quality_report(records, sources, index);
  REQUIRE(report.modes.size() == 2);
  CHECK(report.modes[0].mode == "ph");
  CHECK(report.modes[0].count == 3);
  CHECK(report.modes[0].mean == doctest::Approx(1.0));
  CHECK(report.modes[0].histogram[0] == 1);
  CHECK(report.modes[0].histogram[1] == 1);
  CHECK(report.modes[0].histogram[2] == 1);
  CHECK(report.modes[0].p50 == 1);
  CHECK(report.modes[0].p90 == 2);
  CHECK(report.modes[1].mode == "rs");
  CHECK(report.modes[1].count == 2);
  CHECK(report.modes[1].mean == doctest::Approx(1.5));
  CHECK(report.modes[1].histogram[3] == 1);

  // s0 was matched twice; reuse lists it (and nothing matched once).
  REQUIRE(report.style_reuse.size() == 1);
  CHECK(report.style_reuse[0].first == "s0");
  CHECK(report.style_reuse[0].second == 2);
}

TEST_CASE("an all-duplicates pool collapses every distance to zero") {
  HashIndex index;
  std::vector<HashEntry> sources;
  const PerceptualHash same{mix64(7)};
  for (int i = 0; i < 5; ++i) index.insert("s" + std::to_string(i), same);
  sources.emplace_back("q", same);
  std::vector<MatchRecord> records;
  for (int r = 0; r < 5; ++r) {
    records.push_back({"q", r, "s" + std::to_string(r), std::nullopt, "rs"});
  }
  const auto report = match_quality_report(records, sources, index);
  REQUIRE(report.modes.size() == 1);
  CHECK(report.modes[0].mean == 0.0);
  CHECK(report.modes[0].p50 == 0);
  CHECK(report.modes[0].p90 == 0);
  CHECK(report.modes[0].histogram[0] == 5);
}

TEST_CASE("percentiles follow the smallest-covering-bin rule") {
  HashIndex index;
  index.insert("s", PerceptualHash{0});
  std::vector<HashEntry> sources = {{"q", PerceptualHash{0}}};
  // Ten stored distances 1..10: p50 is the 5th smallest, p90 the 9th.
  std::vector<MatchRecord> records;
  for (int d = 1; d <= 10; ++d) {
    records.push_back({"q", d - 1, "s", d, "ph"});
  }
  const auto report = match_quality_report(records, sources, index);
  CHECK(report.modes[0].p50 == 5);
  CHECK(report.modes[0].p90 == 9);
}

TEST_CASE("match quality rejects ids missing from its inputs") {
  HashIndex index;
  index.insert("s", PerceptualHash{0});
  std::vector<HashEntry> sources = {{"q", PerceptualHash{0}}};
  std::vector<MatchRecord> unknown_style = {
      {"q", 0, "ghost", std::nullopt, "rs"}};
  try {
    match_quality_report(unknown_style, sources, index);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnknownId);
  }
  std::vector<MatchRecord> unknown_source = {
      {"ghost", 0, "s", std::nullopt, "rs"}};
  try {
    match_quality_report(unknown_source, sources, index);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnknownId);
  }
}

TEST_CASE("metrics CSV rows carry a header and 9-significant-digit values") {
  const testutil::TempDir tmp;
  const auto path = tmp.path() / "metrics.csv";
  write_metrics_csv(path, {
                              {"domain_gap", "source", "style", 12.25},
                              {"styles_reused", "style", "", 3.0},
                          });
  const std::string text = testutil::slurp(path);
  CHECK(text.find("metric,subset_a,subset_b,value") == 0);
  CHECK(text.find("domain_gap,source,style,12.25") != std::string::npos);
  CHECK(text.find("styles_reused,style,,3") != std::string::npos);
}
