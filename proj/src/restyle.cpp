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

#include "restyler/restyle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "restyler/error.hpp"

namespace restyler {
namespace {

void require_rgb(const ImageBuffer& img, const char* which) {
  if (img.colorspace != Colorspace::kRgb || img.channels != 3) {
    fail(Errc::kWrongColorspace,
         std::string(which) + " image must be RGB, got " +
             colorspace_name(img.colorspace) + " with " +
             std::to_string(img.channels) + " channels");
  }
}

void require_config(const RestyleConfig& cfg) {
  if (cfg.lowpass_radius < 1) {
    fail(Errc::kConfigError, "lowpass_radius must be >= 1, got " +
                                 std::to_string(cfg.lowpass_radius));
  }
  if (cfg.gain_limit < 1.0) {
    fail(Errc::kConfigError, "gain_limit must be >= 1, got " +
                                 std::to_string(cfg.gain_limit));
  }
}

// (v - mu_c) * gain + mu_s over one plane, with the zero-variance rule.
void affine_remap(std::span<float> plane, double mu_c, double sigma_c,
                  double mu_s, double sigma_s, double gain_limit) {
  if (sigma_c == 0.0) {
    std::fill(plane.begin(), plane.end(), static_cast<float>(mu_s));
    return;
  }
  const double gain =
      std::clamp(sigma_s / sigma_c, 1.0 / gain_limit, gain_limit);
  for (float& v : plane) {
    v = static_cast<float>((v - mu_c) * gain + mu_s);
  }
}

// 256-bin quantisation used by the histogram backend.
int bin_of(float v) {
  return static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace

const char* backend_name(RestyleBackend b) {
  switch (b) {
    case RestyleBackend::kStats:
      return "stats";
    case RestyleBackend::kHist:
      return "hist";
    case RestyleBackend::kFreq:
      return "freq";
  }
  return "?";
}

RestyleBackend backend_from_name(std::string_view name) {
  if (name == "stats") return RestyleBackend::kStats;
  if (name == "hist") return RestyleBackend::kHist;
  if (name == "freq") return RestyleBackend::kFreq;
  fail(Errc::kParseError, "unknown backend '" + std::string(name) +
                              "' (want stats, hist or freq)");
}

ImageBuffer box_blur(const ImageBuffer& img, int radius) {
  if (radius < 0) {
    fail(Errc::kBadArgument,
         "blur radius must be >= 0, got " + std::to_string(radius));
  }
  if (radius == 0) return img;
  const int w = img.width, h = img.height;
  const double inv = 1.0 / (2 * radius + 1);
  ImageBuffer tmp = img;
  ImageBuffer out = img;
  std::vector<double> prefix;
  for (int c = 0; c < img.channels; ++c) {
    // Horizontal pass. Windows are clamped to the row; out-of-range taps
    // replicate the edge sample, and the divisor stays 2r+1.
    for (int y = 0; y < h; ++y) {
      prefix.assign(static_cast<std::size_t>(w) + 1, 0.0);
      for (int x = 0; x < w; ++x) {
        prefix[x + 1] = prefix[x] + img.at(c, y, x);
      }
      for (int x = 0; x < w; ++x) {
        const int lo = std::max(0, x - radius);
        const int hi = std::min(w - 1, x + radius);
        double sum = prefix[hi + 1] - prefix[lo];
        sum += (radius - (x - lo)) * img.at(c, y, 0);
        sum += (radius - (hi - x)) * img.at(c, y, w - 1);
        tmp.at(c, y, x) = static_cast<float>(sum * inv);
      }
    }
    // Vertical pass over the horizontal result.
    for (int x = 0; x < w; ++x) {
      prefix.assign(static_cast<std::size_t>(h) + 1, 0.0);
      for (int y = 0; y < h; ++y) {
        prefix[y + 1] = prefix[y] + tmp.at(c, y, x);
      }
      for (int y = 0; y < h; ++y) {
        const int lo = std::max(0, y - radius);
        const int hi = std::min(h - 1, y + radius);
        double sum = prefix[hi + 1] - prefix[lo];
        sum += (radius - (y - lo)) * tmp.at(c, 0, x);
        sum += (radius - (hi - y)) * tmp.at(c, h - 1, x);
        out.at(c, y, x) = static_cast<float>(sum * inv);
      }
    }
  }
  return out;
}

ImageBuffer stats_transfer_decorrelated(const ImageBuffer& content,
                                        const ImageBuffer& style,
                                        double gain_limit) {
  require_rgb(content, "content");
  require_rgb(style, "style");
  ImageBuffer out = rgb_to_decorrelated(content);
  const ImageBuffer style_dec = rgb_to_decorrelated(style);
  const ChannelStats cs = channel_stats(out);
  const ChannelStats ss = channel_stats(style_dec);
  for (int c = 0; c < 3; ++c) {
    affine_remap(out.plane(c), cs.mean[c], cs.stddev[c], ss.mean[c],
                 ss.stddev[c], gain_limit);
  }
  return out;
}

ImageBuffer color_stats_transfer(const ImageBuffer& content,
                                 const ImageBuffer& style,
                                 double gain_limit) {
  return decorrelated_to_rgb(
      stats_transfer_decorrelated(content, style, gain_limit));
}

ImageBuffer histogram_match(const ImageBuffer& content,
                            const ImageBuffer& style) {
  require_rgb(content, "content");
  require_rgb(style, "style");
  ImageBuffer out = content;
  const std::uint64_t nc = content.plane_size();
  const std::uint64_t ns = style.plane_size();
  for (int c = 0; c < 3; ++c) {
    std::array<std::uint64_t, 256> cdf_c{}, cdf_s{};
    for (float v : content.plane(c)) ++cdf_c[bin_of(v)];
    for (float v : style.plane(c)) ++cdf_s[bin_of(v)];
    for (int b = 1; b < 256; ++b) {
      cdf_c[b] += cdf_c[b - 1];
      cdf_s[b] += cdf_s[b - 1];
    }
    // map[b] = smallest style bin whose CDF reaches the midpoint of the
    // content bin's mass. Targeting the midpoint instead of the bin's right
    // edge avoids a systematic rightward drift of up to one bin. The factor
    // of two and the cross-multiplied pixel counts keep the comparison of
    // normalized CDFs exact in integers; both sides are monotone in b, so
    // one sweep suffices.
    std::array<float, 256> map{};
    int j = 0;
    for (int b = 0; b < 256; ++b) {
      const std::uint64_t mid2 = cdf_c[b] + (b > 0 ? cdf_c[b - 1] : 0);
      while (j < 255 && 2 * cdf_s[j] * nc < mid2 * ns) ++j;
      map[b] = j / 255.0f;
    }
    for (float& v : out.plane(c)) v = map[bin_of(v)];
  }
  return out;
}

ImageBuffer frequency_blend_decorrelated(const ImageBuffer& content,
                                         const ImageBuffer& style,
                                         const RestyleConfig& config) {
  require_config(config);
  ImageBuffer out = color_stats_transfer(content, style, config.gain_limit);

  // Luminance split in linear space: the low frequencies carry the adopted
  // style, the high frequencies carry the content's structure. Adding the
  // same delta to all three channels shifts luminance by exactly that delta
  // (the weights sum to one) and leaves the transfer's chroma untouched.
  const ImageBuffer luma_out = to_grayscale(out);
  const ImageBuffer luma_content = to_grayscale(content);
  const ImageBuffer low_out = box_blur(luma_out, config.lowpass_radius);
  const ImageBuffer low_content =
      box_blur(luma_content, config.lowpass_radius);
  auto yo = luma_out.plane(0);
  auto yc = luma_content.plane(0);
  auto lo = low_out.plane(0);
  auto lc = low_content.plane(0);
  for (int c = 0; c < 3; ++c) {
    auto plane = out.plane(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      plane[i] += static_cast<float>((lo[i] - yo[i]) + (yc[i] - lc[i]));
    }
  }

  // The detail re-imposition shifts the channel moments; fit them back to
  // the style so the transfer's moment guarantee survives.
  ImageBuffer dec = rgb_to_decorrelated(out);
  const ImageBuffer style_dec = rgb_to_decorrelated(style);
  const ChannelStats ds = channel_stats(dec);
  const ChannelStats ss = channel_stats(style_dec);
  for (int c = 0; c < 3; ++c) {
    affine_remap(dec.plane(c), ds.mean[c], ds.stddev[c], ss.mean[c],
                 ss.stddev[c], config.gain_limit);
  }
  return dec;
}

ImageBuffer frequency_blend(const ImageBuffer& content,
                            const ImageBuffer& style,
                            const RestyleConfig& config) {
  return decorrelated_to_rgb(
      frequency_blend_decorrelated(content, style, config));
}

ImageBuffer restyle(const ImageBuffer& content, const ImageBuffer& style,
                    const RestyleConfig& config) {
  require_config(config);
  switch (config.backend) {
    case RestyleBackend::kStats:
      if (config.detail_preserve) {
        return frequency_blend(content, style, config);
      }
      return color_stats_transfer(content, style, config.gain_limit);
    case RestyleBackend::kHist: {
      ImageBuffer matched = histogram_match(content, style);
      if (!config.detail_preserve) return matched;
      // Re-impose the content's high-frequency luminance detail, as kFreq
      // does, but keep the matched histogram's chroma untouched.
      const ImageBuffer luma_matched = to_grayscale(matched);
      const ImageBuffer luma_content = to_grayscale(content);
      const ImageBuffer low_matched =
          box_blur(luma_matched, config.lowpass_radius);
      const ImageBuffer low_content =
          box_blur(luma_content, config.lowpass_radius);
      auto ym = luma_matched.plane(0);
      auto yc = luma_content.plane(0);
      auto lm = low_matched.plane(0);
      auto lc = low_content.plane(0);
      for (int c = 0; c < 3; ++c) {
        auto plane = matched.plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i) {
          const double v =
              plane[i] + ((lm[i] - ym[i]) + (yc[i] - lc[i]));
          plane[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
      return matched;
    }
    case RestyleBackend::kFreq:
      return frequency_blend(content, style, config);
  }
  fail(Errc::kConfigError, "unknown backend");
}

}  // namespace restyler
