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

#include <string>
#include <string_view>

#include "restyler/image.hpp"

namespace restyler {

/// Photometric restyling backend.
///  kStats — per-channel affine moment transfer in the decorrelated space.
///  kHist  — per-RGB-channel histogram matching (256-bin CDF map).
///  kFreq  — moment transfer plus re-imposition of the content's
///           high-frequency achromatic detail.
enum class RestyleBackend { kStats, kHist, kFreq };

const char* backend_name(RestyleBackend b);
RestyleBackend backend_from_name(std::string_view name);  // kParseError

struct RestyleConfig {
  RestyleBackend backend = RestyleBackend::kStats;
  /// Re-impose content high-frequency detail for kStats/kHist outputs too
  /// (kFreq always does).
  bool detail_preserve = false;
  /// Box-blur radius of the kFreq low/high frequency split; >= 1.
  int lowpass_radius = 8;
  /// Per-channel scale sigma_style/sigma_content is clamped to
  /// [1/gain_limit, gain_limit] so near-flat content cannot explode noise.
  /// While the clamp is inactive, transferred moments match the style's.
  double gain_limit = 10.0;
};

/// Affine per-channel moment transfer in the decorrelated space:
/// (c - mu_c) * sigma_s/sigma_c + mu_s, back to RGB with clamping.
/// A zero-variance content channel becomes the constant mu_s.
ImageBuffer color_stats_transfer(const ImageBuffer& content,
                                 const ImageBuffer& style,
                                 double gain_limit = 10.0);

/// Monotone per-RGB-channel CDF mapping of content values onto the style's
/// empirical 256-bin distribution. Output values are style bin centers, so
/// they are already inside [0,1].
ImageBuffer histogram_match(const ImageBuffer& content,
                            const ImageBuffer& style);

/// color_stats_transfer, then re-impose the content's high-frequency
/// luminance detail: low frequencies carry the adopted style, high
/// frequencies carry the content's structure. The channels are re-fitted
/// to the style moments afterwards, so the moment guarantee of the stats
/// transfer still holds.
ImageBuffer frequency_blend(const ImageBuffer& content,
                            const ImageBuffer& style,
                            const RestyleConfig& config);

/// Backend dispatch. All inputs 3-channel RGB in [0,1]; output RGB clamped
/// to [0,1] with the content's geometry; the style image may be any size.
/// Throws kWrongColorspace on non-RGB inputs, kConfigError on bad config.
ImageBuffer restyle(const ImageBuffer& content, const ImageBuffer& style,
                    const RestyleConfig& config);

/// Pre-clamp decorrelated-space results for kStats/kFreq, the surface on
/// which moment guarantees are exact. (kHist works in RGB directly and has
/// no pre-clamp stage.)
ImageBuffer stats_transfer_decorrelated(const ImageBuffer& content,
                                        const ImageBuffer& style,
                                        double gain_limit = 10.0);
ImageBuffer frequency_blend_decorrelated(const ImageBuffer& content,
                                         const ImageBuffer& style,
                                         const RestyleConfig& config);

/// Separable box filter with a fixed (2*radius+1)^2 divisor and replicated
/// edges. radius 0 is the identity.
ImageBuffer box_blur(const ImageBuffer& img, int radius);

}  // namespace restyler
