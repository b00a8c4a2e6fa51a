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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "restyler/error.hpp"

namespace restyler {

enum class Colorspace {
  kRgb,           // 3 channels, values in [0,1]
  kGray,          // 1 channel, values in [0,1]
  kDecorrelated,  // 3 channels, log-opponent space, unbounded but finite
};

const char* colorspace_name(Colorspace cs);

/// Decoded raster. Planar layout: data[c * width*height + y * width + x].
/// RGB/GRAY intensities are normalized to [0,1]; quantization happens only
/// at encode time.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  Colorspace colorspace = Colorspace::kGray;
  std::vector<float> data;

  std::size_t plane_size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  float at(int c, int y, int x) const {
    return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }
  float& at(int c, int y, int x) {
    return data[c * plane_size() + static_cast<std::size_t>(y) * width + x];
  }
  std::span<const float> plane(int c) const {
    return {data.data() + c * plane_size(), plane_size()};
  }
  std::span<float> plane(int c) {
    return {data.data() + c * plane_size(), plane_size()};
  }
  bool empty() const { return data.empty(); }
};

ImageBuffer make_image(int width, int height, int channels, Colorspace cs,
                       float fill = 0.0f);

/// Per-channel first and second moments; one entry per channel.
struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population stddev, >= 0
};

ChannelStats channel_stats(const ImageBuffer& img);

/// BT.601 luma for RGB input; GRAY input is returned unchanged.
ImageBuffer to_grayscale(const ImageBuffer& img);

/// Bilinear resample (half-pixel centers) to width x height.
/// Throws Error(kZeroDimension) when either target extent is < 1.
ImageBuffer resize(const ImageBuffer& img, int width, int height);

/// Log-domain cone-response transform followed by a fixed orthonormal
/// opponent rotation. Channel 0 is achromatic; achromatic RGB inputs map to
/// zero on channels 1 and 2. The inverse clamps to [0,1] on re-encode and
/// round-trips within 1e-4 per pixel.
ImageBuffer rgb_to_decorrelated(const ImageBuffer& img);
ImageBuffer decorrelated_to_rgb(const ImageBuffer& img);

// --- codec (PNG and JPEG, 8-bit) ---

/// Sniffs the container from magic bytes. Throws Error(kUnsupportedFormat)
/// for unknown containers and Error(kCorruptData) for undecodable streams.
ImageBuffer decode(std::span<const std::uint8_t> bytes);
ImageBuffer decode_file(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img,
                                      int quality = 95);

void write_image_file(const std::filesystem::path& path,
                      const ImageBuffer& img, int jpeg_quality = 95);

}  // namespace restyler
