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

#include "restyler/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace restyler {
namespace {

// Cone-response mixing matrix. Each row is normalized to sum to exactly 1,
// so any achromatic input (r = g = b) maps to L = M = S and the opponent
// chroma channels are exactly zero rather than merely small.
constexpr std::array<std::array<double, 3>, 3> rgb_to_lms_raw() {
  std::array<std::array<double, 3>, 3> m = {{
      {0.3811, 0.5783, 0.0402},
      {0.1967, 0.7244, 0.0782},
      {0.0241, 0.1288, 0.8444},
  }};
  for (auto& row : m) {
    double sum = row[0] + row[1] + row[2];
    for (double& v : row) v /= sum;
  }
  return m;
}

constexpr std::array<std::array<double, 3>, 3> kRgbToLms = rgb_to_lms_raw();

constexpr std::array<std::array<double, 3>, 3> invert3(
    const std::array<std::array<double, 3>, 3>& m) {
  const double det =
      m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  std::array<std::array<double, 3>, 3> inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

constexpr std::array<std::array<double, 3>, 3> kLmsToRgb = invert3(kRgbToLms);

// Floor applied to cone responses before the log, so black pixels stay
// finite. log10(1e-6) = -6 is the darkest representable value.
constexpr double kLmsFloor = 1e-6;

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

const char* colorspace_name(Colorspace cs) {
  switch (cs) {
    case Colorspace::kRgb:
      return "rgb";
    case Colorspace::kGray:
      return "gray";
    case Colorspace::kDecorrelated:
      return "decorrelated";
  }
  return "?";
}

ImageBuffer make_image(int width, int height, int channels, Colorspace cs,
                       float fill) {
  if (width < 1 || height < 1) {
    fail(Errc::kZeroDimension,
         "image dimensions must be positive, got " + std::to_string(width) +
             "x" + std::to_string(height));
  }
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.colorspace = cs;
  img.data.assign(static_cast<std::size_t>(channels) * width * height, fill);
  return img;
}

ChannelStats channel_stats(const ImageBuffer& img) {
  ChannelStats stats;
  stats.mean.resize(img.channels);
  stats.stddev.resize(img.channels);
  const std::size_t n = img.plane_size();
  for (int c = 0; c < img.channels; ++c) {
    auto plane = img.plane(c);
    double sum = 0.0;
    for (float v : plane) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (float v : plane) {
      const double d = v - mean;
      ss += d * d;
    }
    stats.mean[c] = mean;
    stats.stddev[c] = std::sqrt(ss / static_cast<double>(n));
  }
  return stats;
}

ImageBuffer to_grayscale(const ImageBuffer& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3 || img.colorspace != Colorspace::kRgb) {
    fail(Errc::kWrongColorspace,
         std::string("to_grayscale needs RGB or GRAY input, got ") +
             colorspace_name(img.colorspace) + " with " +
             std::to_string(img.channels) + " channels");
  }
  ImageBuffer out = make_image(img.width, img.height, 1, Colorspace::kGray);
  auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] =
        static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  }
  return out;
}

ImageBuffer resize(const ImageBuffer& img, int width, int height) {
  if (width < 1 || height < 1) {
    fail(Errc::kZeroDimension,
         "resize target must be positive, got " + std::to_string(width) +
             "x" + std::to_string(height));
  }
  ImageBuffer out =
      make_image(width, height, img.channels, img.colorspace);
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < height; ++y) {
      // Half-pixel centers: destination center maps onto source center, so
      // resizing to the original size is the identity.
      const double fy = (y + 0.5) * sy - 0.5;
      const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0,
                                img.height - 1);
      const int y1 = std::min(y0 + 1, img.height - 1);
      const double wy = std::clamp(fy - y0, 0.0, 1.0);
      for (int x = 0; x < width; ++x) {
        const double fx = (x + 0.5) * sx - 0.5;
        const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0,
                                  img.width - 1);
        const int x1 = std::min(x0 + 1, img.width - 1);
        const double wx = std::clamp(fx - x0, 0.0, 1.0);
        // a + (b - a) * w rather than the four-weight form: equal
        // neighbours interpolate to exactly their value, so flat regions
        // stay bit-for-bit flat.
        const double v00 = img.at(c, y0, x0);
        const double v01 = img.at(c, y0, x1);
        const double v10 = img.at(c, y1, x0);
        const double v11 = img.at(c, y1, x1);
        const double top = v00 + (v01 - v00) * wx;
        const double bot = v10 + (v11 - v10) * wx;
        out.at(c, y, x) = static_cast<float>(top + (bot - top) * wy);
      }
    }
  }
  return out;
}

ImageBuffer rgb_to_decorrelated(const ImageBuffer& img) {
  if (img.colorspace != Colorspace::kRgb || img.channels != 3) {
    fail(Errc::kWrongColorspace,
         std::string("rgb_to_decorrelated needs RGB input, got ") +
             colorspace_name(img.colorspace));
  }
  ImageBuffer out =
      make_image(img.width, img.height, 3, Colorspace::kDecorrelated);
  auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto l0 = out.plane(0), a1 = out.plane(1), b2 = out.plane(2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    double lms[3];
    for (int k = 0; k < 3; ++k) {
      const double v = kRgbToLms[k][0] * r[i] + kRgbToLms[k][1] * g[i] +
                       kRgbToLms[k][2] * b[i];
      lms[k] = std::log10(std::max(v, kLmsFloor));
    }
    l0[i] = static_cast<float>(kInvSqrt3 * (lms[0] + lms[1] + lms[2]));
    a1[i] = static_cast<float>(kInvSqrt6 * (lms[0] + lms[1] - 2.0 * lms[2]));
    b2[i] = static_cast<float>(kInvSqrt2 * (lms[0] - lms[1]));
  }
  return out;
}

ImageBuffer decorrelated_to_rgb(const ImageBuffer& img) {
  if (img.colorspace != Colorspace::kDecorrelated || img.channels != 3) {
    fail(Errc::kWrongColorspace,
         std::string("decorrelated_to_rgb needs decorrelated input, got ") +
             colorspace_name(img.colorspace));
  }
  ImageBuffer out = make_image(img.width, img.height, 3, Colorspace::kRgb);
  auto l0 = img.plane(0), a1 = img.plane(1), b2 = img.plane(2);
  auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
  for (std::size_t i = 0; i < l0.size(); ++i) {
    // The opponent rotation is orthonormal, so its inverse is its
    // transpose.
    const double logl =
        kInvSqrt3 * l0[i] + kInvSqrt6 * a1[i] + kInvSqrt2 * b2[i];
    const double logm =
        kInvSqrt3 * l0[i] + kInvSqrt6 * a1[i] - kInvSqrt2 * b2[i];
    const double logs = kInvSqrt3 * l0[i] - 2.0 * kInvSqrt6 * a1[i];
    const double lms[3] = {std::pow(10.0, logl), std::pow(10.0, logm),
                           std::pow(10.0, logs)};
    for (int k = 0; k < 3; ++k) {
      const double v = kLmsToRgb[k][0] * lms[0] + kLmsToRgb[k][1] * lms[1] +
                       kLmsToRgb[k][2] * lms[2];
      (k == 0 ? r : k == 1 ? g : b)[i] =
          static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace restyler
