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

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "restyler/image.hpp"

namespace restyler {
namespace {

constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n',
                                     0x1a, '\n'};

bool looks_like_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0;
}

bool looks_like_jpeg(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 &&
         bytes[2] == 0xff;
}

// Packed 8-bit rows (as codecs produce) -> planar float buffer.
ImageBuffer from_packed(const std::vector<std::uint8_t>& packed, int width,
                        int height, int channels) {
  ImageBuffer img = make_image(
      width, height, channels,
      channels == 1 ? Colorspace::kGray : Colorspace::kRgb);
  const std::size_t n = img.plane_size();
  for (int c = 0; c < channels; ++c) {
    auto plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = packed[i * channels + c] / 255.0f;
    }
  }
  return img;
}

std::vector<std::uint8_t> to_packed(const ImageBuffer& img) {
  if (img.width < 1 || img.height < 1) {
    fail(Errc::kZeroDimension, "cannot encode an empty image");
  }
  const bool gray =
      img.channels == 1 && img.colorspace == Colorspace::kGray;
  const bool rgb = img.channels == 3 && img.colorspace == Colorspace::kRgb;
  if (!gray && !rgb) {
    fail(Errc::kWrongColorspace,
         std::string("can only encode RGB or GRAY buffers, got ") +
             colorspace_name(img.colorspace) + " with " +
             std::to_string(img.channels) + " channels");
  }
  const std::size_t n = img.plane_size();
  std::vector<std::uint8_t> packed(n * img.channels);
  for (int c = 0; c < img.channels; ++c) {
    auto plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      const long q = std::lround(std::clamp(plane[i], 0.0f, 1.0f) * 255.0f);
      packed[i * img.channels + c] = static_cast<std::uint8_t>(q);
    }
  }
  return packed;
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(),
                                        bytes.size())) {
    fail(Errc::kCorruptData, std::string("png: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> packed(PNG_IMAGE_SIZE(image));
  // Composite any alpha onto white; we do not carry transparency.
  const png_color background = {255, 255, 255};
  if (!png_image_finish_read(&image, &background, packed.data(), 0,
                             nullptr)) {
    png_image_free(&image);
    fail(Errc::kCorruptData, std::string("png: ") + image.message);
  }
  return from_packed(packed, static_cast<int>(image.width),
                     static_cast<int>(image.height), color ? 3 : 1);
}

std::vector<std::uint8_t> encode_png_impl(const ImageBuffer& img) {
  const std::vector<std::uint8_t> packed = to_packed(img);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, packed.data(),
                                 0, nullptr)) {
    fail(Errc::kIoError, std::string("png encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0,
                                 packed.data(), 0, nullptr)) {
    fail(Errc::kIoError, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

// libjpeg reports errors through a callback that must not return; route it
// back to the call site with longjmp and rethrow as an Error there.
struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf escape;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->escape, 1);
}

ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.escape)) {
    jpeg_destroy_decompress(&cinfo);
    fail(Errc::kCorruptData, std::string("jpeg: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), bytes.size());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space =
      cinfo.jpeg_color_space == JCS_GRAYSCALE ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  const int channels = cinfo.output_components;
  std::vector<std::uint8_t> packed(static_cast<std::size_t>(width) * height *
                                   channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = packed.data() + static_cast<std::size_t>(
                                       cinfo.output_scanline) *
                                       width * channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_packed(packed, width, height, channels);
}

std::vector<std::uint8_t> encode_jpeg_impl(const ImageBuffer& img,
                                           int quality) {
  const std::vector<std::uint8_t> packed = to_packed(img);
  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  unsigned char* buffer = nullptr;
  unsigned long buffer_size = 0;
  if (setjmp(err.escape)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    fail(Errc::kIoError, std::string("jpeg encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = img.channels;
  cinfo.in_color_space = img.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, std::clamp(quality, 1, 100), TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row =
        const_cast<std::uint8_t*>(packed.data()) +
        static_cast<std::size_t>(cinfo.next_scanline) * img.width *
            img.channels;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::vector<std::uint8_t> out(buffer, buffer + buffer_size);
  std::free(buffer);
  return out;
}

std::string lowercase_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

ImageBuffer decode(std::span<const std::uint8_t> bytes) {
  if (looks_like_png(bytes)) return decode_png(bytes);
  if (looks_like_jpeg(bytes)) return decode_jpeg(bytes);
  fail(Errc::kUnsupportedFormat,
       "input is neither PNG nor JPEG (" + std::to_string(bytes.size()) +
           " bytes)");
}

ImageBuffer decode_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(Errc::kIoError, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (in.bad()) {
    fail(Errc::kIoError, "read error on " + path.string());
  }
  return decode(bytes);
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  return encode_png_impl(img);
}

std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& img, int quality) {
  return encode_jpeg_impl(img, quality);
}

void write_image_file(const std::filesystem::path& path,
                      const ImageBuffer& img, int jpeg_quality) {
  const std::string ext = lowercase_extension(path);
  std::vector<std::uint8_t> bytes;
  if (ext == ".png") {
    bytes = encode_png(img);
  } else if (ext == ".jpg" || ext == ".jpeg") {
    bytes = encode_jpeg(img, jpeg_quality);
  } else {
    fail(Errc::kUnsupportedFormat,
         "unsupported output extension '" + ext + "' for " + path.string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) {
    fail(Errc::kIoError, "write error on " + path.string());
  }
}

}  // namespace restyler
