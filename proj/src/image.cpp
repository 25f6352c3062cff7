#include "ssdaae/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include <jpeglib.h>
#include <png.h>

#include "ssdaae/errors.hpp"

namespace ssdaae {
namespace {

Image from_interleaved(const unsigned char* rgb, std::size_t h, std::size_t w) {
  Image img(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < 3; ++c) img.at(c, y, x) = rgb[(y * w + x) * 3 + c] / 255.0f;
    }
  }
  return img;
}

std::optional<Image> load_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) return std::nullopt;
  png.format = PNG_FORMAT_RGB;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&png);
    return std::nullopt;
  }
  if (png.width == 0 || png.height == 0) return std::nullopt;
  return from_interleaved(buffer.data(), png.height, png.width);
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
};

void jpeg_fail(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

void jpeg_quiet(j_common_ptr) {}

// No C++ objects with non-trivial destructors may live in frames crossed by
// longjmp, so the decoder writes into a caller-owned buffer.
bool decode_jpeg(std::FILE* file, std::vector<unsigned char>& rgb, std::size_t& h, std::size_t& w) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_fail;
  err.mgr.output_message = jpeg_quiet;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  h = cinfo.output_height;
  w = cinfo.output_width;
  rgb.resize(h * w * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

std::optional<Image> load_jpeg(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!file) return std::nullopt;
  std::vector<unsigned char> rgb;
  std::size_t h = 0, w = 0;
  if (!decode_jpeg(file.get(), rgb, h, w) || h == 0 || w == 0) return std::nullopt;
  return from_interleaved(rgb.data(), h, w);
}

}  // namespace

std::optional<Image> load_image(const std::filesystem::path& path) {
  unsigned char sig[8] = {};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    in.read(reinterpret_cast<char*>(sig), sizeof(sig));
    if (in.gcount() < 3) return std::nullopt;
  }
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (std::memcmp(sig, png_sig, 8) == 0) return load_png(path);
  if (sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) return load_jpeg(path);
  return std::nullopt;
}

void save_png(const std::filesystem::path& path, const Image& image) {
  if (image.empty()) throw ShapeError("save_png: empty image");
  std::vector<unsigned char> rgb(image.height * image.width * 3);
  for (std::size_t y = 0; y < image.height; ++y) {
    for (std::size_t x = 0; x < image.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const float v = std::clamp(image.at(c, y, x), 0.0f, 1.0f);
        rgb[(y * image.width + x) * 3 + c] = static_cast<unsigned char>(std::lround(v * 255.0f));
      }
    }
  }
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, rgb.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write " + path.string() + ": " + png.message);
  }
}

Image crop(const Image& image, std::size_t top, std::size_t left, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0 || top + height > image.height || left + width > image.width) {
    throw ShapeError("crop outside image bounds");
  }
  Image out(height, width);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) out.at(c, y, x) = image.at(c, top + y, left + x);
    }
  }
  return out;
}

Image center_square(const Image& image) {
  const std::size_t side = std::min(image.height, image.width);
  return crop(image, (image.height - side) / 2, (image.width - side) / 2, side, side);
}

Image resize_bilinear(const Image& image, std::size_t height, std::size_t width) {
  if (image.empty() || height == 0 || width == 0) throw ShapeError("resize_bilinear: empty extent");
  Image out(height, width);
  const double sy = static_cast<double>(image.height) / static_cast<double>(height);
  const double sx = static_cast<double>(image.width) / static_cast<double>(width);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, double(image.height - 1));
    const auto y0 = static_cast<std::size_t>(fy);
    const std::size_t y1 = std::min(y0 + 1, image.height - 1);
    const double wy = fy - static_cast<double>(y0);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, double(image.width - 1));
      const auto x0 = static_cast<std::size_t>(fx);
      const std::size_t x1 = std::min(x0 + 1, image.width - 1);
      const double wx = fx - static_cast<double>(x0);
      for (std::size_t c = 0; c < 3; ++c) {
        const double top = image.at(c, y0, x0) * (1 - wx) + image.at(c, y0, x1) * wx;
        const double bottom = image.at(c, y1, x0) * (1 - wx) + image.at(c, y1, x1) * wx;
        out.at(c, y, x) = static_cast<float>(top * (1 - wy) + bottom * wy);
      }
    }
  }
  return out;
}

Image to_model_resolution(const Image& image, std::size_t size) {
  return resize_bilinear(center_square(image), size, size);
}

Image tile(const std::vector<Image>& tiles, std::size_t columns) {
  if (tiles.empty() || columns == 0) throw ShapeError("tile: nothing to tile");
  const std::size_t h = tiles.front().height, w = tiles.front().width;
  for (const auto& t : tiles) {
    if (t.height != h || t.width != w) throw ShapeError("tile: images differ in size");
  }
  const std::size_t cols = std::min(columns, tiles.size());
  const std::size_t rows = (tiles.size() + cols - 1) / cols;
  Image out(rows * h, cols * w);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const std::size_t oy = (i / cols) * h, ox = (i % cols) * w;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) out.at(c, oy + y, ox + x) = tiles[i].at(c, y, x);
      }
    }
  }
  return out;
}

}  // namespace ssdaae
