#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace ssdaae {

// RGB image, channel-major planes, values in [0, 1].
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;  // [3 x height x width]

  Image() = default;
  Image(std::size_t h, std::size_t w, float fill = 0.0f) : height(h), width(w), data(3 * h * w, fill) {}

  float& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  float at(std::size_t c, std::size_t y, std::size_t x) const { return data[(c * height + y) * width + x]; }
  bool empty() const { return height == 0 || width == 0; }
};

// Decodes PNG or JPEG (detected from the file signature). Returns nullopt if the
// file cannot be decoded.
std::optional<Image> load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Image& image);

Image crop(const Image& image, std::size_t top, std::size_t left, std::size_t height, std::size_t width);
// Largest centred square.
Image center_square(const Image& image);
// Bilinear with half-pixel centres and edge clamping.
Image resize_bilinear(const Image& image, std::size_t height, std::size_t width);
// Centre square crop followed by a bilinear resize.
Image to_model_resolution(const Image& image, std::size_t size = 64);

// Tiles equally sized images row-major into a grid with `columns` columns.
Image tile(const std::vector<Image>& tiles, std::size_t columns);

}  // namespace ssdaae
