#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssdaae/image.hpp"
#include "ssdaae/model.hpp"

namespace ssdaae {

// Minibatch of [B x 3 x 64 x 64] images in [0, 1]. Labels, when present, cover
// the whole batch (1 = malignant, 0 = benign).
struct DataBatch {
  FTensor images;
  std::optional<FTensor> labels;  // [B x 1]
  std::vector<std::string> ids;

  std::size_t size() const { return ids.size(); }
  bool labelled() const { return labels.has_value(); }
};

// In-memory image collection at model resolution.
struct Dataset {
  std::vector<std::string> ids;
  std::vector<std::optional<int>> labels;
  FTensor images{Shape{0, kImageChannels, kImageSize, kImageSize}};

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  std::size_t labelled_count() const;

  void append(std::string id, std::optional<int> label, std::span<const Scalar> pixels);
  std::span<const Scalar> pixels(std::size_t i) const;
  Dataset subset(std::span<const std::size_t> indices) const;
  // Throws ProtocolError when the selection mixes labelled and unlabelled images.
  DataBatch batch(std::span<const std::size_t> indices) const;
  // Same images with labels cleared.
  Dataset without_labels() const;
};

// Colour box in normalised chroma space (r = R/(R+G+B), g = G/(R+G+B)) plus a
// minimum mean brightness. Pixels inside the box count as skin.
struct SkinProfile {
  double r_min = 0.36;
  double r_max = 0.66;
  double g_min = 0.22;
  double g_max = 0.40;
  double min_brightness = 0.12;
  bool matches(float r, float g, float b) const;
};

struct PatchRemovalConfig {
  SkinProfile skin;
  std::size_t grid = 32;           // longest side of the downsampled mask
  std::size_t min_rect_pixels = 16;  // minimum accepted rectangle side at full resolution
};

// Axis-aligned rectangle in cell units: rows [top, top + height), cols [left, left + width).
struct Rect {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t area() const { return height * width; }
  bool operator==(const Rect&) const = default;
};

// Binary mask, row-major.
struct Mask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> cells;
  bool at(std::size_t r, std::size_t c) const { return cells[r * width + c] != 0; }
};

Mask skin_mask(const Image& image, const SkinProfile& profile);
// Block-downsamples so the longer side has at most `grid` cells; a cell is set
// only if every pixel it covers is set.
Mask downsample_mask(const Mask& mask, std::size_t grid, std::size_t& block);
// Largest all-ones rectangle (histogram stack method). Ties prefer the smallest
// top, then the smallest left, then the smallest height. Empty Rect if none.
Rect largest_rectangle(const Mask& mask);

struct PatchRemovalResult {
  std::optional<Image> image;  // 64x64 crop; empty when rejected
  Rect rect;                   // chosen rectangle at full resolution
  std::string rejection;       // reason when rejected
};
PatchRemovalResult remove_identifier_patch(const Image& image, const PatchRemovalConfig& config = {});

// Labels CSV with header `id,label`, label in {benign, malignant} (0/1 also accepted).
struct IngestReport {
  Dataset dataset;
  std::vector<std::string> undecodable;
  std::vector<std::string> rejected;  // failed patch removal
};
struct IngestOptions {
  bool remove_patches = false;
  PatchRemovalConfig patch;
};
IngestReport ingest(const std::filesystem::path& image_dir, const std::filesystem::path& labels_csv,
                    const IngestOptions& options = {});

// Original, horizontal flip, vertical flip and one rotation by an angle drawn
// from (-180, 180] degrees (bilinear, reflect padding). Randomness derives from
// (seed, source id). Variant ids are "<id>#orig", "#hflip", "#vflip", "#rot".
Dataset augment(const Dataset& data, std::uint64_t seed);
Image flip_horizontal(const Image& image);
Image flip_vertical(const Image& image);
Image rotate(const Image& image, double degrees);

struct SplitSpec {
  std::size_t n_unlabelled = 7000;
  std::size_t n_labelled_train = 5000;
  std::size_t n_val = 500;
  std::size_t n_test = 500;
  std::uint64_t seed = 0;
};

struct Splits {
  Dataset unlabelled;
  Dataset labelled_train;
  Dataset val;
  Dataset test;
};

// Labelled splits are drawn from labelled images, stratified by class; the
// unlabelled split takes unlabelled images first and then leftover labelled
// images with their labels dropped.
Splits split(const Dataset& data, const SplitSpec& spec);

struct SynthSpec {
  std::size_t n_per_class = 100;
  std::uint64_t seed = 0;
};

// Lesion-like blobs on skin-toned backgrounds. Malignant blobs are more
// asymmetric, have more irregular borders and finer, stronger texture; position,
// size and skin tone are shared nuisance factors. Images alternate benign/malignant.
Dataset synth_generate(const SynthSpec& spec);

// ----- on-disk dataset directory --------------------------------------------
// <dir>/manifest.json plus one <split>.f32 per split. Tensor files hold a header
// of four little-endian uint32 (count, 3, 64, 64) followed by count*3*64*64
// little-endian float32 values, channel-major per image.

void write_tensor_file(const std::filesystem::path& path, const FTensor& images);
FTensor read_tensor_file(const std::filesystem::path& path);

struct DatasetManifestExtras {
  std::vector<std::string> rejected;
  std::vector<std::string> undecodable;
  std::uint64_t seed = 0;
  bool augmented = false;
};

void write_dataset_dir(const std::filesystem::path& dir, const Splits& splits,
                       const DatasetManifestExtras& extras = {});
Splits read_dataset_dir(const std::filesystem::path& dir);

}  // namespace ssdaae
